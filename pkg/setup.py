"""Build script for the optional compiled kernels.

The package works without the extension (a pure-Python reference
implementation is selected at import time), so any failure here should
not block installation: build with ``pip install -e . --no-build-isolation``
and check ``cqjudge.kernels.BACKEND`` afterwards.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "cqjudge.kernels._fast",
                ["src/cqjudge/kernels/_fast.pyx"],
                # -ffp-contract=off: no fused multiply-add, so the compiled
                # kernels stay bit-identical with the pure-Python reference.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
