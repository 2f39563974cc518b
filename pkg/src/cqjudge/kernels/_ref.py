"""Pure-Python reference kernels.

These are the slow twins of ``_fast.pyx``. Both implementations follow
the same floating-point operation order (sequential scalar arithmetic,
no fused multiply-add, no pairwise summation), so their outputs are
bit-identical; the parity tests assert exact equality, not tolerance.
"""

from __future__ import annotations

import numpy as np


def scan_best_split(values: np.ndarray, labels: np.ndarray, n_classes: int = 3):
    """Best Gini split over one pre-sorted feature column.

    ``values`` must be ascending; ``labels`` are class indices aligned
    with it. Candidate thresholds are midpoints between consecutive
    distinct values (snapped down to the left value if rounding would
    land on the right one). Returns ``(weighted_gini, threshold, found)``
    where ``found`` is False for a constant column. Ties on the weighted
    Gini keep the lowest threshold.
    """
    vals = [float(v) for v in values]
    labs = [int(c) for c in labels]
    n = len(vals)
    left = [0] * n_classes
    right = [0] * n_classes
    for c in labs:
        right[c] += 1
    best_gini = 0.0
    best_thr = 0.0
    found = False
    n_left = 0
    for i in range(n - 1):
        c = labs[i]
        left[c] += 1
        right[c] -= 1
        n_left += 1
        if vals[i + 1] > vals[i]:
            thr = 0.5 * (vals[i] + vals[i + 1])
            if thr >= vals[i + 1]:
                thr = vals[i]
            n_right = n - n_left
            sum_left = 0.0
            sum_right = 0.0
            for k in range(n_classes):
                p = left[k] / n_left
                sum_left += p * p
                q = right[k] / n_right
                sum_right += q * q
            gini = (n_left * (1.0 - sum_left) + n_right * (1.0 - sum_right)) / n
            if not found or gini < best_gini:
                best_gini = gini
                best_thr = thr
                found = True
    return best_gini, best_thr, found


def svc_dual_cd(
    data: np.ndarray,
    indices: np.ndarray,
    indptr: np.ndarray,
    n_cols: int,
    ybin: np.ndarray,
    c_reg: float,
    tol: float,
    max_iter: int,
):
    """Dual coordinate descent for one binary L2-regularized squared-hinge SVM.

    The problem matrix is CSR (``data``/``indices``/``indptr``) and
    ``ybin`` holds +-1 targets. Examples are visited in fixed order every
    epoch. Returns ``(w, n_iter, converged)`` with convergence declared
    when the largest projected gradient magnitude of an epoch drops
    below ``tol``.
    """
    dat = [float(v) for v in data]
    idx = [int(v) for v in indices]
    ptr = [int(v) for v in indptr]
    y = [float(v) for v in ybin]
    n = len(ptr) - 1
    diag = 0.5 / c_reg
    qd = [0.0] * n
    for i in range(n):
        acc = 0.0
        for j in range(ptr[i], ptr[i + 1]):
            acc += dat[j] * dat[j]
        qd[i] = acc + diag
    w = [0.0] * n_cols
    alpha = [0.0] * n
    n_iter = 0
    converged = False
    for epoch in range(max_iter):
        n_iter = epoch + 1
        max_violation = 0.0
        for i in range(n):
            start = ptr[i]
            end = ptr[i + 1]
            dot = 0.0
            for j in range(start, end):
                dot += w[idx[j]] * dat[j]
            grad = y[i] * dot - 1.0 + alpha[i] * diag
            if alpha[i] == 0.0:
                pg = grad if grad < 0.0 else 0.0
            else:
                pg = grad
            violation = -pg if pg < 0.0 else pg
            if violation > max_violation:
                max_violation = violation
            if pg != 0.0:
                new_alpha = alpha[i] - grad / qd[i]
                if new_alpha < 0.0:
                    new_alpha = 0.0
                step = (new_alpha - alpha[i]) * y[i]
                if step != 0.0:
                    alpha[i] = new_alpha
                    for j in range(start, end):
                        w[idx[j]] += step * dat[j]
        if max_violation < tol:
            converged = True
            break
    return np.array(w, dtype=np.float64), n_iter, converged
