"""Exception types raised across the package.

Everything inherits from :class:`CqjudgeError` so callers (notably the
CLI) can map whole families of failures to exit codes without listing
each class.
"""

from __future__ import annotations


class CqjudgeError(Exception):
    """Base class for all package-specific errors."""


# --- corpus ---------------------------------------------------------------


class CorpusError(CqjudgeError):
    """Problem with corpus input that prevents any rows from loading."""


class MissingColumnError(CorpusError):
    """A schema-mapped column is absent from the input header."""


class MalformedLineError(CorpusError):
    """A JSONL line could not be decoded into a record."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- analysis -------------------------------------------------------------


class EmptyInputError(CqjudgeError):
    """An analysis was asked to run over zero rows."""


class LengthMismatchError(CqjudgeError):
    """Parallel sequences (records/features/labels) differ in length."""


class TooFewSamplesError(CqjudgeError):
    """Fewer than two samples; the statistic is undefined."""


# --- tfidf ----------------------------------------------------------------


class EmptyCorpusError(CqjudgeError):
    """TF-IDF fit called with no documents."""


class EmptyVocabularyError(CqjudgeError):
    """No term survived the document-frequency threshold."""


# --- classifiers ----------------------------------------------------------


class EmptyTrainingSetError(CqjudgeError):
    """A classifier was asked to train on zero samples."""


class DimMismatchError(CqjudgeError):
    """Vector dimensionality differs from what the model was trained on."""


class SingleClassError(CqjudgeError):
    """Training data contains fewer than two distinct labels."""


# --- pipeline -------------------------------------------------------------


class TooFewRecordsError(CqjudgeError):
    """Not enough labeled records to produce a usable split."""


class MissingLabelsError(CqjudgeError):
    """A labeled operation received records without labels."""


class ScalerNotFittedError(CqjudgeError):
    """Feature scaling requested before the scaler was fitted."""


class EmptyTestSetError(CqjudgeError):
    """The evaluation split contains no records."""


class ZeroBaselineError(CqjudgeError):
    """Relative improvement is undefined for a zero baseline score."""


class BadMagicError(CqjudgeError):
    """Model bytes do not start with the expected magic."""


class VersionUnsupportedError(CqjudgeError):
    """Model bundle version is newer than this reader understands."""


class CorruptModelError(CqjudgeError):
    """Model payload failed checksum or structural validation."""


# --- llm ------------------------------------------------------------------


class LlmError(CqjudgeError):
    """Base class for remote-classification failures."""


class LlmAuthError(LlmError):
    """The endpoint rejected our credentials (401/403)."""


class LlmHttpError(LlmError):
    """Non-retryable HTTP failure or retries exhausted."""

    def __init__(self, status: int, message: str = ""):
        super().__init__(f"HTTP {status}: {message}" if message else f"HTTP {status}")
        self.status = status


class LlmTimeoutError(LlmError):
    """The request timed out after all retries."""


class UnparseableLabelError(LlmError):
    """The model reply contained no recognizable label."""
