"""From-scratch TF-IDF vectorizer over the shared tokenizer.

Vocabulary order is lexicographic, idf is the smoothed
``ln((1+N)/(1+df)) + 1`` variant, and vectors are L2-normalized by
default. The fitted model is immutable; transform never mutates state,
so concurrent use is safe.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EmptyCorpusError, EmptyVocabularyError
from .textcore import tokenize

SEP = "[SEP]"


@dataclass(frozen=True)
class TfidfConfig:
    min_df: int = 1
    sublinear_tf: bool = False
    l2_normalize: bool = True

    def __post_init__(self) -> None:
        if self.min_df < 1:
            raise ValueError(f"min_df must be >= 1, got {self.min_df}")

    def to_dict(self) -> dict:
        return {
            "min_df": self.min_df,
            "sublinear_tf": self.sublinear_tf,
            "l2_normalize": self.l2_normalize,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TfidfConfig":
        return cls(
            min_df=int(data["min_df"]),
            sublinear_tf=bool(data["sublinear_tf"]),
            l2_normalize=bool(data["l2_normalize"]),
        )


@dataclass(frozen=True)
class SparseVector:
    """Immutable sparse vector: strictly increasing indices, non-zero values."""

    dim: int
    entries: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        prev = -1
        for index, value in self.entries:
            if index <= prev or index >= self.dim:
                raise ValueError(f"bad sparse index {index} (dim={self.dim})")
            if value == 0.0:
                raise ValueError(f"explicit zero at index {index}")
            prev = index

    @classmethod
    def from_dense(cls, values: Sequence[float]) -> "SparseVector":
        entries = tuple((i, float(v)) for i, v in enumerate(values) if float(v) != 0.0)
        return cls(dim=len(values), entries=entries)

    def norm(self) -> float:
        return math.sqrt(sum(v * v for _, v in self.entries))

    def to_dense(self) -> list[float]:
        dense = [0.0] * self.dim
        for index, value in self.entries:
            dense[index] = value
        return dense

    def extended(self, extra: Sequence[float]) -> "SparseVector":
        """New vector with ``extra`` values appended as trailing dimensions."""
        tail = tuple(
            (self.dim + i, float(v)) for i, v in enumerate(extra) if float(v) != 0.0
        )
        return SparseVector(dim=self.dim + len(extra), entries=self.entries + tail)


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: dict[str, int]
    idf: tuple[float, ...]
    config: TfidfConfig = field(default_factory=TfidfConfig)

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def to_dict(self) -> dict:
        terms = sorted(self.vocabulary, key=self.vocabulary.get)
        return {
            "terms": terms,
            "idf": list(self.idf),
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TfidfModel":
        return cls(
            vocabulary={t: i for i, t in enumerate(data["terms"])},
            idf=tuple(float(v) for v in data["idf"]),
            config=TfidfConfig.from_dict(data["config"]),
        )


def fit(documents: Sequence[str], config: TfidfConfig | None = None) -> TfidfModel:
    """Fit vocabulary and idf weights on a document collection.

    Terms with document frequency below ``min_df`` are dropped; surviving
    terms are indexed in lexicographic order, so document order never
    matters.
    """
    if config is None:
        config = TfidfConfig()
    if not documents:
        raise EmptyCorpusError("cannot fit TF-IDF on zero documents")
    df: Counter[str] = Counter()
    for doc in documents:
        df.update(set(tokenize(doc)))
    terms = sorted(t for t, count in df.items() if count >= config.min_df)
    if not terms:
        raise EmptyVocabularyError(
            f"no term reaches min_df={config.min_df} over {len(documents)} documents"
        )
    n = len(documents)
    idf = tuple(math.log((1.0 + n) / (1.0 + df[t])) + 1.0 for t in terms)
    return TfidfModel(vocabulary={t: i for i, t in enumerate(terms)}, idf=idf, config=config)


def transform(model: TfidfModel, text: str) -> SparseVector:
    """Vectorize one text; out-of-vocabulary tokens are ignored."""
    counts: Counter[int] = Counter()
    for token in tokenize(text):
        index = model.vocabulary.get(token)
        if index is not None:
            counts[index] += 1
    entries = []
    for index in sorted(counts):
        tf = float(counts[index])
        if model.config.sublinear_tf:
            tf = 1.0 + math.log(tf)
        entries.append((index, tf * model.idf[index]))
    if model.config.l2_normalize and entries:
        norm = math.sqrt(sum(v * v for _, v in entries))
        entries = [(i, v / norm) for i, v in entries]
    return SparseVector(dim=model.dim, entries=tuple(entries))


def compose_text(query: str, question: str, options: Iterable[str]) -> str:
    """The classification input text: query [SEP] question [SEP] options."""
    return f"{query} {SEP} {question} {SEP} {' '.join(options)}"
