"""Deterministic text primitives: tokenizer, lexicon sentiment, ROUGE-1.

Everything here is pure and dependency-free so the same numbers come out
on every platform. The tokenizer is intentionally crude (lowercase,
alphanumeric runs); all downstream features are defined over its output.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

# Unicode alphanumerics, underscore excluded: "Wi-Fi router's range"
# -> [wi, fi, router, s, range]
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Negators/intensifiers look back this many tokens.
_SENTIMENT_WINDOW = 2


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it on runs of non-alphanumerics."""
    return _TOKEN_RE.findall(text.lower())


class SentimentScore(NamedTuple):
    polarity: float
    subjectivity: float


class RougeScore(NamedTuple):
    precision: float
    recall: float


@dataclass(frozen=True)
class SentimentLexicon:
    """Word-level sentiment table plus negator/intensifier word sets.

    ``entries`` maps a token to ``(polarity, subjectivity)`` with polarity
    in [-1, 1] and subjectivity in [0, 1]. Negators flip the sign of a
    scored word when they appear in the two preceding tokens; intensifiers
    in the same window multiply its polarity.
    """

    entries: dict[str, tuple[float, float]]
    negators: frozenset[str] = frozenset()
    intensifiers: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for word, (pol, subj) in self.entries.items():
            if not -1.0 <= pol <= 1.0:
                raise ValueError(f"polarity out of range for {word!r}: {pol}")
            if not 0.0 <= subj <= 1.0:
                raise ValueError(f"subjectivity out of range for {word!r}: {subj}")

    @classmethod
    def from_file(cls, path: str | Path) -> "SentimentLexicon":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_text(cls, text: str) -> "SentimentLexicon":
        """Parse the TSV lexicon format.

        Data rows are ``word<TAB>polarity<TAB>subjectivity``. Lines starting
        with ``#`` and blank lines are skipped. Directive rows declare the
        modifier sets::

            !negator<TAB>not
            !intensifier<TAB>very<TAB>1.5
        """
        entries: dict[str, tuple[float, float]] = {}
        negators: set[str] = set()
        intensifiers: dict[str, float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split("\t")]
            try:
                if parts[0] == "!negator":
                    negators.add(parts[1].lower())
                elif parts[0] == "!intensifier":
                    intensifiers[parts[1].lower()] = float(parts[2])
                else:
                    word, pol, subj = parts[0], float(parts[1]), float(parts[2])
                    entries[word.lower()] = (pol, subj)
            except (IndexError, ValueError) as exc:
                raise ValueError(f"bad lexicon row at line {lineno}: {raw!r}") from exc
        return cls(entries=entries, negators=frozenset(negators), intensifiers=intensifiers)

    def to_dict(self) -> dict:
        return {
            "entries": {w: [p, s] for w, (p, s) in sorted(self.entries.items())},
            "negators": sorted(self.negators),
            "intensifiers": {w: m for w, m in sorted(self.intensifiers.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SentimentLexicon":
        return cls(
            entries={w: (float(p), float(s)) for w, (p, s) in data["entries"].items()},
            negators=frozenset(data["negators"]),
            intensifiers={w: float(m) for w, m in data["intensifiers"].items()},
        )


def score_sentiment(text: str, lexicon: SentimentLexicon) -> SentimentScore:
    """Average lexicon polarity/subjectivity over matched tokens.

    A negator within the two tokens before a match flips its polarity;
    each intensifier in that window multiplies it. Polarity is clamped to
    [-1, 1] after averaging. Texts with no matches score (0.0, 0.0).
    """
    tokens = tokenize(text)
    polarities: list[float] = []
    subjectivities: list[float] = []
    for i, tok in enumerate(tokens):
        entry = lexicon.entries.get(tok)
        if entry is None:
            continue
        pol, subj = entry
        window = tokens[max(0, i - _SENTIMENT_WINDOW) : i]
        if any(w in lexicon.negators for w in window):
            pol = -pol
        for w in window:
            mult = lexicon.intensifiers.get(w)
            if mult is not None:
                pol *= mult
        polarities.append(pol)
        subjectivities.append(subj)
    if not polarities:
        return SentimentScore(0.0, 0.0)
    polarity = sum(polarities) / len(polarities)
    polarity = max(-1.0, min(1.0, polarity))
    return SentimentScore(polarity, sum(subjectivities) / len(subjectivities))


def rouge1(candidate: Iterable[str], reference: Iterable[str]) -> RougeScore:
    """Unigram overlap precision/recall between two token sequences.

    Overlap counts each token at most ``min(count_cand, count_ref)`` times.
    An empty candidate yields precision 0.0, an empty reference recall 0.0.
    """
    cand = list(candidate)
    ref = list(reference)
    overlap = sum((Counter(cand) & Counter(ref)).values())
    precision = overlap / len(cand) if cand else 0.0
    recall = overlap / len(ref) if ref else 0.0
    return RougeScore(precision, recall)
