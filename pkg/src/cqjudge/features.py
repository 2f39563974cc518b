"""The eight per-record features: template, options, sentiment, lengths,
query type, and query-question ROUGE relevance.

Template patterns are a tiny grammar: literal text (matched
case-insensitively, whitespace-tolerant), ``(a|b)`` alternation groups,
and at most one ``____`` slot that must consume a non-empty token span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .corpus import ClarificationRecord
from .textcore import SentimentLexicon, rouge1, score_sentiment, tokenize

SLOT = "____"

_SEGMENT_RE = re.compile(r"____|\([^()|]*(?:\|[^()|]*)+\)")


class QueryType(Enum):
    AMBIGUOUS = "Ambiguous"
    FACETED = "Faceted"
    UNKNOWN = "Unknown"


def _literal(text: str) -> str:
    """Escape literal pattern text; any whitespace run matches any other."""
    return re.sub(r"(?:\\?\s)+", r"\\s+", re.escape(text))


def compile_pattern(pattern: str) -> re.Pattern:
    """Compile a template pattern to an anchored case-insensitive regex.

    The slot becomes the single capture group and must start and end on
    non-space characters. Raises ValueError on more than one slot or on
    an empty alternation branch.
    """
    parts: list[str] = []
    slots = 0
    last = 0
    for m in _SEGMENT_RE.finditer(pattern):
        parts.append(_literal(pattern[last : m.start()]))
        seg = m.group()
        if seg == SLOT:
            slots += 1
            parts.append(r"(\S(?:.*\S)?)")
        else:
            branches = [b.strip() for b in seg[1:-1].split("|")]
            if any(not b for b in branches):
                raise ValueError(f"empty alternation branch in {pattern!r}")
            parts.append("(?:" + "|".join(_literal(b) for b in branches) + ")")
        last = m.end()
    parts.append(_literal(pattern[last:]))
    if slots > 1:
        raise ValueError(f"pattern has {slots} slots, at most one allowed: {pattern!r}")
    return re.compile(r"^\s*" + "".join(parts) + r"\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class TemplatePattern:
    """One registered question template."""

    id: int
    pattern: str
    hint: Optional[QueryType] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "_regex", compile_pattern(self.pattern))
        object.__setattr__(self, "_has_slot", SLOT in self.pattern)

    @property
    def regex(self) -> re.Pattern:
        return self._regex  # type: ignore[attr-defined]

    @property
    def has_slot(self) -> bool:
        return self._has_slot  # type: ignore[attr-defined]


def load_templates(path: str | Path | None = None) -> list[TemplatePattern]:
    """Read a template registry file (``id<TAB>pattern<TAB>hint`` rows).

    Defaults to the bundled seven-template registry. Hint must be
    ``Ambiguous``, ``Faceted``, or ``-`` for none. Ids must be unique.
    """
    if path is None:
        path = Path(__file__).parent / "data" / "templates.tsv"
    templates: list[TemplatePattern] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"bad template row at line {lineno}: {raw!r}")
        tid = int(parts[0])
        if tid in seen:
            raise ValueError(f"duplicate template id {tid} at line {lineno}")
        seen.add(tid)
        hint_text = parts[2].strip() if len(parts) > 2 else "-"
        hint = None if hint_text in ("", "-", "None") else QueryType(hint_text)
        templates.append(TemplatePattern(id=tid, pattern=parts[1], hint=hint))
    if not templates:
        raise ValueError(f"template registry {path} is empty")
    return templates


def match_template(
    question: str, templates: list[TemplatePattern]
) -> Optional[tuple[int, str]]:
    """First template (in registration order) matching the question.

    Returns ``(template_id, slot_text)``; slotless templates yield an
    empty slot. None when nothing matches.
    """
    if not templates:
        raise ValueError("template list is empty")
    for template in templates:
        m = template.regex.match(question)
        if m is not None:
            slot = m.group(1).strip() if template.has_slot else ""
            return template.id, slot
    return None


@dataclass(frozen=True)
class TypingRules:
    """Rules for deriving a query's type from its clarification pane.

    ``hints`` assigns a type directly per matched template; otherwise the
    query is Faceted when at least ``facet_option_fraction`` of a
    non-empty option list contains the full query as a substring
    (case-insensitive), else Unknown.
    """

    hints: dict[int, QueryType] = field(default_factory=dict)
    facet_option_fraction: float = 0.5

    @classmethod
    def from_templates(cls, templates: Iterable[TemplatePattern]) -> "TypingRules":
        return cls(hints={t.id: t.hint for t in templates if t.hint is not None})

    def to_dict(self) -> dict:
        return {
            "hints": {str(tid): qt.value for tid, qt in sorted(self.hints.items())},
            "facet_option_fraction": self.facet_option_fraction,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TypingRules":
        return cls(
            hints={int(tid): QueryType(v) for tid, v in data["hints"].items()},
            facet_option_fraction=float(data["facet_option_fraction"]),
        )


def classify_query_type(
    record: ClarificationRecord,
    template_match: Optional[tuple[int, str]],
    typing_rules: TypingRules,
) -> QueryType:
    if template_match is not None:
        hint = typing_rules.hints.get(template_match[0])
        if hint is not None:
            return hint
    if record.options:
        query = record.query.lower()
        containing = sum(1 for opt in record.options if query in opt.lower())
        if containing / len(record.options) >= typing_rules.facet_option_fraction:
            return QueryType.FACETED
    return QueryType.UNKNOWN


NUMERIC_FEATURES = (
    "question_len_words",
    "query_len_words",
    "n_options",
    "polarity",
    "subjectivity",
    "rouge_precision",
    "rouge_recall",
)


@dataclass(frozen=True)
class FeatureVector:
    question_len_words: int
    query_len_words: int
    n_options: int
    polarity: float
    subjectivity: float
    rouge_precision: float
    rouge_recall: float
    template_id: Optional[int] = None
    query_type: QueryType = QueryType.UNKNOWN

    def __post_init__(self) -> None:
        if self.question_len_words < 0 or self.query_len_words < 0:
            raise ValueError("word counts must be non-negative")
        if not 0 <= self.n_options <= 5:
            raise ValueError(f"n_options out of range: {self.n_options}")
        if not -1.0 <= self.polarity <= 1.0:
            raise ValueError(f"polarity out of range: {self.polarity}")
        for name in ("subjectivity", "rouge_precision", "rouge_recall"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} out of range: {value}")

    def numeric(self, name: str) -> float:
        if name not in NUMERIC_FEATURES:
            raise KeyError(name)
        return float(getattr(self, name))

    def to_dict(self) -> dict:
        return {
            **{name: getattr(self, name) for name in NUMERIC_FEATURES},
            "template_id": self.template_id,
            "query_type": self.query_type.value,
        }


def extract_features(
    record: ClarificationRecord,
    lexicon: SentimentLexicon,
    templates: list[TemplatePattern],
    typing_rules: TypingRules | None = None,
    sentiment_include_options: bool = False,
) -> FeatureVector:
    """Compute the full feature vector for one record.

    Pure function of its inputs: safe to parallelize over records.
    Sentiment is scored on the question alone unless
    ``sentiment_include_options`` is set.
    """
    if typing_rules is None:
        typing_rules = TypingRules.from_templates(templates)
    question_tokens = tokenize(record.question)
    query_tokens = tokenize(record.query)
    sentiment_text = record.question
    if sentiment_include_options:
        sentiment_text = " ".join((record.question, *record.options))
    sentiment = score_sentiment(sentiment_text, lexicon)
    rouge = rouge1(candidate=question_tokens, reference=query_tokens)
    template = match_template(record.question, templates)
    return FeatureVector(
        question_len_words=len(question_tokens),
        query_len_words=len(query_tokens),
        n_options=len(record.options),
        polarity=sentiment.polarity,
        subjectivity=sentiment.subjectivity,
        rouge_precision=rouge.precision,
        rouge_recall=rouge.recall,
        template_id=template[0] if template is not None else None,
        query_type=classify_query_type(record, template, typing_rules),
    )
