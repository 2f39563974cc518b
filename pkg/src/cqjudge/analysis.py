"""Aggregate usefulness analyses over labeled corpora.

All rates are frequency-normalized within their group:
``rate(group, label) = count(group, label) / count(group)``, so a group's
three rates always sum to 1 and duplicating every record changes nothing.
Tables are emitted as JSON (machines), Markdown (humans), and CSV (plots).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import LABELS, ClarificationRecord, UsefulnessLabel
from .errors import EmptyInputError, LengthMismatchError, MissingLabelsError, TooFewSamplesError
from .features import NUMERIC_FEATURES, FeatureVector, TemplatePattern, match_template

GROUP_KEYS = (
    "template_id",
    "n_options",
    "query_len_bucket",
    "question_len_bucket",
    "query_type",
)


@dataclass(frozen=True)
class Bucket:
    """Inclusive word-count range; ``hi=None`` means unbounded above."""

    label: str
    lo: int
    hi: Optional[int]


# Fig-2-style word-count bins; lengths of 0 fall into the first bucket.
QUERY_LEN_BUCKETS = (
    Bucket("1", 0, 1),
    Bucket("2", 2, 2),
    Bucket("3", 3, 3),
    Bucket("4", 4, 4),
    Bucket("5", 5, 5),
    Bucket("6+", 6, None),
)
QUESTION_LEN_BUCKETS = (
    Bucket("<=4", 0, 4),
    Bucket("5-7", 5, 7),
    Bucket("8-10", 8, 10),
    Bucket("11+", 11, None),
)


def bucket_label(n: int, buckets: Sequence[Bucket]) -> Optional[str]:
    for b in buckets:
        if n >= b.lo and (b.hi is None or n <= b.hi):
            return b.label
    return None


@dataclass(frozen=True)
class RateRow:
    group: str
    support: int
    rates: dict[str, float]  # label text -> rate


@dataclass(frozen=True)
class RateTable:
    group_key: str
    rows: tuple[RateRow, ...]

    def to_json_dict(self) -> dict:
        return {
            "group_key": self.group_key,
            "rows": [
                {"group": r.group, "support": r.support, "rates": r.rates} for r in self.rows
            ],
        }

    def to_markdown(self) -> str:
        lines = [
            f"| {self.group_key} | support | Bad | Fair | Good |",
            "| --- | --- | --- | --- | --- |",
        ]
        for r in self.rows:
            lines.append(
                f"| {r.group} | {r.support} | {r.rates['Bad']:.4f} "
                f"| {r.rates['Fair']:.4f} | {r.rates['Good']:.4f} |"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = [f"{self.group_key},support,bad,fair,good"]
        for r in self.rows:
            lines.append(
                f"{r.group},{r.support},{r.rates['Bad']:.6f},"
                f"{r.rates['Fair']:.6f},{r.rates['Good']:.6f}"
            )
        return "\n".join(lines) + "\n"


def _check_labeled(records: Sequence[ClarificationRecord]) -> None:
    if not records:
        raise EmptyInputError("no records to analyze")
    unlabeled = sum(1 for r in records if r.label is None)
    if unlabeled:
        raise MissingLabelsError(f"{unlabeled} records have no usefulness label")


def _rates(counts: Sequence[int]) -> dict[str, float]:
    support = sum(counts)
    return {label.text: counts[label] / support for label in LABELS}


def usefulness_rates(
    records: Sequence[ClarificationRecord],
    features: Sequence[FeatureVector],
    group_key: str,
    *,
    query_len_buckets: Sequence[Bucket] = QUERY_LEN_BUCKETS,
    question_len_buckets: Sequence[Bucket] = QUESTION_LEN_BUCKETS,
) -> RateTable:
    """Per-group label rates for one grouping of the corpus.

    Groups with zero support are omitted; rows are ordered by group value
    (bucket tables keep their bucket order, unmatched templates sort last
    as "none").
    """
    if group_key not in GROUP_KEYS:
        raise ValueError(f"unknown group key {group_key!r}; expected one of {GROUP_KEYS}")
    _check_labeled(records)
    if len(records) != len(features):
        raise LengthMismatchError(f"{len(records)} records vs {len(features)} feature vectors")

    def group_of(feat: FeatureVector) -> Optional[tuple]:
        # returns (sort_key, display) or None to skip the record
        if group_key == "template_id":
            if feat.template_id is None:
                return ((1, 0), "none")
            return ((0, feat.template_id), str(feat.template_id))
        if group_key == "n_options":
            return ((0, feat.n_options), str(feat.n_options))
        if group_key == "query_type":
            return ((0, feat.query_type.value), feat.query_type.value)
        if group_key == "query_len_bucket":
            buckets = query_len_buckets
            n = feat.query_len_words
        else:
            buckets = question_len_buckets
            n = feat.question_len_words
        for i, b in enumerate(buckets):
            if n >= b.lo and (b.hi is None or n <= b.hi):
                return ((0, i), b.label)
        return None

    counts: dict[tuple, list[int]] = {}
    display: dict[tuple, str] = {}
    for record, feat in zip(records, features):
        group = group_of(feat)
        if group is None:
            continue
        key, label = group
        display[key] = label
        counts.setdefault(key, [0, 0, 0])[record.label] += 1
    rows = tuple(
        RateRow(group=display[key], support=sum(counts[key]), rates=_rates(counts[key]))
        for key in sorted(counts)
    )
    return RateTable(group_key=group_key, rows=rows)


@dataclass(frozen=True)
class TemplateRateRow:
    template_id: int
    pattern: str
    per_dataset: dict[str, RateRow]  # dataset -> support + rates
    combined: float  # sum of Good rates across datasets with support


@dataclass(frozen=True)
class TemplateRateTable:
    datasets: tuple[str, ...]
    rows: tuple[TemplateRateRow, ...]

    def to_json_dict(self) -> dict:
        return {
            "datasets": list(self.datasets),
            "rows": [
                {
                    "template_id": r.template_id,
                    "pattern": r.pattern,
                    "per_dataset": {
                        ds: {"support": row.support, "rates": row.rates}
                        for ds, row in r.per_dataset.items()
                    },
                    "combined": r.combined,
                }
                for r in self.rows
            ],
        }

    def to_markdown(self) -> str:
        head = "| template |"
        rule = "| --- |"
        for ds in self.datasets:
            head += f" {ds} Good | {ds} Fair |"
            rule += " --- | --- |"
        head += " Comb. |"
        rule += " --- |"
        lines = [head, rule]
        for r in self.rows:
            cells = [r.pattern]
            for ds in self.datasets:
                row = r.per_dataset.get(ds)
                if row is None:
                    cells += ["-", "-"]
                else:
                    cells += [f"{row.rates['Good']:.4f}", f"{row.rates['Fair']:.4f}"]
            cells.append(f"{r.combined:.4f}")
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        cols = ["template_id", "pattern"]
        for ds in self.datasets:
            cols += [f"{ds}_support", f"{ds}_bad", f"{ds}_fair", f"{ds}_good"]
        cols.append("combined")
        lines = [",".join(cols)]
        for r in self.rows:
            cells = [str(r.template_id), '"' + r.pattern.replace('"', '""') + '"']
            for ds in self.datasets:
                row = r.per_dataset.get(ds)
                if row is None:
                    cells += ["0", "", "", ""]
                else:
                    cells += [
                        str(row.support),
                        f"{row.rates['Bad']:.6f}",
                        f"{row.rates['Fair']:.6f}",
                        f"{row.rates['Good']:.6f}",
                    ]
            cells.append(f"{r.combined:.6f}")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def template_usefulness(
    records: Sequence[ClarificationRecord], templates: list[TemplatePattern]
) -> TemplateRateTable:
    """Label rates per matched template, split by dataset.

    ``combined`` sums the Good rates over all datasets where the template
    has support; rows are sorted by combined score descending (ties by
    template id). Records matching no template are not represented.
    """
    _check_labeled(records)
    counts: dict[tuple[int, str], list[int]] = {}
    for record in records:
        m = match_template(record.question, templates)
        if m is None:
            continue
        counts.setdefault((m[0], record.dataset), [0, 0, 0])[record.label] += 1
    datasets = tuple(sorted({ds for _, ds in counts}))
    by_template: dict[int, dict[str, RateRow]] = {}
    for (tid, ds), c in counts.items():
        by_template.setdefault(tid, {})[ds] = RateRow(group=ds, support=sum(c), rates=_rates(c))
    pattern_of = {t.id: t.pattern for t in templates}
    rows = [
        TemplateRateRow(
            template_id=tid,
            pattern=pattern_of[tid],
            per_dataset=per_ds,
            combined=sum(row.rates["Good"] for row in per_ds.values()),
        )
        for tid, per_ds in by_template.items()
    ]
    rows.sort(key=lambda r: (-r.combined, r.template_id))
    return TemplateRateTable(datasets=datasets, rows=tuple(rows))


@dataclass(frozen=True)
class FeatureCorrelation:
    feature: str
    pearson: Optional[float]  # None when undefined (constant variable)
    spearman: Optional[float]
    n: int


@dataclass(frozen=True)
class CorrelationReport:
    rows: tuple[FeatureCorrelation, ...]

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {"feature": r.feature, "pearson": r.pearson, "spearman": r.spearman, "n": r.n}
                for r in self.rows
            ]
        }

    def to_markdown(self) -> str:
        lines = ["| feature | pearson | spearman | n |", "| --- | --- | --- | --- |"]
        for r in self.rows:
            p = "undefined" if r.pearson is None else f"{r.pearson:+.4f}"
            s = "undefined" if r.spearman is None else f"{r.spearman:+.4f}"
            lines.append(f"| {r.feature} | {p} | {s} | {r.n} |")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["feature,pearson,spearman,n"]
        for r in self.rows:
            p = "" if r.pearson is None else f"{r.pearson:.6f}"
            s = "" if r.spearman is None else f"{r.spearman:.6f}"
            lines.append(f"{r.feature},{p},{s},{r.n}")
        return "\n".join(lines) + "\n"


def pearson(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Pearson correlation; None when either variable is constant."""
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = syy = sxy = 0.0
    for x, y in zip(xs, ys):
        dx = x - mx
        dy = y - my
        sxx += dx * dx
        syy += dy * dy
        sxy += dx * dy
    if sxx == 0.0 or syy == 0.0:
        return None
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _ranks(xs: Sequence[float]) -> list[float]:
    """Average ranks (1-based), ties sharing the mean of their positions."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Spearman rank correlation (Pearson over average ranks)."""
    return pearson(_ranks(xs), _ranks(ys))


def correlate(
    features: Sequence[FeatureVector], labels: Sequence[UsefulnessLabel]
) -> CorrelationReport:
    """Correlate every numeric feature with the ordinal label (Bad=0..Good=2)."""
    if len(features) != len(labels):
        raise LengthMismatchError(f"{len(features)} features vs {len(labels)} labels")
    if len(features) < 2:
        raise TooFewSamplesError("need at least 2 samples to correlate")
    ys = [float(int(label)) for label in labels]
    rows = []
    for name in NUMERIC_FEATURES:
        xs = [feat.numeric(name) for feat in features]
        rows.append(
            FeatureCorrelation(
                feature=name,
                pearson=pearson(xs, ys),
                spearman=spearman(xs, ys),
                n=len(xs),
            )
        )
    return CorrelationReport(rows=tuple(rows))


def report_to_json(report) -> str:
    """Stable JSON text for any of the analysis report objects."""
    return json.dumps(report.to_json_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n"
