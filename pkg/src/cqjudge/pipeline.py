"""End-to-end training and evaluation over canonical corpora.

A trained model travels as a :class:`ModelBundle`: the classifier plus
every resource needed to rebuild its inputs (TF-IDF model, length
scaler, lexicon, templates, typing rules, split spec). Loading a bundle
therefore reproduces predictions bit-identically with no access to the
training process.

Two input modes exist everywhere:

* ``org``  — TF-IDF over "query [SEP] question [SEP] options".
* ``enr``  — the org vector extended by four feature dimensions
  [question_len_scaled, rouge_precision, polarity_shifted, subjectivity].
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import classifiers, tfidf
from .classifiers import (
    AnyModel,
    DtcConfig,
    RfcConfig,
    SvcConfig,
    model_from_dict,
    model_kind,
    predict,
    train_dtc,
    train_rfc,
    train_svc,
)
from .corpus import LABELS, ClarificationRecord, UsefulnessLabel
from .errors import (
    BadMagicError,
    CorruptModelError,
    EmptyTestSetError,
    MissingLabelsError,
    ScalerNotFittedError,
    TooFewRecordsError,
    VersionUnsupportedError,
    ZeroBaselineError,
)
from .features import FeatureVector, TemplatePattern, TypingRules, extract_features
from .textcore import SentimentLexicon
from .tfidf import SparseVector, TfidfConfig, TfidfModel, compose_text

MODES = ("org", "enr")
MAGIC = b"CQJ1"
BUNDLE_VERSION = 1
ENRICHED_DIMS = 4


# --- split -------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0,1)")

    def to_dict(self) -> dict:
        return {
            "train_fraction": self.train_fraction,
            "seed": self.seed,
            "stratified": self.stratified,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SplitSpec":
        return cls(
            train_fraction=float(data["train_fraction"]),
            seed=int(data["seed"]),
            stratified=bool(data["stratified"]),
        )


def split(
    records: Sequence[ClarificationRecord], spec: SplitSpec
) -> tuple[list[ClarificationRecord], list[ClarificationRecord]]:
    """Seeded shuffle-and-partition into train/test.

    Train size is round(train_fraction * N) clamped so neither side is
    empty. Stratified mode assigns per-label train quotas by largest
    remainder (ties to the lower label ordinal), which keeps per-label
    proportions within one record of the global fraction.
    """
    n = len(records)
    if n < 5:
        raise TooFewRecordsError(f"need at least 5 labeled records, got {n}")
    unlabeled = sum(1 for r in records if r.label is None)
    if unlabeled:
        raise MissingLabelsError(f"{unlabeled} records have no label; split is label-aware")
    n_train = int(np.floor(spec.train_fraction * n + 0.5))
    n_train = max(1, min(n - 1, n_train))
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n)
    if not spec.stratified:
        train_idx = set(int(i) for i in order[:n_train])
        train = [records[i] for i in range(n) if i in train_idx]
        test = [records[i] for i in range(n) if i not in train_idx]
        return train, test
    counts = {label: 0 for label in LABELS}
    for r in records:
        counts[r.label] += 1
    quota = {}
    remainders = []
    base_total = 0
    for label in LABELS:
        exact = counts[label] * n_train / n
        quota[label] = int(exact)
        base_total += quota[label]
        remainders.append((-(exact - int(exact)), int(label)))
    remainders.sort()
    for _, ordinal in remainders[: n_train - base_total]:
        quota[UsefulnessLabel(ordinal)] += 1
    taken = {label: 0 for label in LABELS}
    in_train = [False] * n
    for i in order:
        label = records[i].label
        if taken[label] < quota[label]:
            taken[label] += 1
            in_train[i] = True
    train = [records[i] for i in range(n) if in_train[i]]
    test = [records[i] for i in range(n) if not in_train[i]]
    return train, test


# --- input construction -------------------------------------------------------


@dataclass(frozen=True)
class FeatureScaler:
    """Question-length scaling fitted on the train split only."""

    max_question_len: int

    def scale_len(self, n_words: int) -> float:
        return min(1.0, n_words / self.max_question_len)

    def to_dict(self) -> dict:
        return {"max_question_len": self.max_question_len}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureScaler":
        return cls(max_question_len=int(data["max_question_len"]))


def fit_scaler(features: Sequence[FeatureVector]) -> FeatureScaler:
    longest = max((f.question_len_words for f in features), default=0)
    return FeatureScaler(max_question_len=max(1, longest))


def record_text(record: ClarificationRecord) -> str:
    return compose_text(record.query, record.question, record.options)


def enrichment_values(features: FeatureVector, scaler: FeatureScaler) -> list[float]:
    """The four enrichment dimensions, in their fixed order."""
    return [
        scaler.scale_len(features.question_len_words),
        features.rouge_precision,
        (features.polarity + 1.0) / 2.0,
        features.subjectivity,
    ]


def build_input(
    record: ClarificationRecord,
    mode: str,
    tfidf_model: TfidfModel,
    scaler: Optional[FeatureScaler] = None,
    features: Optional[FeatureVector] = None,
) -> SparseVector:
    """Vectorize one record for classification; enr appends 4 dimensions."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    vec = tfidf.transform(tfidf_model, record_text(record))
    if mode == "org":
        return vec
    if scaler is None:
        raise ScalerNotFittedError("enr mode requires a scaler fitted on the train split")
    if features is None:
        raise ValueError("enr mode requires the record's FeatureVector")
    return vec.extended(enrichment_values(features, scaler))


# --- metrics ------------------------------------------------------------------


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


@dataclass(frozen=True)
class EvalReport:
    model: str
    mode: str
    seed: int
    n_test: int
    per_class: dict[str, dict[str, float]]
    macro: dict[str, float]
    weighted: dict[str, float]
    micro_f1: float
    accuracy: float
    confusion: tuple[tuple[int, ...], ...]
    config: dict = field(default_factory=dict)
    improvement_pct: Optional[float] = None
    baseline: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "mode": self.mode,
            "seed": self.seed,
            "n_test": self.n_test,
            "per_class": self.per_class,
            "macro": self.macro,
            "weighted": self.weighted,
            "micro_f1": self.micro_f1,
            "accuracy": self.accuracy,
            "confusion": [list(row) for row in self.confusion],
            "config": self.config,
            "improvement_pct": self.improvement_pct,
            "baseline": self.baseline,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EvalReport":
        return cls(
            model=str(data["model"]),
            mode=str(data["mode"]),
            seed=int(data["seed"]),
            n_test=int(data["n_test"]),
            per_class={k: dict(v) for k, v in data["per_class"].items()},
            macro=dict(data["macro"]),
            weighted=dict(data["weighted"]),
            micro_f1=float(data["micro_f1"]),
            accuracy=float(data["accuracy"]),
            confusion=tuple(tuple(int(v) for v in row) for row in data["confusion"]),
            config=dict(data.get("config", {})),
            improvement_pct=data.get("improvement_pct"),
            baseline=data.get("baseline"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def report_from_confusion(
    confusion: Sequence[Sequence[int]],
    *,
    model: str = "none",
    mode: str = "org",
    seed: int = 0,
    config: Optional[dict] = None,
) -> EvalReport:
    """Build the full metric set from a 3x3 confusion matrix
    (rows = truth Bad/Fair/Good, columns = predictions)."""
    n = sum(sum(row) for row in confusion)
    if n == 0:
        raise EmptyTestSetError("confusion matrix is empty")
    per_class: dict[str, dict[str, float]] = {}
    macro_p = macro_r = macro_f = 0.0
    weighted_p = weighted_r = weighted_f = 0.0
    correct = 0
    for label in LABELS:
        k = int(label)
        tp = confusion[k][k]
        fp = sum(confusion[r][k] for r in range(len(LABELS))) - tp
        fn = sum(confusion[k]) - tp
        correct += tp
        precision, recall, f1 = _prf(tp, fp, fn)
        support = sum(confusion[k])
        per_class[label.text] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": support,
        }
        macro_p += precision / len(LABELS)
        macro_r += recall / len(LABELS)
        macro_f += f1 / len(LABELS)
        weighted_p += precision * support / n
        weighted_r += recall * support / n
        weighted_f += f1 * support / n
    accuracy = correct / n
    return EvalReport(
        model=model,
        mode=mode,
        seed=seed,
        n_test=n,
        per_class=per_class,
        macro={"precision": macro_p, "recall": macro_r, "f1": macro_f},
        weighted={"precision": weighted_p, "recall": weighted_r, "f1": weighted_f},
        micro_f1=accuracy,  # single-label multiclass: micro-F1 == accuracy
        accuracy=accuracy,
        confusion=tuple(tuple(int(v) for v in row) for row in confusion),
        config=config or {},
    )


def improvement_pct(org_f1: float, enr_f1: float) -> float:
    """Relative macro-F1 change in percent, rounded to 1 decimal."""
    if org_f1 == 0.0:
        raise ZeroBaselineError("baseline F1 is zero; relative improvement undefined")
    return round(100.0 * (enr_f1 - org_f1) / org_f1, 1)


def improvement(org: EvalReport, enr: EvalReport) -> float:
    return improvement_pct(org.macro["f1"], enr.macro["f1"])


# --- model bundle -------------------------------------------------------------


@dataclass(frozen=True)
class ModelBundle:
    """A classifier plus everything needed to rebuild its inputs."""

    model: AnyModel
    mode: str
    tfidf_model: TfidfModel
    scaler: Optional[FeatureScaler]
    lexicon: SentimentLexicon
    templates: tuple[TemplatePattern, ...]
    typing_rules: TypingRules
    split_spec: SplitSpec
    sentiment_include_options: bool = False

    @property
    def kind(self) -> str:
        return model_kind(self.model)

    def config_snapshot(self) -> dict:
        return {
            "model": self.kind,
            "mode": self.mode,
            "model_config": self.model.config.to_dict(),
            "tfidf_config": self.tfidf_model.config.to_dict(),
            "split": self.split_spec.to_dict(),
            "sentiment_include_options": self.sentiment_include_options,
        }

    def featurize(self, record: ClarificationRecord) -> FeatureVector:
        return extract_features(
            record,
            self.lexicon,
            list(self.templates),
            self.typing_rules,
            sentiment_include_options=self.sentiment_include_options,
        )

    def vectorize(self, record: ClarificationRecord) -> SparseVector:
        features = self.featurize(record) if self.mode == "enr" else None
        return build_input(record, self.mode, self.tfidf_model, self.scaler, features)


def save_model(bundle: ModelBundle) -> bytes:
    """CQJ1 container: magic, u32 version, u64 payload length, u32 crc32,
    zlib-compressed canonical JSON payload."""
    payload = {
        "model": bundle.model.to_dict(),
        "mode": bundle.mode,
        "tfidf": bundle.tfidf_model.to_dict(),
        "scaler": bundle.scaler.to_dict() if bundle.scaler is not None else None,
        "lexicon": bundle.lexicon.to_dict(),
        "templates": [
            {"id": t.id, "pattern": t.pattern, "hint": t.hint.value if t.hint else None}
            for t in bundle.templates
        ],
        "typing_rules": bundle.typing_rules.to_dict(),
        "split": bundle.split_spec.to_dict(),
        "sentiment_include_options": bundle.sentiment_include_options,
    }
    blob = zlib.compress(
        json.dumps(payload, ensure_ascii=False, sort_keys=True).encode("utf-8"), 9
    )
    header = MAGIC + struct.pack("<IQI", BUNDLE_VERSION, len(blob), zlib.crc32(blob))
    return header + blob


def load_model(data: bytes) -> ModelBundle:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"expected magic {MAGIC!r}")
    if len(data) < 20:
        raise CorruptModelError("truncated header")
    version, length, crc = struct.unpack("<IQI", data[4:20])
    if version > BUNDLE_VERSION:
        raise VersionUnsupportedError(f"bundle version {version} > supported {BUNDLE_VERSION}")
    blob = data[20:]
    if len(blob) != length:
        raise CorruptModelError(f"payload length {len(blob)} != declared {length}")
    if zlib.crc32(blob) != crc:
        raise CorruptModelError("payload checksum mismatch")
    try:
        payload = json.loads(zlib.decompress(blob).decode("utf-8"))
        from .features import QueryType  # local to avoid cycle at module load

        templates = tuple(
            TemplatePattern(
                id=int(t["id"]),
                pattern=t["pattern"],
                hint=QueryType(t["hint"]) if t["hint"] else None,
            )
            for t in payload["templates"]
        )
        scaler = payload["scaler"]
        return ModelBundle(
            model=model_from_dict(payload["model"]),
            mode=payload["mode"],
            tfidf_model=TfidfModel.from_dict(payload["tfidf"]),
            scaler=FeatureScaler.from_dict(scaler) if scaler is not None else None,
            lexicon=SentimentLexicon.from_dict(payload["lexicon"]),
            templates=templates,
            typing_rules=TypingRules.from_dict(payload["typing_rules"]),
            split_spec=SplitSpec.from_dict(payload["split"]),
            sentiment_include_options=bool(payload["sentiment_include_options"]),
        )
    except (ValueError, KeyError, zlib.error) as exc:
        raise CorruptModelError(f"cannot decode payload: {exc}") from exc


def save_model_file(path, bundle: ModelBundle) -> None:
    from pathlib import Path

    Path(path).write_bytes(save_model(bundle))


def load_model_file(path) -> ModelBundle:
    from pathlib import Path

    return load_model(Path(path).read_bytes())


# --- training / evaluation -----------------------------------------------------


def _train_classifier(kind: str, X, y, model_config):
    if kind == "dtc":
        return train_dtc(X, y, model_config or DtcConfig())
    if kind == "rfc":
        return train_rfc(X, y, model_config or RfcConfig())
    if kind == "svc":
        return train_svc(X, y, model_config or SvcConfig())
    raise ValueError(f"unknown model kind {kind!r}; expected dtc, rfc, or svc")


def train_bundle(
    records: Sequence[ClarificationRecord],
    kind: str,
    mode: str,
    *,
    lexicon: SentimentLexicon,
    templates: Sequence[TemplatePattern],
    typing_rules: Optional[TypingRules] = None,
    split_spec: Optional[SplitSpec] = None,
    tfidf_config: Optional[TfidfConfig] = None,
    model_config=None,
    sentiment_include_options: bool = False,
) -> ModelBundle:
    """Split, fit TF-IDF and scaler on the train side only, train the
    classifier, and wrap everything into a self-contained bundle."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if typing_rules is None:
        typing_rules = TypingRules.from_templates(templates)
    if split_spec is None:
        split_spec = SplitSpec()
    labeled = [r for r in records if r.label is not None]
    train, _ = split(labeled, split_spec)
    tfidf_model = tfidf.fit([record_text(r) for r in train], tfidf_config or TfidfConfig())
    scaler = None
    feats = None
    if mode == "enr":
        feats = [
            extract_features(
                r,
                lexicon,
                list(templates),
                typing_rules,
                sentiment_include_options=sentiment_include_options,
            )
            for r in train
        ]
        scaler = fit_scaler(feats)
    X = [
        build_input(r, mode, tfidf_model, scaler, feats[i] if feats is not None else None)
        for i, r in enumerate(train)
    ]
    y = [r.label for r in train]
    model = _train_classifier(kind, X, y, model_config)
    return ModelBundle(
        model=model,
        mode=mode,
        tfidf_model=tfidf_model,
        scaler=scaler,
        lexicon=lexicon,
        templates=tuple(templates),
        typing_rules=typing_rules,
        split_spec=split_spec,
        sentiment_include_options=sentiment_include_options,
    )


def evaluate(bundle: ModelBundle, records: Sequence[ClarificationRecord]) -> EvalReport:
    """Re-derive the bundle's split on the same corpus and score the test side.

    Must be called with the corpus the bundle was trained on; the split
    spec inside the bundle reproduces the exact train/test partition.
    """
    labeled = [r for r in records if r.label is not None]
    _, test = split(labeled, bundle.split_spec)
    return evaluate_on(bundle, test)


def evaluate_on(bundle: ModelBundle, test: Sequence[ClarificationRecord]) -> EvalReport:
    """Score the bundle on an explicit, fully labeled test set."""
    if not test:
        raise EmptyTestSetError("no test records")
    if any(r.label is None for r in test):
        raise MissingLabelsError("test records must be labeled")
    confusion = [[0] * len(LABELS) for _ in LABELS]
    for record in test:
        predicted, _ = predict(bundle.model, bundle.vectorize(record))
        confusion[int(record.label)][int(predicted)] += 1
    return report_from_confusion(
        confusion,
        model=bundle.kind,
        mode=bundle.mode,
        seed=bundle.split_spec.seed,
        config=bundle.config_snapshot(),
    )


def predict_records(
    bundle: ModelBundle, records: Sequence[ClarificationRecord]
) -> list[tuple[str, UsefulnessLabel, list[float]]]:
    out = []
    for record in records:
        label, scores = predict(bundle.model, bundle.vectorize(record))
        out.append((record.id, label, scores))
    return out


# --- neural export --------------------------------------------------------------


def feat_suffix(features: FeatureVector) -> str:
    return (
        f"length={features.question_len_words} "
        f"rougep={features.rouge_precision:.4f} "
        f"sentiment={features.polarity:.4f} "
        f"subjectivity={features.subjectivity:.4f}"
    )


def export_for_neural(
    records: Sequence[ClarificationRecord],
    features: Sequence[FeatureVector],
    mode: str = "enr",
) -> bytes:
    """JSONL for the neural harness: org text, optional enriched twin, label.

    ``enriched_text`` differs from ``text`` only by the " [FEAT] ..."
    suffix; in org mode the field is omitted entirely.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if len(records) != len(features):
        raise ValueError(f"{len(records)} records vs {len(features)} feature vectors")
    lines = []
    for record, feats in zip(records, features):
        if record.label is None:
            raise MissingLabelsError(f"record {record.id} has no label")
        obj: dict = {"text": record_text(record)}
        if mode == "enr":
            obj["enriched_text"] = f"{obj['text']} [FEAT] {feat_suffix(feats)}"
        obj["label"] = record.label.text
        lines.append(json.dumps(obj, ensure_ascii=False))
    return ("\n".join(lines) + "\n").encode("utf-8")
