"""Corpus ingestion: schema-mapped TSV files in, canonical JSONL out.

Source datasets ship as tab-separated files whose column names differ
between releases, so loading is driven by a :class:`SchemaConfig` that
binds logical fields (query, question, options, label) to concrete
columns. Rows that cannot be salvaged are reported as :class:`RowError`
values rather than exceptions; the caller decides whether to write them
to an errors sidecar or abort.

The canonical on-disk form is UTF-8 JSONL with one object per record and
the fixed key set ``id, dataset, query, question, options, label,
extras``. Parsing a file and writing it back yields byte-identical JSONL.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import MalformedLineError, MissingColumnError

MAX_OPTIONS = 5

# RowError codes
ROW_MALFORMED = "MalformedRow"
ROW_EMPTY_TEXT = "EmptyQueryOrQuestion"
ROW_BAD_LABEL = "UnmappableLabel"


class UsefulnessLabel(IntEnum):
    """Three-level usefulness judgment; ordinal values are fixed."""

    BAD = 0
    FAIR = 1
    GOOD = 2

    @property
    def text(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_text(cls, value: str) -> "UsefulnessLabel":
        try:
            return cls[value.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown usefulness label: {value!r}") from None


LABELS = (UsefulnessLabel.BAD, UsefulnessLabel.FAIR, UsefulnessLabel.GOOD)


@dataclass(frozen=True)
class ClarificationRecord:
    """One (query, clarifying question) pair with optional judgment.

    ``label`` is None for unjudged pairs; those rows are kept through
    ingestion and analysis but excluded from supervised training.
    ``extras`` carries source columns that the schema did not map,
    verbatim, keyed by their header names.
    """

    id: str
    dataset: str
    query: str
    question: str
    options: tuple[str, ...] = ()
    label: UsefulnessLabel | None = None
    extras: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.query.strip():
            raise ValueError(f"record {self.id}: empty query")
        if not self.question.strip():
            raise ValueError(f"record {self.id}: empty question")
        if len(self.options) > MAX_OPTIONS:
            raise ValueError(f"record {self.id}: more than {MAX_OPTIONS} options")
        if any(not opt.strip() for opt in self.options):
            raise ValueError(f"record {self.id}: blank option")


@dataclass(frozen=True)
class RowError:
    """A skipped input row: 1-based physical line, stable code, detail."""

    line: int
    code: str
    message: str


@dataclass(frozen=True)
class SchemaConfig:
    """Binding from logical record fields to source-file columns.

    ``query``/``question``/``label`` name single columns; ``options``
    lists up to five columns read in order. With ``has_header=False`` the
    same fields hold 0-based column indices instead of names. ``id_column``
    is optional; absent ids are synthesized as ``<dataset>:<row>``.
    """

    query: str | int
    question: str | int
    label: str | int
    options: tuple[str | int, ...] = ()
    id_column: str | int | None = None
    label_values: Mapping[str, UsefulnessLabel] = field(default_factory=dict)
    delimiter: str = "\t"
    has_header: bool = True
    dataset: str = "other"

    def __post_init__(self) -> None:
        if len(self.options) > MAX_OPTIONS:
            raise ValueError(f"schema maps more than {MAX_OPTIONS} option columns")

    @classmethod
    def from_dict(cls, data: Mapping) -> "SchemaConfig":
        label_values = {
            str(k): UsefulnessLabel.from_text(str(v))
            for k, v in data.get("label_values", {}).items()
        }
        return cls(
            query=data["query"],
            question=data["question"],
            label=data["label"],
            options=tuple(data.get("options", ())),
            id_column=data.get("id_column"),
            label_values=label_values,
            delimiter=data.get("delimiter", "\t"),
            has_header=bool(data.get("has_header", True)),
            dataset=data.get("dataset", "other"),
        )


def load_schema_presets(path: str | Path | None = None) -> dict[str, SchemaConfig]:
    """Load named schema presets from a JSON file (bundled one by default)."""
    if path is None:
        path = Path(__file__).parent / "data" / "schemas.json"
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return {name: SchemaConfig.from_dict(cfg) for name, cfg in raw.items()}


def _resolve_columns(schema: SchemaConfig, header: Sequence[str] | None) -> dict:
    """Map every schema field to a column index, or raise MissingColumnError."""

    def lookup(ref: str | int, role: str) -> int:
        if isinstance(ref, int):
            return ref
        if header is None:
            raise MissingColumnError(
                f"schema names column {ref!r} for {role} but the file has no header"
            )
        try:
            return header.index(ref)
        except ValueError:
            raise MissingColumnError(f"column {ref!r} ({role}) not found in header") from None

    resolved = {
        "query": lookup(schema.query, "query"),
        "question": lookup(schema.question, "question"),
        "label": lookup(schema.label, "label"),
        "options": tuple(lookup(ref, "option") for ref in schema.options),
        "id": lookup(schema.id_column, "id") if schema.id_column is not None else None,
    }
    used = {resolved["query"], resolved["question"], resolved["label"], *resolved["options"]}
    if resolved["id"] is not None:
        used.add(resolved["id"])
    resolved["extras"] = (
        [(i, name) for i, name in enumerate(header) if i not in used] if header else []
    )
    return resolved


def parse_corpus(
    data: bytes | str, schema: SchemaConfig
) -> tuple[list[ClarificationRecord], list[RowError]]:
    """Parse delimited source text into records plus per-row errors.

    Unsalvageable rows (too few columns, blank query/question, label text
    not covered by the schema's value map) become RowErrors carrying their
    1-based physical line number. An empty label cell is not an error: the
    record is kept with ``label=None``.
    """
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data.lstrip("﻿")
    reader = csv.reader(io.StringIO(text), delimiter=schema.delimiter, quoting=csv.QUOTE_NONE)
    header: list[str] | None = None
    if schema.has_header:
        header = next(reader, None)
        if header is None:
            raise MissingColumnError("input is empty; expected a header row")
        header = [h.strip() for h in header]
    cols = _resolve_columns(schema, header)

    max_index = max(
        [cols["query"], cols["question"], cols["label"], *cols["options"]]
        + ([cols["id"]] if cols["id"] is not None else [])
    )
    records: list[ClarificationRecord] = []
    errors: list[RowError] = []
    ordinal = 0
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        ordinal += 1
        if len(row) <= max_index:
            errors.append(
                RowError(line, ROW_MALFORMED, f"expected at least {max_index + 1} columns, got {len(row)}")
            )
            continue
        query = row[cols["query"]].strip()
        question = row[cols["question"]].strip()
        if not query or not question:
            errors.append(RowError(line, ROW_EMPTY_TEXT, "query or question is blank"))
            continue
        raw_label = row[cols["label"]].strip()
        label: UsefulnessLabel | None = None
        if raw_label:
            label = schema.label_values.get(raw_label)
            if label is None:
                errors.append(RowError(line, ROW_BAD_LABEL, f"label value {raw_label!r} not in schema map"))
                continue
        options = tuple(v for v in (row[i].strip() for i in cols["options"]) if v)
        rid = row[cols["id"]].strip() if cols["id"] is not None else ""
        if not rid:
            rid = f"{schema.dataset}:{ordinal}"
        extras = {
            name: row[i] for i, name in cols["extras"] if i < len(row) and row[i] != ""
        }
        records.append(
            ClarificationRecord(
                id=rid,
                dataset=schema.dataset,
                query=query,
                question=question,
                options=options,
                label=label,
                extras=extras,
            )
        )
    return records, errors


def parse_corpus_file(
    path: str | Path, schema: SchemaConfig
) -> tuple[list[ClarificationRecord], list[RowError]]:
    return parse_corpus(Path(path).read_bytes(), schema)


def write_row_errors(path: str | Path, errors: Iterable[RowError]) -> None:
    """Write the errors sidecar: ``line<TAB>code<TAB>message`` per row."""
    lines = [f"{e.line}\t{e.code}\t{e.message}" for e in errors]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def _record_to_obj(record: ClarificationRecord) -> dict:
    return {
        "id": record.id,
        "dataset": record.dataset,
        "query": record.query,
        "question": record.question,
        "options": list(record.options),
        "label": record.label.text if record.label is not None else None,
        "extras": record.extras,
    }


def _record_from_obj(obj: dict) -> ClarificationRecord:
    label = obj.get("label")
    return ClarificationRecord(
        id=str(obj["id"]),
        dataset=str(obj.get("dataset", "other")),
        query=str(obj["query"]),
        question=str(obj["question"]),
        options=tuple(str(o) for o in obj.get("options", [])),
        label=UsefulnessLabel.from_text(label) if label is not None else None,
        extras={str(k): str(v) for k, v in obj.get("extras", {}).items()},
    )


def write_jsonl(records: Iterable[ClarificationRecord]) -> bytes:
    """Serialize records to canonical JSONL (fixed key order, UTF-8)."""
    out = io.StringIO()
    for record in records:
        out.write(json.dumps(_record_to_obj(record), ensure_ascii=False))
        out.write("\n")
    return out.getvalue().encode("utf-8")


def read_jsonl(data: bytes | str) -> list[ClarificationRecord]:
    """Parse canonical JSONL; raises MalformedLineError with the line number."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    records: list[ClarificationRecord] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("line is not a JSON object")
            records.append(_record_from_obj(obj))
        except (ValueError, KeyError) as exc:
            raise MalformedLineError(lineno, str(exc)) from exc
    return records


def write_jsonl_file(path: str | Path, records: Iterable[ClarificationRecord]) -> None:
    Path(path).write_bytes(write_jsonl(records))


def read_jsonl_file(path: str | Path) -> list[ClarificationRecord]:
    return read_jsonl(Path(path).read_bytes())


def labeled_only(records: Iterable[ClarificationRecord]) -> list[ClarificationRecord]:
    """Records that carry a usefulness judgment."""
    return [r for r in records if r.label is not None]
