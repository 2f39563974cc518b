import json

import pytest

from cqjudge.corpus import (
    LABELS,
    ROW_BAD_LABEL,
    ROW_EMPTY_TEXT,
    ROW_MALFORMED,
    ClarificationRecord,
    SchemaConfig,
    UsefulnessLabel,
    labeled_only,
    load_schema_presets,
    parse_corpus,
    parse_corpus_file,
    read_jsonl,
    read_jsonl_file,
    write_jsonl,
    write_jsonl_file,
    write_row_errors,
)
from cqjudge.errors import MalformedLineError, MissingColumnError

SCHEMA = SchemaConfig(
    query="query",
    question="question",
    label="label",
    options=("option_1", "option_2"),
    label_values={
        "2": UsefulnessLabel.GOOD,
        "1": UsefulnessLabel.FAIR,
        "0": UsefulnessLabel.BAD,
    },
    dataset="unit",
)

HEADER = "query\tquestion\tlabel\toption_1\toption_2"


def parse(lines):
    return parse_corpus("\n".join(lines) + "\n", SCHEMA)


class TestLabels:
    def test_ordinals(self):
        assert UsefulnessLabel.BAD == 0
        assert UsefulnessLabel.FAIR == 1
        assert UsefulnessLabel.GOOD == 2
        assert LABELS == (UsefulnessLabel.BAD, UsefulnessLabel.FAIR, UsefulnessLabel.GOOD)

    def test_text_round_trip(self):
        for label in LABELS:
            assert UsefulnessLabel.from_text(label.text) is label

    def test_from_text_unknown(self):
        with pytest.raises(ValueError):
            UsefulnessLabel.from_text("excellent")


class TestRecordValidation:
    def test_minimal(self):
        rec = ClarificationRecord(id="x", dataset="d", query="q", question="what?")
        assert rec.options == ()
        assert rec.label is None

    def test_blank_query_rejected(self):
        with pytest.raises(ValueError):
            ClarificationRecord(id="x", dataset="d", query="  ", question="what?")

    def test_too_many_options_rejected(self):
        with pytest.raises(ValueError):
            ClarificationRecord(
                id="x", dataset="d", query="q", question="w?",
                options=("a", "b", "c", "d", "e", "f"),
            )


class TestParseCorpus:
    def test_good_rows(self):
        records, errors = parse([
            HEADER,
            "monitor\twhich monitor?\t2\tgaming\toffice",
            "mouse\twhich mouse?\t\t\t",
        ])
        assert errors == []
        assert len(records) == 2
        assert records[0].label is UsefulnessLabel.GOOD
        assert records[0].options == ("gaming", "office")
        assert records[1].label is None
        assert records[1].options == ()
        assert records[0].id == "unit:1" and records[1].id == "unit:2"

    def test_malformed_row_code_and_line(self):
        records, errors = parse([
            HEADER,
            "only_one_field",
            "mouse\twhich mouse?\t1\t\t",
        ])
        assert len(records) == 1
        assert len(errors) == 1
        assert errors[0].code == ROW_MALFORMED
        assert errors[0].line == 2

    def test_empty_text_code(self):
        _, errors = parse([HEADER, "\twhich?\t2\t\t"])
        assert [e.code for e in errors] == [ROW_EMPTY_TEXT]

    def test_bad_label_code(self):
        _, errors = parse([HEADER, "monitor\twhich?\t9\t\t"])
        assert [e.code for e in errors] == [ROW_BAD_LABEL]
        assert "9" in errors[0].message

    def test_blank_lines_skipped_and_line_numbers_physical(self):
        records, errors = parse([
            HEADER,
            "",
            "monitor\twhich monitor?\t2\t\t",
            "",
            "bad_row",
        ])
        assert len(records) == 1
        assert errors[0].line == 5

    def test_row_count_preserved(self):
        lines = [HEADER]
        for i in range(30):
            if i % 3 == 0:
                lines.append(f"q{i}\tw{i}?\t2\t\t")
            elif i % 3 == 1:
                lines.append("broken")
            else:
                lines.append(f"q{i}\tw{i}?\tzzz\t\t")
        records, errors = parse(lines)
        assert len(records) + len(errors) == 30

    def test_missing_column(self):
        with pytest.raises(MissingColumnError, match="label"):
            parse_corpus("query\tquestion\toption_1\toption_2\n", SCHEMA)

    def test_extras_capture_unmapped_columns(self):
        schema = SchemaConfig(
            query="query", question="question", label="label",
            label_values={"2": UsefulnessLabel.GOOD}, dataset="unit",
        )
        records, _ = parse_corpus(
            "query\tquestion\tlabel\timpressions\nmonitor\twhich?\t2\thigh\n",
            schema,
        )
        assert records[0].extras == {"impressions": "high"}

    def test_headerless_uses_column_indices(self):
        schema = SchemaConfig(
            query=0, question=1, label=2,
            label_values={"2": UsefulnessLabel.GOOD}, has_header=False, dataset="unit",
        )
        records, errors = parse_corpus("monitor\twhich?\t2\n", schema)
        assert not errors
        assert records[0].query == "monitor"

    def test_id_column_used_when_present(self):
        schema = SchemaConfig(
            query="query", question="question", label="label",
            id_column="id", label_values={"2": UsefulnessLabel.GOOD}, dataset="unit",
        )
        records, _ = parse_corpus(
            "id\tquery\tquestion\tlabel\nrow-7\tmonitor\twhich?\t2\n",
            schema,
        )
        assert records[0].id == "row-7"


class TestPresets:
    def test_bundled_presets(self):
        presets = load_schema_presets()
        assert set(presets) >= {"mimics-manual", "mimics-duo", "sample"}
        manual = presets["mimics-manual"]
        assert manual.label_values["2"] is UsefulnessLabel.GOOD
        assert manual.label_values["0"] is UsefulnessLabel.BAD
        duo = presets["mimics-duo"]
        assert duo.label_values["1"] is UsefulnessLabel.BAD
        assert duo.label_values["3"] is UsefulnessLabel.FAIR
        assert duo.label_values["5"] is UsefulnessLabel.GOOD

    def test_fixture_parses_clean(self, sample_records):
        assert len(sample_records) == 50
        labeled = labeled_only(sample_records)
        assert 0 < len(labeled) < 50


class TestJsonl:
    def test_round_trip(self, sample_records):
        assert read_jsonl(write_jsonl(sample_records)) == sample_records

    def test_file_round_trip(self, tmp_path, sample_records):
        path = tmp_path / "corpus.jsonl"
        write_jsonl_file(path, sample_records)
        assert read_jsonl_file(path) == sample_records

    def test_key_order_stable(self, sample_records):
        first = write_jsonl(sample_records).decode("utf-8").splitlines()[0]
        assert list(json.loads(first)) == [
            "id", "dataset", "query", "question", "options", "label", "extras",
        ]

    def test_malformed_line_reports_number(self):
        good = json.dumps({
            "id": "a", "dataset": "d", "query": "q", "question": "w?",
            "options": [], "label": None, "extras": {},
        })
        with pytest.raises(MalformedLineError) as exc:
            read_jsonl(good + "\n{not json\n")
        assert exc.value.line == 2

    def test_unknown_label_is_malformed(self):
        bad = json.dumps({
            "id": "a", "dataset": "d", "query": "q", "question": "w?",
            "options": [], "label": "Superb", "extras": {},
        })
        with pytest.raises(MalformedLineError) as exc:
            read_jsonl(bad)
        assert exc.value.line == 1

    def test_error_sidecar_format(self, tmp_path):
        _, errors = parse([HEADER, "broken"])
        out = tmp_path / "errors.tsv"
        write_row_errors(out, errors)
        line = out.read_text(encoding="utf-8").splitlines()[0]
        parts = line.split("\t")
        assert parts[0] == "2" and parts[1] == ROW_MALFORMED


class TestParseFile:
    def test_crlf_and_bom_tolerated(self, tmp_path):
        path = tmp_path / "corpus.tsv"
        body = HEADER + "\r\n" + "monitor\twhich monitor?\t2\t\t\r\n"
        path.write_bytes(b"\xef\xbb\xbf" + body.encode("utf-8"))
        records, errors = parse_corpus_file(path, SCHEMA)
        assert not errors
        assert records[0].query == "monitor"
