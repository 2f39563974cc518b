"""Release-gate checks with time budgets.

Each test covers one gate criterion end to end and prints a single
``[PASS]``/``[FAIL]`` line (with its runtime) with capture suspended, so
the verdicts can be read off any pytest log regardless of capture
settings. A test fails if its assertions fail or if it blows its budget.

Run just this gate with ``pytest tests/test_acceptance.py``.
"""

import math
import os
import random
import shutil
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from cqjudge.analysis import template_usefulness, usefulness_rates
from cqjudge.classifiers import (
    RfcConfig,
    predict_batch,
    train_dtc,
    train_rfc,
    train_svc,
)
from cqjudge.cli import main
from cqjudge.corpus import ClarificationRecord, UsefulnessLabel
from cqjudge.features import FeatureVector, QueryType, load_templates
from cqjudge.llm import build_prompt, parse_label
from cqjudge.pipeline import (
    evaluate,
    improvement_pct,
    report_from_confusion,
    train_bundle,
)
from cqjudge.synthetic import default_lexicon, feature_label_corpus
from cqjudge.textcore import rouge1, tokenize
from cqjudge.tfidf import SparseVector, TfidfConfig, fit, transform

GOOD, FAIR, BAD = UsefulnessLabel.GOOD, UsefulnessLabel.FAIR, UsefulnessLabel.BAD
FIXTURE_TSV = Path(__file__).resolve().parent.parent / "fixtures" / "sample_corpus.tsv"


@pytest.fixture
def criterion(capfd):
    """One gate check: times the block, prints its verdict to the real tty."""

    @contextmanager
    def check(name: str, budget_s: float):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException:
            with capfd.disabled():
                print(f"[FAIL] {name}", flush=True)
            raise
        elapsed = time.perf_counter() - t0
        ok = elapsed < budget_s
        status = "PASS" if ok else "FAIL"
        with capfd.disabled():
            print(
                f"[{status}] {name} ({elapsed:.2f}s, budget {budget_s:g}s)",
                flush=True,
            )
        assert ok, f"{name}: {elapsed:.2f}s exceeded the {budget_s:g}s budget"

    return check


def rec(label, question="What are you trying to do?", dataset="d", n=[0]):
    n[0] += 1
    return ClarificationRecord(
        id=f"{dataset}:{n[0]}", dataset=dataset, query="q", question=question, label=label,
    )


def feat(question_len=5):
    return FeatureVector(
        question_len_words=question_len,
        query_len_words=1,
        n_options=0,
        polarity=0.0,
        subjectivity=0.0,
        rouge_precision=0.0,
        rouge_recall=0.0,
        template_id=None,
        query_type=QueryType.UNKNOWN,
    )


def test_01_length_bucket_rates_are_group_normalized(criterion):
    # 60 Good of 100 long questions vs 15 Good of 50 short ones: the
    # per-group rates must come out 0.6 and 0.3 exactly, unskewed by the
    # groups' different sizes.
    with criterion("group-normalized length-bucket rates", 1.0):
        records, features = [], []
        for i in range(100):
            records.append(rec(GOOD if i < 60 else BAD))
            features.append(feat(question_len=12))
        for i in range(50):
            records.append(rec(GOOD if i < 15 else BAD))
            features.append(feat(question_len=3))
        table = usefulness_rates(records, features, "question_len_bucket")
        rows = {r.group: r for r in table.rows}
        assert rows["11+"].rates["Good"] == 0.6
        assert rows["<=4"].rates["Good"] == 0.3


def test_02_template_table_rates_and_combined_score(criterion):
    # Constructed per-template counts across two datasets; rates must match
    # hand fractions to 1e-9, rows sort by combined Good score, and the
    # headline combined value reproduces 148/158 + 3/4 = 1.6867.
    with criterion("template rate table on a constructed corpus", 1.0):
        templates = load_templates()
        t2 = "What do you want to know about crown?"
        t5 = "What are you trying to do?"
        records = []
        for label, count in ((GOOD, 148), (FAIR, 7), (BAD, 3)):
            records += [rec(label, question=t2, dataset="mimics") for _ in range(count)]
        for label, count in ((GOOD, 3), (FAIR, 1)):
            records += [rec(label, question=t2, dataset="duo") for _ in range(count)]
        for label, count in ((GOOD, 2), (BAD, 6)):
            records += [rec(label, question=t5, dataset="mimics") for _ in range(count)]
        records.append(rec(GOOD, question="Is this the crown you meant?"))  # no template

        table = template_usefulness(records, templates)
        assert [r.template_id for r in table.rows] == [2, 5]
        top = table.rows[0]
        assert top.per_dataset["mimics"].rates["Good"] == pytest.approx(148 / 158, abs=1e-9)
        assert top.per_dataset["mimics"].rates["Fair"] == pytest.approx(7 / 158, abs=1e-9)
        assert top.per_dataset["duo"].rates["Good"] == pytest.approx(3 / 4, abs=1e-9)
        assert top.combined == pytest.approx(148 / 158 + 3 / 4, abs=1e-9)
        assert round(top.combined, 4) == 1.6867
        assert table.rows[1].combined == pytest.approx(0.25, abs=1e-9)
        assert " 1.6867 |" in table.to_markdown()


def test_03_improvement_arithmetic(criterion):
    with criterion("relative-improvement arithmetic", 1.0):
        assert improvement_pct(0.5397, 0.9205) == 70.6
        assert improvement_pct(0.6578, 0.8842) == 34.4


def test_04_rouge_oracle_and_duality(criterion):
    with criterion("unigram overlap oracle + duality", 5.0):
        scores = rouge1(
            tokenize("What do you want to know about headache?"), tokenize("headache")
        )
        assert scores == (0.125, 1.0)
        rng = random.Random(404)
        vocab = [f"w{i}" for i in range(9)]
        for _ in range(1000):
            a = [rng.choice(vocab) for _ in range(rng.randrange(0, 9))]
            b = [rng.choice(vocab) for _ in range(rng.randrange(0, 9))]
            assert rouge1(a, b).precision == rouge1(b, a).recall
            assert rouge1(a, b).recall == rouge1(b, a).precision


def _dense_reference(documents, text, config):
    vocab_df = {}
    for doc in documents:
        for tok in set(tokenize(doc)):
            vocab_df[tok] = vocab_df.get(tok, 0) + 1
    terms = sorted(t for t, c in vocab_df.items() if c >= config.min_df)
    n = len(documents)
    idf = [math.log((1 + n) / (1 + vocab_df[t])) + 1 for t in terms]
    index = {t: i for i, t in enumerate(terms)}
    dense = [0.0] * len(terms)
    for tok in tokenize(text):
        if tok in index:
            dense[index[tok]] += 1.0
    for i, count in enumerate(dense):
        if count > 0:
            tf = 1.0 + math.log(count) if config.sublinear_tf else count
            dense[i] = tf * idf[i]
    if config.l2_normalize:
        norm = math.sqrt(sum(v * v for v in dense))
        if norm > 0:
            dense = [v / norm for v in dense]
    return dense


def test_05_tfidf_matches_dense_reference(criterion):
    with criterion("tf-idf vs dense reference on 50 random corpora", 10.0):
        rng = random.Random(2026)
        vocab = [f"w{i}" for i in range(15)]
        for trial in range(50):
            documents = [
                " ".join(rng.choice(vocab) for _ in range(rng.randrange(1, 13)))
                for _ in range(rng.randrange(1, 21))
            ]
            config = TfidfConfig(
                sublinear_tf=trial % 2 == 1, l2_normalize=trial % 4 < 2
            )
            model = fit(documents, config)
            text = " ".join(
                rng.choice(vocab + ["zz"]) for _ in range(rng.randrange(0, 11))
            )
            got = transform(model, text).to_dense()
            want = _dense_reference(documents, text, config)
            assert len(got) == len(want)
            for g, w in zip(got, want):
                assert g == pytest.approx(w, abs=1e-9)


def _consistent_dataset(rng, n, dim):
    seen, X, y = set(), [], []
    while len(X) < n:
        row = tuple(round(v, 3) for v in rng.uniform(-2, 2, size=dim))
        if row not in seen:
            seen.add(row)
            X.append(SparseVector.from_dense(list(row)))
    y = [UsefulnessLabel(int(v)) for v in rng.integers(0, 3, size=n)]
    return X, y


def test_06_classifier_sanity(criterion):
    with criterion("classifier sanity (tree purity, 1-tree forest, svc blobs)", 30.0):
        rng = np.random.default_rng(11)
        for _ in range(10):
            X, y = _consistent_dataset(rng, 20, 3)
            assert predict_batch(train_dtc(X, y), X) == y

        rng = np.random.default_rng(101)
        plain = RfcConfig(n_trees=1, bootstrap=False, features_per_split=3)
        for _ in range(20):
            X, y = _consistent_dataset(rng, int(rng.integers(15, 31)), 3)
            assert predict_batch(train_rfc(X, y, plain), X) == predict_batch(
                train_dtc(X, y), X
            )

        rng = np.random.default_rng(3)
        centers = {BAD: (0.0, 0.0), FAIR: (4.0, 0.0), GOOD: (0.0, 4.0)}
        X, y = [], []
        for label, (cx, cy) in centers.items():
            for _ in range(15):
                X.append(
                    SparseVector.from_dense(
                        [cx + rng.normal(0, 0.4), cy + rng.normal(0, 0.4)]
                    )
                )
                y.append(label)
        model = train_svc(X, y)
        assert predict_batch(model, X) == y


def test_07_enrichment_lifts_macro_f1(criterion):
    # Labels depend on question length and polarity only: invisible to the
    # bag-of-words input, direct in the appended feature dims. The enriched
    # forest must beat the plain one by at least 10 macro-F1 points.
    with criterion("enrichment lifts macro-F1 by >= 0.10", 60.0):
        records = feature_label_corpus(n=1000, seed=7)
        kwargs = dict(
            lexicon=default_lexicon(),
            templates=load_templates(),
            model_config=RfcConfig(n_trees=20, seed=0),
        )
        org = evaluate(train_bundle(records, "rfc", "org", **kwargs), records)
        enr = evaluate(train_bundle(records, "rfc", "enr", **kwargs), records)
        assert enr.macro["f1"] - org.macro["f1"] >= 0.10


def test_08_metrics_from_fixed_confusion(criterion):
    with criterion("macro-F1 oracle on a fixed confusion matrix", 1.0):
        report = report_from_confusion([[2, 0, 0], [0, 1, 1], [0, 0, 2]])
        assert report.macro["f1"] == pytest.approx(0.8222, abs=1e-4)
        assert report.accuracy == pytest.approx(5 / 6, abs=1e-9)


GOLDEN_SYSTEM = (
    "In a mixed-initiative conversational search system, a user's query might be "
    "ambiguous, and the system can ask a clarifying question to clarify the user's "
    "information need. In a real system, user satisfaction with the clarifying "
    "question is a very important task that should be considered. The prediction is "
    "a classification with three classes including: (1) Good, (2) Fair, and (3) Bad. "
    "In summary, this indicates that a Good clarifying question should accurately "
    "address and clarify different intents of the query. It should be fluent and "
    "grammatically correct. If a question fails in satisfying any of these factors "
    "but still is an acceptable clarifying question, it should be given a Fair "
    "label. Otherwise, a Bad label should be assigned to the question."
)
GOLDEN_USER = (
    "Given the details about the satisfaction of a clarifying question, predict "
    "only the label for the following query, clarifying question, and the options "
    "for the clarification response: Query: `headache', clarifying question: "
    "`What do you want to know about headache?'."
)


def test_09_prompt_golden_and_label_round_trip(criterion):
    with criterion("prompt golden text + label round-trip", 1.0):
        record = ClarificationRecord(
            id="h:1",
            dataset="t",
            query="headache",
            question="What do you want to know about headache?",
            label=GOOD,
        )
        pair = build_prompt(record)
        assert pair.system == GOLDEN_SYSTEM
        assert pair.user == GOLDEN_USER
        for label in (BAD, FAIR, GOOD):
            assert parse_label(label.text) == label


def _run_chain(workdir: Path) -> dict[str, bytes]:
    """Run the full command chain on the bundled sample corpus in workdir."""
    shutil.copy(FIXTURE_TSV, workdir / "sample.tsv")
    steps = [
        ["ingest", "--input", "sample.tsv", "--schema", "sample",
         "--out", "corpus.jsonl", "--errors", "rows.errors.tsv"],
        ["analyze", "rates", "--corpus", "corpus.jsonl", "--group", "n_options",
         "--out", "rates.md"],
        ["analyze", "templates", "--corpus", "corpus.jsonl", "--out", "templates.md"],
        ["analyze", "correlation", "--corpus", "corpus.jsonl", "--out", "corr.json"],
        ["features", "--corpus", "corpus.jsonl", "--out", "features.jsonl"],
        ["train", "--corpus", "corpus.jsonl", "--model", "rfc", "--seed", "42",
         "--trees", "30", "--out", "org.cqj"],
        ["evaluate", "--corpus", "corpus.jsonl", "--model-file", "org.cqj",
         "--out", "org.json"],
        ["train", "--corpus", "corpus.jsonl", "--model", "rfc", "--seed", "42",
         "--trees", "30", "--enrich", "--out", "enr.cqj"],
        ["evaluate", "--corpus", "corpus.jsonl", "--model-file", "enr.cqj",
         "--baseline", "org.json", "--markdown", "table.md", "--out", "enr.json"],
        ["predict", "--corpus", "corpus.jsonl", "--model-file", "enr.cqj",
         "--out", "predictions.jsonl"],
        ["export", "--corpus", "corpus.jsonl", "--enrich", "--out", "export.jsonl"],
    ]
    before = os.getcwd()
    os.chdir(workdir)
    try:
        for argv in steps:
            assert main(argv) == 0, f"step failed: {' '.join(argv)}"
    finally:
        os.chdir(before)
    return {
        p.name: p.read_bytes() for p in sorted(workdir.iterdir()) if p.is_file()
    }


def test_10_cli_chain_is_byte_deterministic(criterion, tmp_path):
    with criterion("end-to-end command chain is byte-deterministic", 10.0):
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        dir_a.mkdir()
        dir_b.mkdir()
        first = _run_chain(dir_a)
        second = _run_chain(dir_b)
        assert set(first) == set(second)
        for name in first:
            assert first[name] == second[name], f"{name} differs between runs"
        assert b"CQJ1" == first["org.cqj"][:4]
        assert first["predictions.jsonl"].count(b"\n") == 50
