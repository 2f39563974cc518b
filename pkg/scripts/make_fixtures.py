#!/usr/bin/env python3
"""Regenerate all committed fixtures (deterministic).

* fixtures/sample_corpus.tsv — the 50-row demo corpus.
* neural/fixtures/sample_org.jsonl — org-mode export of its labeled rows.
* neural/fixtures/synthetic_enr.jsonl — enr-mode export of the seeded
  synthetic corpus whose label is a function of question length and
  sentiment polarity; the neural harness's directional test trains on it.
"""

from pathlib import Path

from cqjudge.corpus import labeled_only, load_schema_presets, parse_corpus
from cqjudge.features import extract_features, load_templates
from cqjudge.pipeline import export_for_neural
from cqjudge.synthetic import default_lexicon, feature_label_corpus, sample_corpus_tsv

ROOT = Path(__file__).resolve().parent.parent


def export(records, mode: str) -> bytes:
    lexicon, templates = default_lexicon(), load_templates()
    features = [extract_features(r, lexicon, templates) for r in records]
    return export_for_neural(records, features, mode)


if __name__ == "__main__":
    tsv = sample_corpus_tsv(n=50, seed=11)
    out = ROOT / "fixtures" / "sample_corpus.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(tsv, encoding="utf-8")
    print(f"wrote {out}")

    neural = ROOT / "neural" / "fixtures"
    neural.mkdir(parents=True, exist_ok=True)

    records, errors = parse_corpus(tsv, load_schema_presets()["sample"])
    assert not errors
    (neural / "sample_org.jsonl").write_bytes(export(labeled_only(records), "org"))
    print(f"wrote {neural / 'sample_org.jsonl'}")

    synthetic = feature_label_corpus(n=400, seed=7)
    (neural / "synthetic_enr.jsonl").write_bytes(export(synthetic, "enr"))
    print(f"wrote {neural / 'synthetic_enr.jsonl'}")
