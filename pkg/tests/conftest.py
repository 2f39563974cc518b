from pathlib import Path

import pytest

from cqjudge.corpus import load_schema_presets, parse_corpus_file
from cqjudge.features import load_templates
from cqjudge.synthetic import default_lexicon

REPO = Path(__file__).resolve().parent.parent
FIXTURE_CORPUS = REPO / "fixtures" / "sample_corpus.tsv"


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def templates():
    return load_templates()


@pytest.fixture(scope="session")
def sample_records():
    records, errors = parse_corpus_file(FIXTURE_CORPUS, load_schema_presets()["sample"])
    assert not errors
    return records
