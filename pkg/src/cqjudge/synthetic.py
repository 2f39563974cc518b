"""Seeded synthetic corpora for tests, fixtures, and benchmarks.

Two generators:

* :func:`sample_corpus_tsv` renders a small, human-readable TSV in the
  ``sample`` schema, exercising every template plus freeform questions
  and a few unlabeled rows.
* :func:`feature_label_corpus` builds records whose label is a pure
  function of question length and sentiment polarity — invisible to
  plain bag-of-words but trivially separable from the enrichment
  features, which is exactly what the enrichment-effect checks need.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .corpus import ClarificationRecord, UsefulnessLabel
from .textcore import SentimentLexicon

_QUERIES = (
    "monitor",
    "jaguar",
    "python",
    "apple watch",
    "tesla",
    "coffee maker",
    "yoga",
    "garden fence",
    "windows 10",
    "headache",
    "mercury",
    "crown",
)

_FACETS = (
    "for gaming",
    "for beginners",
    "for travel",
    "reviews",
    "price comparison",
    "repair guide",
    "history",
    "size chart",
    "installation",
    "models",
)

_TEMPLATE_QUESTIONS = (
    "What would you like to do with {q}?",
    "What do you want to know about {q}?",
    "Which {q} are you looking for?",
    "What {q} do you mean?",
    "What are you trying to do?",
    "Who are you shopping for?",
    "Do you have {q} in mind?",
)

_FREEFORM_QUESTIONS = (
    "Is this the great {q} you meant?",
    "Are you asking about a broken {q}?",
    "Should we find a nice {q} for you?",
    "Tell me which {q} applies here.",
    "Can you explain what {q} means to you?",
)


def default_lexicon() -> SentimentLexicon:
    return SentimentLexicon.from_file(Path(__file__).parent / "data" / "lexicon.tsv")


def sample_corpus_tsv(n: int = 50, seed: int = 11) -> str:
    """Render the bundled fixture corpus (``sample`` schema TSV).

    Roughly 1 in 16 rows is left unlabeled to exercise the
    unjudged-record path; labels lean Good for facet-seeking templates
    and Fair/Bad elsewhere, echoing the corpus analyses.
    """
    rng = np.random.default_rng(seed)
    lines = ["id\tquery\tquestion\toption_1\toption_2\toption_3\toption_4\toption_5\tlabel"]
    for i in range(1, n + 1):
        query = _QUERIES[int(rng.integers(0, len(_QUERIES)))]
        use_template = rng.random() < 0.75
        if use_template:
            t_index = int(rng.integers(0, len(_TEMPLATE_QUESTIONS)))
            question = _TEMPLATE_QUESTIONS[t_index].format(q=query)
            good_p = 0.7 if t_index in (0, 1, 2, 3, 6) else 0.35
        else:
            question = _FREEFORM_QUESTIONS[int(rng.integers(0, len(_FREEFORM_QUESTIONS)))].format(
                q=query
            )
            good_p = 0.25
        n_options = int(rng.integers(0, 6))
        options = []
        for _ in range(n_options):
            facet = _FACETS[int(rng.integers(0, len(_FACETS)))]
            # facet-style options usually embed the query string
            options.append(f"{query} {facet}" if rng.random() < 0.7 else facet)
        options += [""] * (5 - len(options))
        if rng.random() < 1 / 16:
            label = ""
        else:
            roll = rng.random()
            if roll < good_p:
                label = "Good"
            elif roll < good_p + 0.6 * (1 - good_p):
                label = "Fair"
            else:
                label = "Bad"
        row = [f"s{i:03d}", query, question, *options, label]
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def feature_label_corpus(
    n: int = 1000, seed: int = 7, lexicon: SentimentLexicon | None = None
) -> list[ClarificationRecord]:
    """Records whose label is determined by length and polarity alone.

    Each question is one sentiment word planted among fillers drawn from
    a vocabulary large enough that bag-of-words models cannot generalize
    from it. Label rule: long (>= 8 words) and positive -> Good; short
    and non-positive -> Bad; otherwise Fair.
    """
    if lexicon is None:
        lexicon = default_lexicon()
    positive = sorted(w for w, (p, _) in lexicon.entries.items() if p > 0)
    negative = sorted(w for w, (p, _) in lexicon.entries.items() if p < 0)
    fillers = [f"term{i:04d}" for i in range(2000)]
    queries = [f"topic{i:02d}" for i in range(40)]
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n):
        length = int(rng.integers(3, 13))
        pool = positive if rng.integers(0, 2) == 1 else negative
        word = pool[int(rng.integers(0, len(pool)))]
        body = [fillers[int(j)] for j in rng.integers(0, len(fillers), size=length - 1)]
        body.insert(int(rng.integers(0, length)), word)
        polarity = lexicon.entries[word][0]
        long_question = length >= 8
        if long_question and polarity > 0:
            label = UsefulnessLabel.GOOD
        elif not long_question and polarity <= 0:
            label = UsefulnessLabel.BAD
        else:
            label = UsefulnessLabel.FAIR
        records.append(
            ClarificationRecord(
                id=f"syn:{i + 1}",
                dataset="synthetic",
                query=queries[int(rng.integers(0, len(queries)))],
                question=" ".join(body),
                options=(),
                label=label,
            )
        )
    return records
