"""Usefulness analysis and classification for search clarifying questions.

The package ingests MIMICS-style corpora into a canonical JSONL form,
derives eight per-record features, aggregates frequency-normalized
usefulness rates, and trains from-scratch TF-IDF classifiers in plain
(org) and feature-enriched (enr) modes, plus a prompt adapter for
remote chat-completion classification.
"""

from .corpus import ClarificationRecord, UsefulnessLabel
from .features import FeatureVector, extract_features, load_templates
from .textcore import SentimentLexicon, rouge1, score_sentiment, tokenize

__version__ = "0.1.0"

__all__ = [
    "ClarificationRecord",
    "UsefulnessLabel",
    "FeatureVector",
    "extract_features",
    "load_templates",
    "SentimentLexicon",
    "rouge1",
    "score_sentiment",
    "tokenize",
    "__version__",
]
