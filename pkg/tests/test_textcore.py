import random

import pytest

from cqjudge.textcore import RougeScore, SentimentLexicon, rouge1, score_sentiment, tokenize

FIXTURE = SentimentLexicon(
    entries={"great": (0.8, 0.75), "awful": (-0.9, 0.9), "nice": (0.6, 0.9)},
    negators=frozenset({"not"}),
    intensifiers={"very": 1.5, "slightly": 0.6},
)


class TestTokenize:
    def test_basic(self):
        assert tokenize("What monitor?") == ["what", "monitor"]

    def test_empty(self):
        assert tokenize("") == []

    def test_separators(self):
        assert tokenize("Wi-Fi router's range") == ["wi", "fi", "router", "s", "range"]

    def test_underscore_is_separator(self):
        assert tokenize("a_b") == ["a", "b"]

    def test_digits_kept(self):
        assert tokenize("windows 10!") == ["windows", "10"]

    def test_idempotent_on_rejoined_tokens(self):
        rng = random.Random(7)
        alphabet = "abc xyz0 9!?-_'éü,."
        for _ in range(300):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 40)))
            tokens = tokenize(text)
            assert tokenize(" ".join(tokens)) == tokens
            assert all(tok and " " not in tok for tok in tokens)


class TestSentiment:
    def test_single_match_mean(self):
        assert score_sentiment("this is great", FIXTURE) == (0.8, 0.75)

    def test_no_match(self):
        assert score_sentiment("", FIXTURE) == (0.0, 0.0)
        assert score_sentiment("plain words only", FIXTURE) == (0.0, 0.0)

    def test_negator_flip(self):
        polarity, subjectivity = score_sentiment("not great", FIXTURE)
        assert polarity == pytest.approx(-0.8)
        assert subjectivity == pytest.approx(0.75)

    def test_negator_window_is_two_tokens(self):
        # "not" three tokens before the match no longer flips
        polarity, _ = score_sentiment("not a very big great", FIXTURE)
        assert polarity > 0

    def test_intensifier_scales_and_mean_clamps(self):
        polarity, _ = score_sentiment("very great", FIXTURE)
        assert polarity == 1.0  # 0.8 * 1.5 = 1.2, clamped after averaging
        polarity, _ = score_sentiment("slightly great", FIXTURE)
        assert polarity == pytest.approx(0.48)

    def test_negator_and_intensifier_combine(self):
        polarity, _ = score_sentiment("not very great", FIXTURE)
        assert polarity == -1.0

    def test_mean_over_matches(self):
        polarity, subjectivity = score_sentiment("great but awful", FIXTURE)
        assert polarity == pytest.approx((0.8 - 0.9) / 2)
        assert subjectivity == pytest.approx((0.75 + 0.9) / 2)

    def test_ranges_on_arbitrary_text(self):
        rng = random.Random(3)
        words = ["great", "awful", "nice", "not", "very", "slightly", "x", "y"]
        for _ in range(300):
            text = " ".join(rng.choice(words) for _ in range(rng.randrange(0, 12)))
            polarity, subjectivity = score_sentiment(text, FIXTURE)
            assert -1.0 <= polarity <= 1.0
            assert 0.0 <= subjectivity <= 1.0


class TestLexicon:
    def test_parse_directives_and_comments(self):
        text = (
            "# comment\n"
            "\n"
            "!negator\tnot\n"
            "!intensifier\tvery\t1.5\n"
            "great\t0.8\t0.75\n"
        )
        lex = SentimentLexicon.from_text(text)
        assert lex.entries == {"great": (0.8, 0.75)}
        assert lex.negators == frozenset({"not"})
        assert lex.intensifiers == {"very": 1.5}

    def test_bad_row_raises_with_line(self):
        with pytest.raises(ValueError, match="line 2"):
            SentimentLexicon.from_text("good\t0.5\t0.5\nbroken\tnot_a_number\t0.5\n")

    def test_range_validation(self):
        with pytest.raises(ValueError, match="polarity"):
            SentimentLexicon(entries={"w": (1.5, 0.5)})
        with pytest.raises(ValueError, match="subjectivity"):
            SentimentLexicon(entries={"w": (0.5, -0.1)})

    def test_dict_round_trip(self):
        again = SentimentLexicon.from_dict(FIXTURE.to_dict())
        assert again == FIXTURE

    def test_bundled_lexicon_loads(self, lexicon):
        assert len(lexicon.entries) > 100
        assert "not" in lexicon.negators
        assert lexicon.entries["great"] == (0.8, 0.75)
        positive = sum(1 for p, _ in lexicon.entries.values() if p > 0)
        negative = sum(1 for p, _ in lexicon.entries.values() if p < 0)
        assert positive >= 30 and negative >= 30


class TestRouge:
    def test_headache_example(self):
        candidate = tokenize("What do you want to know about headache?")
        assert len(candidate) == 8
        assert rouge1(candidate, tokenize("headache")) == (0.125, 1.0)

    def test_identity(self):
        assert rouge1(["a", "b"], ["a", "b"]) == (1.0, 1.0)

    def test_disjoint(self):
        assert rouge1(["a"], ["b"]) == (0.0, 0.0)

    def test_multiset_clipping(self):
        score = rouge1(["a", "a", "b"], ["a", "b", "b"])
        assert score == RougeScore(2 / 3, 2 / 3)

    def test_empty_sides(self):
        assert rouge1([], ["a"]) == (0.0, 0.0)
        assert rouge1(["a"], []) == (0.0, 0.0)
        assert rouge1([], []) == (0.0, 0.0)

    def test_duality_property(self):
        rng = random.Random(11)
        vocab = [f"w{i}" for i in range(12)]
        for _ in range(1000):
            a = [rng.choice(vocab) for _ in range(rng.randrange(0, 10))]
            b = [rng.choice(vocab) for _ in range(rng.randrange(0, 10))]
            assert rouge1(a, b).precision == rouge1(b, a).recall
            assert rouge1(a, b).recall == rouge1(b, a).precision

    def test_monotone_recall_when_candidate_grows(self):
        rng = random.Random(5)
        vocab = [f"w{i}" for i in range(6)]
        for _ in range(200):
            a = [rng.choice(vocab) for _ in range(rng.randrange(0, 8))]
            b = [rng.choice(vocab) for _ in range(rng.randrange(1, 8))]
            extra = rng.choice(b)
            assert rouge1(a + [extra], b).recall >= rouge1(a, b).recall
