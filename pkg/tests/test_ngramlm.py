import math

import pytest

from readrank.ngramlm import (
    END,
    START,
    UNK,
    load_lm,
    save_lm,
    sentence_logprob,
    train_lm,
)


def lines(*sentences):
    return [s.split() for s in sentences]


class TestTraining:
    def test_bigram_counts(self):
        model = train_lm(lines("a b", "a b"), max_order=2)
        assert model.counts[1][("a", "b")] == 2
        assert model.counts[1][(START, "a")] == 2
        assert model.counts[1][("b", END)] == 2

    def test_end_sentinel_unigram_count_equals_lines(self):
        model = train_lm(lines("a b", "a c d", "a b"), max_order=3)
        assert model.counts[0][(END,)] == 3

    def test_singletons_fold_into_unk(self):
        model = train_lm(lines("a b once", "a b"), max_order=2)
        assert "once" not in model.vocab
        assert model.counts[0][(UNK,)] == 1
        assert model.known("never-seen") == UNK

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            train_lm([], max_order=2)

    def test_order_bounds(self):
        with pytest.raises(ValueError, match="max_order"):
            train_lm(lines("a b"), max_order=6)


class TestScoring:
    def test_toy_corpus_bigram_logprob_zero(self):
        model = train_lm(lines("a b", "a b"), max_order=2)
        assert sentence_logprob(model, ["a", "b"], 2) == pytest.approx(0.0, abs=1e-12)

    def test_identical_corpus_zero_at_higher_orders(self):
        model = train_lm(lines("a b c", "a b c", "a b c"), max_order=5)
        for k in (2, 3, 4, 5):
            assert sentence_logprob(model, ["a", "b", "c"], k) == pytest.approx(
                0.0, abs=1e-12
            )

    def test_unigram_is_relative_frequency(self):
        # tokens: a:3, b singleton -> unk:1, ends:2; total 6
        model = train_lm(lines("a a b", "a"), max_order=1)
        expected = (2 * math.log10(3 / 6) + math.log10(1 / 6) + math.log10(2 / 6)) / 4
        assert sentence_logprob(model, ["a", "a", "b"], 1) == pytest.approx(expected)

    def test_unseen_words_score_unk_frequency(self):
        model = train_lm(lines("a b once", "a b"), max_order=2)
        # 1 unk among tokens: a:2 b:2 unk:1 end:2 -> total 7
        got = sentence_logprob(model, ["qq"], 1)
        # positions: qq -> unk (1/7), end (2/7)
        assert got == pytest.approx((math.log10(1 / 7) + math.log10(2 / 7)) / 2)

    def test_unigram_order_invariance(self):
        model = train_lm(lines("a b c a", "b c a d"), max_order=2)
        assert sentence_logprob(model, ["a", "b", "c"], 1) == pytest.approx(
            sentence_logprob(model, ["c", "a", "b"], 1)
        )

    def test_backoff_path(self):
        # unigrams (no starts): a:2 b:2 c:4 end:4 -> total 12
        model = train_lm(lines("a b", "a b", "c c", "c c"), max_order=2, alpha=0.4)
        direct = sentence_logprob(model, ["b", "c"], 2)
        p1 = math.log10(0.4) + math.log10(2 / 12)  # (start, b) unseen -> alpha * P(b)
        p2 = math.log10(0.4) + math.log10(4 / 12)  # (b, c) unseen -> alpha * P(c)
        p3 = math.log10(2 / 4)                     # (c, end) seen 2, context total 4
        assert direct == pytest.approx((p1 + p2 + p3) / 3)

    def test_scores_nonpositive(self):
        model = train_lm(lines("a b c", "a b d", "e f"), max_order=3)
        for k in (1, 2, 3):
            assert sentence_logprob(model, ["a", "b", "zz"], k) <= 0.0

    def test_monotone_in_counts(self):
        base = lines("a b", "c d")
        more = lines("a b", "c d", "a b")
        m1 = train_lm(base * 2, max_order=2)  # duplicate so no singleton folding
        m2 = train_lm(more * 2, max_order=2)
        s1 = m1.counts[1][("a", "b")] / m1.context_totals[1][("a",)]
        s2 = m2.counts[1][("a", "b")] / m2.context_totals[1][("a",)]
        assert s2 >= s1

    def test_order_out_of_range(self):
        model = train_lm(lines("a b"), max_order=2)
        with pytest.raises(ValueError, match="order"):
            sentence_logprob(model, ["a"], 3)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        model = train_lm(lines("a b c", "a b d", "a b c"), max_order=3)
        path = tmp_path / "lm.json"
        save_lm(model, path)
        back = load_lm(path)
        assert back.max_order == model.max_order
        assert back.alpha == model.alpha
        assert back.counts == model.counts
        assert back.context_totals == model.context_totals
        assert back.vocab == model.vocab
        assert back.total_tokens == model.total_tokens
        for k in (1, 2, 3):
            assert sentence_logprob(back, ["a", "b", "qq"], k) == sentence_logprob(
                model, ["a", "b", "qq"], k
            )

    def test_version_checked(self, tmp_path):
        path = tmp_path / "lm.json"
        path.write_text('{"format_version": 99}')
        with pytest.raises(ValueError, match="version"):
            load_lm(path)
