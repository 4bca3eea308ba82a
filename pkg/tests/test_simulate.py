import numpy as np
import pytest

from readrank.corpus import GRADE_BINS
from readrank.qc import filter_workers
from readrank.simulate import (
    SimConfig,
    majority_agreement,
    simulate_dataset,
    synth_sentences,
)


class TestConfig:
    def test_divisibility_enforced(self):
        with pytest.raises(ValueError, match="divisible"):
            SimConfig(n_sentences=121)

    def test_noise_positive(self):
        with pytest.raises(ValueError, match="noise_sd"):
            SimConfig(noise_sd=0.0)


class TestSentences:
    def test_counts_per_bin(self):
        records, _, _ = synth_sentences(SimConfig(n_sentences=120, seed=1))
        per_bin = {b: 0 for b in GRADE_BINS}
        for rec in records:
            per_bin[rec.grade_bin] += 1
        assert all(v == 20 for v in per_bin.values())

    def test_bin_means_strictly_increasing(self):
        records, scores, _ = synth_sentences(SimConfig(seed=2))
        means = []
        for b in GRADE_BINS:
            vals = [scores[r.id] for r in records if r.grade_bin == b]
            means.append(sum(vals) / len(vals))
        assert all(a < b for a, b in zip(means, means[1:]))

    def test_deterministic_per_seed(self):
        a, sa, ta = synth_sentences(SimConfig(seed=5))
        b, sb, tb = synth_sentences(SimConfig(seed=5))
        assert [r.text for r in a] == [r.text for r in b]
        assert [r.parse for r in a] == [r.parse for r in b]
        assert sa == sb
        assert ta.ids == tb.ids

    def test_parses_cover_tokens(self):
        from readrank.synfeat import read_bracketed

        records, _, _ = synth_sentences(SimConfig(n_sentences=24, seed=3))
        for rec in records:
            tree = read_bracketed(rec.parse)
            assert tree.leaves() == [t.surface for t in rec.tokens]

    def test_passages_and_chains(self):
        records, _, _ = synth_sentences(SimConfig(n_sentences=12, seed=4,
                                                  with_passages=True))
        for rec in records:
            assert rec.passage is not None
            assert rec.passage.sentences[rec.passage.target_index] == rec.text
            assert rec.coref_chains
            for chain in rec.coref_chains:
                assert any(si == rec.passage.target_index for si, _, _ in chain)


class TestJudgments:
    def test_zero_noise_limit_matches_truth(self):
        cfg = SimConfig(seed=6, noise_sd=1e-9, p_draw=0.0, n_gold=0)
        data = simulate_dataset(cfg)
        for j in data.judgments:
            harder = "A" if data.scores[j.sent_a] > data.scores[j.sent_b] else "B"
            assert j.choice == harder

    def test_equal_scores_choose_half(self):
        from readrank.simulate import _choice_prob

        cfg = SimConfig()
        assert _choice_prob(1.0, 1.0, cfg) == pytest.approx(0.5)

    def test_draw_fraction_near_p_draw(self):
        data = simulate_dataset(SimConfig(seed=7))
        nongold = [j for j in data.judgments if not j.is_gold]
        assert len(nongold) == 4200
        draws = sum(1 for j in nongold if j.choice == "draw") / len(nongold)
        assert abs(draws - 0.02) <= 0.01

    def test_agreement_in_calibrated_band(self):
        for seed in range(3):
            data = simulate_dataset(SimConfig(seed=seed))
            assert 0.88 <= majority_agreement(data.judgments) <= 0.92

    def test_gold_pairs_marked_with_answers(self):
        data = simulate_dataset(SimConfig(seed=8, n_gold=10))
        gold = [j for j in data.judgments if j.is_gold]
        assert gold
        for j in gold:
            assert j.gold_answer is not None
            harder = "A" if data.scores[j.sent_a] > data.scores[j.sent_b] else "B"
            assert j.gold_answer == harder

    def test_logit_mode_runs(self):
        data = simulate_dataset(SimConfig(seed=9, n_sentences=12,
                                          choice_model="logit", n_gold=0))
        assert data.judgments


class TestSpammers:
    def test_spammers_caught_by_disagreement_filter(self):
        from readrank.simulate import spammer_workers

        caught = total = 0
        for seed in range(5):
            cfg = SimConfig(seed=seed, n_workers=60, spammer_fraction=0.1, n_gold=0)
            data = simulate_dataset(cfg)
            spammers = spammer_workers(cfg)
            assert len(spammers) == 6
            _, stats, _ = filter_workers(data.judgments, "sentence_only")
            flagged = {s.worker_id for s in stats if not s.retained}
            caught += len(spammers & flagged)
            total += len(spammers)
        assert caught / total >= 0.9
