import math
import random

import pytest
from quadrature_oracle import oracle_draw_update, oracle_win_update

from readrank.corpus import JudgmentRecord
from readrank.trueskill import (
    AggregateRanking,
    Rating,
    TrueSkillParams,
    aggregate_runs,
    load_ranking_csv,
    run_ranking,
    save_ranking_csv,
    update_draw,
    update_win,
)


def random_case(rng):
    return (
        Rating(rng.uniform(15.0, 35.0), rng.uniform(1.0, 9.0)),
        Rating(rng.uniform(15.0, 35.0), rng.uniform(1.0, 9.0)),
        TrueSkillParams(
            beta=rng.uniform(2.0, 6.0),
            tau=rng.uniform(0.0, 0.5),
            p_draw=rng.uniform(0.01, 0.2),
        ),
    )


class TestWinUpdate:
    def test_symmetric_prior_moves_apart(self):
        params = TrueSkillParams()
        w, l = update_win(Rating(), Rating(), params)
        assert w.mu > 25.0 > l.mu
        assert w.sigma < 25.0 / 3.0
        assert l.sigma < 25.0 / 3.0

    def test_symmetric_conservation(self):
        params = TrueSkillParams()
        w, l = update_win(Rating(), Rating(), params)
        assert abs((w.mu - 25.0) - (25.0 - l.mu)) < 1e-12
        assert w.sigma == l.sigma

    def test_matches_quadrature_default_priors(self):
        params = TrueSkillParams(p_draw=0.02)
        w, l = update_win(Rating(), Rating(), params)
        (wm, ws), (lm, ls) = oracle_win_update((25.0, 25 / 3), (25.0, 25 / 3), params)
        assert w.mu == pytest.approx(wm, abs=1e-9)
        assert w.sigma == pytest.approx(ws, abs=1e-9)
        assert l.mu == pytest.approx(lm, abs=1e-9)
        assert l.sigma == pytest.approx(ls, abs=1e-9)

    def test_matches_quadrature_random_cases(self):
        rng = random.Random(42)
        for _ in range(25):
            a, b, params = random_case(rng)
            w, l = update_win(a, b, params)
            (wm, ws), (lm, ls) = oracle_win_update(
                (a.mu, a.sigma), (b.mu, b.sigma), params
            )
            assert w.mu == pytest.approx(wm, abs=1e-9)
            assert w.sigma == pytest.approx(ws, abs=1e-9)
            assert l.mu == pytest.approx(lm, abs=1e-9)
            assert l.sigma == pytest.approx(ls, abs=1e-9)

    def test_expected_outcome_carries_no_information(self):
        params = TrueSkillParams(tau=0.0)
        strong = Rating(60.0, 1.0)
        weak = Rating(10.0, 1.0)
        w, l = update_win(strong, weak, params)
        assert w.mu == pytest.approx(60.0, abs=1e-6)
        assert l.mu == pytest.approx(10.0, abs=1e-6)

    def test_guarded_for_extreme_surprise(self):
        params = TrueSkillParams(tau=0.0)
        # the much weaker side wins; cdf argument is far in the left tail
        w, l = update_win(Rating(10.0, 0.1), Rating(500.0, 0.1), params)
        assert math.isfinite(w.mu) and math.isfinite(l.mu)
        assert w.sigma > 0 and l.sigma > 0
        assert w.mu > 10.0 and l.mu < 500.0


class TestDrawUpdate:
    def test_equal_priors_mu_unchanged_sigma_shrinks(self):
        params = TrueSkillParams()
        a, b = update_draw(Rating(), Rating(), params)
        assert a.mu == pytest.approx(25.0, abs=1e-12)
        assert b.mu == pytest.approx(25.0, abs=1e-12)
        assert a.sigma < 25.0 / 3.0

    def test_unequal_means_contract(self):
        params = TrueSkillParams()
        hi, lo = update_draw(Rating(30.0, 2.0), Rating(20.0, 2.0), params)
        assert hi.mu < 30.0
        assert lo.mu > 20.0

    def test_exact_values_30_20_quadrature(self):
        params = TrueSkillParams(p_draw=0.02)
        a, b = update_draw(Rating(30.0, 2.0), Rating(20.0, 2.0), params)
        (am, asd), (bm, bsd) = oracle_draw_update((30.0, 2.0), (20.0, 2.0), params)
        assert a.mu == pytest.approx(am, abs=1e-9)
        assert a.sigma == pytest.approx(asd, abs=1e-9)
        assert b.mu == pytest.approx(bm, abs=1e-9)
        assert b.sigma == pytest.approx(bsd, abs=1e-9)

    def test_matches_quadrature_random_cases(self):
        rng = random.Random(43)
        for _ in range(25):
            a, b, params = random_case(rng)
            na, nb = update_draw(a, b, params)
            (am, asd), (bm, bsd) = oracle_draw_update(
                (a.mu, a.sigma), (b.mu, b.sigma), params
            )
            assert na.mu == pytest.approx(am, abs=1e-9)
            assert na.sigma == pytest.approx(asd, abs=1e-9)
            assert nb.mu == pytest.approx(bm, abs=1e-9)
            assert nb.sigma == pytest.approx(bsd, abs=1e-9)


class TestSigmaBehavior:
    def test_sigma_positive_and_bounded_fuzz(self):
        rng = random.Random(44)
        for _ in range(200):
            a, b, params = random_case(rng)
            for fn in (update_win, update_draw):
                na, nb = fn(a, b, params)
                for old, new in ((a, na), (b, nb)):
                    inflated = math.sqrt(old.sigma**2 + params.tau**2)
                    assert 0.0 < new.sigma <= inflated + 1e-12


def judgment(pair, a, b, choice, worker="w0"):
    return JudgmentRecord(pair_id=pair, sent_a=a, sent_b=b, worker_id=worker,
                          choice=choice)


class TestRanking:
    def test_single_win_orders_pair(self):
        params = TrueSkillParams(runs=5)
        ranking = run_ranking([judgment("p0", "hard", "easy", "A")], params, seed=0)
        assert ranking.ids == ["hard", "easy"]

    def test_all_draws_prior_order_and_equal_mu(self):
        params = TrueSkillParams(runs=5)
        judgments = [
            judgment("p0", "b", "a", "draw"),
            judgment("p1", "c", "b", "draw"),
            judgment("p2", "a", "c", "draw"),
        ]
        ranking = run_ranking(judgments, params, seed=1)
        assert ranking.ids == ["a", "b", "c"]  # id tie-break
        mus = list(ranking.scores.values())
        assert max(mus) - min(mus) < 1e-9

    def test_unknown_sentence_id_rejected(self):
        params = TrueSkillParams()
        with pytest.raises(ValueError, match="unknown sentence"):
            run_ranking(
                [judgment("p0", "a", "b", "A")], params, seed=0,
                sentence_ids=["a", "c"],
            )

    def test_relabeling_equivariance(self):
        params = TrueSkillParams(runs=10)
        judgments = [
            judgment("p0", "x", "y", "A", "w1"),
            judgment("p1", "y", "z", "A", "w2"),
            judgment("p2", "x", "z", "A", "w3"),
            judgment("p3", "y", "z", "B", "w4"),
        ]
        mapping = {"x": "q_x", "y": "r_y", "z": "s_z"}
        renamed = [
            JudgmentRecord(j.pair_id, mapping[j.sent_a], mapping[j.sent_b],
                           j.worker_id, j.choice)
            for j in judgments
        ]
        agg1 = aggregate_runs(judgments, params, seed=5)
        agg2 = aggregate_runs(renamed, params, seed=5)
        assert [mapping[s] for s in agg1.ids] == agg2.ids

    def test_aggregate_deterministic(self):
        params = TrueSkillParams(runs=8)
        judgments = [
            judgment(f"p{i}", f"s{i % 4}", f"s{(i + 1) % 4}", "A", f"w{i}")
            for i in range(12)
        ]
        a = aggregate_runs(judgments, params, seed=9)
        b = aggregate_runs(judgments, params, seed=9)
        assert a.ids == b.ids
        assert a.mean_rank == b.mean_rank
        assert a.mean_mu == b.mean_mu

    def test_ranking_csv_round_trip(self, tmp_path):
        params = TrueSkillParams(runs=4)
        judgments = [judgment("p0", "hard", "easy", "A")]
        agg = aggregate_runs(judgments, params, seed=0)
        path = tmp_path / "ranking.csv"
        save_ranking_csv(agg, path, config={"seed": 0})
        back = load_ranking_csv(path)
        assert back.ids == agg.ids
        assert back.scores["hard"] == agg.mean_mu["hard"]
