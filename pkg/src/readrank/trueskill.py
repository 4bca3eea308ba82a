"""Two-player Gaussian skill rating with draw support.

Each sentence is a player; the winner of a comparison is the sentence
judged more difficult, and "I don't know or can't decide" is a draw. Every
individual judgment is applied separately, and because the result depends
on processing order, the final ranking averages rank positions over many
shuffled runs.

Update equations are the classic two-player truncated-Gaussian moment
matches. ``v``/``w`` are computed through the normal pdf/cdf with
asymptotic expansions when the cdf underflows, so updates stay finite for
arbitrarily surprising outcomes.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field

from scipy.special import ndtri

from .analysis import Ranking
from .corpus import CHOICE_A, CHOICE_DRAW, JudgmentRecord

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass
class Rating:
    mu: float = 25.0
    sigma: float = 25.0 / 3.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def conservative(self, k: float = 3.0) -> float:
        return self.mu - k * self.sigma


@dataclass
class TrueSkillParams:
    mu0: float = 25.0
    sigma0: float = 25.0 / 3.0
    beta: float | None = None      # defaults to sigma0 / 2
    tau: float | None = None       # defaults to sigma0 / 100
    p_draw: float = 0.02
    runs: int = 50
    rank_by: str = "mu"            # "mu" or "conservative"
    aggregate_by: str = "rank"     # "rank" or "mu"

    def __post_init__(self):
        if self.beta is None:
            self.beta = self.sigma0 / 2.0
        if self.tau is None:
            self.tau = self.sigma0 / 100.0
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if not 0.0 <= self.p_draw < 1.0:
            raise ValueError("p_draw must be in [0, 1)")
        if self.rank_by not in ("mu", "conservative"):
            raise ValueError(f"bad rank_by {self.rank_by!r}")
        if self.aggregate_by not in ("rank", "mu"):
            raise ValueError(f"bad aggregate_by {self.aggregate_by!r}")

    @property
    def draw_margin(self) -> float:
        """Performance-difference half width corresponding to p_draw."""
        return float(ndtri((self.p_draw + 1.0) / 2.0)) * _SQRT2 * self.beta


def _pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def _cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def _v_w_win(t: float) -> tuple[float, float]:
    """Mean and variance corrections for an observed win at margin-shifted t."""
    den = _cdf(t)
    if den < 1e-290:
        # Mills-ratio expansion; also gives v + t without cancellation.
        v = -t - 1.0 / t + 2.0 / t**3
        return v, v * (-1.0 / t + 2.0 / t**3)
    v = _pdf(t) / den
    return v, v * (v + t)


def _v_w_draw(t: float, d: float) -> tuple[float, float]:
    """Corrections for a draw within [-d, d]; v is odd in t, w even."""
    den = _cdf(d - t) - _cdf(-d - t)
    if den < 1e-290:
        # A draw this surprising pins the difference at the near margin.
        return (d - t if t > 0 else -d - t), 1.0
    pdf_hi = _pdf(d - t)
    pdf_lo = _pdf(-d - t)
    v = (pdf_lo - pdf_hi) / den
    w = v * v + ((d - t) * pdf_hi + (d + t) * pdf_lo) / den
    return v, w


def update_win(
    winner: Rating, loser: Rating, params: TrueSkillParams
) -> tuple[Rating, Rating]:
    """Posterior ratings after the winner beat the loser by the draw margin."""
    sw2 = winner.sigma**2 + params.tau**2
    sl2 = loser.sigma**2 + params.tau**2
    c2 = sw2 + sl2 + 2.0 * params.beta**2
    c = math.sqrt(c2)
    t = (winner.mu - loser.mu) / c
    d = params.draw_margin / c
    v, w = _v_w_win(t - d)
    new_winner = Rating(
        winner.mu + (sw2 / c) * v, math.sqrt(sw2 * max(1.0 - (sw2 / c2) * w, 1e-12))
    )
    new_loser = Rating(
        loser.mu - (sl2 / c) * v, math.sqrt(sl2 * max(1.0 - (sl2 / c2) * w, 1e-12))
    )
    return new_winner, new_loser


def update_draw(a: Rating, b: Rating, params: TrueSkillParams) -> tuple[Rating, Rating]:
    """Posterior ratings after a draw: means contract, both sigmas shrink."""
    sa2 = a.sigma**2 + params.tau**2
    sb2 = b.sigma**2 + params.tau**2
    c2 = sa2 + sb2 + 2.0 * params.beta**2
    c = math.sqrt(c2)
    t = (a.mu - b.mu) / c
    d = params.draw_margin / c
    v, w = _v_w_draw(t, d)
    new_a = Rating(a.mu + (sa2 / c) * v, math.sqrt(sa2 * max(1.0 - (sa2 / c2) * w, 1e-12)))
    new_b = Rating(b.mu - (sb2 / c) * v, math.sqrt(sb2 * max(1.0 - (sb2 / c2) * w, 1e-12)))
    return new_a, new_b


def _rank_key(params: TrueSkillParams, rating: Rating) -> float:
    if params.rank_by == "conservative":
        return rating.conservative()
    return rating.mu


def _single_run(
    judgments: list[JudgmentRecord],
    params: TrueSkillParams,
    seed: int,
    sentence_ids: list[str] | None = None,
) -> tuple[list[str], dict[str, Rating]]:
    known = sorted({j.sent_a for j in judgments} | {j.sent_b for j in judgments})
    if sentence_ids is not None:
        extra = set(known) - set(sentence_ids)
        if extra:
            raise ValueError(f"judgments reference unknown sentence ids: {sorted(extra)}")
        known = sorted(sentence_ids)
    ratings = {sid: Rating(params.mu0, params.sigma0) for sid in known}
    order = list(judgments)
    random.Random(seed).shuffle(order)
    for j in order:
        a, b = ratings[j.sent_a], ratings[j.sent_b]
        if j.choice == CHOICE_DRAW:
            ratings[j.sent_a], ratings[j.sent_b] = update_draw(a, b, params)
        elif j.choice == CHOICE_A:
            ratings[j.sent_a], ratings[j.sent_b] = update_win(a, b, params)
        else:
            ratings[j.sent_b], ratings[j.sent_a] = update_win(b, a, params)
    ordered = sorted(known, key=lambda sid: (-_rank_key(params, ratings[sid]), sid))
    return ordered, ratings


def run_ranking(
    judgments: list[JudgmentRecord],
    params: TrueSkillParams,
    seed: int,
    sentence_ids: list[str] | None = None,
) -> Ranking:
    """One pass: shuffle the individual judgments, apply updates, rank by mu."""
    ordered, ratings = _single_run(judgments, params, seed, sentence_ids)
    return Ranking(ids=ordered, scores={sid: ratings[sid].mu for sid in ordered})


@dataclass
class AggregateRanking:
    """Averages over shuffled runs; order by mean rank (or mean mu)."""

    ids: list[str]  # final order, most difficult first
    mean_rank: dict[str, float]
    mean_mu: dict[str, float]
    mean_sigma: dict[str, float]
    params: TrueSkillParams = field(repr=False, default_factory=TrueSkillParams)

    def ranking(self) -> Ranking:
        return Ranking(ids=list(self.ids), scores={s: self.mean_mu[s] for s in self.ids})


def aggregate_runs(
    judgments: list[JudgmentRecord],
    params: TrueSkillParams,
    seed: int,
    sentence_ids: list[str] | None = None,
) -> AggregateRanking:
    """Average rank position (1-based) over ``params.runs`` shuffled runs."""
    master = random.Random(seed)
    run_seeds = [master.randrange(2**63) for _ in range(params.runs)]
    rank_sum: dict[str, float] = {}
    mu_sum: dict[str, float] = {}
    sigma_sum: dict[str, float] = {}
    known: list[str] = []
    for run_seed in run_seeds:
        ordered_run, ratings = _single_run(judgments, params, run_seed, sentence_ids)
        if not known:
            known = sorted(ordered_run)
            for sid in known:
                rank_sum[sid] = mu_sum[sid] = sigma_sum[sid] = 0.0
        for pos, sid in enumerate(ordered_run, start=1):
            rank_sum[sid] += pos
            mu_sum[sid] += ratings[sid].mu
            sigma_sum[sid] += ratings[sid].sigma
    n = float(params.runs)
    mean_rank = {sid: rank_sum[sid] / n for sid in known}
    mean_mu = {sid: mu_sum[sid] / n for sid in known}
    mean_sigma = {sid: sigma_sum[sid] / n for sid in known}
    if params.aggregate_by == "mu":
        ordered = sorted(known, key=lambda s: (-mean_mu[s], mean_rank[s], s))
    else:
        ordered = sorted(known, key=lambda s: (mean_rank[s], -mean_mu[s], s))
    return AggregateRanking(
        ids=ordered,
        mean_rank=mean_rank,
        mean_mu=mean_mu,
        mean_sigma=mean_sigma,
        params=params,
    )


def save_ranking_csv(agg: AggregateRanking, path, config: dict | None = None) -> None:
    """CSV ``rank,sentence_id,mean_rank,mean_mu,mean_sigma`` with a config echo."""
    import json as _json

    with open(path, "w", encoding="utf-8", newline="") as fh:
        if config is not None:
            fh.write("# config: " + _json.dumps(config, sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "sentence_id", "mean_rank", "mean_mu", "mean_sigma"])
        for pos, sid in enumerate(agg.ids, start=1):
            writer.writerow(
                [
                    pos,
                    sid,
                    repr(agg.mean_rank[sid]),
                    repr(agg.mean_mu[sid]),
                    repr(agg.mean_sigma[sid]),
                ]
            )


def load_ranking_csv(path) -> Ranking:
    ids: list[str] = []
    scores: dict[str, float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(rows)
    header = next(reader, None)
    if header is None or header[:2] != ["rank", "sentence_id"]:
        raise ValueError(f"{path}: not a ranking CSV")
    for row in reader:
        ids.append(row[1])
        scores[row[1]] = float(row[3])
    return Ranking(ids=ids, scores=scores)
