"""Ranking comparison statistics and correlation analyses.

Rankings are stored most-difficult-first everywhere. Correlations of a
feature against a ranking use the reversed rank position (larger = more
difficult) so difficulty-increasing features correlate positively.
p-values use the two-sided t-approximation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from scipy import stats as _sstats

from .context import context_vector, full_context
from .corpus import JudgmentRecord, SentenceRecord
from .features import FeatureResources, record_features


@dataclass
class Ranking:
    """Ordered sentence ids (rank 1 = most difficult) with a score per id."""

    ids: list[str]
    scores: dict[str, float]
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        if set(self.ids) != set(self.scores):
            raise ValueError("ranking ids and scores disagree")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate id in ranking")
        self._index = {sid: i for i, sid in enumerate(self.ids)}

    @property
    def rank_index(self) -> dict[str, int]:
        """0-based rank position per id (0 = most difficult)."""
        return self._index

    def __len__(self) -> int:
        return len(self.ids)


@dataclass
class GradeRange:
    """Expert-assigned grade level (or range) for one sentence."""

    sentence_id: str
    low: float
    high: float

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError(f"{self.sentence_id}: low {self.low} > high {self.high}")

    @property
    def midpoint(self) -> float:
        return (self.low + self.high) / 2.0


def _rankdata(xs) -> list[float]:
    """Average ranks (1-based) with ties sharing the mean rank."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _corr_pvalue(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return 2.0 * float(_sstats.t.sf(abs(t), n - 2))


def pearson(x, y) -> tuple[float, float]:
    """Pearson correlation with a two-sided t-approximation p-value."""
    x, y = list(x), list(y)
    if len(x) != len(y):
        raise ValueError("length mismatch")
    n = len(x)
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    mx = sum(x) / n
    my = sum(y) / n
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    if vx == 0.0 or vy == 0.0:
        raise ValueError("zero variance input")
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    r = cov / math.sqrt(vx * vy)
    r = max(-1.0, min(1.0, r))
    return r, _corr_pvalue(r, n)


def spearman(x, y) -> tuple[float, float]:
    """Spearman rank correlation: average ranks for ties, then Pearson."""
    return pearson(_rankdata(list(x)), _rankdata(list(y)))


def rank_diff_stats(r1: Ranking, r2: Ranking) -> dict[str, float]:
    """Absolute rank-position differences between two rankings of the same ids.

    ``normalized_pct`` is the mean absolute difference over the maximum
    possible single move (n - 1), in percent. The standard deviation is the
    population standard deviation of the absolute differences.
    """
    if set(r1.ids) != set(r2.ids):
        raise ValueError("rankings cover different id sets")
    n = len(r1)
    diffs = [abs(r1.rank_index[sid] - r2.rank_index[sid]) for sid in sorted(r1.ids)]
    mean = sum(diffs) / n
    std = math.sqrt(sum((d - mean) ** 2 for d in diffs) / n)
    return {
        "mean_abs_diff": mean,
        "std_abs_diff": std,
        "normalized_pct": 100.0 * mean / (n - 1) if n > 1 else 0.0,
    }


def rank_change_feature_corr(
    rank_only: Ranking,
    rank_passage: Ranking,
    records: list[SentenceRecord],
    feature: str,
    res: FeatureResources,
) -> dict[str, float]:
    """Correlate per-sentence rank change with the feature's percentage
    difference between the target sentence and its remaining passage context.

    Rank change is the sentence-only rank index minus the in-passage rank
    index; the feature difference is ``(f_target - f_context) / |f_context|``
    with the context value computed over all passage sentences except the
    target. Sentences with a zero context value are excluded with a warning.
    """
    d_rank, d_feat = [], []
    skipped = []
    for rec in records:
        target_vec = record_features(rec, res, coref=False)
        ctx_vec = context_vector(
            full_context(rec), res.lexicon, res.dale_chall, res.stopwords, res.lm, res.pcfg
        )
        f_target = target_vec.values.get(feature, 0.0)
        f_context = ctx_vec.values.get("ctx:" + feature, 0.0)
        if f_context == 0.0:
            skipped.append(rec.id)
            continue
        d_rank.append(rank_only.rank_index[rec.id] - rank_passage.rank_index[rec.id])
        d_feat.append((f_target - f_context) / abs(f_context))
    if skipped:
        warnings.warn(
            f"excluded {len(skipped)} sentences with zero context value for "
            f"{feature!r}: {', '.join(skipped[:5])}",
            stacklevel=2,
        )
    r, p_r = pearson(d_rank, d_feat)
    rho, p_rho = spearman(d_rank, d_feat)
    return {"pearson": r, "pearson_p": p_r, "spearman": rho, "spearman_p": p_rho}


def expert_ranking(ranges: list[GradeRange]) -> Ranking:
    """Sort by expert grade-range midpoint, hardest first; ties by id."""
    ordered = sorted(ranges, key=lambda g: (-g.midpoint, g.sentence_id))
    return Ranking(
        ids=[g.sentence_id for g in ordered],
        scores={g.sentence_id: g.midpoint for g in ranges},
    )


def gold_only_ranking(judgments: list[JudgmentRecord], params=None, seed: int = 0) -> Ranking:
    """Aggregate rating ranking built from gold-standard judgments only."""
    from . import trueskill as _ts

    gold = [j for j in judgments if j.is_gold]
    if not gold:
        raise ValueError("no gold judgments present")
    params = params if params is not None else _ts.TrueSkillParams()
    return _ts.aggregate_runs(gold, params, seed).ranking()


def feature_value_ranking_corr(values: dict[str, float], crowd: Ranking) -> dict[str, float]:
    """Correlate a per-sentence feature value with crowd difficulty position.

    Position is reversed rank index (n-1 down to 0, most difficult largest),
    so a feature that grows with difficulty correlates positively.
    """
    n = len(crowd)
    x = [values[sid] for sid in crowd.ids]
    y = [float(n - 1 - crowd.rank_index[sid]) for sid in crowd.ids]
    r, p_r = pearson(x, y)
    rho, p_rho = spearman(x, y)
    return {"pearson": r, "pearson_p": p_r, "spearman": rho, "spearman_p": p_rho}


def significance_marker(p: float) -> str:
    """Report markers: ``**`` for p < 0.0001, ``*`` for p < 0.001."""
    if p < 0.0001:
        return "**"
    if p < 0.001:
        return "*"
    return ""
