"""Worker quality control: gold-question gating and disagreement filtering.

A worker's weighted disagreement rate accrues, for every non-gold question
answered against the question's modal choice, the modal vote share on that
question; the rate divides the sum by the number of non-gold questions the
worker answered. Questions are keyed by pair id with canonical choices, and
a tie for the modal choice carries no penalty. Thresholds are inclusive
("15% or higher"). A ``flat`` penalty mode (1 per disagreement) exists for
comparison.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .corpus import JudgmentRecord

GOLD_ACCURACY_THRESHOLD = 0.85
DISAGREEMENT_THRESHOLDS = {"sentence_only": 0.15, "in_passage": 0.17}


@dataclass
class WorkerStats:
    worker_id: str
    n_answered: int
    n_gold: int
    gold_accuracy: float | None  # None when the worker answered no gold questions
    weighted_disagreement: float
    retained: bool


def gold_accuracy(judgments: list[JudgmentRecord]) -> float | None:
    """Fraction of gold questions answered correctly; None if none answered."""
    gold = [j for j in judgments if j.is_gold]
    if not gold:
        return None
    correct = sum(1 for j in gold if j.choice == j.gold_answer)
    return correct / len(gold)


def _modal_shares(judgments: list[JudgmentRecord]) -> dict[str, tuple[str | None, float]]:
    """Per non-gold question: (modal choice or None on a tie, modal vote share)."""
    votes: dict[str, dict[str, int]] = {}
    for j in judgments:
        if j.is_gold:
            continue
        votes.setdefault(j.pair_id, {}).setdefault(j.choice, 0)
        votes[j.pair_id][j.choice] += 1
    shares: dict[str, tuple[str | None, float]] = {}
    for pair_id, counts in votes.items():
        total = sum(counts.values())
        best = max(counts.values())
        winners = [c for c, k in counts.items() if k == best]
        if len(winners) > 1:
            shares[pair_id] = (None, best / total)
        else:
            shares[pair_id] = (winners[0], best / total)
    return shares


def weighted_disagreement(
    worker_id: str, judgments: list[JudgmentRecord], penalty: str = "modal_share"
) -> float:
    """Disagreement rate of one worker against per-question modal choices."""
    if penalty not in ("modal_share", "flat"):
        raise ValueError(f"unknown penalty mode {penalty!r}")
    shares = _modal_shares(judgments)
    answered = 0
    total_penalty = 0.0
    for j in judgments:
        if j.is_gold or j.worker_id != worker_id:
            continue
        answered += 1
        modal, share = shares[j.pair_id]
        if modal is not None and j.choice != modal:
            total_penalty += share if penalty == "modal_share" else 1.0
    if answered == 0:
        return 0.0
    return total_penalty / answered


def worker_stats(
    judgments: list[JudgmentRecord],
    task_mode: str = "sentence_only",
    gold_threshold: float = GOLD_ACCURACY_THRESHOLD,
    penalty: str = "modal_share",
) -> list[WorkerStats]:
    if task_mode not in DISAGREEMENT_THRESHOLDS:
        raise ValueError(f"unknown task_mode {task_mode!r}")
    threshold = DISAGREEMENT_THRESHOLDS[task_mode]
    by_worker: dict[str, list[JudgmentRecord]] = {}
    for j in judgments:
        by_worker.setdefault(j.worker_id, []).append(j)
    shares = _modal_shares(judgments)
    stats = []
    for worker_id in sorted(by_worker):
        own = by_worker[worker_id]
        acc = gold_accuracy(own)
        answered = 0
        total_penalty = 0.0
        for j in own:
            if j.is_gold:
                continue
            answered += 1
            modal, share = shares[j.pair_id]
            if modal is not None and j.choice != modal:
                total_penalty += share if penalty == "modal_share" else 1.0
        rate = total_penalty / answered if answered else 0.0
        # gold gate: below threshold fails; no gold answered keeps the worker
        retained = (acc is None or acc >= gold_threshold) and rate < threshold
        stats.append(
            WorkerStats(
                worker_id=worker_id,
                n_answered=answered,
                n_gold=sum(1 for j in own if j.is_gold),
                gold_accuracy=acc,
                weighted_disagreement=rate,
                retained=retained,
            )
        )
    return stats


def filter_workers(
    judgments: list[JudgmentRecord],
    task_mode: str = "sentence_only",
    gold_threshold: float = GOLD_ACCURACY_THRESHOLD,
    penalty: str = "modal_share",
) -> tuple[list[JudgmentRecord], list[WorkerStats], float]:
    """Drop every judgment of workers at/above the mode's disagreement
    threshold or below the gold-accuracy gate.

    Returns (retained judgments, per-worker stats, fraction of non-gold
    judgments removed). Thresholds are applied once, on rates computed over
    the full input.
    """
    stats = worker_stats(judgments, task_mode, gold_threshold, penalty)
    retained_workers = {s.worker_id for s in stats if s.retained}
    retained = [j for j in judgments if j.worker_id in retained_workers]
    total_nongold = sum(1 for j in judgments if not j.is_gold)
    removed_nongold = sum(
        1 for j in judgments if not j.is_gold and j.worker_id not in retained_workers
    )
    fraction = removed_nongold / total_nongold if total_nongold else 0.0
    return retained, stats, fraction


def save_qc_report(stats: list[WorkerStats], path, config: dict | None = None) -> None:
    import json as _json

    with open(path, "w", encoding="utf-8", newline="") as fh:
        if config is not None:
            fh.write("# config: " + _json.dumps(config, sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["worker_id", "n_answered", "n_gold", "gold_accuracy",
             "weighted_disagreement", "retained"]
        )
        for s in stats:
            writer.writerow(
                [
                    s.worker_id,
                    s.n_answered,
                    s.n_gold,
                    "" if s.gold_accuracy is None else repr(s.gold_accuracy),
                    repr(s.weighted_disagreement),
                    int(s.retained),
                ]
            )
