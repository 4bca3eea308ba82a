"""Count-based n-gram language model with stupid backoff scoring.

Replaces the external web LM: orders 1-5, start/end sentinels, singleton
replacement for the unknown-word sentinel, and a constant backoff multiplier.
Scores are mean per-token log10 probabilities so the feature is
length-normalized (recorded in model metadata; raw sums are available by
flipping ``length_normalize``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

START = "<s>"
END = "</s>"
UNK = "<unk>"

LM_FORMAT_VERSION = 1


@dataclass
class NgramModel:
    max_order: int
    alpha: float = 0.4
    length_normalize: bool = True
    # counts[k-1]: k-gram tuple -> count; totals[k-1]: (k-1)-gram context -> sum
    counts: list[dict[tuple[str, ...], int]] = field(default_factory=list)
    context_totals: list[dict[tuple[str, ...], int]] = field(default_factory=list)
    vocab: set[str] = field(default_factory=set)
    total_tokens: int = 0

    def known(self, word: str) -> str:
        return word if word in self.vocab else UNK


def train_lm(
    corpus_lines: list[list[str]],
    max_order: int = 5,
    alpha: float = 0.4,
    length_normalize: bool = True,
) -> NgramModel:
    """Accumulate n-gram counts over pre-tokenized lines.

    Each line is padded with ``max_order - 1`` start sentinels and one end
    sentinel. Words seen exactly once in the corpus are folded into the
    unknown sentinel before counting. For each order k, windows are slid so
    a window never consists of surplus start padding (the first order-k
    window holds exactly k-1 start sentinels).
    """
    if not 1 <= max_order <= 5:
        raise ValueError(f"max_order must be in 1..5, got {max_order}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not corpus_lines:
        raise ValueError("empty training corpus")
    raw: dict[str, int] = {}
    for line in corpus_lines:
        for w in line:
            raw[w] = raw.get(w, 0) + 1
    kept = {w for w, c in raw.items() if c >= 2}
    model = NgramModel(
        max_order=max_order,
        alpha=alpha,
        length_normalize=length_normalize,
        counts=[{} for _ in range(max_order)],
        context_totals=[{} for _ in range(max_order)],
        vocab=kept | {UNK, END},
    )
    for line in corpus_lines:
        mapped = [w if w in kept else UNK for w in line]
        padded = [START] * (max_order - 1) + mapped + [END]
        for k in range(1, max_order + 1):
            for i in range(max_order - k, len(padded) - k + 1):
                gram = tuple(padded[i : i + k])
                model.counts[k - 1][gram] = model.counts[k - 1].get(gram, 0) + 1
                ctx = gram[:-1]
                model.context_totals[k - 1][ctx] = model.context_totals[k - 1].get(ctx, 0) + 1
    model.total_tokens = model.context_totals[0][()]
    return model


def _score(model: NgramModel, gram: tuple[str, ...]) -> float:
    """Stupid-backoff score in log10 domain, always finite and <= 0."""
    k = len(gram)
    if k == 1:
        c = model.counts[0].get(gram, 0)
        if c == 0:
            # possible only when the corpus had no singletons to train <unk>
            return math.log10(0.5 / model.total_tokens)
        return math.log10(c / model.total_tokens)
    c = model.counts[k - 1].get(gram, 0)
    if c > 0:
        return math.log10(c / model.context_totals[k - 1][gram[:-1]])
    return math.log10(model.alpha) + _score(model, gram[1:])


def sentence_logprob(model: NgramModel, tokens: list[str], order: int) -> float:
    """Mean per-position log10 probability of the tokens plus end sentinel.

    Position i is scored against the preceding ``order - 1`` tokens (start
    sentinels fill the left edge), backing off with the model's alpha
    multiplier down to the unigram relative frequency.
    """
    if not 1 <= order <= model.max_order:
        raise ValueError(f"order must be in 1..{model.max_order}, got {order}")
    mapped = [model.known(w) for w in tokens]
    seq = [START] * (order - 1) + mapped + [END]
    total = 0.0
    n_positions = len(mapped) + 1
    for i in range(order - 1, len(seq)):
        total += _score(model, tuple(seq[i - order + 1 : i + 1]))
    if model.length_normalize:
        return total / n_positions
    return total


def save_lm(model: NgramModel, path) -> None:
    obj = {
        "format_version": LM_FORMAT_VERSION,
        "max_order": model.max_order,
        "alpha": model.alpha,
        "length_normalize": model.length_normalize,
        "total_tokens": model.total_tokens,
        "vocab": sorted(model.vocab),
        "counts": [
            {" ".join(gram): c for gram, c in sorted(table.items())}
            for table in model.counts
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False)


def load_lm(path) -> NgramModel:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    version = obj.get("format_version")
    if version != LM_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported model format version {version!r}")
    counts = [
        {tuple(key.split(" ")): int(c) for key, c in table.items()}
        for table in obj["counts"]
    ]
    totals: list[dict[tuple[str, ...], int]] = [{} for _ in counts]
    for k, table in enumerate(counts):
        for gram, c in table.items():
            ctx = gram[:-1]
            totals[k][ctx] = totals[k].get(ctx, 0) + c
    return NgramModel(
        max_order=int(obj["max_order"]),
        alpha=float(obj["alpha"]),
        length_normalize=bool(obj["length_normalize"]),
        counts=counts,
        context_totals=totals,
        vocab=set(obj["vocab"]),
        total_tokens=int(obj["total_tokens"]),
    )
