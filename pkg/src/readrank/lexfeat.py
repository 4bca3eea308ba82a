"""Lexical difficulty features over a token sequence.

All percentage features use word tokens (punctuation excluded) in the
denominator. Statistics over lexicon hits use the population standard
deviation, and the zero-hit degenerate case yields zeros with
``pct_not_in_aoa = 1`` so downstream model inputs stay dense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Lexicon, Token, WordSet, word_tokens

FEATURE_GROUPS = (
    "AoA",
    "Syllables",
    "DaleChall",
    "ContentWord",
    "WordLen",
    "NgramL",
    "POS",
    "SynTree",
    "SynScore",
    "SynOther",
)

# (name, group) schema of the lexical block, in emission order.
LEXICAL_FEATURES = (
    ("aoa_avg", "AoA"),
    ("aoa_max", "AoA"),
    ("aoa_std", "AoA"),
    ("pct_not_in_aoa", "AoA"),
    ("syll_avg", "Syllables"),
    ("syll_max", "Syllables"),
    ("dale_chall_pct", "DaleChall"),
    ("content_word_pct", "ContentWord"),
    ("n_words", "WordLen"),
    ("n_chars", "WordLen"),
)


@dataclass
class FeatureVector:
    """Ordered map of named real-valued features, each tagged with a group."""

    values: dict[str, float] = field(default_factory=dict)
    groups: dict[str, str] = field(default_factory=dict)

    def add(self, name: str, value: float, group: str) -> None:
        if name in self.values:
            raise ValueError(f"duplicate feature name {name!r}")
        if group not in FEATURE_GROUPS:
            raise ValueError(f"unknown feature group {group!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"feature {name!r} is not finite: {value!r}")
        self.values[name] = value
        self.groups[name] = group

    def merge(self, other: "FeatureVector") -> "FeatureVector":
        for name, value in other.values.items():
            self.add(name, value, other.groups[name])
        return self

    def prefixed(self, prefix: str) -> "FeatureVector":
        out = FeatureVector()
        for name, value in self.values.items():
            out.add(prefix + name, value, self.groups[name])
        return out

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def __len__(self) -> int:
        return len(self.values)


def _population_std(xs: list[float]) -> float:
    mean = sum(xs) / len(xs)
    return math.sqrt(sum((x - mean) ** 2 for x in xs) / len(xs))


def aoa_stats(tokens: Iterable[Token], lexicon: Lexicon) -> dict[str, float]:
    """Age-of-acquisition statistics over the tokens found in the lexicon."""
    words = word_tokens(tokens)
    # sorted so summation order (and hence the floats) ignores token order
    hits = sorted(lexicon.get(t.low).aoa for t in words if t.low in lexicon)
    if not hits:
        return {"aoa_avg": 0.0, "aoa_max": 0.0, "aoa_std": 0.0, "pct_not_in_aoa": 1.0}
    return {
        "aoa_avg": sum(hits) / len(hits),
        "aoa_max": hits[-1],
        "aoa_std": _population_std(hits),
        "pct_not_in_aoa": (len(words) - len(hits)) / len(words),
    }


def syllable_stats(tokens: Iterable[Token], lexicon: Lexicon) -> dict[str, float]:
    """Mean and maximum syllable count over lexicon hits; zero hits -> (0, 0)."""
    hits = sorted(
        lexicon.get(t.low).syllables for t in word_tokens(tokens) if t.low in lexicon
    )
    if not hits:
        return {"syll_avg": 0.0, "syll_max": 0.0}
    return {"syll_avg": sum(hits) / len(hits), "syll_max": float(hits[-1])}


def dale_chall_pct(tokens: Iterable[Token], dale_chall: WordSet) -> float:
    """Fraction of word tokens found in the easy-word list."""
    words = word_tokens(tokens)
    if not words:
        return 0.0
    return sum(1 for t in words if t.low in dale_chall) / len(words)


def content_word_pct(tokens: Iterable[Token], stopwords: WordSet) -> float:
    """Fraction of word tokens that are not stopwords."""
    words = word_tokens(tokens)
    if not words:
        return 0.0
    return sum(1 for t in words if t.low not in stopwords) / len(words)


def surface_stats(tokens: Iterable[Token]) -> dict[str, float]:
    """Word-token count and total surface characters (separators excluded)."""
    tokens = list(tokens)
    return {
        "n_words": float(len(word_tokens(tokens))),
        "n_chars": float(sum(len(t.surface) for t in tokens)),
    }


def lexical_vector(
    tokens: Iterable[Token],
    lexicon: Lexicon,
    dale_chall: WordSet,
    stopwords: WordSet,
) -> FeatureVector:
    """All lexical features in the fixed :data:`LEXICAL_FEATURES` order."""
    tokens = list(tokens)
    stats: dict[str, float] = {}
    stats.update(aoa_stats(tokens, lexicon))
    stats.update(syllable_stats(tokens, lexicon))
    stats["dale_chall_pct"] = dale_chall_pct(tokens, dale_chall)
    stats["content_word_pct"] = content_word_pct(tokens, stopwords)
    stats.update(surface_stats(tokens))
    vec = FeatureVector()
    for name, group in LEXICAL_FEATURES:
        vec.add(name, stats[name], group)
    return vec
