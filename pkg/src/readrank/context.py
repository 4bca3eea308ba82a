"""Coreference-linked context sets and their parallel feature vectors.

For the sentence-in-passage task, a passage sentence joins the additional
set when it shares at least one coreference chain with the target sentence.
Every feature computed for a sentence is recomputed over the set: bag
features pool the concatenated tokens, tree-derived features are averaged
across member trees, and all names carry a ``ctx:`` prefix.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Lexicon, SentenceRecord, Token, WordSet, tokenize
from .lexfeat import FeatureVector, lexical_vector
from .ngramlm import NgramModel, sentence_logprob
from .synfeat import (
    ParseTree,
    Pcfg,
    pos_features,
    read_bracketed,
    subtree_features,
    tree_logprob,
    tree_shape,
)


@dataclass
class ContextSet:
    """Passage sentences linked to the target (target itself excluded)."""

    sentence_indices: list[int]
    tokens: list[Token]
    trees: list[ParseTree | None] | None = None
    parse_logliks: list[float | None] | None = None
    reranker_logliks: list[float | None] | None = None


def _build_context(record: SentenceRecord, indices: list[int]) -> ContextSet:
    passage = record.passage
    tokens: list[Token] = []
    for i in indices:
        tokens.extend(tokenize(passage.sentences[i]))
    trees = None
    if passage.parses is not None:
        trees = [
            read_bracketed(passage.parses[i]) if passage.parses[i] else None
            for i in indices
        ]
    pick = lambda ann: [ann[i] for i in indices] if ann is not None else None
    return ContextSet(
        sentence_indices=indices,
        tokens=tokens,
        trees=trees,
        parse_logliks=pick(passage.parse_logliks),
        reranker_logliks=pick(passage.reranker_logliks),
    )


def linked_sentences(record: SentenceRecord) -> ContextSet:
    """Sentences sharing a coreference chain with the target sentence."""
    if record.passage is None:
        raise ValueError(f"sentence {record.id}: no passage context")
    n = len(record.passage.sentences)
    target = record.passage.target_index
    linked: set[int] = set()
    for chain in record.coref_chains or []:
        for si, _, _ in chain:
            if not 0 <= si < n:
                raise ValueError(
                    f"sentence {record.id}: chain mention sentence_index {si} "
                    f"out of passage bounds (0..{n - 1})"
                )
        if any(si == target for si, _, _ in chain):
            linked.update(si for si, _, _ in chain if si != target)
    return _build_context(record, sorted(linked))


def full_context(record: SentenceRecord) -> ContextSet:
    """All passage sentences except the target (rank-change analysis set)."""
    if record.passage is None:
        raise ValueError(f"sentence {record.id}: no passage context")
    target = record.passage.target_index
    indices = [i for i in range(len(record.passage.sentences)) if i != target]
    return _build_context(record, indices)


def context_vector(
    ctx: ContextSet,
    lexicon: Lexicon,
    dale_chall: WordSet,
    stopwords: WordSet,
    lm: NgramModel,
    pcfg: Pcfg | None = None,
) -> FeatureVector:
    """Feature vector over the context set, names prefixed ``ctx:``.

    The empty set yields zeros under the usual degenerate conventions
    (``pct_not_in_aoa`` = 1, everything else 0).
    """
    vec = lexical_vector(ctx.tokens, lexicon, dale_chall, stopwords)
    empty = not ctx.sentence_indices
    for k in range(1, lm.max_order + 1):
        score = 0.0 if empty else sentence_logprob(lm, [t.low for t in ctx.tokens], k)
        vec.add(f"ngram_logprob_{k}", score, "NgramL")

    trees = [t for t in (ctx.trees or []) if t is not None]
    if trees:
        pos_acc: dict[str, float] = {}
        syn_acc: dict[str, float] = {}
        diversity = height = length = 0.0
        for tree in trees:
            pos = pos_features(tree)
            for name, value in pos.values.items():
                if name == "pos_diversity":
                    diversity += value
                else:
                    pos_acc[name] = pos_acc.get(name, 0.0) + value
            for name, value in subtree_features(tree).values.items():
                syn_acc[name] = syn_acc.get(name, 0.0) + value
            shape = tree_shape(tree)
            height += shape["parse_height"]
            length += shape["parse_length"]
        m = len(trees)
        for name in sorted(pos_acc):
            vec.add(name, pos_acc[name] / m, "POS")
        vec.add("pos_diversity", diversity / m, "POS")
        for name in sorted(syn_acc):
            vec.add(name, syn_acc[name] / m, "SynTree")
        vec.add("parse_height", height / m, "SynOther")
        vec.add("parse_length", length / m, "SynOther")
    else:
        vec.add("parse_height", 0.0, "SynOther")
        vec.add("parse_length", 0.0, "SynOther")

    def mean_score(annotations, fallback: bool) -> float:
        values = []
        for i in range(len(ctx.sentence_indices)):
            ann = annotations[i] if annotations is not None else None
            if ann is not None:
                values.append(float(ann))
            elif fallback and pcfg is not None and ctx.trees and ctx.trees[i] is not None:
                values.append(tree_logprob(pcfg, ctx.trees[i]))
        return sum(values) / len(values) if values else 0.0

    vec.add("parse_loglik", mean_score(ctx.parse_logliks, fallback=True), "SynScore")
    vec.add("reranker_loglik", mean_score(ctx.reranker_logliks, fallback=False), "SynScore")
    return vec.prefixed("ctx:")
