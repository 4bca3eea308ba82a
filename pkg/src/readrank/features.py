"""Per-sentence feature extraction pipeline and feature-store persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .context import context_vector, linked_sentences
from .corpus import Lexicon, SentenceRecord, WordSet
from .lexfeat import FEATURE_GROUPS, FeatureVector, lexical_vector
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
class FeatureResources:
    lexicon: Lexicon
    dale_chall: WordSet
    stopwords: WordSet
    lm: NgramModel
    pcfg: Pcfg | None = None


def sentence_features(
    tokens,
    tree: ParseTree | None,
    parse_loglik: float | None,
    reranker_loglik: float | None,
    res: FeatureResources,
) -> FeatureVector:
    """Full feature vector for one sentence.

    Annotated parse/reranker likelihoods take precedence; the PCFG fallback
    fills ``parse_loglik`` only when the annotation is absent. Sentences
    without a tree emit zero shape/score features and no POS or subtree
    names (the design-matrix builder densifies over the corpus schema).
    """
    vec = lexical_vector(tokens, res.lexicon, res.dale_chall, res.stopwords)
    lows = [t.low for t in tokens]
    for k in range(1, res.lm.max_order + 1):
        vec.add(f"ngram_logprob_{k}", sentence_logprob(res.lm, lows, k), "NgramL")
    if tree is not None:
        vec.merge(pos_features(tree))
        vec.merge(subtree_features(tree))
        shape = tree_shape(tree)
        vec.add("parse_height", shape["parse_height"], "SynOther")
        vec.add("parse_length", shape["parse_length"], "SynOther")
    else:
        vec.add("parse_height", 0.0, "SynOther")
        vec.add("parse_length", 0.0, "SynOther")
    if parse_loglik is None and tree is not None and res.pcfg is not None:
        parse_loglik = tree_logprob(res.pcfg, tree)
    vec.add("parse_loglik", parse_loglik if parse_loglik is not None else 0.0, "SynScore")
    vec.add(
        "reranker_loglik", reranker_loglik if reranker_loglik is not None else 0.0, "SynScore"
    )
    return vec


def record_features(
    record: SentenceRecord, res: FeatureResources, coref: bool = False
) -> FeatureVector:
    """Target-sentence features, plus the ``ctx:`` block when ``coref`` is on."""
    tree = read_bracketed(record.parse) if record.parse else None
    vec = sentence_features(
        record.tokens, tree, record.parse_loglik, record.reranker_loglik, res
    )
    if coref:
        ctx = linked_sentences(record)
        vec.merge(
            context_vector(ctx, res.lexicon, res.dale_chall, res.stopwords, res.lm, res.pcfg)
        )
    return vec


def extract_features(
    records: list[SentenceRecord], res: FeatureResources, coref: bool = False
) -> dict[str, FeatureVector]:
    return {rec.id: record_features(rec, res, coref) for rec in records}


def save_features(store: dict[str, FeatureVector], path, config: dict | None = None) -> None:
    obj = {
        "config": config or {},
        "features": {
            sid: {"values": vec.values, "groups": vec.groups}
            for sid, vec in sorted(store.items())
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True)


def load_features(path) -> dict[str, FeatureVector]:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    store = {}
    for sid, entry in obj["features"].items():
        vec = FeatureVector()
        for name, value in entry["values"].items():
            vec.add(name, value, entry["groups"][name])
        store[sid] = vec
    return store
