import pytest

from readrank.corpus import SentenceRecord
from readrank.features import (
    FeatureResources,
    extract_features,
    load_features,
    record_features,
    save_features,
    sentence_features,
)
from readrank.ngramlm import train_lm
from readrank.synfeat import estimate_pcfg, read_bracketed, tree_logprob

PARSE = "(S (NP (DT the) (NN cat)) (VP (VBD sat)))"


@pytest.fixture
def resources(lexicon, dale_chall, stopwords):
    lm = train_lm([["the", "cat", "ran"], ["the", "cat", "ran"]], max_order=3)
    pcfg = estimate_pcfg([read_bracketed(PARSE)])
    return FeatureResources(lexicon, dale_chall, stopwords, lm, pcfg)


def record(**kwargs):
    return SentenceRecord(
        id=kwargs.pop("id", "s0"),
        text=kwargs.pop("text", "the cat sat on a mat today"),
        grade_bin=kwargs.pop("grade_bin", 2),
        **kwargs,
    )


class TestSentenceFeatures:
    def test_static_block_always_present(self, resources):
        rec = record()
        vec = sentence_features(rec.tokens, None, None, None, resources)
        for name in ("aoa_avg", "ngram_logprob_1", "ngram_logprob_3",
                     "parse_height", "parse_loglik", "reranker_loglik"):
            assert name in vec
        assert vec["parse_height"] == 0.0
        assert vec["parse_loglik"] == 0.0

    def test_annotation_precedence_over_pcfg(self, resources):
        rec = record(parse=PARSE, parse_loglik=-7.25)
        vec = record_features(rec, resources)
        assert vec["parse_loglik"] == -7.25

    def test_pcfg_fallback_fills_missing(self, resources):
        rec = record(parse=PARSE)
        vec = record_features(rec, resources)
        expected = tree_logprob(resources.pcfg, read_bracketed(PARSE))
        assert vec["parse_loglik"] == pytest.approx(expected)

    def test_tree_block_present_with_parse(self, resources):
        rec = record(parse=PARSE)
        vec = record_features(rec, resources)
        assert vec["pos_diversity"] == 3.0
        assert vec["syn:(S NP VP)"] == 1.0
        assert vec["parse_height"] == 2.0


class TestStore:
    def test_round_trip(self, resources, tmp_path):
        records = [record(id="s0"), record(id="s1", parse=PARSE)]
        store = extract_features(records, resources)
        path = tmp_path / "features.json"
        save_features(store, path, config={"coref": False})
        back = load_features(path)
        assert set(back) == {"s0", "s1"}
        for sid in back:
            assert back[sid].values == store[sid].values
            assert back[sid].groups == store[sid].groups
