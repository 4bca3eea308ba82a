import pytest

from readrank.context import context_vector, full_context, linked_sentences
from readrank.corpus import PassageContext, SentenceRecord, tokenize
from readrank.features import FeatureResources, record_features, sentence_features
from readrank.ngramlm import train_lm
from readrank.synfeat import estimate_pcfg, read_bracketed


def passage_record(chains, parses=None, parse_logliks=None):
    sentences = [
        "the cat ran home today quickly",
        "a man ate the sandwich slowly",
        "the cat sat on a mat",
    ]
    passage = PassageContext(
        sentences=sentences,
        target_index=2,
        word_count=18,
        parses=parses,
        parse_logliks=parse_logliks,
    )
    return SentenceRecord(
        id="s000",
        text=sentences[2],
        grade_bin=3,
        passage=passage,
        coref_chains=chains,
    )


@pytest.fixture
def resources(lexicon, dale_chall, stopwords):
    lm = train_lm(
        [["the", "cat", "ran"], ["the", "man", "sat"], ["the", "cat", "ran"]],
        max_order=3,
    )
    return FeatureResources(lexicon, dale_chall, stopwords, lm, pcfg=None)


class TestLinkedSentences:
    def test_chain_spanning_target(self):
        rec = passage_record([[(0, 0, 1), (2, 1, 2)]])
        assert linked_sentences(rec).sentence_indices == [0]

    def test_no_chain_touches_target(self):
        rec = passage_record([[(0, 0, 1), (1, 0, 1)]])
        assert linked_sentences(rec).sentence_indices == []

    def test_two_chains_union(self):
        rec = passage_record([[(0, 0, 1), (2, 0, 1)], [(1, 2, 3), (2, 4, 5)]])
        assert linked_sentences(rec).sentence_indices == [0, 1]

    def test_out_of_bounds_mention(self):
        rec = passage_record([[(0, 0, 1), (2, 0, 1)]])
        rec.coref_chains = [[(5, 0, 1), (2, 0, 1)]]
        with pytest.raises(ValueError, match="out of passage bounds"):
            linked_sentences(rec)

    def test_monotone_adding_chain_never_removes(self):
        base = [[(0, 0, 1), (2, 0, 1)]]
        more = base + [[(1, 0, 1), (2, 0, 1)]]
        s1 = set(linked_sentences(passage_record(base)).sentence_indices)
        s2 = set(linked_sentences(passage_record(more)).sentence_indices)
        assert s1 <= s2

    def test_full_context_excludes_target(self):
        rec = passage_record(None)
        assert full_context(rec).sentence_indices == [0, 1]

    def test_missing_passage(self):
        rec = SentenceRecord(id="s1", text="a b c d e f", grade_bin=1)
        with pytest.raises(ValueError, match="no passage"):
            linked_sentences(rec)


class TestContextVector:
    def test_empty_set_degenerate(self, resources):
        rec = passage_record([])
        ctx = linked_sentences(rec)
        vec = context_vector(
            ctx, resources.lexicon, resources.dale_chall, resources.stopwords,
            resources.lm,
        )
        assert vec["ctx:pct_not_in_aoa"] == 1.0
        for name, value in vec.values.items():
            if name != "ctx:pct_not_in_aoa":
                assert value == 0.0

    def test_singleton_equals_own_features(self, resources):
        parses = [
            "(S (NP (DT the) (NN cat)) (VP (VBD ran) (NP (NN home))))",
            None,
            None,
        ]
        rec = passage_record([[(0, 0, 1), (2, 0, 1)]], parses=parses,
                             parse_logliks=[-3.5, None, None])
        ctx = linked_sentences(rec)
        vec = context_vector(
            ctx, resources.lexicon, resources.dale_chall, resources.stopwords,
            resources.lm,
        )
        own = sentence_features(
            tokenize(rec.passage.sentences[0]),
            read_bracketed(parses[0]),
            -3.5,
            None,
            resources,
        )
        for name, value in own.values.items():
            assert vec["ctx:" + name] == pytest.approx(value, abs=1e-12), name
        assert set(vec.values) == {"ctx:" + n for n in own.values}

    def test_pooled_dale_chall(self, resources):
        # members: sentences 0 and 1; 6 and 5(+the->in list) word tokens pooled
        rec = passage_record([[(0, 0, 1), (2, 0, 1)], [(1, 0, 1), (2, 1, 2)]])
        ctx = linked_sentences(rec)
        vec = context_vector(
            ctx, resources.lexicon, resources.dale_chall, resources.stopwords,
            resources.lm,
        )
        pooled = tokenize(rec.passage.sentences[0]) + tokenize(rec.passage.sentences[1])
        from readrank.lexfeat import dale_chall_pct

        assert vec["ctx:dale_chall_pct"] == pytest.approx(
            dale_chall_pct(pooled, resources.dale_chall)
        )

    def test_tree_features_averaged(self, resources):
        parses = [
            "(S (NP (DT the) (NN cat)) (VP (VBD ran)))",
            "(S (NP (NN man)) (VP (VBD ate) (NP (DT the) (NN sandwich))))",
            None,
        ]
        rec = passage_record(
            [[(0, 0, 1), (2, 0, 1)], [(1, 0, 1), (2, 1, 2)]],
            parses=parses,
            parse_logliks=[-2.0, -4.0, None],
        )
        ctx = linked_sentences(rec)
        vec = context_vector(
            ctx, resources.lexicon, resources.dale_chall, resources.stopwords,
            resources.lm,
        )
        from readrank.synfeat import tree_shape

        t0 = read_bracketed(parses[0])
        t1 = read_bracketed(parses[1])
        expected_height = (
            tree_shape(t0)["parse_height"] + tree_shape(t1)["parse_height"]
        ) / 2
        assert vec["ctx:parse_height"] == pytest.approx(expected_height)
        assert vec["ctx:parse_loglik"] == pytest.approx(-3.0)
        # (S NP VP) appears in both trees at depth 1 -> average count 1.0
        assert vec["ctx:syn:(S NP VP)"] == pytest.approx(1.0)


class TestSchemaParity:
    def test_ctx_names_mirror_target_names(self, resources):
        parses = [
            "(S (NP (DT the) (NN cat)) (VP (VBD ran) (NP (NN home))))",
            "(S (NP (DT a) (NN man)) (VP (VBD ate)))",
            "(S (NP (DT the) (NN cat)) (VP (VBD sat)))",
        ]
        rec = passage_record(
            [[(0, 0, 1), (2, 0, 1)], [(1, 0, 1), (2, 1, 2)]], parses=parses,
            parse_logliks=[-2.0, -4.0, -3.0],
        )
        rec.parse = parses[2]
        rec.parse_loglik = -3.0
        vec = record_features(rec, resources, coref=True)
        plain = {n for n in vec.values if not n.startswith("ctx:")}
        ctx = {n[4:] for n in vec.values if n.startswith("ctx:")}
        static = {n for n in plain if not (n.startswith("pos_") or n.startswith("syn:"))}
        static_ctx = {n for n in ctx if not (n.startswith("pos_") or n.startswith("syn:"))}
        assert static == static_ctx
