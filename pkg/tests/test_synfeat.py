import math
import random

import pytest

from readrank.synfeat import (
    ParseTree,
    TreeFormatError,
    estimate_pcfg,
    load_treebank,
    pos_features,
    print_bracketed,
    productions,
    read_bracketed,
    subtree_features,
    tree_logprob,
    tree_shape,
)

EXAMPLE = "(S (NP (DT the) (NN cat)) (VP (VBD sat)))"


class TestReader:
    def test_example_structure(self):
        tree = read_bracketed(EXAMPLE)
        assert tree.label == "S"
        pres = tree.preterminals()
        assert [p.label for p in pres] == ["DT", "NN", "VBD"]
        assert tree.leaves() == ["the", "cat", "sat"]

    def test_unbalanced_reports_offset(self):
        with pytest.raises(TreeFormatError, match="offset"):
            read_bracketed("(S")

    def test_empty_constituent(self):
        with pytest.raises(TreeFormatError, match="offset"):
            read_bracketed("(S ())")

    def test_trailing_garbage(self):
        with pytest.raises(TreeFormatError, match="trailing"):
            read_bracketed("(S (NN x)) junk")

    def test_round_trip_normalizes_whitespace_only(self):
        messy = "(S   (NP (DT the)\n  (NN cat))   (VP (VBD sat)) )"
        assert print_bracketed(read_bracketed(messy)) == EXAMPLE
        assert print_bracketed(read_bracketed(EXAMPLE)) == EXAMPLE


class TestPosFeatures:
    def test_example_tree(self, example_tree):
        vec = pos_features(example_tree)
        assert vec["pos_pct:DT"] == pytest.approx(1 / 3)
        assert vec["pos_pct:NN"] == pytest.approx(1 / 3)
        assert vec["pos_pct:VBD"] == pytest.approx(1 / 3)
        assert vec["pos_diversity"] == 3.0

    def test_single_tag(self):
        vec = pos_features(read_bracketed("(NP (NN a) (NN b))"))
        assert vec["pos_pct:NN"] == 1.0
        assert vec["pos_diversity"] == 1.0

    def test_percentages_sum_to_one_fuzz(self):
        rng = random.Random(3)
        for _ in range(100):
            tree = random_tree(rng)
            vec = pos_features(tree)
            total = sum(v for n, v in vec.values.items() if n.startswith("pos_pct:"))
            assert total == pytest.approx(1.0, abs=1e-12)
            assert vec["pos_diversity"] <= len(tree.preterminals())


class TestSubtrees:
    def test_depth_one_productions(self, example_tree):
        vec = subtree_features(example_tree, depths=(1,))
        assert vec.values == {
            "syn:(S NP VP)": 1.0,
            "syn:(NP DT NN)": 1.0,
            "syn:(VP VBD)": 1.0,
        }

    def test_depth_two_at_root(self, example_tree):
        vec = subtree_features(example_tree, depths=(2,))
        assert vec.values["syn:(S (NP DT NN) (VP VBD))"] == 1.0

    def test_exhausted_shapes_counted_once_per_node(self, example_tree):
        vec = subtree_features(example_tree)  # depths 1-3
        # (VP VBD) bottoms out at depth 1; depths 2 and 3 add nothing new
        assert vec.values["syn:(VP VBD)"] == 1.0
        assert vec.values["syn:(S (NP DT NN) (VP VBD))"] == 1.0

    def test_preterminals_yield_no_features(self):
        vec = subtree_features(read_bracketed("(NN cat)"))
        assert vec.values == {}

    def test_depth1_multiset_equals_productions_fuzz(self):
        rng = random.Random(4)
        for _ in range(100):
            tree = random_tree(rng)
            vec = subtree_features(tree, depths=(1,))
            expected: dict[str, float] = {}
            for lhs, rhs in productions(tree):
                name = f"syn:({lhs} {' '.join(rhs)})"
                expected[name] = expected.get(name, 0.0) + 1.0
            assert vec.values == expected


class TestShape:
    def test_example_tree(self, example_tree):
        assert tree_shape(example_tree) == {"parse_height": 2.0, "parse_length": 3.0}

    def test_single_preterminal_under_root(self):
        assert tree_shape(read_bracketed("(S (NN cat))")) == {
            "parse_height": 1.0,
            "parse_length": 1.0,
        }

    def test_height_invariant_under_sibling_reorder(self):
        a = read_bracketed("(S (NP (DT the) (NN cat)) (VP (VBD sat)))")
        b = read_bracketed("(S (VP (VBD sat)) (NP (DT the) (NN cat)))")
        assert tree_shape(a)["parse_height"] == tree_shape(b)["parse_height"]


class TestPcfg:
    def test_single_tree_logprob_zero(self, example_tree):
        pcfg = estimate_pcfg([example_tree])
        assert tree_logprob(pcfg, example_tree) == pytest.approx(0.0, abs=1e-12)

    def test_half_frequency_rule(self):
        t1 = read_bracketed("(S (NP (NN a)) (VP (VBD b)))")
        t2 = read_bracketed("(S (NP (DT a) (NN b)) (VP (VBD c)))")
        pcfg = estimate_pcfg([t1, t2])
        # NP -> NN seen 1 of 2 NP expansions
        assert pcfg.rule_logprobs[("NP", ("NN",))] == pytest.approx(math.log(0.5))

    def test_unseen_rule_floored_and_finite(self, example_tree):
        pcfg = estimate_pcfg([example_tree])
        other = read_bracketed("(S (VP (VBD sat)) (NP (NN cat)))")
        lp = tree_logprob(pcfg, other)
        assert math.isfinite(lp)
        assert lp <= pcfg.floor_logprob

    def test_per_lhs_normalization(self):
        rng = random.Random(5)
        trees = [random_tree(rng) for _ in range(30)]
        pcfg = estimate_pcfg(trees)
        by_lhs: dict[str, float] = {}
        for (lhs, _), lp in pcfg.rule_logprobs.items():
            by_lhs[lhs] = by_lhs.get(lhs, 0.0) + math.exp(lp)
        for lhs, total in by_lhs.items():
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_logprob_additive_over_productions(self):
        rng = random.Random(6)
        trees = [random_tree(rng) for _ in range(20)]
        pcfg = estimate_pcfg(trees)
        tree = random_tree(rng)
        total = sum(
            pcfg.rule_logprobs.get(rule, pcfg.floor_logprob)
            for rule in productions(tree)
        )
        assert tree_logprob(pcfg, tree) == pytest.approx(total, abs=1e-12)

    def test_empty_treebank(self):
        with pytest.raises(ValueError, match="empty"):
            estimate_pcfg([])

    def test_load_treebank(self, tmp_path):
        path = tmp_path / "trees.txt"
        path.write_text(EXAMPLE + "\n\n(S (NN x))\n")
        trees = load_treebank(path)
        assert len(trees) == 2
        path.write_text("(S\n")
        with pytest.raises(TreeFormatError, match="line 1"):
            load_treebank(path)


def random_tree(rng: random.Random, depth: int = 0) -> ParseTree:
    """Small random tree over a fixed label set; always ends in preterminals."""
    tags = ["DT", "NN", "VBD", "JJ", "IN"]
    labels = ["S", "NP", "VP", "PP"]
    if depth >= 3 or rng.random() < 0.3:
        return ParseTree(rng.choice(tags), token=rng.choice(["a", "b", "c"]))
    n_children = rng.randint(1, 3)
    return ParseTree(
        rng.choice(labels),
        [random_tree(rng, depth + 1) for _ in range(n_children)],
    )
