"""Bracketed parse trees and the syntactic feature block.

Trees arrive as bracketed strings from an external constituency parser;
parse/reranker likelihoods are ingested annotations, with a relative-
frequency PCFG as fallback scorer when a sentence lacks the annotation.

Conventions (fixed so feature values are reproducible bit for bit):
  height  edges on the longest root-to-preterminal path
  length  number of preterminals
  subtree canonical form: truncated label structure with single-space
          separators and no token leaves, e.g. ``(S (NP DT NN) (VP VBD))``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .lexfeat import FeatureVector

DEFAULT_RULE_FLOOR = math.log(1e-6)


@dataclass
class ParseTree:
    """Constituency node; preterminals carry their token in ``token``."""

    label: str
    children: list["ParseTree"] = field(default_factory=list)
    token: str | None = None

    @property
    def is_preterminal(self) -> bool:
        return self.token is not None

    def preterminals(self) -> list["ParseTree"]:
        if self.is_preterminal:
            return [self]
        out = []
        for child in self.children:
            out.extend(child.preterminals())
        return out

    def leaves(self) -> list[str]:
        return [p.token for p in self.preterminals()]


class TreeFormatError(ValueError):
    """Bad bracketed notation; message includes the character offset."""


def read_bracketed(text: str) -> ParseTree:
    """Recursive-descent reader for ``(LABEL child ...)`` notation."""
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_node() -> ParseTree:
        nonlocal pos
        skip_ws()
        if pos >= n or text[pos] != "(":
            raise TreeFormatError(f"expected '(' at offset {pos}")
        pos += 1
        skip_ws()
        start = pos
        while pos < n and not text[pos].isspace() and text[pos] not in "()":
            pos += 1
        label = text[start:pos]
        if not label:
            raise TreeFormatError(f"empty label at offset {start}")
        skip_ws()
        if pos < n and text[pos] == "(":
            children = []
            while pos < n and text[pos] == "(":
                children.append(parse_node())
                skip_ws()
            if pos >= n or text[pos] != ")":
                raise TreeFormatError(f"expected ')' at offset {pos}")
            pos += 1
            return ParseTree(label, children)
        start = pos
        while pos < n and text[pos] not in "()":
            pos += 1
        token = text[start:pos].strip()
        if not token:
            raise TreeFormatError(f"empty constituent at offset {start}")
        if pos >= n or text[pos] != ")":
            raise TreeFormatError(f"expected ')' at offset {pos}")
        pos += 1
        return ParseTree(label, token=token)

    tree = parse_node()
    skip_ws()
    if pos != n:
        raise TreeFormatError(f"trailing input at offset {pos}")
    return tree


def print_bracketed(tree: ParseTree) -> str:
    if tree.is_preterminal:
        return f"({tree.label} {tree.token})"
    inner = " ".join(print_bracketed(c) for c in tree.children)
    return f"({tree.label} {inner})"


def pos_features(tree: ParseTree) -> FeatureVector:
    """Per-tag percentage over preterminals plus tag diversity."""
    tags = [p.label for p in tree.preterminals()]
    vec = FeatureVector()
    total = len(tags)
    tag_counts: dict[str, int] = {}
    for tag in tags:
        tag_counts[tag] = tag_counts.get(tag, 0) + 1
    for tag in sorted(tag_counts):
        vec.add(f"pos_pct:{tag}", tag_counts[tag] / total, "POS")
    vec.add("pos_diversity", float(len(tag_counts)), "POS")
    return vec


def _canonical(node: ParseTree, depth: int) -> str:
    if depth == 0 or node.is_preterminal:
        return node.label
    inner = " ".join(_canonical(c, depth - 1) for c in node.children)
    return f"({node.label} {inner})"


def subtree_features(tree: ParseTree, depths: tuple[int, ...] = (1, 2, 3)) -> FeatureVector:
    """Occurrence counts of truncated label subtrees rooted at each node.

    Preterminals yield none (tokens are excluded). When deepening stops
    changing the truncated form (the node bottoms out early), the shape is
    counted once per node, not once per depth.
    """
    counts: dict[str, int] = {}

    def visit(node: ParseTree):
        if node.is_preterminal:
            return
        seen: set[str] = set()
        for d in depths:
            shape = _canonical(node, d)
            if shape not in seen:
                seen.add(shape)
                counts[shape] = counts.get(shape, 0) + 1
        for child in node.children:
            visit(child)

    visit(tree)
    vec = FeatureVector()
    for shape in sorted(counts):
        vec.add(f"syn:{shape}", float(counts[shape]), "SynTree")
    return vec


def tree_shape(tree: ParseTree) -> dict[str, float]:
    def height(node: ParseTree) -> int:
        if node.is_preterminal:
            return 0
        return 1 + max(height(c) for c in node.children)

    return {
        "parse_height": float(height(tree)),
        "parse_length": float(len(tree.preterminals())),
    }


# ---------------------------------------------------------------------------
# PCFG fallback scorer


def productions(tree: ParseTree) -> list[tuple[str, tuple[str, ...]]]:
    """All internal (lhs -> child labels) productions; preterminal emissions excluded."""
    out = []

    def visit(node: ParseTree):
        if node.is_preterminal:
            return
        out.append((node.label, tuple(c.label for c in node.children)))
        for child in node.children:
            visit(child)

    visit(tree)
    return out


@dataclass
class Pcfg:
    """Relative-frequency rule log-probabilities, normalized per lhs."""

    rule_logprobs: dict[tuple[str, tuple[str, ...]], float]
    floor_logprob: float = DEFAULT_RULE_FLOOR


def estimate_pcfg(trees: list[ParseTree], floor_logprob: float = DEFAULT_RULE_FLOOR) -> Pcfg:
    if not trees:
        raise ValueError("empty treebank")
    rule_counts: dict[tuple[str, tuple[str, ...]], int] = {}
    lhs_counts: dict[str, int] = {}
    for tree in trees:
        for lhs, rhs in productions(tree):
            rule_counts[(lhs, rhs)] = rule_counts.get((lhs, rhs), 0) + 1
            lhs_counts[lhs] = lhs_counts.get(lhs, 0) + 1
    logprobs = {
        rule: math.log(c / lhs_counts[rule[0]]) for rule, c in rule_counts.items()
    }
    return Pcfg(logprobs, floor_logprob)


def tree_logprob(pcfg: Pcfg, tree: ParseTree) -> float:
    """Sum of rule log-probabilities over internal productions (floored for unseen)."""
    total = 0.0
    for rule in productions(tree):
        total += pcfg.rule_logprobs.get(rule, pcfg.floor_logprob)
    return total


def load_treebank(path) -> list[ParseTree]:
    """One bracketed tree per line; blank lines skipped."""
    trees = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                trees.append(read_bracketed(line))
            except TreeFormatError as exc:
                raise TreeFormatError(f"{path}, line {lineno}: {exc}") from exc
    return trees
