import pytest

from readrank.corpus import LexEntry, Lexicon, WordSet, tokenize
from readrank.synfeat import read_bracketed

EXAMPLE_TREE = "(S (NP (DT the) (NN cat)) (VP (VBD sat)))"

# filled by tests/test_acceptance.py; printed after the run
ACCEPTANCE_ATTEMPTED: dict[int, str] = {}
ACCEPTANCE_PASSED: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_ATTEMPTED:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_ATTEMPTED):
        desc = ACCEPTANCE_ATTEMPTED[n]
        if n in ACCEPTANCE_PASSED:
            terminalreporter.write_line(f"ACCEPTANCE {n}: PASS - {ACCEPTANCE_PASSED[n]}")
        else:
            terminalreporter.write_line(f"ACCEPTANCE {n}: FAIL - {desc}")


@pytest.fixture
def lexicon():
    return Lexicon(
        {
            "cat": LexEntry(4.0, 1),
            "ran": LexEntry(5.0, 1),
            "sandwich": LexEntry(5.5, 2),
            "the": LexEntry(2.5, 1),
            "man": LexEntry(3.0, 1),
        }
    )


@pytest.fixture
def dale_chall():
    return WordSet({"the", "cat", "ran", "man", "a"}, "DaleChall")


@pytest.fixture
def stopwords():
    return WordSet({"the", "a", "is"}, "Stopword")


@pytest.fixture
def example_tree():
    return read_bracketed(EXAMPLE_TREE)


def toks(text):
    return tokenize(text)
