"""Data model, file ingestion, tokenization, pair generation and splitting.

File formats:
  sentences   JSON Lines, one object per line with the ``SentenceRecord``
              fields (``parse`` is a single bracketed string, ``coref_chains``
              arrays of ``[sentence_index, token_start, token_end]`` triples).
  judgments   JSON Lines with the ``JudgmentRecord`` fields.
  lexicon     CSV ``word,aoa_rating,n_syllables`` with header.
  wordlists   one word per line, ``#``-prefixed comment lines ignored.
"""

from __future__ import annotations

import csv
import json
import random
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

GRADE_BINS = (1, 2, 3, 4, 5, 6)
SENT_WORD_RANGE = (6, 20)
PASSAGE_WORD_RANGE = (136, 160)

CHOICE_A = "A"
CHOICE_B = "B"
CHOICE_DRAW = "draw"
CHOICES = (CHOICE_A, CHOICE_B, CHOICE_DRAW)
ORDERS = ("AB", "BA")


class FormatError(ValueError):
    """Malformed input file; the message names the line and field."""


class SplitError(RuntimeError):
    """Requested test-set size could not be reached within the retry budget."""


class Token(NamedTuple):
    surface: str
    low: str


import re

# A token is a word run (internal apostrophes kept, so contractions stay
# whole) or a single punctuation character.
_TOKEN_RE = re.compile(r"\w+(?:['’]\w+)*|[^\w\s]")


def tokenize(text: str) -> list[Token]:
    """Deterministic rule-based tokenizer.

    Splits on whitespace with punctuation detached as separate tokens;
    apostrophe-internal contractions are kept as one token. Each token
    carries its surface form and lowercased form.
    """
    return [Token(m, m.lower()) for m in _TOKEN_RE.findall(text)]


def is_word(token: Token) -> bool:
    """True for tokens containing at least one alphanumeric character."""
    return any(ch.isalnum() for ch in token.low)


def word_tokens(tokens: Iterable[Token]) -> list[Token]:
    return [t for t in tokens if is_word(t)]


@dataclass
class PassageContext:
    """Surrounding passage of a target sentence.

    ``parses`` / ``parse_logliks`` / ``reranker_logliks`` are optional
    per-sentence annotation lists aligned with ``sentences`` (entries may be
    null); they make tree-derived context features computable from a
    self-contained file.
    """

    sentences: list[str]
    target_index: int
    word_count: int
    parses: list[str | None] | None = None
    parse_logliks: list[float | None] | None = None
    reranker_logliks: list[float | None] | None = None

    def __post_init__(self):
        if not 0 <= self.target_index < len(self.sentences):
            raise ValueError(
                f"target_index {self.target_index} out of range for "
                f"{len(self.sentences)} passage sentences"
            )
        for name in ("parses", "parse_logliks", "reranker_logliks"):
            ann = getattr(self, name)
            if ann is not None and len(ann) != len(self.sentences):
                raise ValueError(f"{name} length differs from sentences")


@dataclass
class SentenceRecord:
    """One sentence with its grade bin and optional annotations.

    ``tokens`` is derived from ``text`` by :func:`tokenize` and is not a
    serialized field. ``coref_chains`` is a list of chains, each chain a list
    of ``(sentence_index, token_start, token_end)`` mention triples indexing
    into the passage.
    """

    id: str
    text: str
    grade_bin: int
    passage: PassageContext | None = None
    parse: str | None = None
    parse_loglik: float | None = None
    reranker_loglik: float | None = None
    coref_chains: list[list[tuple[int, int, int]]] | None = None
    tokens: list[Token] = field(init=False, repr=False)

    def __post_init__(self):
        if self.grade_bin not in GRADE_BINS:
            raise ValueError(f"sentence {self.id}: grade_bin {self.grade_bin} not in 1..6")
        if self.passage is not None:
            target = self.passage.sentences[self.passage.target_index]
            if target != self.text:
                raise ValueError(
                    f"sentence {self.id}: passage target sentence differs from text"
                )
        self.tokens = tokenize(self.text)

    def length_violation(self) -> str | None:
        """Word-count window check used by paper-faithful validation."""
        n = len(word_tokens(self.tokens))
        lo, hi = SENT_WORD_RANGE
        if not lo <= n <= hi:
            return f"sentence {self.id}: {n} words outside [{lo}, {hi}]"
        if self.passage is not None:
            lo, hi = PASSAGE_WORD_RANGE
            if not lo <= self.passage.word_count <= hi:
                return (
                    f"sentence {self.id}: passage word_count "
                    f"{self.passage.word_count} outside [{lo}, {hi}]"
                )
        return None


@dataclass
class JudgmentRecord:
    """One worker's decision on one sentence pair.

    ``choice`` is canonical: it names the sentence (A or B by pair identity,
    not by presentation position) the worker judged more difficult, or
    ``draw`` for "I don't know or can't decide".
    """

    pair_id: str
    sent_a: str
    sent_b: str
    worker_id: str
    choice: str
    presentation_order: str = "AB"
    is_gold: bool = False
    gold_answer: str | None = None

    def __post_init__(self):
        if self.sent_a == self.sent_b:
            raise ValueError(f"pair {self.pair_id}: sent_a equals sent_b")
        if self.choice not in CHOICES:
            raise ValueError(f"pair {self.pair_id}: bad choice {self.choice!r}")
        if self.presentation_order not in ORDERS:
            raise ValueError(
                f"pair {self.pair_id}: bad presentation_order {self.presentation_order!r}"
            )
        if self.is_gold != (self.gold_answer is not None):
            raise ValueError(
                f"pair {self.pair_id}: gold_answer must be present iff is_gold"
            )
        if self.gold_answer is not None and self.gold_answer not in (CHOICE_A, CHOICE_B):
            raise ValueError(f"pair {self.pair_id}: bad gold_answer {self.gold_answer!r}")


class LexEntry(NamedTuple):
    aoa: float
    syllables: int


@dataclass
class Lexicon:
    """Word -> (age-of-acquisition rating, syllable count), lowercased keys."""

    entries: dict[str, LexEntry]

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, word: str) -> LexEntry | None:
        return self.entries.get(word)


@dataclass
class WordSet:
    words: set[str]
    role: str  # "DaleChall" or "Stopword"

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


# ---------------------------------------------------------------------------
# loaders / serializers


def _passage_to_json(p: PassageContext) -> dict:
    obj = {
        "sentences": p.sentences,
        "target_index": p.target_index,
        "word_count": p.word_count,
    }
    for key in ("parses", "parse_logliks", "reranker_logliks"):
        if getattr(p, key) is not None:
            obj[key] = getattr(p, key)
    return obj


def _record_to_json(rec: SentenceRecord) -> dict:
    obj = {"id": rec.id, "text": rec.text, "grade_bin": rec.grade_bin}
    if rec.passage is not None:
        obj["passage"] = _passage_to_json(rec.passage)
    if rec.parse is not None:
        obj["parse"] = rec.parse
    if rec.parse_loglik is not None:
        obj["parse_loglik"] = rec.parse_loglik
    if rec.reranker_loglik is not None:
        obj["reranker_loglik"] = rec.reranker_loglik
    if rec.coref_chains is not None:
        obj["coref_chains"] = [[list(m) for m in chain] for chain in rec.coref_chains]
    return obj


def _record_from_json(obj: dict, where: str) -> SentenceRecord:
    try:
        passage = None
        if obj.get("passage") is not None:
            p = obj["passage"]
            passage = PassageContext(
                sentences=list(p["sentences"]),
                target_index=int(p["target_index"]),
                word_count=int(p["word_count"]),
                parses=p.get("parses"),
                parse_logliks=p.get("parse_logliks"),
                reranker_logliks=p.get("reranker_logliks"),
            )
        chains = None
        if obj.get("coref_chains") is not None:
            chains = [
                [(int(m[0]), int(m[1]), int(m[2])) for m in chain]
                for chain in obj["coref_chains"]
            ]
        return SentenceRecord(
            id=str(obj["id"]),
            text=str(obj["text"]),
            grade_bin=int(obj["grade_bin"]),
            passage=passage,
            parse=obj.get("parse"),
            parse_loglik=obj.get("parse_loglik"),
            reranker_loglik=obj.get("reranker_loglik"),
            coref_chains=chains,
        )
    except KeyError as exc:
        raise FormatError(f"{where}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: {exc}") from exc


def load_sentences(path, paper_faithful: bool = False) -> list[SentenceRecord]:
    """Load a sentences JSONL file, validating invariants.

    When ``paper_faithful`` is true, sentence/passage length-window violations
    are collected and raised together; otherwise each one is a warning.
    """
    records: list[SentenceRecord] = []
    seen: set[str] = set()
    violations: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}, line {lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{where}: invalid JSON ({exc.msg})") from exc
            rec = _record_from_json(obj, where)
            if rec.id in seen:
                raise FormatError(f"{where}: duplicate sentence id {rec.id!r}")
            seen.add(rec.id)
            msg = rec.length_violation()
            if msg is not None:
                violations.append(msg)
            records.append(rec)
    if violations:
        if paper_faithful:
            raise FormatError(
                "length-window violations:\n  " + "\n  ".join(violations)
            )
        for msg in violations:
            warnings.warn(msg, stacklevel=2)
    return records


def save_sentences(records: Iterable[SentenceRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(_record_to_json(rec), ensure_ascii=False) + "\n")


def parse_judgments(lines: Iterable[str], source: str = "<stream>") -> list[JudgmentRecord]:
    records = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        where = f"{source}, line {lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{where}: invalid JSON ({exc.msg})") from exc
        try:
            records.append(
                JudgmentRecord(
                    pair_id=str(obj["pair_id"]),
                    sent_a=str(obj["sent_a"]),
                    sent_b=str(obj["sent_b"]),
                    worker_id=str(obj["worker_id"]),
                    choice=str(obj["choice"]),
                    presentation_order=str(obj.get("presentation_order", "AB")),
                    is_gold=bool(obj.get("is_gold", False)),
                    gold_answer=obj.get("gold_answer"),
                )
            )
        except KeyError as exc:
            raise FormatError(f"{where}: missing field {exc}") from exc
        except ValueError as exc:
            raise FormatError(f"{where}: {exc}") from exc
    return records


def load_judgments(path) -> list[JudgmentRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_judgments(fh, str(path))


def save_judgments(records: Iterable[JudgmentRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = {
                "pair_id": rec.pair_id,
                "sent_a": rec.sent_a,
                "sent_b": rec.sent_b,
                "worker_id": rec.worker_id,
                "choice": rec.choice,
                "presentation_order": rec.presentation_order,
                "is_gold": rec.is_gold,
            }
            if rec.gold_answer is not None:
                obj["gold_answer"] = rec.gold_answer
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_lexicon(path) -> Lexicon:
    entries: dict[str, LexEntry] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["word", "aoa_rating", "n_syllables"]:
            raise FormatError(f"{path}: expected header word,aoa_rating,n_syllables")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise FormatError(f"{path}, line {lineno}: expected 3 fields, got {len(row)}")
            word = row[0].strip().lower()
            try:
                aoa = float(row[1])
                syll = int(row[2])
            except ValueError as exc:
                raise FormatError(f"{path}, line {lineno}: {exc}") from exc
            if not word:
                raise FormatError(f"{path}, line {lineno}: empty word")
            if aoa <= 0:
                raise FormatError(f"{path}, line {lineno}: aoa_rating must be > 0")
            if syll < 1:
                raise FormatError(f"{path}, line {lineno}: n_syllables must be >= 1")
            entries[word] = LexEntry(aoa, syll)
    return Lexicon(entries)


def save_lexicon(lexicon: Lexicon, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["word", "aoa_rating", "n_syllables"])
        for word, entry in lexicon.entries.items():
            writer.writerow([word, repr(entry.aoa), entry.syllables])


def load_wordlist(path, role: str) -> WordSet:
    words: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            word = line.strip()
            if not word or word.startswith("#"):
                continue
            if any(ch.isspace() for ch in word):
                raise FormatError(f"{path}, line {lineno}: whitespace inside word")
            words.add(word.lower())
    return WordSet(words, role)


def save_wordlist(wordset: WordSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word in sorted(wordset.words):
            fh.write(word + "\n")


# ---------------------------------------------------------------------------
# pair generation and splitting


def _bins_of(sentences: list[SentenceRecord]) -> dict[int, list[str]]:
    bins: dict[int, list[str]] = {b: [] for b in GRADE_BINS}
    for rec in sentences:
        bins[rec.grade_bin].append(rec.id)
    return bins


def generate_pairs(
    sentences: list[SentenceRecord], seed: int, method: str = "matching"
) -> list[tuple[str, str]]:
    """Pair every sentence with one random sentence from each other grade bin.

    Bins must be evenly populated. ``method="matching"`` draws an independent
    random perfect matching for each of the 15 bin pairs; ``method="grouped"``
    randomly groups one sentence per bin and emits all cross-bin pairs within
    each group (same per-sentence contract, but the resulting pair graph
    decomposes into closed 6-sentence cliques). Pair orientation is
    randomized so neither side systematically holds the lower bin.
    """
    bins = _bins_of(sentences)
    sizes = {b: len(ids) for b, ids in bins.items()}
    n_per_bin = max(sizes.values())
    for b in GRADE_BINS:
        if sizes[b] != n_per_bin or sizes[b] == 0:
            raise ValueError(
                f"bin {b} has {sizes[b]} sentences; need {max(n_per_bin, 1)} in every bin"
            )
    rng = random.Random(seed)
    pairs: list[tuple[str, str]] = []
    if method == "matching":
        for i, b1 in enumerate(GRADE_BINS):
            for b2 in GRADE_BINS[i + 1 :]:
                left = list(bins[b1])
                right = list(bins[b2])
                rng.shuffle(right)
                pairs.extend(zip(left, right))
    elif method == "grouped":
        columns = []
        for b in GRADE_BINS:
            ids = list(bins[b])
            rng.shuffle(ids)
            columns.append(ids)
        for row in zip(*columns):
            for i in range(len(row)):
                for j in range(i + 1, len(row)):
                    pairs.append((row[i], row[j]))
    else:
        raise ValueError(f"unknown pair generation method {method!r}")
    oriented = [(b, a) if rng.random() < 0.5 else (a, b) for a, b in pairs]
    if len({frozenset(p) for p in oriented}) != len(oriented):
        raise AssertionError("duplicate unordered pair generated")
    return oriented


def _edges_inside(pairs: list[tuple[str, str]], held: set[str]) -> list[tuple[str, str]]:
    return [p for p in pairs if p[0] in held and p[1] in held]


def _components(pairs: list[tuple[str, str]], ids: list[str]) -> list[list[str]]:
    parent = {s: s for s in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, list[str]] = {}
    for s in ids:
        groups.setdefault(find(s), []).append(s)
    return list(groups.values())


def split_by_sentence(
    pairs: list[tuple[str, str]],
    fraction: float,
    seed: int,
    target_test_pairs: int | None = None,
    max_retries: int = 1000,
) -> tuple[list[tuple[str, str]], list[tuple[str, str]], list[str]]:
    """Sentence-disjoint train/test split of a pair list.

    Holds out ``round(fraction * n_sentences)`` sentences; the test set is
    exactly the pairs with both endpoints held out, the training set the
    pairs with neither, and pairs straddling the boundary are dropped.

    With ``target_test_pairs`` set, the sampler retries derived seeds until
    the test set has exactly that many pairs, first with uniform sentence
    subsets and then by assembling connected components of the pair graph;
    if the budget runs out a :class:`SplitError` reports the best size seen.
    Without a target the first subset with a nonempty test set is returned.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    ids = sorted({s for p in pairs for s in p})
    n_held = round(fraction * len(ids))
    if not 0 < n_held < len(ids):
        raise ValueError(f"fraction {fraction} holds out {n_held} of {len(ids)} sentences")
    master = random.Random(seed)
    best: tuple[int, int] | None = None  # (|test - target|, test size)

    def result(held: set[str]):
        test = _edges_inside(pairs, held)
        train = [p for p in pairs if p[0] not in held and p[1] not in held]
        return train, test, sorted(held)

    for _ in range(max_retries):
        held = set(master.sample(ids, n_held))
        test_n = len(_edges_inside(pairs, held))
        if target_test_pairs is None:
            if test_n > 0:
                return result(held)
        elif test_n == target_test_pairs:
            return result(held)
        if best is None or abs(test_n - (target_test_pairs or 1)) < best[0]:
            best = (abs(test_n - (target_test_pairs or 1)), test_n)
    if target_test_pairs is not None:
        comps = _components(pairs, ids)
        for _ in range(max_retries):
            order = list(range(len(comps)))
            master.shuffle(order)
            held: set[str] = set()
            for ci in order:
                if len(held) + len(comps[ci]) <= n_held:
                    held.update(comps[ci])
            if len(held) == n_held:
                test_n = len(_edges_inside(pairs, held))
                if test_n == target_test_pairs:
                    return result(held)
                if best is None or abs(test_n - target_test_pairs) < best[0]:
                    best = (abs(test_n - target_test_pairs), test_n)
    target_desc = "a nonempty test set" if target_test_pairs is None else (
        f"{target_test_pairs} test pairs"
    )
    raise SplitError(
        f"could not reach {target_desc} holding out {n_held} sentences after "
        f"{max_retries} retries; best achieved test size: "
        f"{best[1] if best else 0}"
    )
