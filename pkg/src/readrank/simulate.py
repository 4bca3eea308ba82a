"""Synthetic data generator: planted-difficulty sentences and noisy crowds.

Each sentence gets a latent difficulty drawn per grade bin (bin means
strictly increasing). Three noisy readouts of that difficulty drive the
observable surface: word choice follows an age-of-acquisition target,
grammatical templates grow more embedded, and sentences get longer. Parse
and reranker likelihood annotations fall with structure and length, so the
classifier families have recoverable signal of increasing richness.

Workers judge pairs through a Thurstone (probit) choice model whose noise
is calibrated so majority agreement lands near 90%; draws occur at a fixed
rate, spammers answer uniformly, and gold questions with known answers are
injected alongside the regular comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import Ranking
from .corpus import (
    CHOICE_A,
    CHOICE_B,
    CHOICE_DRAW,
    GRADE_BINS,
    JudgmentRecord,
    Lexicon,
    LexEntry,
    PassageContext,
    SentenceRecord,
    WordSet,
    generate_pairs,
    tokenize,
)
from .synfeat import ParseTree, print_bracketed

STOPWORDS = (
    "the a an of to in on and was were is are he she it they that with "
    "for at by from this but or as his her its their"
).split()

_SYLLABLES = (
    "ba be bi bo bu da de di do du fa fe fi fo fu ga ge gi go gu "
    "ka ke ki ko ku la le li lo lu ma me mi mo mu na ne ni no nu "
    "pa pe pi po pu ra re ri ro ru sa se si so su ta te ti to tu"
).split()


@dataclass
class SimConfig:
    n_sentences: int = 120
    n_bins: int = 6
    judgments_per_pair: int = 7  # per ordered presentation; AB and BA both shown
    noise_sd: float = 0.95      # calibrated: majority agreement ~0.90 at defaults
    p_draw: float = 0.02
    n_workers: int = 120
    spammer_fraction: float = 0.0
    n_gold: int = 40
    seed: int = 0
    choice_model: str = "probit"  # or "logit"
    pair_method: str = "matching"
    with_passages: bool = False
    bin_gap: float = 1.0
    within_bin_sd: float = 0.30
    # noise of the three difficulty readouts (vocabulary, structure, length)
    aoa_readout_sd: float = 0.28
    struct_readout_sd: float = 0.55
    len_readout_sd: float = 0.40
    n_vocab: int = 480

    def __post_init__(self):
        if self.n_bins != len(GRADE_BINS):
            raise ValueError("n_bins must be 6")
        if self.n_sentences % self.n_bins != 0:
            raise ValueError(
                f"n_sentences {self.n_sentences} not divisible by {self.n_bins} bins"
            )
        if self.noise_sd <= 0:
            raise ValueError("noise_sd must be positive")
        if self.choice_model not in ("probit", "logit"):
            raise ValueError(f"bad choice_model {self.choice_model!r}")


@dataclass
class SimVocabulary:
    words: list[str]            # sorted by age of acquisition
    aoa: np.ndarray
    lexicon: Lexicon            # hardest tail held out to exercise misses
    dale_chall: WordSet
    stopwords: WordSet


@dataclass
class SimDataset:
    records: list[SentenceRecord]
    truth: Ranking
    scores: dict[str, float]
    pairs: list[tuple[str, str]]
    judgments: list[JudgmentRecord]
    vocab: SimVocabulary
    lm_lines: list[list[str]]
    config: SimConfig


def synth_vocabulary(cfg: SimConfig, rng: np.random.Generator) -> SimVocabulary:
    n = cfg.n_vocab
    aoa = 2.5 + 14.0 * np.arange(n) / (n - 1)
    words: list[str] = []
    used = set(STOPWORDS)
    for i in range(n):
        syll = int(np.clip(1 + round((aoa[i] - 2.5) / 4.0) + rng.integers(0, 2), 1, 5))
        while True:
            word = "".join(rng.choice(_SYLLABLES) for _ in range(syll))
            if word not in used:
                used.add(word)
                words.append(word)
                break
    entries = {}
    for w in STOPWORDS:
        entries[w] = LexEntry(float(rng.uniform(2.5, 4.0)), 1)
    cutoff = int(n * 0.95)  # hardest 5% stay out of the lexicon
    for i in range(cutoff):
        entries[words[i]] = LexEntry(float(aoa[i]), max(1, round(len(words[i]) / 2)))
    dale = WordSet({words[i] for i in range(n) if aoa[i] <= 6.0} | set(STOPWORDS), "DaleChall")
    return SimVocabulary(
        words=words,
        aoa=aoa,
        lexicon=Lexicon(entries),
        dale_chall=dale,
        stopwords=WordSet(set(STOPWORDS), "Stopword"),
    )


def _pick_word(vocab: SimVocabulary, target_aoa: float, rng: np.random.Generator) -> str:
    g = rng.normal(target_aoa, 1.2)
    idx = int(np.clip(np.searchsorted(vocab.aoa, g), 0, len(vocab.words) - 1))
    idx = int(np.clip(idx + rng.integers(-6, 7), 0, len(vocab.words) - 1))
    return vocab.words[idx]


def _np(vocab, aoa, rng, level: int = 0) -> ParseTree:
    """Noun phrase whose internal shape varies with the complexity level."""
    roll = rng.random()
    if roll < 0.15:
        node = ParseTree("NP", [ParseTree("PRP", token=["it", "they", "he", "she"][int(rng.integers(0, 4))])])
    else:
        children = [ParseTree("DT", token=["the", "a", "this"][int(rng.integers(0, 3))])]
        n_adj = int(rng.integers(0, 2)) + (1 if level >= 1 and rng.random() < 0.6 else 0)
        for _ in range(n_adj):
            children.append(ParseTree("JJ", token=_pick_word(vocab, aoa, rng)))
        children.append(ParseTree("NN", token=_pick_word(vocab, aoa, rng)))
        node = ParseTree("NP", children)
    if level >= 2 and rng.random() < 0.35:
        node = ParseTree("NP", [node, _pp(vocab, aoa, rng, level - 2)])
    if level >= 1 and rng.random() < 0.15:
        node = ParseTree(
            "NP",
            [node, ParseTree("CC", token=["and", "or"][int(rng.integers(0, 2))]),
             _np(vocab, aoa, rng, 0)],
        )
    return node


def _pp(vocab, aoa, rng, level: int = 0) -> ParseTree:
    prep = ["in", "on", "with", "by", "from", "at"][int(rng.integers(0, 6))]
    return ParseTree("PP", [ParseTree("IN", token=prep), _np(vocab, aoa, rng, max(level, 0))])


def _clause(vocab, aoa, rng, level: int) -> ParseTree:
    """S node at the given embedding level (0 flat .. 3 with inner clause)."""
    subj = _np(vocab, aoa, rng, level)
    vp_children: list[ParseTree] = []
    if rng.random() < 0.25:
        vp_children.append(ParseTree("ADVP", [ParseTree("RB", token=_pick_word(vocab, aoa, rng))]))
    vp_children.append(ParseTree("VBD", token=_pick_word(vocab, aoa, rng)))
    if level >= 3:
        inner = _clause(vocab, aoa, rng, level=int(rng.integers(0, 2)))
        vp_children.append(ParseTree("SBAR", [ParseTree("IN", token="that"), inner]))
    else:
        vp_children.append(_np(vocab, aoa, rng, level))
    if level >= 2:
        vp_children.append(_pp(vocab, aoa, rng, level - 2))
    return ParseTree("S", [subj, ParseTree("VP", vp_children)])


def _synth_tree(vocab, aoa, level, target_words, rng) -> ParseTree:
    tree = _clause(vocab, aoa, rng, level)
    # pad with PP attachments toward the target, staying inside [6, 20] words
    def n_words(t: ParseTree) -> int:
        return len(t.preterminals())

    vp = tree.children[-1]
    while n_words(tree) < target_words - 2 and n_words(tree) + 4 <= 20:
        vp.children.append(_pp(vocab, aoa, rng))
    if n_words(tree) < 6:
        vp.children.append(_pp(vocab, aoa, rng))
    while n_words(tree) > 20 and vp.children[-1].label == "PP" and len(vp.children) > 2:
        vp.children.pop()
    return ParseTree("S", tree.children + [ParseTree(".", token=".")])


def _tree_to_text(tree: ParseTree) -> str:
    words = tree.leaves()
    text = " ".join(words[:-1]) if words and words[-1] == "." else " ".join(words)
    if words and words[-1] == ".":
        text += "."
    return text


def synth_sentences(
    cfg: SimConfig,
) -> tuple[list[SentenceRecord], dict[str, float], Ranking]:
    """Planted-difficulty sentence records plus the true difficulty ranking."""
    records, scores, truth, _ = _synth_all(cfg)
    return records, scores, truth


def _synth_all(cfg: SimConfig):
    rng = np.random.default_rng(cfg.seed)
    vocab = synth_vocabulary(cfg, rng)
    per_bin = cfg.n_sentences // cfg.n_bins
    records: list[SentenceRecord] = []
    scores: dict[str, float] = {}
    difficulties = []
    bins = []
    for b in GRADE_BINS:
        for _ in range(per_bin):
            d = (b - 1) * cfg.bin_gap + rng.normal(0.0, cfg.within_bin_sd)
            difficulties.append(d)
            bins.append(b)
    d_arr = np.array(difficulties)
    z = (d_arr - d_arr.mean()) / d_arr.std()
    for idx in range(cfg.n_sentences):
        sid = f"s{idx:03d}"
        aoa_signal = z[idx] + rng.normal(0.0, cfg.aoa_readout_sd)
        struct_signal = z[idx] + rng.normal(0.0, cfg.struct_readout_sd)
        len_signal = z[idx] + rng.normal(0.0, cfg.len_readout_sd)
        aoa_mu = float(np.clip(6.5 + 2.2 * aoa_signal, 3.0, 15.0))
        level = int(np.clip(round(1.5 + 0.9 * struct_signal), 0, 3))
        target_words = int(np.clip(round(11 + 2.6 * len_signal), 6, 20))
        tree = _synth_tree(vocab, aoa_mu, level, target_words, rng)
        text = _tree_to_text(tree)
        # rarer structures parse with lower likelihood
        parse_ll = -10.0 - 2.2 * struct_signal - 0.3 * level + rng.normal(0.0, 0.7)
        rerank_ll = parse_ll + rng.normal(0.0, 0.3) - 0.2
        passage = None
        chains = None
        if cfg.with_passages:
            passage, chains = _synth_passage(text, vocab, rng, cfg)
        records.append(
            SentenceRecord(
                id=sid,
                text=text,
                grade_bin=bins[idx],
                passage=passage,
                parse=print_bracketed(tree),
                parse_loglik=float(parse_ll),
                reranker_loglik=float(rerank_ll),
                coref_chains=chains,
            )
        )
        scores[sid] = float(d_arr[idx])
    ordered = sorted(scores, key=lambda s: (-scores[s], s))
    truth = Ranking(ids=ordered, scores=dict(scores))
    return records, scores, truth, vocab


def _synth_passage(target_text: str, vocab, rng, cfg: SimConfig):
    """Wrap the target in generated context sentences with parse annotations."""
    n_before = int(rng.integers(2, 4))
    n_after = int(rng.integers(2, 4))
    sentences, parses, plls, rlls = [], [], [], []

    def make_context():
        level = int(rng.integers(0, 3))
        tree = _synth_tree(vocab, float(rng.uniform(5.0, 9.0)), level, 12, rng)
        pll = -10.0 - 2.2 * (level - 1.0) + rng.normal(0.0, 0.7)
        return _tree_to_text(tree), print_bracketed(tree), float(pll), float(
            pll + rng.normal(0.0, 0.3) - 0.2
        )

    for _ in range(n_before):
        s, p, pll, rll = make_context()
        sentences.append(s)
        parses.append(p)
        plls.append(pll)
        rlls.append(rll)
    target_index = len(sentences)
    sentences.append(target_text)
    parses.append(None)
    plls.append(None)
    rlls.append(None)
    for _ in range(n_after):
        s, p, pll, rll = make_context()
        sentences.append(s)
        parses.append(p)
        plls.append(pll)
        rlls.append(rll)
    word_count = sum(
        len([t for t in tokenize(s) if any(c.isalnum() for c in t.low)]) for s in sentences
    )
    passage = PassageContext(
        sentences=sentences,
        target_index=target_index,
        word_count=word_count,
        parses=parses,
        parse_logliks=plls,
        reranker_logliks=rlls,
    )
    linked = sorted(
        int(i)
        for i in rng.choice(
            [i for i in range(len(sentences)) if i != target_index],
            size=min(2, len(sentences) - 1),
            replace=False,
        )
    )
    chains = [[(target_index, 0, 1), (int(i), 0, 1)] for i in linked]
    return passage, chains


def _choice_prob(d_a: float, d_b: float, cfg: SimConfig) -> float:
    gap = (d_a - d_b) / (math.sqrt(2.0) * cfg.noise_sd)
    if cfg.choice_model == "probit":
        return 0.5 * math.erfc(-gap / math.sqrt(2.0))
    return 1.0 / (1.0 + math.exp(-1.7 * gap))


def spammer_workers(cfg: SimConfig) -> set[str]:
    """Worker ids designated as uniform spammers for this config."""
    rng = np.random.default_rng(cfg.seed + 2)
    workers = [f"w{idx:03d}" for idx in range(cfg.n_workers)]
    n_spam = int(round(cfg.spammer_fraction * cfg.n_workers))
    shuffled = list(workers)
    rng.shuffle(shuffled)
    return set(shuffled[:n_spam])


def simulate_judgments(
    scores: dict[str, float],
    pairs: list[tuple[str, str]],
    cfg: SimConfig,
    gold_pairs: list[tuple[str, str]] | None = None,
) -> list[JudgmentRecord]:
    """Worker decisions for every (pair, presentation order) slot.

    Honest workers choose through the configured choice model after a draw
    coin at ``p_draw``; spammers pick A or B uniformly. Gold pairs carry the
    planted harder sentence as their answer key.
    """
    rng = np.random.default_rng(cfg.seed + 1)
    workers = [f"w{idx:03d}" for idx in range(cfg.n_workers)]
    spammers = spammer_workers(cfg)
    judgments: list[JudgmentRecord] = []

    def answer(pair_id, a, b, order, is_gold, gold_answer):
        chosen = rng.choice(cfg.n_workers, size=cfg.judgments_per_pair, replace=False)
        for widx in chosen:
            worker = workers[int(widx)]
            if rng.random() < cfg.p_draw:
                choice = CHOICE_DRAW
            elif worker in spammers:
                choice = CHOICE_A if rng.random() < 0.5 else CHOICE_B
            else:
                p_a = _choice_prob(scores[a], scores[b], cfg)
                choice = CHOICE_A if rng.random() < p_a else CHOICE_B
            judgments.append(
                JudgmentRecord(
                    pair_id=pair_id,
                    sent_a=a,
                    sent_b=b,
                    worker_id=worker,
                    choice=choice,
                    presentation_order=order,
                    is_gold=is_gold,
                    gold_answer=gold_answer,
                )
            )

    for i, (a, b) in enumerate(pairs):
        pair_id = f"p{i:04d}"
        for order in ("AB", "BA"):
            answer(pair_id, a, b, order, False, None)
    for i, (a, b) in enumerate(gold_pairs or []):
        gold_answer = CHOICE_A if scores[a] > scores[b] else CHOICE_B
        pair_id = f"g{i:04d}"
        for order in ("AB", "BA"):
            answer(pair_id, a, b, order, True, gold_answer)
    return judgments


def pick_gold_pairs(
    records: list[SentenceRecord],
    scores: dict[str, float],
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
) -> list[tuple[str, str]]:
    """Easy-vs-hard sentence pairs with an unambiguous planted answer."""
    rng = rng if rng is not None else np.random.default_rng(cfg.seed + 2)
    easy = [r.id for r in records if r.grade_bin == 1]
    hard = [r.id for r in records if r.grade_bin == 6]
    out = []
    for _ in range(cfg.n_gold):
        a = easy[int(rng.integers(0, len(easy)))]
        b = hard[int(rng.integers(0, len(hard)))]
        out.append((a, b) if rng.random() < 0.5 else (b, a))
    return out


def majority_agreement(judgments: list[JudgmentRecord]) -> float:
    """Share of non-draw votes that match their question's majority."""
    votes: dict[str, list[int]] = {}
    for j in judgments:
        if j.is_gold or j.choice == CHOICE_DRAW:
            continue
        votes.setdefault(j.pair_id, []).append(1 if j.choice == CHOICE_A else 0)
    agree = total = 0
    for labels in votes.values():
        ones = sum(labels)
        agree += max(ones, len(labels) - ones)
        total += len(labels)
    return agree / total if total else 0.0


def simulate_dataset(cfg: SimConfig) -> SimDataset:
    """Full synthetic package: records, pairs, judgments, vocabulary, LM lines."""
    records, scores, truth, vocab = _synth_all(cfg)
    pair_seed = cfg.seed + 7
    pairs = generate_pairs(records, pair_seed, method=cfg.pair_method)
    gold = pick_gold_pairs(records, scores, cfg) if cfg.n_gold else []
    judgments = simulate_judgments(scores, pairs, cfg, gold)
    lm_lines = [[t.low for t in r.tokens] for r in records]
    return SimDataset(
        records=records,
        truth=truth,
        scores=scores,
        pairs=pairs,
        judgments=judgments,
        vocab=vocab,
        lm_lines=lm_lines,
        config=cfg,
    )
