"""Relative sentence reading difficulty toolkit.

Feature extraction (lexical, n-gram, syntactic, coreference-context),
pairwise difficulty models with forest-based feature selection, crowd
quality control, and Bayesian rating aggregation of pairwise judgments
into difficulty rankings.
"""

__version__ = "0.1.0"

from .analysis import GradeRange, Ranking, pearson, spearman
from .corpus import (
    JudgmentRecord,
    Lexicon,
    PassageContext,
    SentenceRecord,
    WordSet,
    generate_pairs,
    load_judgments,
    load_lexicon,
    load_sentences,
    load_wordlist,
    split_by_sentence,
    tokenize,
)
from .features import FeatureResources, extract_features
from .lexfeat import FeatureVector
from .ngramlm import NgramModel, sentence_logprob, train_lm
from .pairmodel import (
    EvalConfig,
    ForestParams,
    LogRegModel,
    build_pair_matrix,
    logreg_train,
    repeated_eval,
    rf_train,
    select_features,
)
from .qc import filter_workers
from .simulate import SimConfig, simulate_dataset
from .synfeat import ParseTree, Pcfg, estimate_pcfg, read_bracketed, tree_logprob
from .trueskill import Rating, TrueSkillParams, aggregate_runs, update_draw, update_win
