"""Pairwise difficulty classifier and its evaluation protocol.

Design matrix: one row per non-draw individual judgment, features of both
sentences side by side under ``A:`` / ``B:`` prefixes, label 1 when the
worker chose A as more difficult. Feature selection fits a random forest
and keeps the top share of columns by Gini importance, then symmetrizes so
both sides of every kept feature are present. The classifier is an L2
logistic regression trained by full-batch gradient descent with a
backtracking line search, which keeps every run bit-reproducible.

Model variants: D uses the age-of-acquisition trio, C adds the parse and
reranker likelihoods, B runs forest selection over all candidates.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as _sstats

from .corpus import (
    CHOICE_A,
    CHOICE_DRAW,
    JudgmentRecord,
    SplitError,
    split_by_sentence,
)
from .lexfeat import FEATURE_GROUPS, FeatureVector

MODEL_D_BASE = ("aoa_avg", "aoa_std", "aoa_max")
MODEL_C_BASE = MODEL_D_BASE + ("parse_loglik", "reranker_loglik")


@dataclass
class PairExample:
    """One judgment as a training example (weight 1 each)."""

    pair_id: str
    x: dict[str, float]
    label: str  # "A" or "B"


@dataclass
class PairMatrix:
    """Dense judgment-level design matrix over the corpus feature schema."""

    names: list[str]                     # prefixed column names, A block then B block
    X: np.ndarray                        # (n_judgments, 2 * n_base) float64
    y: np.ndarray                        # 1 where the worker chose A
    pair_ids: list[str]
    pair_sentences: dict[str, tuple[str, str]]
    groups: dict[str, str]               # unprefixed name -> feature group

    def __post_init__(self):
        self._col = {name: i for i, name in enumerate(self.names)}

    def columns(self, names: list[str]) -> np.ndarray:
        return self.X[:, [self._col[n] for n in names]]

    def rows(self, idx) -> "PairMatrix":
        idx = np.asarray(idx)
        return PairMatrix(
            names=self.names,
            X=self.X[idx],
            y=self.y[idx],
            pair_ids=[self.pair_ids[i] for i in idx],
            pair_sentences=self.pair_sentences,
            groups=self.groups,
        )

    def examples(self) -> list[PairExample]:
        out = []
        for i, pid in enumerate(self.pair_ids):
            out.append(
                PairExample(
                    pair_id=pid,
                    x=dict(zip(self.names, self.X[i])),
                    label=CHOICE_A if self.y[i] == 1 else "B",
                )
            )
        return out


def column_group(groups: dict[str, str], column: str) -> str:
    base = column.split(":", 1)[1]
    return groups[base]


def build_pair_matrix(
    judgments: list[JudgmentRecord], store: dict[str, FeatureVector]
) -> PairMatrix:
    """Assemble the judgment-level matrix; draws contribute no rows.

    A pair shown in BA order keeps the same canonical A/B identity, so its
    rows are identical in feature layout to the AB rows.
    """
    base_names: set[str] = set()
    groups: dict[str, str] = {}
    for sid, vec in store.items():
        for name, group in vec.groups.items():
            prev = groups.get(name)
            if prev is not None and prev != group:
                raise ValueError(f"feature {name!r} tagged {prev} and {group}")
            groups[name] = group
        base_names.update(vec.values)
    schema = sorted(base_names)
    dense = {
        sid: np.array([vec.values.get(n, 0.0) for n in schema], dtype=np.float64)
        for sid, vec in store.items()
    }
    rows, labels, pair_ids = [], [], []
    pair_sentences: dict[str, tuple[str, str]] = {}
    for j in judgments:
        if j.choice == CHOICE_DRAW:
            continue
        for sid in (j.sent_a, j.sent_b):
            if sid not in dense:
                raise ValueError(f"judgment {j.pair_id} references unknown sentence {sid!r}")
        known = pair_sentences.setdefault(j.pair_id, (j.sent_a, j.sent_b))
        if known != (j.sent_a, j.sent_b):
            raise ValueError(f"pair {j.pair_id} maps to conflicting sentence ids")
        rows.append(np.concatenate([dense[j.sent_a], dense[j.sent_b]]))
        labels.append(1 if j.choice == CHOICE_A else 0)
        pair_ids.append(j.pair_id)
    names = [f"A:{n}" for n in schema] + [f"B:{n}" for n in schema]
    X = np.vstack(rows) if rows else np.zeros((0, 2 * len(schema)))
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise ValueError(
            f"non-finite feature {names[bad[1]]!r} in pair {pair_ids[bad[0]]!r}"
        )
    return PairMatrix(
        names=names,
        X=X,
        y=np.array(labels, dtype=np.int64),
        pair_ids=pair_ids,
        pair_sentences=pair_sentences,
        groups=groups,
    )


def swap_blocks(matrix: PairMatrix) -> PairMatrix:
    """A/B-swapped view with flipped labels (for symmetry checks)."""
    half = len(matrix.names) // 2
    X = np.concatenate([matrix.X[:, half:], matrix.X[:, :half]], axis=1)
    return PairMatrix(
        names=matrix.names,
        X=X,
        y=1 - matrix.y,
        pair_ids=list(matrix.pair_ids),
        pair_sentences=matrix.pair_sentences,
        groups=matrix.groups,
    )


# ---------------------------------------------------------------------------
# random forest (CART, Gini)


@dataclass
class ForestParams:
    n_trees: int = 200
    max_depth: int | None = None
    min_leaf: int = 2
    max_features: str | int = "sqrt"

    def n_candidates(self, d: int) -> int:
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(d)))
        if isinstance(self.max_features, int):
            return max(1, min(self.max_features, d))
        raise ValueError(f"bad max_features {self.max_features!r}")


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    counts: np.ndarray | None = None  # leaf class counts over the bootstrap

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class Forest:
    trees: list[TreeNode]
    params: ForestParams
    seed: int
    n_features: int
    importances: np.ndarray  # Gini importance per feature, sums to 1


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.dot(p, p))


def _best_split(Xnode: np.ndarray, y_node: np.ndarray, min_leaf: int):
    """Best Gini split over candidate columns of one node.

    Returns (weighted impurity, column index, threshold) or None. Ties break
    toward the earliest split position, then the earliest sampled column.
    """
    n, k = Xnode.shape
    order = np.argsort(Xnode, axis=0, kind="stable")
    xs = np.take_along_axis(Xnode, order, axis=0)
    ones = np.cumsum(y_node[order], axis=0, dtype=np.float64)
    total1 = ones[-1]
    sizes = np.arange(1, n, dtype=np.float64)[:, None]
    left1 = ones[:-1]
    left0 = sizes - left1
    right1 = total1[None, :] - left1
    right0 = (n - sizes) - right1
    gl = 1.0 - (left1 * left1 + left0 * left0) / (sizes * sizes)
    gr = 1.0 - (right1 * right1 + right0 * right0) / ((n - sizes) * (n - sizes))
    weighted = (sizes * gl + (n - sizes) * gr) / n
    valid = (
        (xs[1:] != xs[:-1])
        & (sizes >= min_leaf)
        & ((n - sizes) >= min_leaf)
    )
    weighted[~valid] = np.inf
    pos = np.argmin(weighted, axis=0)
    scores = weighted[pos, np.arange(k)]
    col = int(np.argmin(scores))
    if not math.isfinite(scores[col]):
        return None
    p = pos[col]
    threshold = (xs[p, col] + xs[p + 1, col]) / 2.0
    return float(scores[col]), col, float(threshold)


def _fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    params: ForestParams,
    rng: np.random.Generator,
    importances: np.ndarray,
) -> TreeNode:
    n_total, d = X.shape
    k = params.n_candidates(d)
    root = TreeNode()
    stack = [(root, np.arange(n_total), 0)]
    while stack:
        node, idx, depth = stack.pop()
        counts = np.bincount(y[idx], minlength=2).astype(np.float64)
        node.counts = counts
        impurity = _gini(counts)
        n_node = len(idx)
        if (
            impurity == 0.0
            or n_node < 2 * params.min_leaf
            or (params.max_depth is not None and depth >= params.max_depth)
        ):
            continue
        feats = rng.choice(d, size=k, replace=False)
        found = _best_split(X[np.ix_(idx, feats)], y[idx], params.min_leaf)
        if found is None or found[0] >= impurity:
            continue
        score, col, threshold = found
        f = int(feats[col])
        mask = X[idx, f] <= threshold
        left_idx = idx[mask]
        right_idx = idx[~mask]
        importances[f] += (n_node / n_total) * (impurity - score)
        node.feature = f
        node.threshold = threshold
        node.left = TreeNode()
        node.right = TreeNode()
        stack.append((node.left, left_idx, depth + 1))
        stack.append((node.right, right_idx, depth + 1))
    return root


def rf_train(X: np.ndarray, y: np.ndarray, params: ForestParams, seed: int) -> Forest:
    """Bootstrap CART forest; reproducible bit for bit from (data, params, seed)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise ValueError("forest training needs at least 2 classes")
    n, d = X.shape
    rng = np.random.default_rng(seed)
    trees = []
    acc = np.zeros(d)
    for _ in range(params.n_trees):
        boot = rng.integers(0, n, size=n)
        imp = np.zeros(d)
        trees.append(_fit_tree(X[boot], y[boot], params, rng, imp))
        total = imp.sum()
        if total > 0:
            acc += imp / total
    total = acc.sum()
    importances = acc / total if total > 0 else acc
    return Forest(trees=trees, params=params, seed=seed, n_features=d, importances=importances)


def _tree_proba(node: TreeNode, row: np.ndarray) -> float:
    while not node.is_leaf:
        node = node.left if row[node.feature] <= node.threshold else node.right
    total = node.counts.sum()
    return float(node.counts[1] / total) if total else 0.5


def forest_proba(forest: Forest, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    out = np.zeros(len(X))
    for tree in forest.trees:
        out += np.array([_tree_proba(tree, row) for row in X])
    return out / len(forest.trees)


def rf_importances(forest: Forest, names: list[str]) -> dict[str, float]:
    if len(names) != forest.n_features:
        raise ValueError("name count differs from feature count")
    return {name: float(v) for name, v in zip(names, forest.importances)}


def _swap_prefix(name: str) -> str:
    if name.startswith("A:"):
        return "B:" + name[2:]
    if name.startswith("B:"):
        return "A:" + name[2:]
    return name


def select_features(
    importances: dict[str, float], pct: float, symmetrize: bool = True
) -> list[str]:
    """Top ``ceil(pct * d)`` names by importance (ties by name), then add the
    opposite-side twin of every selected name."""
    if not 0.0 < pct <= 1.0:
        raise ValueError(f"pct must be in (0, 1], got {pct}")
    k = math.ceil(pct * len(importances))
    ranked = sorted(importances.items(), key=lambda kv: (-kv[1], kv[0]))
    selected = {name for name, _ in ranked[:k]}
    if symmetrize:
        selected |= {_swap_prefix(n) for n in selected}
    return sorted(selected)


# ---------------------------------------------------------------------------
# logistic regression


@dataclass
class LogRegModel:
    feature_names: list[str]
    weights: np.ndarray
    bias: float
    l2: float
    mean: np.ndarray
    scale: np.ndarray
    metadata: dict = field(default_factory=dict)


def _loss_grad(Z, y, w, b, l2):
    z = Z @ w + b
    p = 1.0 / (1.0 + np.exp(-z))
    n = len(y)
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w))
    gw = Z.T @ (p - y) / n + l2 * w
    gb = float(np.mean(p - y))
    return loss, gw, gb


def _loss_only(Z, y, w, b, l2):
    z = Z @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w))


def logreg_train(
    matrix: PairMatrix,
    selected_names: list[str],
    l2: float = 1e-3,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 5000,
    metadata: dict | None = None,
) -> LogRegModel:
    """L2 logistic regression by full-batch descent with backtracking.

    Features are standardized to train-set mean 0 / scale 1 (zero-variance
    columns scaled by 1); the penalty applies to weights only. Stops at
    gradient norm ``tol`` or ``max_iter`` accepted steps.
    """
    if matrix.X.shape[0] == 0:
        raise ValueError("no training examples")
    missing = [n for n in selected_names if n not in matrix._col]
    if missing:
        raise ValueError(f"selected names not in matrix: {missing[:5]}")
    raw = matrix.columns(selected_names)
    if not np.all(np.isfinite(raw)):
        bad = np.argwhere(~np.isfinite(raw))[0]
        raise ValueError(
            f"non-finite feature {selected_names[bad[1]]!r} "
            f"in pair {matrix.pair_ids[bad[0]]!r}"
        )
    mean = raw.mean(axis=0)
    scale = raw.std(axis=0)
    scale[scale == 0.0] = 1.0
    Z = (raw - mean) / scale
    y = matrix.y.astype(np.float64)
    w = np.zeros(Z.shape[1])
    b = 0.0
    loss, gw, gb = _loss_grad(Z, y, w, b, l2)
    step = 1.0
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        gnorm = math.sqrt(float(np.dot(gw, gw)) + gb * gb)
        if gnorm <= tol:
            converged = True
            iterations -= 1
            break
        gsq = gnorm * gnorm
        accepted = False
        while step >= 1e-20:
            w_new = w - step * gw
            b_new = b - step * gb
            loss_new = _loss_only(Z, y, w_new, b_new, l2)
            if loss_new <= loss - 1e-4 * step * gsq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        w, b, loss = w_new, b_new, loss_new
        loss, gw, gb = _loss_grad(Z, y, w, b, l2)
        step = min(step * 2.0, 1e4)
    gnorm = math.sqrt(float(np.dot(gw, gw)) + gb * gb)
    meta = dict(metadata or {})
    meta.update(
        {
            "iterations": iterations,
            "grad_norm": gnorm,
            "converged": converged or gnorm <= tol,
            "l2": l2,
            "seed": seed,
        }
    )
    return LogRegModel(
        feature_names=list(selected_names),
        weights=w,
        bias=b,
        l2=l2,
        mean=mean,
        scale=scale,
        metadata=meta,
    )


def predict_proba(model: LogRegModel, matrix: PairMatrix) -> np.ndarray:
    """Probability that sentence A is the more difficult one, per row."""
    Z = (matrix.columns(model.feature_names) - model.mean) / model.scale
    return 1.0 / (1.0 + np.exp(-(Z @ model.weights + model.bias)))


def classify(model: LogRegModel, matrix: PairMatrix) -> np.ndarray:
    """1 when p(A more difficult) >= 0.5, else 0."""
    return (predict_proba(model, matrix) >= 0.5).astype(np.int64)


# ---------------------------------------------------------------------------
# evaluation


def eval_accuracy(model: LogRegModel, matrix: PairMatrix) -> float:
    if matrix.X.shape[0] == 0:
        raise ValueError("empty evaluation set")
    return float(np.mean(classify(model, matrix) == matrix.y))


def _oracle_from_rows(pair_ids: list[str], y: np.ndarray) -> float:
    per_pair: dict[str, list[int]] = {}
    for pid, label in zip(pair_ids, y):
        per_pair.setdefault(pid, []).append(int(label))
    correct = total = 0
    for labels in per_pair.values():
        ones = sum(labels)
        correct += max(ones, len(labels) - ones)
        total += len(labels)
    return correct / total


def oracle_accuracy(judgments: list[JudgmentRecord]) -> float:
    """Majority-vote ceiling over individual non-draw judgments."""
    kept = [j for j in judgments if j.choice != CHOICE_DRAW]
    if not kept:
        raise ValueError("no non-draw judgments")
    return _oracle_from_rows(
        [j.pair_id for j in kept],
        np.array([1 if j.choice == CHOICE_A else 0 for j in kept]),
    )


def stratified_random(y_test: np.ndarray, y_train: np.ndarray, seed: int) -> float:
    """Accuracy of labels drawn from the training label distribution."""
    if len(y_test) == 0:
        raise ValueError("empty test labels")
    p_a = float(np.mean(y_train)) if len(y_train) else 0.5
    rng = np.random.default_rng(seed)
    preds = (rng.random(len(y_test)) < p_a).astype(np.int64)
    return float(np.mean(preds == y_test))


@dataclass
class TTestResult:
    t: float
    p: float
    degenerate: bool = False


def paired_t_test(acc_a, acc_b) -> TTestResult:
    """Two-sided paired t-test; a constant nonzero difference vector is
    reported as p = 0 with the degenerate-variance flag set."""
    a = np.asarray(acc_a, dtype=np.float64)
    b = np.asarray(acc_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValueError("need two equal-length vectors of >= 2 accuracies")
    d = a - b
    sd = d.std(ddof=1)
    if sd == 0.0:
        if d[0] == 0.0:
            return TTestResult(t=0.0, p=1.0, degenerate=True)
        return TTestResult(t=math.copysign(math.inf, d[0]), p=0.0, degenerate=True)
    t = float(d.mean() / (sd / math.sqrt(len(d))))
    p = 2.0 * float(_sstats.t.sf(abs(t), len(d) - 1))
    return TTestResult(t=t, p=p)


def model_column_names(matrix: PairMatrix, base_names: tuple[str, ...]) -> list[str]:
    """A:/B: (and ctx:) columns for a fixed-name model variant."""
    wanted = []
    for name in matrix.names:
        base = name.split(":", 1)[1]
        if base.startswith("ctx:"):
            base = base[4:]
        if base in base_names:
            wanted.append(name)
    return wanted


@dataclass
class EvalConfig:
    n_splits: int = 200
    fraction: float = 0.2
    models: tuple[str, ...] = ("B", "C", "D")
    selection_pct: float | None = None  # default 0.02, or 0.01 with ctx features
    l2: float = 1e-3
    forest: ForestParams = field(default_factory=ForestParams)
    seed: int = 0
    workers: int = 1
    tol: float = 1e-6
    max_iter: int = 5000
    exclude_group: str | None = None  # drop this group from Model B candidacy

    def effective_pct(self, matrix: PairMatrix) -> float:
        if self.selection_pct is not None:
            return self.selection_pct
        has_ctx = any(n.split(":", 1)[1].startswith("ctx:") for n in matrix.names)
        return 0.01 if has_ctx else 0.02


@dataclass
class EvalResult:
    accuracies: dict[str, np.ndarray]  # model label -> per-split accuracy
    t_tests: dict[str, TTestResult]
    n_splits: int

    def mean(self, label: str) -> float:
        return float(self.accuracies[label].mean())

    def std(self, label: str) -> float:
        return float(self.accuracies[label].std(ddof=1))


def _candidate_columns(matrix: PairMatrix, exclude_group: str | None) -> list[str]:
    if exclude_group is None:
        return list(matrix.names)
    if exclude_group not in FEATURE_GROUPS:
        raise ValueError(f"unknown feature group {exclude_group!r}")
    return [n for n in matrix.names if column_group(matrix.groups, n) != exclude_group]


def train_model_b(
    train: PairMatrix,
    config: EvalConfig,
    pct: float,
    seed: int,
) -> LogRegModel:
    candidates = _candidate_columns(train, config.exclude_group)
    sub = train.columns(candidates)
    forest = rf_train(sub, train.y, config.forest, seed)
    importances = dict(zip(candidates, forest.importances))
    selected = select_features(importances, pct)
    return logreg_train(
        train, selected, config.l2, seed, config.tol, config.max_iter,
        metadata={"model": "B"},
    )


def _eval_single_split(matrix: PairMatrix, pairs, config: EvalConfig, split_seed: int):
    pair_rows: dict[str, list[int]] = {}
    for i, pid in enumerate(matrix.pair_ids):
        pair_rows.setdefault(pid, []).append(i)
    pid_of_pair = {frozenset(v): k for k, v in matrix.pair_sentences.items()}
    local = random.Random(split_seed)
    for _ in range(10):
        train_pairs, test_pairs, _ = split_by_sentence(
            pairs, config.fraction, local.randrange(2**63)
        )
        train_idx = [
            i
            for p in train_pairs
            if frozenset(p) in pid_of_pair
            for i in pair_rows.get(pid_of_pair[frozenset(p)], [])
        ]
        test_idx = [
            i
            for p in test_pairs
            if frozenset(p) in pid_of_pair
            for i in pair_rows.get(pid_of_pair[frozenset(p)], [])
        ]
        if train_idx and test_idx:
            break
    else:
        raise SplitError("could not draw a split with nonempty train and test rows")
    train = matrix.rows(train_idx)
    test = matrix.rows(test_idx)
    pct = config.effective_pct(matrix)
    out: dict[str, float] = {}
    for label in config.models:
        if label == "B":
            model = train_model_b(train, config, pct, split_seed)
        elif label == "C":
            names = model_column_names(matrix, MODEL_C_BASE)
            model = logreg_train(train, names, config.l2, split_seed,
                                 config.tol, config.max_iter, metadata={"model": "C"})
        elif label == "D":
            names = model_column_names(matrix, MODEL_D_BASE)
            model = logreg_train(train, names, config.l2, split_seed,
                                 config.tol, config.max_iter, metadata={"model": "D"})
        else:
            raise ValueError(f"unknown model {label!r}")
        out[label] = eval_accuracy(model, test)
    out["Oracle"] = _oracle_from_rows(test.pair_ids, test.y)
    out["StratRandom"] = stratified_random(test.y, train.y, split_seed)
    return out


_POOL_STATE: dict = {}


def _pool_init(matrix, pairs, config):
    _POOL_STATE["args"] = (matrix, pairs, config)


def _pool_worker(split_seed):
    matrix, pairs, config = _POOL_STATE["args"]
    return _eval_single_split(matrix, pairs, config, split_seed)


def repeated_eval(matrix: PairMatrix, config: EvalConfig) -> EvalResult:
    """Table-1 protocol: repeated sentence-disjoint splits, per-split feature
    selection and training, oracle and stratified-random references, paired
    t-tests between adjacent model rows."""
    pairs = sorted(matrix.pair_sentences.values())
    master = random.Random(config.seed)
    split_seeds = [master.randrange(2**63) for _ in range(config.n_splits)]
    if config.workers > 1:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(
            config.workers, initializer=_pool_init, initargs=(matrix, pairs, config)
        ) as pool:
            results = pool.map(_pool_worker, split_seeds)
    else:
        results = [_eval_single_split(matrix, pairs, config, s) for s in split_seeds]
    labels = list(config.models) + ["Oracle", "StratRandom"]
    accuracies = {
        label: np.array([r[label] for r in results]) for label in labels
    }
    t_tests: dict[str, TTestResult] = {}
    ordered = [m for m in ("B", "C", "D") if m in config.models]
    if "Oracle" in accuracies and ordered:
        t_tests[f"Oracle_vs_{ordered[0]}"] = paired_t_test(
            accuracies["Oracle"], accuracies[ordered[0]]
        )
    for hi, lo in zip(ordered, ordered[1:]):
        t_tests[f"{hi}_vs_{lo}"] = paired_t_test(accuracies[hi], accuracies[lo])
    return EvalResult(accuracies=accuracies, t_tests=t_tests, n_splits=config.n_splits)


def group_importance(
    matrix: PairMatrix,
    config: EvalConfig,
    groups: tuple[str, ...] = FEATURE_GROUPS,
) -> dict[str, float]:
    """Mean Model-B error increase when a feature group is withheld from
    candidacy, normalized so the most informative group is exactly 1.0."""
    base_cfg = replace(config, models=("B",), exclude_group=None)
    baseline = repeated_eval(matrix, base_cfg).accuracies["B"]
    raw: dict[str, float] = {}
    present = {column_group(matrix.groups, n) for n in matrix.names}
    for group in groups:
        if group not in present:
            raw[group] = 0.0
            continue
        cfg = replace(config, models=("B",), exclude_group=group)
        acc = repeated_eval(matrix, cfg).accuracies["B"]
        raw[group] = float((baseline - acc).mean())  # error increase
    top = max(raw.values())
    if top <= 0:
        return raw
    return {g: v / top for g, v in raw.items()}


def format_eval_report(result: EvalResult) -> str:
    """Human-readable accuracy table (Acc., S.D., p-value columns)."""
    lines = [f"{'Model':<14} {'Acc.':>8} {'S.D.':>8} {'p-value':>10}"]
    order = ["Oracle", "B", "C", "D", "StratRandom"]
    p_for = {}
    for key, res in result.t_tests.items():
        lower = key.split("_vs_")[1]
        p_for[lower] = res.p
    for label in order:
        if label not in result.accuracies:
            continue
        acc = result.mean(label) * 100.0
        sd = result.std(label) * 100.0
        p = p_for.get(label)
        p_str = "---" if p is None else f"{p:.4g}"
        lines.append(f"{label:<14} {acc:>7.2f}% {sd:>7.2f}% {p_str:>10}")
    return "\n".join(lines)
