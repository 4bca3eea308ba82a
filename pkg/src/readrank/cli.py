"""Command-line surface for the difficulty-ranking pipeline.

Every subcommand is reproducible from (inputs, config, seed): outputs embed
a sorted-key config echo and contain no timestamps. A JSON config file can
set any long-option default (keys use underscores); explicit flags win.
The READRANK_SEED environment variable overrides the default seed.

Exit codes: 0 success, 1 validation or input error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import analysis, corpus, features, ngramlm, pairmodel, qc, simulate, synfeat
from . import trueskill as ts


def _default_seed() -> int:
    env = os.environ.get("READRANK_SEED")
    return int(env) if env else 0


def _echo(args: argparse.Namespace, skip=("func", "config")) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or callable(value):
            continue
        out[key] = value
    return out


def _load_resources(args) -> features.FeatureResources:
    lexicon = corpus.load_lexicon(args.lexicon)
    dale = corpus.load_wordlist(args.dale_chall, "DaleChall")
    stop = corpus.load_wordlist(args.stopwords, "Stopword")
    if args.lm:
        lm = ngramlm.load_lm(args.lm)
    elif args.lm_corpus:
        with open(args.lm_corpus, encoding="utf-8") as fh:
            lines = [line.split() for line in fh if line.strip()]
        lm = ngramlm.train_lm(lines, max_order=args.max_order)
    else:
        raise ValueError("one of --lm or --lm-corpus is required")
    pcfg = None
    if args.treebank:
        pcfg = synfeat.estimate_pcfg(synfeat.load_treebank(args.treebank))
    return features.FeatureResources(lexicon, dale, stop, lm, pcfg)


def _read_judgments(path: str):
    if path == "-":
        return corpus.parse_judgments(sys.stdin, "<stdin>")
    return corpus.load_judgments(path)


def _forest_params(args) -> pairmodel.ForestParams:
    return pairmodel.ForestParams(
        n_trees=args.rf_trees,
        max_depth=args.rf_depth,
        min_leaf=args.rf_min_leaf,
    )


def _ts_params(args) -> ts.TrueSkillParams:
    return ts.TrueSkillParams(
        mu0=args.mu0,
        sigma0=args.sigma0,
        beta=args.beta,
        tau=args.tau,
        p_draw=args.p_draw,
        runs=args.runs,
        rank_by=args.rank_by,
        aggregate_by=args.aggregate_by,
    )


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_train_lm(args) -> int:
    with open(args.corpus, encoding="utf-8") as fh:
        lines = [line.split() for line in fh if line.strip()]
    model = ngramlm.train_lm(lines, max_order=args.max_order, alpha=args.alpha)
    ngramlm.save_lm(model, args.out)
    print(f"trained order-{args.max_order} model on {len(lines)} lines -> {args.out}")
    return 0


def cmd_extract_features(args) -> int:
    res = _load_resources(args)
    records = corpus.load_sentences(args.sentences, paper_faithful=args.paper_faithful)
    store = features.extract_features(records, res, coref=args.coref)
    features.save_features(store, args.out, config=_echo(args))
    print(f"extracted features for {len(store)} sentences -> {args.out}")
    return 0


def cmd_qc_filter(args) -> int:
    judgments = _read_judgments(args.judgments)
    retained, stats, removed = qc.filter_workers(
        judgments, task_mode=args.mode, gold_threshold=args.gold_threshold,
        penalty=args.penalty,
    )
    corpus.save_judgments(retained, args.out_judgments)
    if args.report:
        qc.save_qc_report(stats, args.report, config=_echo(args))
    flagged = sum(1 for s in stats if not s.retained)
    print(
        f"removed {flagged} of {len(stats)} workers "
        f"({100.0 * removed:.2f}% of pairwise judgments) -> {args.out_judgments}"
    )
    return 0


def _build_matrix(args):
    store = features.load_features(args.features)
    judgments = _read_judgments(args.judgments)
    if not args.include_gold:
        judgments = [j for j in judgments if not j.is_gold]
    return pairmodel.build_pair_matrix(judgments, store)


def cmd_train(args) -> int:
    matrix = _build_matrix(args)
    config = pairmodel.EvalConfig(
        selection_pct=args.selection_pct,
        l2=args.l2,
        forest=_forest_params(args),
        seed=args.seed,
    )
    if args.model == "B":
        model = pairmodel.train_model_b(
            matrix, config, config.effective_pct(matrix), args.seed
        )
    else:
        base = pairmodel.MODEL_C_BASE if args.model == "C" else pairmodel.MODEL_D_BASE
        names = pairmodel.model_column_names(matrix, base)
        model = pairmodel.logreg_train(
            matrix, names, args.l2, args.seed, metadata={"model": args.model}
        )
    artifact = {
        "config": _echo(args),
        "feature_names": model.feature_names,
        "weights": [float(w) for w in model.weights],
        "bias": float(model.bias),
        "standardization": {
            "mean": [float(v) for v in model.mean],
            "scale": [float(v) for v in model.scale],
        },
        "metadata": model.metadata,
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(artifact, fh, ensure_ascii=False, sort_keys=True, indent=2)
    print(
        f"trained model {args.model} on {matrix.X.shape[0]} judgments, "
        f"{len(model.feature_names)} features -> {args.out}"
    )
    return 0


def cmd_evaluate(args) -> int:
    matrix = _build_matrix(args)
    config = pairmodel.EvalConfig(
        n_splits=args.splits,
        fraction=args.fraction,
        selection_pct=args.selection_pct,
        l2=args.l2,
        forest=_forest_params(args),
        seed=args.seed,
        workers=args.workers if args.workers else (os.cpu_count() or 1),
    )
    result = pairmodel.repeated_eval(matrix, config)
    report = {
        "config": _echo(args),
        "rows": [
            {
                "model": label,
                "acc_mean": result.mean(label),
                "acc_std": result.std(label),
            }
            for label in result.accuracies
        ],
        "t_tests": {
            key: {"t": res.t, "p": res.p, "degenerate": res.degenerate}
            for key, res in result.t_tests.items()
        },
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, ensure_ascii=False, sort_keys=True, indent=2)
    print(pairmodel.format_eval_report(result))
    return 0


def cmd_rank(args) -> int:
    judgments = _read_judgments(args.judgments)
    if not args.include_gold:
        judgments = [j for j in judgments if not j.is_gold]
    params = _ts_params(args)
    agg = ts.aggregate_runs(judgments, params, args.seed)
    if args.out:
        ts.save_ranking_csv(agg, args.out, config=_echo(args))
    else:
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rank", "sentence_id", "mean_rank", "mean_mu", "mean_sigma"])
        for pos, sid in enumerate(agg.ids, start=1):
            writer.writerow(
                [pos, sid, repr(agg.mean_rank[sid]), repr(agg.mean_mu[sid]),
                 repr(agg.mean_sigma[sid])]
            )
        sys.stdout.write("# config: " + json.dumps(_echo(args), sort_keys=True) + "\n")
        sys.stdout.write(buf.getvalue())
    if args.truth:
        truth = ts.load_ranking_csv(args.truth)
        ranking = agg.ranking()
        common = [sid for sid in truth.ids if sid in ranking.rank_index]
        rho, _ = analysis.spearman(
            [truth.rank_index[s] for s in common],
            [ranking.rank_index[s] for s in common],
        )
        print(f"spearman_vs_truth={rho!r}")
    return 0


def cmd_compare_rankings(args) -> int:
    r1 = ts.load_ranking_csv(args.ranking_a)
    r2 = ts.load_ranking_csv(args.ranking_b)
    stats = analysis.rank_diff_stats(r1, r2)
    x = [r1.rank_index[s] for s in r1.ids]
    y = [r2.rank_index[s] for s in r1.ids]
    r, p_r = analysis.pearson(x, y)
    rho, p_rho = analysis.spearman(x, y)
    report = {
        "config": _echo(args),
        "mean_abs_diff": stats["mean_abs_diff"],
        "std_abs_diff": stats["std_abs_diff"],
        "normalized_pct": stats["normalized_pct"],
        "pearson": r,
        "pearson_p": p_r,
        "spearman": rho,
        "spearman_p": p_rho,
        "footnote": (
            "std_abs_diff is the spread of absolute rank changes; "
            "normalized_pct is the mean change over the maximum move (n-1). "
            "They are distinct summaries and both are reported."
        ),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, ensure_ascii=False, sort_keys=True, indent=2)
    mark_r = analysis.significance_marker(p_r)
    mark_rho = analysis.significance_marker(p_rho)
    print(f"Avg. Abs. Diff      {stats['mean_abs_diff']:.4g}")
    print(f"Abs. Diff Std Dev   {stats['std_abs_diff']:.4g}")
    print(f"Normalized change   {stats['normalized_pct']:.4g}%")
    print(f"Pearson             {r:.4f}{mark_r}")
    print(f"Spearman            {rho:.4f}{mark_rho}")
    print("markers: ** p<0.0001, * p<0.001")
    return 0


def cmd_importance(args) -> int:
    matrix = _build_matrix(args)
    config = pairmodel.EvalConfig(
        n_splits=args.splits,
        fraction=args.fraction,
        selection_pct=args.selection_pct,
        l2=args.l2,
        forest=_forest_params(args),
        seed=args.seed,
        workers=args.workers if args.workers else (os.cpu_count() or 1),
    )
    importances = pairmodel.group_importance(matrix, config)
    rows = sorted(importances.items(), key=lambda kv: (-kv[1], kv[0]))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("# config: " + json.dumps(_echo(args), sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["group", "importance"])
        for group, value in rows:
            writer.writerow([group, repr(value)])
    for group, value in rows:
        print(f"{group:<14} {value:.3f}")
    return 0


def cmd_simulate(args) -> int:
    cfg = simulate.SimConfig(
        n_sentences=args.sentences,
        judgments_per_pair=args.judgments_per_pair,
        noise_sd=args.noise_sd,
        p_draw=args.p_draw,
        n_workers=args.n_workers,
        spammer_fraction=args.spammers,
        n_gold=args.gold,
        seed=args.seed,
        choice_model=args.choice_model,
        pair_method=args.pair_method,
        with_passages=args.passages,
    )
    data = simulate.simulate_dataset(cfg)
    echo = _echo(args)

    def write_truth(path):
        agg = ts.AggregateRanking(
            ids=data.truth.ids,
            mean_rank={s: float(i + 1) for i, s in enumerate(data.truth.ids)},
            mean_mu={s: data.truth.scores[s] for s in data.truth.ids},
            mean_sigma={s: 0.0 for s in data.truth.ids},
        )
        ts.save_ranking_csv(agg, path, config=echo)

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        corpus.save_sentences(data.records, os.path.join(args.out, "sentences.jsonl"))
        corpus.save_judgments(data.judgments, os.path.join(args.out, "judgments.jsonl"))
        corpus.save_lexicon(data.vocab.lexicon, os.path.join(args.out, "lexicon.csv"))
        corpus.save_wordlist(data.vocab.dale_chall, os.path.join(args.out, "dale_chall.txt"))
        corpus.save_wordlist(data.vocab.stopwords, os.path.join(args.out, "stopwords.txt"))
        with open(os.path.join(args.out, "lm_corpus.txt"), "w", encoding="utf-8") as fh:
            for line in data.lm_lines:
                fh.write(" ".join(line) + "\n")
        write_truth(os.path.join(args.out, "truth.csv"))
        agreement = simulate.majority_agreement(data.judgments)
        print(
            f"simulated {len(data.records)} sentences, {len(data.pairs)} pairs, "
            f"{len(data.judgments)} judgments (majority agreement "
            f"{100.0 * agreement:.2f}%) -> {args.out}"
        )
    else:
        for j in data.judgments:
            obj = {
                "pair_id": j.pair_id,
                "sent_a": j.sent_a,
                "sent_b": j.sent_b,
                "worker_id": j.worker_id,
                "choice": j.choice,
                "presentation_order": j.presentation_order,
                "is_gold": j.is_gold,
            }
            if j.gold_answer is not None:
                obj["gold_answer"] = j.gold_answer
            sys.stdout.write(json.dumps(obj, ensure_ascii=False) + "\n")
    if args.truth_out:
        write_truth(args.truth_out)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; explicit flags win")
    p.add_argument("--seed", type=int, default=None, help="random seed")


def _add_resource_flags(p: argparse.ArgumentParser):
    p.add_argument("--lexicon", required=True, help="CSV word,aoa_rating,n_syllables")
    p.add_argument("--dale-chall", required=True, help="easy-word list file")
    p.add_argument("--stopwords", required=True, help="stopword list file")
    p.add_argument("--lm", help="trained n-gram model JSON")
    p.add_argument("--lm-corpus", help="train an LM from this tokenized corpus instead")
    p.add_argument("--max-order", type=int, default=5)
    p.add_argument("--treebank", help="bracketed trees for the PCFG fallback scorer")


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--selection-pct", type=float, default=None,
                   help="forest selection share (default 0.02, or 0.01 with ctx features)")
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--rf-trees", type=int, default=200)
    p.add_argument("--rf-depth", type=int, default=None)
    p.add_argument("--rf-min-leaf", type=int, default=2)
    p.add_argument("--include-gold", action="store_true",
                   help="keep gold judgments in the matrix (excluded by default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="readrank",
        description="Relative sentence reading difficulty toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-lm", help="train the backoff n-gram model")
    _add_common(p)
    p.add_argument("--corpus", required=True, help="one tokenized sentence per line")
    p.add_argument("--max-order", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("extract-features", help="compute per-sentence feature vectors")
    _add_common(p)
    p.add_argument("--sentences", required=True)
    _add_resource_flags(p)
    p.add_argument("--coref", action="store_true", help="add the ctx: feature block")
    p.add_argument("--paper-faithful", action="store_true",
                   help="treat length-window violations as errors")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract_features)

    p = sub.add_parser("qc-filter", help="drop low-quality workers' judgments")
    _add_common(p)
    p.add_argument("--judgments", required=True, help="judgments JSONL ('-' for stdin)")
    p.add_argument("--mode", choices=("sentence_only", "in_passage"),
                   default="sentence_only")
    p.add_argument("--gold-threshold", type=float, default=qc.GOLD_ACCURACY_THRESHOLD)
    p.add_argument("--penalty", choices=("modal_share", "flat"), default="modal_share")
    p.add_argument("--out-judgments", required=True)
    p.add_argument("--report", help="per-worker stats CSV")
    p.set_defaults(func=cmd_qc_filter)

    p = sub.add_parser("train", help="train one pairwise model variant")
    _add_common(p)
    p.add_argument("--features", required=True, help="extract-features output JSON")
    p.add_argument("--judgments", required=True)
    p.add_argument("--model", choices=("B", "C", "D"), default="B")
    _add_model_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="repeated-split accuracy report")
    _add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--judgments", required=True)
    p.add_argument("--splits", type=int, default=200)
    p.add_argument("--fraction", type=float, default=0.2)
    _add_model_flags(p)
    p.add_argument("--workers", type=int, default=None,
                   help="parallel split workers (default: all cores)")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rank", help="aggregate judgments into a ranking")
    _add_common(p)
    p.add_argument("--judgments", required=True, help="judgments JSONL ('-' for stdin)")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--mu0", type=float, default=25.0)
    p.add_argument("--sigma0", type=float, default=25.0 / 3.0)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--p-draw", type=float, default=0.02)
    p.add_argument("--rank-by", choices=("mu", "conservative"), default="mu")
    p.add_argument("--aggregate-by", choices=("rank", "mu"), default="rank")
    p.add_argument("--include-gold", action="store_true")
    p.add_argument("--truth", help="ranking CSV to score recovery against")
    p.add_argument("--out", help="ranking CSV path (default: stdout)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("compare-rankings", help="rank-change statistics for two rankings")
    _add_common(p)
    p.add_argument("--ranking-a", required=True)
    p.add_argument("--ranking-b", required=True)
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_compare_rankings)

    p = sub.add_parser("importance", help="feature-group importance sweep")
    _add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--judgments", required=True)
    p.add_argument("--splits", type=int, default=20)
    p.add_argument("--fraction", type=float, default=0.2)
    _add_model_flags(p)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True, help="group importance CSV")
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("simulate", help="generate a synthetic dataset")
    _add_common(p)
    p.add_argument("--paper-scale", action="store_true",
                   help="120 sentences, 7 decisions per ordered pair, 40 gold")
    p.add_argument("--sentences", type=int, default=120)
    p.add_argument("--judgments-per-pair", type=int, default=7)
    p.add_argument("--noise-sd", type=float, default=0.95)
    p.add_argument("--p-draw", type=float, default=0.02)
    p.add_argument("--n-workers", type=int, default=120)
    p.add_argument("--spammers", type=float, default=0.0)
    p.add_argument("--gold", type=int, default=40)
    p.add_argument("--choice-model", choices=("probit", "logit"), default="probit")
    p.add_argument("--pair-method", choices=("matching", "grouped"), default="matching")
    p.add_argument("--passages", action="store_true",
                   help="wrap sentences in passages with coreference chains")
    p.add_argument("--truth-out", help="write the planted ranking CSV here")
    p.add_argument("--out", help="output directory (default: judgments to stdout)")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "paper_scale", False):
        args.sentences = 120
        args.judgments_per_pair = 7
        args.gold = 40
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = _default_seed()
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                overrides = json.load(fh)
            if not isinstance(overrides, dict):
                raise ValueError("config must be a JSON object")
            given = set()
            for token in (argv if argv is not None else sys.argv[1:]):
                if token.startswith("--"):
                    given.add(token[2:].split("=")[0].replace("-", "_"))
            for key, value in overrides.items():
                attr = key.replace("-", "_")
                if hasattr(args, attr) and attr not in given:
                    setattr(args, attr, value)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
