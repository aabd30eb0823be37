"""Command-line entry point: ``treeuniv {gen,check,embed,game,experiment,tailcheck}``.

Exit codes are shared by all subcommands: 0 for success or a passing
verdict, 1 for a negative result, 2 for usage and I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .embed import CaseThresholds, EmbedBudget, embed_spanning_tree
from .errors import InputError
from .expansion import check_expander_exact, check_expander_sampled
from .experiment import SCHEMA_VERSION, ExperimentConfig, rows_to_csv, run_experiment
from .formats import dumps_graph, read_graph, read_trees
from .games import STRATEGIES, maker_win_criterion, universality_game
from .generators import KINDS, GenSpec
from .graph import validate_embedding
from .rng import check_seed, split_seeds
from .tails import PRESETS, tail_check
from .trees import random_bounded_degree_tree

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2
SCHEMA_DIR = Path(__file__).with_name("schemas")
GAME_SCHEMA = SCHEMA_DIR / "game_report.schema.json"


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _emit(text: str, out: str | None) -> None:
    text = text if text.endswith("\n") else text + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _seed(value: str) -> int:
    try:
        return check_seed(int(value, 0))
    except (ValueError, InputError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def cmd_gen(args) -> int:
    spec = GenSpec(kind=args.kind, n=args.n, seed=args.seed, p=args.p, r=args.r, k=args.k, l=args.l, base=args.base)
    base = read_graph(args.base)[0] if args.kind == "doubled" else None
    if spec.kind != "complete" and spec.seed is None:
        raise InputError(f"--seed is required for {spec.kind}")
    G = spec.build(base)
    _emit(dumps_graph(G, spec.to_json()), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    G, _ = read_graph(args.graph)
    if args.mode == "exact":
        verdict = check_expander_exact(G, args.d)
    else:
        if args.seed is None:
            raise InputError("--seed is required for sampled mode")
        verdict = check_expander_sampled(G, args.d, args.trials, args.seed)
    _emit(_dump(verdict.to_json()), args.out)
    return EXIT_NEGATIVE if verdict.status.value.startswith("Fail") else EXIT_OK


def _thresholds(args) -> CaseThresholds:
    return CaseThresholds(args.tau_path, args.tau_leaves, args.slack_forest, args.slack_reserve)


def cmd_embed(args) -> int:
    G, _ = read_graph(args.graph)
    trees = read_trees(args.tree)
    if len(trees) != 1:
        raise InputError(f"{args.tree}: expected one tree, found {len(trees)}")
    T = trees[0]
    delta = args.delta if args.delta is not None else T.max_degree()
    budget = EmbedBudget(args.max_backtracks, args.max_restarts, args.seed)
    rep = embed_spanning_tree(G, T, delta, args.d, _thresholds(args), budget, fallback=not args.no_fallback)
    out = rep.to_json()
    if rep.embedding is not None and not validate_embedding(rep.embedding, T, G):
        # never print an embedding that does not check out
        out["embedding"], out["success"] = None, False
    _emit(_dump(out), args.out)
    return EXIT_OK if out["success"] else EXIT_NEGATIVE


def game_report(G, d, b, delta, breaker: str, trials: int, trees_per_game: int, seed: int, maker_first=True) -> dict:
    criterion = None
    try:
        potential, holds = maker_win_criterion(G, d, b)
        criterion = {"potential": potential, "holds": holds}
    except InputError:
        criterion = {"potential": None, "holds": None}
    rows = []
    for t, s in enumerate(split_seeds(seed, trials)):
        game_seed, tree_seed = split_seeds(s, 2)
        sample = [random_bounded_degree_tree(G.n, delta, ts) for ts in split_seeds(tree_seed, trees_per_game)]
        rep = universality_game(G, delta, d, b, sample, game_seed, breaker=breaker, maker_first=maker_first)
        embedded = sum(1 for o in rep.trees if o["success"])
        rows.append(
            {
                "trial": t,
                "seed": s,
                "maker_strategy": rep.maker_strategy,
                "maker_edges": rep.maker_edges,
                "all_sets_touched": rep.all_sets_touched,
                "expander_status": rep.expander["status"],
                "trees": len(rep.trees),
                "embedded": embedded,
                "win": rep.expander["status"] == "Pass" and embedded == len(rep.trees),
            }
        )
    passes = sum(r["expander_status"] == "Pass" for r in rows)
    embedded = sum(r["embedded"] for r in rows)
    total = sum(r["trees"] for r in rows)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "game",
        "config": {
            "n": G.n,
            "d": d,
            "b": b,
            "delta": delta,
            "breaker": breaker,
            "trials": trials,
            "trees_per_game": trees_per_game,
            "seed": seed,
            "first_mover": "maker" if maker_first else "breaker",
        },
        "criterion": criterion,
        "trials": rows,
        "summary": {
            "expander_passes": passes,
            "expander_pass_rate": passes / trials,
            "embedded": embedded,
            "embedding_success_rate": embedded / total if total else 0.0,
            "wins": sum(r["win"] for r in rows),
        },
    }


def cmd_game(args) -> int:
    G, _ = read_graph(args.graph)
    delta = args.delta if args.delta is not None else max(G.n - 1, 1)
    report = game_report(
        G, args.d, args.b, delta, args.breaker, args.trials, args.trees, args.seed, maker_first=not args.breaker_first
    )
    if args.graph:
        report["config"]["graph"] = str(args.graph)
    _emit(_dump(report), args.out)
    return EXIT_OK if report["summary"]["wins"] == args.trials else EXIT_NEGATIVE


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    rows, summary = run_experiment(cfg, workers=args.workers, timing=args.timing)
    csv_text = rows_to_csv(rows, summary["config"], timing=args.timing)
    target = args.csv or cfg.output
    if target:
        Path(target).write_text(csv_text)
        summary["csv"] = str(target)
        _emit(_dump(summary), args.summary)
    else:
        sys.stdout.write(csv_text)
        if args.summary:
            _emit(_dump(summary), args.summary)
    return EXIT_OK if summary["successes"] == summary["rows"] else EXIT_NEGATIVE


def cmd_tailcheck(args) -> int:
    if args.presets:
        jobs = list(PRESETS)
    elif args.dist is None or args.eps is None:
        raise InputError("give --dist and --eps, or --presets")
    else:
        jobs = [(args.dist, args.eps)]
    seeds = split_seeds(args.seed, len(jobs))
    reports = [tail_check(dist, eps, args.samples, s).to_json() for (dist, eps), s in zip(jobs, seeds)]
    out = {"schema_version": SCHEMA_VERSION, "command": "tailcheck", "seed": args.seed, "reports": reports}
    _emit(_dump(out), args.out)
    return EXIT_NEGATIVE if any(r["violation"] for r in reports) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treeuniv", description="Expanders, spanning trees and Maker-Breaker games.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float)
    g.add_argument("--r", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--l", type=int)
    g.add_argument("--base", help="graph file to double")
    g.add_argument("--seed", type=_seed)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="check the expander conditions")
    c.add_argument("graph")
    c.add_argument("--d", type=float, required=True)
    c.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    c.add_argument("--trials", type=int, default=1000)
    c.add_argument("--seed", type=_seed)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("embed", help="embed a spanning tree")
    e.add_argument("graph")
    e.add_argument("tree", help="tree file (parent array or Pruefer line)")
    e.add_argument("--d", type=float, required=True)
    e.add_argument("--delta", type=float)
    e.add_argument("--tau-path", type=int)
    e.add_argument("--tau-leaves", type=int)
    e.add_argument("--slack-forest", type=int)
    e.add_argument("--slack-reserve", type=int)
    e.add_argument("--max-backtracks", type=int, default=20000)
    e.add_argument("--max-restarts", type=int, default=20)
    e.add_argument("--no-fallback", action="store_true")
    e.add_argument("--seed", type=_seed, required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_embed)

    m = sub.add_parser("game", help="play the universality game")
    m.add_argument("graph")
    m.add_argument("--d", type=float, required=True)
    m.add_argument("--b", type=int, default=1)
    m.add_argument("--delta", type=float)
    m.add_argument("--breaker", choices=sorted(set(STRATEGIES) - {"degree"}), default="random")
    m.add_argument("--trials", type=int, default=10)
    m.add_argument("--trees", type=int, default=5, help="sampled trees per game")
    m.add_argument("--breaker-first", action="store_true")
    m.add_argument("--seed", type=_seed, required=True)
    m.add_argument("--out")
    m.set_defaults(func=cmd_game)

    x = sub.add_parser("experiment", help="run a JSON-configured experiment")
    x.add_argument("config")
    x.add_argument("--csv", help="CSV path (default: the config's output)")
    x.add_argument("--summary", help="summary JSON path (default: stdout)")
    x.add_argument("--workers", type=int, help="worker processes (default: $TREEUNIV_WORKERS or 1)")
    x.add_argument("--timing", action="store_true", help="add a wall-time column (not reproducible)")
    x.set_defaults(func=cmd_experiment)

    t = sub.add_parser("tailcheck", help="Monte-Carlo check of the tail bound")
    t.add_argument("--dist", help="binomial(n,p) or hypergeometric(n,m,l)")
    t.add_argument("--eps", type=float)
    t.add_argument("--presets", action="store_true", help="run the ten built-in presets")
    t.add_argument("--samples", type=int, default=100_000)
    t.add_argument("--seed", type=_seed, required=True)
    t.add_argument("--out")
    t.set_defaults(func=cmd_tailcheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"treeuniv {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
