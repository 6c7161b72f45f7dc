"""Command-line entry point for cliquesim.

Subcommands:
    generate  build a graph from a family and write it in the ``p cc`` format
    run       execute one algorithm with full round accounting
    verify    check a solution file against a graph with the oracles
    bench     sweep n / family parameters / seeds into a CSV table
    history   export the SQLite run history
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Sequence

import config
import graph_model
from coloring import (
    Coloring,
    ColoringKind,
    a1eps_coloring,
    arb_coloring_cc,
    fast_coloring_a2eps,
    o_a_coloring,
)
from database import ResultsDatabase
from decomposition import (
    ForestLabeling,
    degeneracy_coloring,
    forests_decomposition_cc,
    learn_graph,
    solve_locally,
)
from errors import CliqueSimError, GraphIoError, InvalidParameters, ParseError
from graph_model import Graph, GraphFamilySpec, norm_edge
from mis import mis_cc
from oracles import (
    VerificationReport,
    degeneracy,
    verify_coloring,
    verify_forest_decomposition,
    verify_mis,
)
from settings_manager import RunConfig, SettingsManager
from sim_engine import CliqueNetwork
from utils import append_csv_row, export_table, setup_logging, write_json

logger = logging.getLogger(__name__)


# ------------------------------
# Solution files
# ------------------------------


def format_vertex_values(values: dict[int, int]) -> str:
    return "".join(f"v {v} {values[v]}\n" for v in sorted(values))


def format_labeling(labeling: ForestLabeling) -> str:
    lines = []
    for e in sorted(labeling.label):
        head = labeling.head[e]
        tail = e[0] if head == e[1] else e[1]
        lines.append((tail, head, labeling.label[e]))
    return "".join(f"f {t} {h} {lab}\n" for t, h, lab in sorted(lines))


def parse_solution(text: str) -> tuple[dict[int, int], Optional[ForestLabeling]]:
    """Read ``v`` lines into a value map and ``f`` lines into a labeling (if any)."""

    values: dict[int, int] = {}
    head: dict[tuple[int, int], int] = {}
    label: dict[tuple[int, int], int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "v" and len(parts) == 3:
                values[int(parts[1])] = int(parts[2])
                continue
            if parts[0] == "f" and len(parts) == 4:
                tail, hd, lab = int(parts[1]), int(parts[2]), int(parts[3])
                head[norm_edge(tail, hd)] = hd
                label[norm_edge(tail, hd)] = lab
                continue
        except ValueError as e:
            raise ParseError(f"line {lineno}: non-integer field in {line!r}") from e
        raise ParseError(f"line {lineno}: expected 'v <id> <value>' or 'f <tail> <head> <label>'")
    labeling = ForestLabeling(head, label, max(label.values(), default=0)) if label else None
    return values, labeling


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise GraphIoError(f"cannot read {path}: {e}") from e


def _write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise GraphIoError(f"cannot write {path}: {e}") from e


# ------------------------------
# Running algorithms
# ------------------------------


@dataclass
class RunOutcome:
    graph: Graph
    a: float
    solution_text: str
    report: VerificationReport
    record: dict[str, Any]
    stats: dict[str, Any] = field(default_factory=dict)


def load_graph(cfg: RunConfig) -> Graph:
    if cfg.graph:
        return graph_model.load(cfg.graph)
    spec = GraphFamilySpec(cfg.family, cfg.n, cfg.k, cfg.rows, cfg.cols, cfg.d, cfg.density, cfg.seed)
    return graph_model.generate(spec)


def resolve_arboricity(cfg: RunConfig, graph: Graph) -> float:
    """Promise a: explicit value, else the generator witness, else the degeneracy."""

    if cfg.a is not None:
        return cfg.a
    if graph.known_arboricity_bound is not None:
        return float(max(1, graph.known_arboricity_bound))
    return float(max(1, degeneracy(graph)))


def execute(cfg: RunConfig, graph: Optional[Graph] = None) -> RunOutcome:
    """Run ``cfg.algorithm`` on a fresh network and check its output."""

    graph = graph if graph is not None else load_graph(cfg)
    a = resolve_arboricity(cfg, graph)
    net = CliqueNetwork(graph.n, workers=cfg.workers)
    extra: dict[str, Any] = {}

    if cfg.algorithm == "forest-decomp":
        labeling = forests_decomposition_cc(graph, a, cfg.eps, net)
        text = format_labeling(labeling)
        report = verify_forest_decomposition(graph, labeling, a, cfg.eps)
        size = len(set(labeling.label.values()))
        extra = {"forests": size, "label_bound": labeling.num_labels}
    elif cfg.algorithm == "mis":
        result = mis_cc(graph, a, cfg.eps_h, cfg.split, net, t=cfg.t)
        text = format_vertex_values({v: int(v in result.members) for v in graph.vertices()})
        report = verify_mis(graph, result.members)
        size = len(result.members)
        extra = dict(result.stats)
    else:
        coloring = _run_coloring(cfg, graph, a, net)
        text = format_vertex_values(coloring.colors)
        report = verify_coloring(graph, coloring)
        size = coloring.used_colors
        extra = {"palette_size": coloring.palette_size, **coloring.stats}

    stats = net.stats.as_dict()
    # only parameters the algorithm actually used are recorded
    record = {
        "algorithm": cfg.algorithm,
        "n": graph.n,
        "m": graph.m,
        "a": a,
        "eps": cfg.eps,
        "p": extra.get("p"),
        "k": cfg.k,
        "t": extra.get("t"),
        "rounds": stats["rounds"],
        "lenzen_calls": stats["lenzen_calls"],
        "total_bits": stats["total_bits"],
        "max_message_bits": stats["max_message_bits"],
        "palette_or_mis": size,
        "verified": int(report.ok),
    }
    logger.info(
        "%s on n=%d m=%d a=%s: %d rounds, %d Lenzen calls, result %d, verified=%s",
        cfg.algorithm,
        graph.n,
        graph.m,
        a,
        stats["rounds"],
        stats["lenzen_calls"],
        size,
        report.ok,
    )
    return RunOutcome(graph, a, text, report, record, {**stats, **extra})


def _run_coloring(cfg: RunConfig, graph: Graph, a: float, net: CliqueNetwork) -> Coloring:
    if cfg.algorithm == "color-a2":
        return arb_coloring_cc(graph, a, cfg.eps, net)
    if cfg.algorithm == "color-a2eps":
        return fast_coloring_a2eps(graph, a, cfg.eps, cfg.eps_h, net)
    if cfg.algorithm == "color-a1eps":
        return a1eps_coloring(graph, a, cfg.eps_h, net, p=cfg.p)
    if cfg.algorithm == "color-oa":
        return o_a_coloring(graph, a, cfg.eps, cfg.eps_h, net, p=cfg.p)
    # universal: learn everything in O(a) rounds, then color locally
    labeling = forests_decomposition_cc(graph, a, cfg.eps, net)
    known = learn_graph(graph, labeling, net)
    colors = solve_locally(known, degeneracy_coloring)
    return Coloring(colors, ColoringKind.PROPER, palette_size=max(colors.values(), default=1))


# ------------------------------
# Commands
# ------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    spec = GraphFamilySpec(args.family, args.n, args.k, args.rows, args.cols, args.d, args.density, args.seed)
    graph = graph_model.generate(spec)
    if args.out:
        graph_model.save(graph, args.out)
    else:
        sys.stdout.write(graph_model.dumps(graph))
    witness = graph.known_arboricity_bound
    print(f"n={graph.n} m={graph.m} degeneracy={degeneracy(graph)} witness_a={witness}", file=sys.stderr)
    return config.EXIT_OK


def build_run_config(args: argparse.Namespace) -> RunConfig:
    manager = SettingsManager(args.config) if args.config else SettingsManager()
    overrides = {
        "algorithm": args.algorithm,
        "graph": args.graph,
        "family": args.family,
        "n": args.n,
        "k": args.k,
        "rows": args.rows,
        "cols": args.cols,
        "d": args.d,
        "density": args.density,
        "seed": args.seed,
        "a": args.a,
        "eps": args.eps,
        "eps_h": args.eps_h,
        "p": args.p,
        "t": args.t,
        "split": args.split,
        "workers": args.workers,
        "solution_out": args.solution_out,
        "stats_out": args.stats_out,
        "csv_out": args.csv_out,
        "db": args.db,
    }
    return manager.run_config(**overrides)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = build_run_config(args)
    if args.save_config:
        manager = SettingsManager()
        manager.store_run_config(cfg)
        logger.info("run configuration saved to %s", manager.save(args.save_config))
    outcome = execute(cfg)
    if cfg.solution_out:
        _write_text(cfg.solution_out, outcome.solution_text)
    if cfg.stats_out:
        write_json({**outcome.record, "stats": outcome.stats}, cfg.stats_out)
    if cfg.csv_out:
        append_csv_row(outcome.record, config.BENCH_COLUMNS, cfg.csv_out)
    if cfg.db:
        ResultsDatabase(cfg.db).record_run(outcome.record, outcome.stats)
    print(outcome.report.summary())
    return config.EXIT_OK if outcome.report.ok else config.EXIT_VERIFY_FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    graph = graph_model.load(args.graph)
    values, labeling = parse_solution(_read_text(args.solution))
    kind = args.kind
    if kind == "forest":
        if labeling is None:
            raise ParseError("forest verification needs 'f <tail> <head> <label>' lines")
        a = args.a if args.a is not None else float(max(1, degeneracy(graph)))
        report = verify_forest_decomposition(graph, labeling, a, args.eps)
    elif kind == "mis":
        report = verify_mis(graph, [v for v, inside in values.items() if inside])
    else:
        coloring = Coloring(values, ColoringKind(kind), bound=args.bound or 0)
        report = verify_coloring(graph, coloring)
    print(report.summary())
    return config.EXIT_OK if report.ok else config.EXIT_VERIFY_FAILED


BENCH_KEYS = frozenset(
    {"algorithm", "family", "n", "k", "seeds", "rows", "cols", "d", "eps", "eps_h", "split", "jobs", "out", "db"}
)


def resolve_bench_args(args: argparse.Namespace) -> argparse.Namespace:
    """Fill bench options not given on the command line from the ``bench.`` keys of ``--config``."""

    manager = SettingsManager(args.config) if args.config else SettingsManager()
    unknown = sorted(set(manager.get_category("bench")) - BENCH_KEYS)
    if unknown:
        raise ParseError(f"unknown bench settings: {', '.join(unknown)}")
    args.algorithm = args.algorithm or manager.get("bench", "algorithm")
    args.family = args.family or manager.get("bench", "family", "forest_union")
    args.n = args.n or manager.get_ints("bench", "n", [])
    args.k = args.k or manager.get_ints("bench", "k", [])
    args.seeds = args.seeds or manager.get_ints("bench", "seeds", [0])
    for key, default in (("rows", 0), ("cols", 0), ("d", 1), ("jobs", 1)):
        if getattr(args, key) is None:
            setattr(args, key, manager.get_int("bench", key, default))
    for key, default in (("eps", config.DEFAULT_EPS), ("eps_h", config.EPS_H)):
        if getattr(args, key) is None:
            setattr(args, key, manager.get_float("bench", key, default))
    args.split = args.split or manager.get("bench", "split", "sqrt")
    args.out = args.out or manager.get("bench", "out")
    args.db = args.db or manager.get("bench", "db")
    if not args.out:
        raise InvalidParameters("bench needs --out or bench.out in --config")
    return args


def sweep_configs(args: argparse.Namespace) -> list[RunConfig]:
    base = RunConfig(
        algorithm=args.algorithm,
        family=args.family,
        eps=args.eps,
        eps_h=args.eps_h,
        split=args.split,
        rows=args.rows,
        cols=args.cols,
        d=args.d,
    ).validate()
    out = []
    for n in args.n:
        for k in args.k or [base.k]:
            for seed in args.seeds:
                out.append(replace(base, n=n, k=k, seed=seed))
    return out


def bench_point(cfg_text: str) -> dict[str, Any]:
    """Run one sweep point from its serialized RunConfig (picklable for process pools)."""

    outcome = execute(RunConfig.from_text(cfg_text))
    return {**outcome.record, "_stats": outcome.stats}


def cmd_bench(args: argparse.Namespace) -> int:
    args = resolve_bench_args(args)
    configs = sweep_configs(args)
    texts = [c.to_text() for c in configs]
    if args.jobs > 1 and len(texts) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(bench_point, texts))
    else:
        rows = [bench_point(t) for t in texts]

    export_table(rows, config.BENCH_COLUMNS, args.out)
    if args.db:
        db = ResultsDatabase(args.db)
        for row in rows:
            db.record_run(row, row.get("_stats"))
    failed = sum(1 for r in rows if not r["verified"])
    logger.info("bench: %d rows written to %s, %d unverified", len(rows), args.out, failed)
    return config.EXIT_OK if failed == 0 else config.EXIT_VERIFY_FAILED


def cmd_history(args: argparse.Namespace) -> int:
    db = ResultsDatabase(args.db)
    if args.show is not None:
        run = db.get_run(args.show)
        if run is None:
            raise InvalidParameters(f"no run with id {args.show} in {db.db_path}")
        print(json.dumps(run, indent=2, sort_keys=True, default=str))
        return config.EXIT_OK
    if not args.out:
        raise InvalidParameters("history needs --out or --show")
    df = db.to_dataframe(args.algorithm)
    path = db.export_runs(args.out, args.algorithm)
    print(f"{len(df)} of {db.count_runs()} runs exported to {path}, {int(df['verified'].sum())} verified")
    return config.EXIT_OK


# ------------------------------
# Argument parsing
# ------------------------------


def _add_family_args(p: argparse.ArgumentParser, defaults: bool) -> None:
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--family", default=d("forest_union"), help="graph family")
    p.add_argument("--n", type=int, default=d(64))
    p.add_argument("--k", type=int, default=d(2))
    p.add_argument("--rows", type=int, default=d(0))
    p.add_argument("--cols", type=int, default=d(0))
    p.add_argument("--d", type=int, default=d(1))
    p.add_argument("--density", type=float, default=d(1.0))
    p.add_argument("--seed", type=int, default=d(0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=config.APP_NAME, description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--log-file", default=None, help="also log to this file ('default' = logs/activity.log)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a graph file")
    _add_family_args(gen, defaults=True)
    gen.add_argument("--out", default=None, help="output path (stdout if omitted)")
    gen.set_defaults(func=cmd_generate)

    run = sub.add_parser("run", help="run one algorithm")
    run.add_argument("--config", default=None, help="key=value RunConfig file; flags override it")
    run.add_argument("--algorithm", choices=config.ALGORITHMS, default=None)
    run.add_argument("--graph", default=None, help="graph file (else generated from family flags)")
    _add_family_args(run, defaults=False)
    run.add_argument("--a", type=float, default=None, help="arboricity promise")
    run.add_argument("--eps", type=float, default=None)
    run.add_argument("--eps-h", dest="eps_h", type=float, default=None)
    run.add_argument("--p", type=int, default=None, help="split width for color-a1eps / color-oa")
    run.add_argument("--t", type=int, default=None, help="class count of the sqrt MIS split")
    run.add_argument("--split", choices=config.MIS_SPLITS, default=None)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--solution-out", dest="solution_out", default=None)
    run.add_argument("--stats-out", dest="stats_out", default=None)
    run.add_argument("--csv-out", dest="csv_out", default=None)
    run.add_argument("--db", default=None, help="SQLite run history")
    run.add_argument("--save-config", dest="save_config", default=None, help="write the effective RunConfig here")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="check a solution file")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--solution", required=True)
    ver.add_argument("--kind", required=True, choices=["proper", "defective", "arbdefective", "mis", "forest"])
    ver.add_argument("--bound", type=int, default=None, help="m for defective, r for arbdefective")
    ver.add_argument("--a", type=float, default=None)
    ver.add_argument("--eps", type=float, default=config.DEFAULT_EPS)
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="sweep runs into a CSV table")
    bench.add_argument("--config", default=None, help="settings file; bench.* keys fill options not given here")
    bench.add_argument("--algorithm", choices=config.ALGORITHMS, default=None)
    bench.add_argument("--family", default=None)
    bench.add_argument("--n", type=int, nargs="*", default=[])
    bench.add_argument("--k", type=int, nargs="*", default=[])
    bench.add_argument("--rows", type=int, default=None)
    bench.add_argument("--cols", type=int, default=None)
    bench.add_argument("--d", type=int, default=None)
    bench.add_argument("--seeds", type=int, nargs="*", default=[])
    bench.add_argument("--eps", type=float, default=None)
    bench.add_argument("--eps-h", dest="eps_h", type=float, default=None)
    bench.add_argument("--split", choices=config.MIS_SPLITS, default=None)
    bench.add_argument("--jobs", type=int, default=None)
    bench.add_argument("--out", default=None, help=".csv or .xlsx")
    bench.add_argument("--db", default=None)
    bench.set_defaults(func=cmd_bench)

    hist = sub.add_parser("history", help="export stored runs")
    hist.add_argument("--db", default=None)
    hist.add_argument("--algorithm", default=None)
    hist.add_argument("--out", default=None, help=".csv or .xlsx")
    hist.add_argument("--show", type=int, default=None, help="print one run, stats included, as JSON")
    hist.set_defaults(func=cmd_history)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, args.log_file)
    try:
        return int(args.func(args))
    except CliqueSimError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
