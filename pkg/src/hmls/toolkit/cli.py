from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..cover import build_hierarchy
from ..engine import hierarchical_mls
from .bench import BenchConfig, run_bench
from .dimacs import DimacsSource, load_dimacs
from .generate import generate_random_graph
from .storage import load_hierarchy, save_hierarchy
from .verify import VerifyConfig, run_verify

log = logging.getLogger("hmls")


def parse_levels(text: str) -> list[int]:
    """``"0-10"``, ``"0,2,4"`` or ``"7"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 0:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}")
    return out


def _cmd_build(args: argparse.Namespace) -> int:
    if args.generate:
        n, m, q, max_cost, seed = args.generate
        g = generate_random_graph(n, m, q, max_cost, seed)
    else:
        g = load_dimacs(DimacsSource(args.gr, senses=args.sense or []))
    log.info("graph: %d vertices, %d edges, %d criteria", g.vertex_count, g.edge_count, g.criterion_count)
    h, stats = build_hierarchy(g, args.levels)
    out = Path(args.out)
    try:
        save_hierarchy(h, out)
        stats_path = Path(args.stats) if args.stats else out.with_suffix(out.suffix + ".csv")
        stats.to_csv(stats_path)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(stats.to_csv())
    return 0


def _cmd_query(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    h = load_hierarchy(args.hierarchy)
    n = h.vertex_count
    for name in ("source", "target"):
        v = getattr(args, name)
        if not 0 <= v < n:
            parser.error(f"unknown vertex id {v} (graph has vertices 0..{n - 1})")
    if args.level is not None:
        if args.level > h.level_count:
            parser.error(f"level {args.level} outside built hierarchy (0..{h.level_count})")
        h = h.truncated(args.level)
    res = hierarchical_mls(h, args.source, args.target, use_tdiscard=not args.no_tdiscard, use_bounds=args.bounds,
                           time_limit=args.time_limit)
    routes = []
    for r in res.routes:
        edges = r.base_edges(h)
        vertices = [args.source] + [h.base.dst[e] for e in edges]
        routes.append({"cost": list(r.cost), "vertices": vertices, "edges": edges})
    if args.json:
        print(json.dumps({"routes": routes, "labels_created": res.labels_created, "seconds": res.seconds}))
        return 0
    print(f"{len(routes)} routes")
    for r in routes:
        line = "cost=(" + ", ".join(map(str, r["cost"])) + ")"
        if not args.no_paths:
            line += " path=" + "->".join(map(str, r["vertices"]))
        print(line)
    print(f"labels_created={res.labels_created} labels_kept={res.labels_kept} elapsed={res.seconds:.6f}s")
    return 0


def _cmd_bench(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    h = load_hierarchy(args.hierarchy)
    levels = args.levels if args.levels is not None else list(range(h.level_count + 1))
    try:
        config = BenchConfig(pair_count=args.pairs, seed=args.seed, levels=levels, tdiscard=not args.no_tdiscard,
                             bounds=args.bounds, time_limit=args.time_limit)
        result = run_bench(h, config)
    except ValueError as exc:
        parser.error(str(exc))
    text = result.to_csv(args.out)
    if args.queries_out:
        result.queries_csv(args.queries_out)
    if args.json:
        Path(args.json).write_text(result.to_json())
    sys.stdout.write(text)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    suites = ("cover", "equivalence") if args.suite == "all" else (args.suite,)
    config = VerifyConfig(graphs=args.graphs, pairs=args.pairs, levels=args.levels, seed=args.seed,
                          max_vertices=args.max_vertices, suites=suites)
    report = run_verify(config)
    print(report.summary())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmls", description="Hierarchical multicriteria shortest paths")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a hierarchy of covers")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gr", nargs="+", help="DIMACS .gr files, one per criterion (gzip ok)")
    src.add_argument("--generate", nargs=5, type=int, metavar=("N", "M", "Q", "MAXCOST", "SEED"))
    p.add_argument("--sense", nargs="+", choices=("min", "max"), help="optimization sense per file")
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--out", required=True, help="hierarchy output file")
    p.add_argument("--stats", help="per-level CSV (default: <out>.csv)")

    p = sub.add_parser("query", help="Pareto routes between two vertices (0-based ids)")
    p.add_argument("hierarchy")
    p.add_argument("source", type=int)
    p.add_argument("target", type=int)
    p.add_argument("--level", type=int, help="query with the hierarchy truncated to this level")
    p.add_argument("--no-tdiscard", action="store_true")
    p.add_argument("--bounds", action="store_true")
    p.add_argument("--no-paths", action="store_true")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bench", help="per-level statistics over random pairs")
    p.add_argument("hierarchy")
    p.add_argument("--levels", type=parse_levels, help="e.g. 0-10 or 0,4,8 (default: all)")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-tdiscard", action="store_true")
    p.add_argument("--bounds", action="store_true")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--out", help="stats CSV path")
    p.add_argument("--queries-out", help="per-query CSV path")
    p.add_argument("--json", help="JSON mirror path")

    p = sub.add_parser("verify", help="oracle equivalence and cover invariants on generated graphs")
    p.add_argument("--suite", choices=("all", "cover", "equivalence"), default="all")
    p.add_argument("--graphs", type=int, default=50)
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--levels", type=parse_levels, default=list(range(6)))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vertices", type=int, default=300)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "build":
        return _cmd_build(args)
    if args.command == "query":
        return _cmd_query(args, parser)
    if args.command == "bench":
        return _cmd_bench(args, parser)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
