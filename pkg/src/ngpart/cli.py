"""Command line: ``ngpart partition | bench | generate``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time

import numpy as np

from .driver import Config, ConfigError, RunStats, aggregate, n_gp
from .generate import grid_graph, rgg_graph
from .graph import DynGraph, GraphFormatError, read_metis, write_metis
from .partition import write_partition

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2

BENCH_HEADER = ["instance", "k", "seed", "cut", "feasible", "time_ms", "steps", "edges_created"]


class InputError(Exception):
    pass


def verify_cut(g: DynGraph, blocks) -> float:
    """Cut of ``blocks`` computed from the raw edge arrays, independent of Partition."""
    ea = np.frombuffer(bytes(g.edge_alive), dtype=np.uint8).astype(bool)
    target = np.asarray(g.target)
    source = np.empty_like(target)
    source[0::2] = target[1::2]
    source[1::2] = target[0::2]
    b = np.asarray(blocks)
    w = np.asarray(g.edge_weight)
    crossing = ea & (b[source] != b[target])
    total = w[crossing].sum() / 2
    return int(total) if float(total).is_integer() else float(total)


def _config(args, k: int, seed: int) -> Config:
    return Config.from_preset(
        k, args.preset, epsilon=args.epsilon, alpha=args.alpha,
        trial_factor=args.trial_factor, attempts=args.attempts, seed=seed)


def _load(path) -> DynGraph:
    try:
        return read_metis(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except GraphFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _best_of(g: DynGraph, args, k: int, seed: int, repetitions: int, time_limit=None):
    """Run repetitions (and keep going until ``time_limit``); keep the best."""
    best = None
    start = time.perf_counter()
    rep = 0
    while True:
        cfg = _config(args, k, seed + rep)
        P, stats = n_gp(g, cfg)
        if best is None or (not stats.feasible, stats.cut) < (not best[1].feasible, best[1].cut):
            best = (list(P.block), stats, seed + rep)
        rep += 1
        if rep >= repetitions and (time_limit is None or time.perf_counter() - start >= time_limit):
            return best


def cmd_partition(args) -> int:
    if args.k < 1:
        raise InputError(f"--k must be at least 1, got {args.k}")
    g = _load(args.graph)
    if args.k > g.n:
        raise InputError(f"--k {args.k} exceeds the number of vertices ({g.n})")
    _config(args, args.k, args.seed)  # validate before doing work
    blocks, stats, seed = _best_of(g, args, args.k, args.seed, args.repetitions, args.time_limit)
    verified = verify_cut(g, blocks)
    if verified != stats.cut:
        print(f"error: verification cut {verified} != reported {stats.cut}", file=sys.stderr)
        return EXIT_INPUT
    output = args.output or f"{args.graph}.part.{args.k}"
    write_partition(output, blocks)
    record = json.loads(stats.to_json())
    record.update(graph=str(args.graph), k=args.k, seed=seed, verified_cut=verified)
    line = json.dumps(record, sort_keys=True)
    if args.stats:
        with open(args.stats, "a") as f:
            f.write(line + "\n")
    else:
        print(line)
    return EXIT_OK if stats.feasible else EXIT_INFEASIBLE


def read_manifest(path) -> list[tuple[str, int]]:
    """Lines of ``graph k`` (``#`` comments); paths are relative to the manifest."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'graph k'")
        try:
            k = int(parts[1])
        except ValueError:
            raise InputError(f"{path}:{lineno}: bad k {parts[1]!r}") from None
        entries.append((os.path.join(base, parts[0]), k))
    return entries


def cmd_bench(args) -> int:
    entries = read_manifest(args.manifest)
    if not entries:
        raise InputError("manifest lists no instances")
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    graphs: dict[str, DynGraph] = {}
    runs: dict[str, list] = {}
    meta: dict[str, dict] = {}
    any_infeasible = False
    try:
        for path, k in entries:
            if path not in graphs:
                graphs[path] = _load(path)
            g = graphs[path]
            name = f"{os.path.basename(path)}:{k}"
            reps = args.repetitions
            if reps is None:
                reps = 10 if g.n <= args.small_threshold else 5
            rows = runs.setdefault(name, [])
            m = meta.setdefault(name, {"k": k, "feasible": 0, "steps": [], "edges": []})
            for rep in range(reps):
                seed = args.seed + rep
                _, stats = n_gp(g, _config(args, k, seed))
                writer.writerow([name, k, seed, stats.cut, int(stats.feasible),
                                 round(stats.wall_time * 1000, 3), stats.total_steps,
                                 stats.edges_created])
                rows.append((stats.cut, stats.wall_time))
                m["feasible"] += stats.feasible
                m["steps"].append(stats.total_steps)
                m["edges"].append(stats.edges_created)
                any_infeasible |= not stats.feasible
        per, overall = aggregate(runs)
        for s in per:
            m = meta[s.instance]
            writer.writerow([s.instance, m["k"], "mean", _fmt(s.mean),
                             f"{m['feasible']}/{s.runs}", round(s.mean_time * 1000, 3),
                             _fmt(sum(m["steps"]) / s.runs), _fmt(sum(m["edges"]) / s.runs)])
        writer.writerow(["geomean", "", "mean", _fmt(overall["mean"]), "",
                         round(overall["mean_time"] * 1000, 3), "", ""])
    finally:
        if out is not sys.stdout:
            out.close()
    summary = {
        "instances": [vars(s) for s in per],
        "geomean": overall,
    }
    if args.summary:
        with open(args.summary, "w") as f:
            json.dump(summary, f, indent=2, sort_keys=True)
    return EXIT_INFEASIBLE if any_infeasible else EXIT_OK


def _fmt(x):
    return int(x) if float(x).is_integer() else round(x, 4)


def cmd_generate(args) -> int:
    if args.kind == "grid":
        if args.width < 1 or args.height < 1:
            raise InputError("grid dimensions must be positive")
        g = grid_graph(args.width, args.height)
        default = f"grid{args.width}x{args.height}.graph"
    else:
        if not 1 <= args.log_n <= 30:
            raise InputError("rgg size exponent must be in 1..30")
        g = rgg_graph(args.log_n, args.seed)
        default = f"rgg{args.log_n}.graph"
    write_metis(g, args.output or default)
    return EXIT_OK


def _nonneg_float(text):
    value = float(text)
    if math.isnan(value):
        raise argparse.ArgumentTypeError("not a number")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ngpart", description="n-level graph partitioner")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def algo(p):
        p.add_argument("--epsilon", type=_nonneg_float, default=0.03)
        p.add_argument("--preset", choices=("fast", "strong"), default="strong")
        p.add_argument("--alpha", type=_nonneg_float, help="stopping-rule factor; 'inf' disables")
        p.add_argument("--trial-factor", type=_nonneg_float, help="trial-tree factor c; 0 disables")
        p.add_argument("--attempts", type=int, help="initial partitioning attempts")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("partition", help="partition one METIS graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    algo(p)
    p.add_argument("--output", help="partition file (default: GRAPH.part.K)")
    p.add_argument("--stats", help="append the JSON stats line here instead of stdout")
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--time-limit", type=float, help="keep repeating until this many seconds")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("bench", help="run a manifest of (graph, k) pairs")
    p.add_argument("manifest")
    algo(p)
    p.add_argument("--repetitions", type=int,
                   help="runs per instance (default 10 for small graphs, 5 otherwise)")
    p.add_argument("--small-threshold", type=int, default=1 << 18,
                   help="node count up to which a graph counts as small")
    p.add_argument("--output", help="CSV destination (default stdout)")
    p.add_argument("--summary", help="write the aggregate summary as JSON")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a benchmark graph in METIS format")
    gsub = p.add_subparsers(dest="kind", required=True)
    q = gsub.add_parser("grid")
    q.add_argument("width", type=int)
    q.add_argument("height", type=int)
    q.add_argument("-o", "--output")
    q = gsub.add_parser("rgg")
    q.add_argument("log_n", type=int, metavar="X", help="2**X nodes")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
