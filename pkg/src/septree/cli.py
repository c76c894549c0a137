"""``septree`` command line: generate, preprocess, query, bench, inspect.

Exit codes: 0 success, 1 invalid input, 2 I/O or unreadable files,
3 ``--verify`` mismatch.  Vertex ids on the command line are 0-based.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .bench import BenchConfig, DistanceBin, run_benchmark
from .errors import IndexFormatError, SeptreeError, ValidationError
from .graph import DEFAULT_SPEEDS, generate_synthetic, load_dimacs_files, write_dimacs
from .index import GshIndex, LshIndex, build_gsh_index, build_lsh_index
from .index_io import dump_json, load_index, save_index
from .search import ZeroHeuristic, astar, dijkstra_all

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse's own code 2 would read as an I/O failure
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("SEPTREE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"SEPTREE_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _depths(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                a, b = part.split("-", 1)
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad depth list {text!r}") from None
    return out


def _bins(text: str) -> list[DistanceBin]:
    bins = []
    for part in text.split(","):
        if not part.strip():
            continue
        try:
            lo, hi = part.split(":")
            bins.append(DistanceBin(float(lo), float(hi)))
        except (ValueError, ValidationError):
            raise argparse.ArgumentTypeError(f"bins must look like 'lo:hi,lo:hi' in meters, got {text!r}") from None
    return bins


def _load_map(args):
    scale = args.coord_scale
    if scale is None:
        scale = 1e-6 if args.geographic else 1.0
    return load_dimacs_files(args.map, coord_scale=scale, geographic=args.geographic)


def cmd_generate(args) -> int:
    g = generate_synthetic(args.rows, args.cols, args.cell_size, args.speeds, args.drop_prob, args.seed)
    comment = f"septree synthetic rows={args.rows} cols={args.cols} seed={args.seed}"
    write_dimacs(g, f"{args.output}.gr", f"{args.output}.co", comment=comment)
    print(f"vertices {g.vertex_count}")
    print(f"edges {g.edge_count}")
    print(f"wrote {args.output}.gr {args.output}.co")
    return EXIT_OK


def cmd_preprocess(args) -> int:
    g = _load_map(args)
    t0 = time.perf_counter()
    if args.kind == "lsh":
        index = build_lsh_index(g, args.k, subgraph_costs=args.subgraph_costs, threads=_threads(args))
    else:
        if args.subgraph_costs:
            raise ValidationError("--subgraph-costs applies to --kind lsh only")
        index = build_gsh_index(g, args.k, threads=_threads(args))
    elapsed = time.perf_counter() - t0
    save_index(index, args.output)
    if args.json:
        dump_json(index, args.json)
    print(f"kind {args.kind}")
    print(f"vertices {g.vertex_count} edges {g.edge_count} k {args.k}")
    if args.kind == "lsh":
        for axis, levels in index.build_stats.axis_levels.items():
            for i, lv in enumerate(levels, 1):
                print(f"{axis} level {i}: nodes {lv.nodes} separators {lv.nonempty_separators} "
                      f"separator_vertices {lv.separator_vertices}")
    else:
        lv = index.build_stats.axis_levels["GLOBAL"][0]
        print(f"separators {lv.nodes} nonempty {lv.nonempty_separators} separator_vertices {lv.separator_vertices}")
    print(f"dijkstra_runs {index.build_stats.dijkstra_calls}")
    print(f"build_seconds {elapsed:.3f}")
    print(f"wrote {args.output} ({os.path.getsize(args.output)} bytes)")
    return EXIT_OK


def cmd_query(args) -> int:
    g = _load_map(args)
    if args.heuristic == "dijkstra":
        h = ZeroHeuristic()
    else:
        if not args.index:
            raise ValidationError(f"--heuristic {args.heuristic} needs --index")
        index = load_index(args.index)
        index.check(g)
        if args.heuristic == "lsh":
            if not isinstance(index, LshIndex):
                raise ValidationError("index is not an LSH index")
            h = index.heuristic(args.d)
        else:
            if not isinstance(index, GshIndex):
                raise ValidationError("index is not a GSH index")
            h = index.heuristic()
    res = astar(g, args.s, args.t, h)
    hval = h(args.s, args.t)
    if not res.found:
        print("no path")
        return EXIT_OK
    if args.verify:
        ref = dijkstra_all(g, args.s)[args.t]
        if ref != res.cost:
            print(f"verification failed: A* cost {res.cost!r} != Dijkstra cost {ref!r}", file=sys.stderr)
            return EXIT_VERIFY
    qual = hval / res.cost if res.cost > 0 else 1.0
    print(f"cost {res.cost!r}")
    print(f"path_vertices {res.stats.path_vertex_count}")
    print(f"settled {res.stats.settled_count}")
    print(f"relaxed_edges {res.stats.relaxed_edge_count}")
    print(f"heuristic {hval!r}")
    print(f"qual {qual:.6f}")
    print(f"eff {res.stats.efficiency:.6f}")
    if args.verify:
        print("verified")
    if args.dump_traversal:
        with open(args.dump_traversal, "w") as f:
            f.write("\n".join(str(v) for v in res.settled_order.tolist()))
            f.write("\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    g = _load_map(args)
    cfg = BenchConfig(
        bins=args.bins or None,
        heuristics=tuple(args.heuristics.split(",")),
        depths=args.depths,
        pairs_per_bin=args.pairs,
        subgraph_costs=args.subgraph_costs,
        threads=_threads(args),
        raw=args.raw,
    )
    report = run_benchmark(g, cfg, seed=args.seed)
    text = report.to_csv(args.csv)
    if args.json:
        report.to_json(args.json, raw=args.raw)
    if not args.csv:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.csv} ({len(report.rows)} rows)")
    return EXIT_OK


def cmd_inspect(args) -> int:
    index = load_index(args.index)
    fp = index.fingerprint
    b = index.bbox
    print(f"kind {index.kind}")
    print(f"vertices {fp.vertex_count} edges {fp.edge_count} cost_checksum {fp.cost_checksum!r}")
    print(f"bbox x [{b.x_min!r}, {b.x_max!r}] y [{b.y_min!r}, {b.y_max!r}]")
    if isinstance(index, LshIndex):
        print(f"depth {index.depth} subgraph_costs {index.subgraph_costs}")
        for lab in (index.x_labels, index.y_labels):
            finite = np.isfinite(lab.costs)
            for i in range(lab.depth):
                col = lab.costs[:, i][finite[:, i]]
                mean = float(col.mean()) if col.size else math.nan
                print(f"{lab.axis.name} level {i + 1}: finite {int(finite[:, i].sum())}/{lab.costs.shape[0]} "
                      f"mean_cost {mean:.3f}")
    else:
        print(f"k {index.k} separators {2 * index.k}")
        for j, line in enumerate(index.lines):
            col = index.costs[:, j]
            print(f"{line.axis.name} line {line.position!r}: finite {int(np.isfinite(col).sum())}/{col.size}")
    if args.json:
        dump_json(index, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="septree", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def map_args(sp):
        sp.add_argument("--map", required=True, help="DIMACS stem: reads STEM.gr and STEM.co")
        sp.add_argument("--coord-scale", type=float, default=None,
                        help="multiplier for raw .co values (default 1, or 1e-6 with --geographic)")
        sp.add_argument("--geographic", action="store_true",
                        help="coordinates are lon/lat degrees after scaling; project to meters")

    sp = sub.add_parser("generate", help="write a synthetic grid map as DIMACS files")
    sp.add_argument("--rows", type=int, required=True)
    sp.add_argument("--cols", type=int, required=True)
    sp.add_argument("--cell-size", type=float, default=100.0, help="meters between grid vertices")
    sp.add_argument("--speeds", type=_float_list, default=list(DEFAULT_SPEEDS), help="speed classes, m/s")
    sp.add_argument("--drop-prob", type=float, default=0.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", required=True, help="output stem")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("preprocess", help="build and save an LSH or GSH index")
    map_args(sp)
    sp.add_argument("--k", type=int, required=True, help="tree depth (lsh) or lines per axis (gsh)")
    sp.add_argument("--kind", choices=("lsh", "gsh"), default="lsh")
    sp.add_argument("--subgraph-costs", action="store_true",
                    help="cut and measure inside each tree node's strip only (may overestimate)")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--json", default=None, help="also write a JSON debug export")
    sp.set_defaults(func=cmd_preprocess)

    sp = sub.add_parser("query", help="run one A* query")
    map_args(sp)
    sp.add_argument("--index", default=None)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--d", type=int, default=None, help="LSH depth to use (default: index depth)")
    sp.add_argument("--heuristic", choices=("dijkstra", "gsh", "lsh"), default="lsh")
    sp.add_argument("--verify", action="store_true", help="check the cost against plain Dijkstra")
    sp.add_argument("--dump-traversal", default=None, help="write settled vertex ids, one per line")
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("bench", help="quality/efficiency/separation report")
    map_args(sp)
    sp.add_argument("--bins", type=_bins, default=None, help="'lo:hi,...' in meters (default 1-5,5-10,... km)")
    sp.add_argument("--pairs", type=int, default=3000, help="pairs per bin")
    sp.add_argument("--depths", type=_depths, default=list(range(1, 10)), help="e.g. '1-9' or '3,5,7'")
    sp.add_argument("--heuristics", default="lsh,gsh", help="comma list of lsh,gsh,dijkstra,exact")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--subgraph-costs", action="store_true")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--csv", default=None, help="CSV output path (default: stdout)")
    sp.add_argument("--json", default=None, help="JSON output path")
    sp.add_argument("--raw", action="store_true", help="include per-pair arrays in the JSON")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("inspect", help="print an index header and per-level statistics")
    sp.add_argument("index")
    sp.add_argument("--json", default=None, help="write the JSON debug export")
    sp.set_defaults(func=cmd_inspect)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, IndexFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (SeptreeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
