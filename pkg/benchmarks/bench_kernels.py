"""Compiled vs interpreted kernels on one synthetic map.

    python3 benchmarks/bench_kernels.py --rows 60 --cols 60 --k 6 --queries 50

Times Dijkstra, LSH preprocessing, label evaluation and A* under both
backends, checks that the results agree, and prints a small table.  The
first compiled call per kernel is excluded (warm-up).
"""
import argparse
import time

import numpy as np

import septree
from septree import astar, build_lsh_index, dijkstra_all, generate_synthetic


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(rows, cols, k, queries, repeat, seed):
    g = generate_synthetic(rows, cols, drop_prob=0.1, seed=seed)
    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, g.vertex_count, size=(queries, 2))
    cases = {
        "dijkstra (1 source)": lambda: dijkstra_all(g, 0),
        f"lsh build k={k}": lambda: build_lsh_index(g, k),
    }
    results = {}
    for numba_on in (True, False):
        with septree.use_numba(numba_on):
            idx = build_lsh_index(g, k)  # also warms the compiled kernels
            h = idx.heuristic()
            local = dict(cases)
            local[f"label eval x{queries * 100}"] = lambda: h.many(np.tile(pairs[:, 0], 100), np.tile(pairs[:, 1], 100))
            local[f"A* lsh x{queries}"] = lambda: [astar(g, s, t, h).cost for s, t in pairs.tolist()]
            local[f"A* h=0 x{queries}"] = lambda: [astar(g, s, t).cost for s, t in pairs.tolist()]
            for name, fn in local.items():
                fn()
                results.setdefault(name, {})[numba_on] = _time(fn, repeat)

    print(f"map {rows}x{cols}: {g.vertex_count} vertices, {g.edge_count} edges, best of {repeat}")
    print(f"{'case':<24}{'numba s':>12}{'python s':>12}{'speedup':>10}  agree")
    for name, r in results.items():
        (tj, oj), (tp, op) = r[True], r[False]
        agree = _same(oj, op)
        print(f"{name:<24}{tj:>12.4f}{tp:>12.4f}{tp / tj:>10.1f}  {agree}")


def _same(a, b):
    if isinstance(a, septree.LshIndex):
        return a == b
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rows", type=int, default=60)
    p.add_argument("--cols", type=int, default=60)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--queries", type=int, default=50)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    run(a.rows, a.cols, a.k, a.queries, a.repeat, a.seed)


if __name__ == "__main__":
    main()
