"""Distance-binned heuristic benchmarks: quality, A* efficiency and separation rates.

Pairs are drawn per distance bin: a uniform point in the bounding box
snapped to its nearest vertex, then a uniform-by-area point in the annulus
around it, snapped likewise and re-checked against the bin.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .errors import ValidationError
from .graph import RoadGraph, bounding_box, component_labels
from .index import LshIndex, build_gsh_index, build_lsh_index
from .search import ExactHeuristic, LabelHeuristic, ZeroHeuristic, astar, shortest_distance

CSV_COLUMNS = [
    "bin_lo_m", "bin_hi_m", "heuristic", "depth", "pairs",
    "mean_qual", "mean_eff", "p_separated", "p_determined", "dropped_pairs",
]
DEFAULT_BINS_KM = [(1, 5), (5, 10), (10, 20), (20, 50), (50, 100)]
HEURISTICS = ("lsh", "gsh", "dijkstra", "exact")


@dataclass(frozen=True)
class DistanceBin:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0 <= self.lo < self.hi and math.isfinite(self.hi)):
            raise ValidationError(f"invalid distance bin [{self.lo}, {self.hi}]")

    @property
    def snap_radius(self) -> float:
        return min(500.0, self.lo / 2)

    def annulus_mean(self) -> float:
        lo, hi = self.lo, self.hi
        return 2.0 / 3.0 * (hi**3 - lo**3) / (hi**2 - lo**2)


def default_bins(g: RoadGraph) -> list[DistanceBin]:
    diag = bounding_box(g).diagonal
    return [DistanceBin(lo * 1000.0, min(hi * 1000.0, diag)) for lo, hi in DEFAULT_BINS_KM if lo * 1000.0 < diag]


@dataclass
class PairSample:
    pairs: np.ndarray  # (m, 2) int64
    draws: int
    dropped_unreachable: int
    exhausted: bool

    def __len__(self) -> int:
        return int(self.pairs.shape[0])

    def __iter__(self):
        return iter(map(tuple, self.pairs.tolist()))


class _Snapper:
    def __init__(self, g: RoadGraph):
        self.xy = np.column_stack([g.x, g.y])
        self.tree = cKDTree(self.xy)

    def snap(self, p, radius):
        d, i = self.tree.query(p)
        return int(i) if d <= radius else -1


def sample_pairs(g: RoadGraph, bin: DistanceBin, count: int, seed: int = 0,
                 snapper: _Snapper | None = None, labels: np.ndarray | None = None) -> PairSample:
    """Up to ``count`` vertex pairs whose straight-line distance lies in ``bin``.

    Deterministic in ``seed``.  Gives up after ``1000 * count`` attempts and
    returns what it has, with ``exhausted`` set and a warning.  Pairs in
    different connected components are dropped and counted.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    box = bounding_box(g)
    if bin.lo >= box.diagonal:
        raise ValidationError(f"bin [{bin.lo}, {bin.hi}] lies outside the map (diagonal {box.diagonal:.1f} m)")
    snapper = snapper or _Snapper(g)
    if labels is None:
        labels = component_labels(g)[1]
    rng = np.random.default_rng(seed)
    radius = bin.snap_radius
    lo2, hi2 = bin.lo**2, bin.hi**2
    pairs = []
    dropped = 0
    draws = 0
    budget = 1000 * count
    while len(pairs) < count and draws < budget:
        draws += 1
        p = (rng.uniform(box.x_min, box.x_max), rng.uniform(box.y_min, box.y_max))
        r = math.sqrt(rng.uniform(lo2, hi2))
        theta = rng.uniform(0.0, 2.0 * math.pi)
        s = snapper.snap(p, radius)
        if s < 0:
            continue
        sx, sy = snapper.xy[s]
        t = snapper.snap((sx + r * math.cos(theta), sy + r * math.sin(theta)), radius)
        if t < 0 or t == s:
            continue
        dist = math.hypot(snapper.xy[t, 0] - sx, snapper.xy[t, 1] - sy)
        if not bin.lo <= dist <= bin.hi:
            continue
        if labels[s] != labels[t]:
            dropped += 1
            continue
        pairs.append((s, t))
    exhausted = len(pairs) < count
    if exhausted:
        warnings.warn(f"bin [{bin.lo}, {bin.hi}]: only {len(pairs)} of {count} pairs after {draws} draws")
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return PairSample(arr, draws, dropped, exhausted)


def _pairs_array(pairs) -> np.ndarray:
    if isinstance(pairs, PairSample):
        return pairs.pairs
    return np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64).reshape(-1, 2)


def true_distances(g: RoadGraph, pairs, threads: int = 1) -> np.ndarray:
    """Exact distances, searched from the target side (matching :class:`ExactHeuristic`)."""
    arr = _pairs_array(pairs)
    return np.array(_pmap(lambda st: shortest_distance(g, st[1], st[0]), arr.tolist(), threads), dtype=np.float64)


def _pmap(fn, items, threads):
    if threads <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class MetricResult:
    mean: float
    per_pair: np.ndarray
    excluded: int


def quality(g: RoadGraph, h: Callable[[int, int], float], pairs, distances: np.ndarray | None = None,
            threads: int = 1) -> MetricResult:
    """Mean of h(s,t)/c(s,t); unreachable pairs are excluded and counted."""
    arr = _pairs_array(pairs)
    if distances is None:
        distances = true_distances(g, arr, threads)
    if isinstance(h, LabelHeuristic):
        hv = h.many(arr[:, 0], arr[:, 1])
    else:
        hv = np.array([h(int(s), int(t)) for s, t in arr], dtype=np.float64)
    ok = np.isfinite(distances) & (distances > 0)
    ratio = np.full(arr.shape[0], np.nan)
    ratio[ok] = hv[ok] / distances[ok]
    mean = float(np.mean(ratio[ok])) if ok.any() else math.nan
    return MetricResult(mean, ratio, int((~ok).sum()))


def efficiency(g: RoadGraph, h, pairs, threads: int = 1) -> MetricResult:
    """Mean of path vertex count over A*-settled vertex count."""
    arr = _pairs_array(pairs)
    results = _pmap(lambda st: astar(g, st[0], st[1], h), arr.tolist(), threads)
    eff = np.array([r.stats.efficiency if r.found else math.nan for r in results])
    ok = np.isfinite(eff)
    mean = float(np.mean(eff[ok])) if ok.any() else math.nan
    return MetricResult(mean, eff, int((~ok).sum()))


def _separation_flags(labels, depth: int, arr: np.ndarray):
    codes, lcosts, vdepth = labels
    sep = np.zeros(arr.shape[0], dtype=bool)
    det = np.zeros(arr.shape[0], dtype=bool)
    for i, (s, t) in enumerate(arr.tolist()):
        h, best, axis, _ = _kernels.label_pair_detail(codes, lcosts, vdepth, depth, s, t)
        sep[i] = axis >= 0
        det[i] = axis >= 0 and best >= h
    return sep, det


def separation_report(index: LshIndex, pairs, depths: Sequence[int] | None = None, graph: RoadGraph | None = None):
    """``{d: (p_separated, p_determined)}`` over the pair set."""
    index.check(graph)
    arr = _pairs_array(pairs)
    depths = list(depths) if depths is not None else list(range(1, index.depth + 1))
    out = {}
    for d in depths:
        sep, det = _separation_flags(index.label_arrays(), d, arr)
        n = max(arr.shape[0], 1)
        out[d] = (float(sep.sum()) / n, float(det.sum()) / n)
    return out


@dataclass
class BenchConfig:
    bins: list[DistanceBin] | None = None
    heuristics: Sequence[str] = ("lsh", "gsh")
    depths: Sequence[int] = (1, 2, 3, 4, 5, 6, 7, 8, 9)
    pairs_per_bin: int = 3000
    subgraph_costs: bool = False
    threads: int = 1
    raw: bool = False

    def validate(self):
        bad = [h for h in self.heuristics if h not in HEURISTICS]
        if bad:
            raise ValidationError(f"unknown heuristic(s) {bad}; choose from {HEURISTICS}")
        if not self.heuristics:
            raise ValidationError("at least one heuristic is required")
        if any(int(d) != d or d < 1 for d in self.depths) or not self.depths:
            raise ValidationError("depths must be positive integers")
        if self.pairs_per_bin < 1:
            raise ValidationError("pairs_per_bin must be >= 1")


@dataclass
class BenchRow:
    bin_lo_m: float
    bin_hi_m: float
    heuristic: str
    depth: int
    pairs: int
    mean_qual: float
    mean_eff: float
    p_separated: float
    p_determined: float
    dropped_pairs: int
    raw: dict | None = field(default=None, repr=False)


@dataclass
class BenchReport:
    rows: list[BenchRow]
    seed: int
    vertex_count: int
    pairs: dict = field(default_factory=dict, repr=False)  # (lo, hi) -> pair array

    def row(self, heuristic: str, depth: int, bin_index: int = 0) -> BenchRow:
        los = sorted({(r.bin_lo_m, r.bin_hi_m) for r in self.rows})
        lo, hi = los[bin_index]
        for r in self.rows:
            if r.heuristic == heuristic and r.depth == depth and r.bin_lo_m == lo and r.bin_hi_m == hi:
                return r
        raise KeyError((heuristic, depth, bin_index))

    def to_csv(self, sink=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([
                repr(r.bin_lo_m), repr(r.bin_hi_m), r.heuristic, r.depth, r.pairs,
                _fmt(r.mean_qual), _fmt(r.mean_eff), _fmt(r.p_separated), _fmt(r.p_determined), r.dropped_pairs,
            ])
        text = buf.getvalue()
        _write(sink, text)
        return text

    def to_json(self, sink=None, raw: bool = True) -> str:
        rows = []
        for r in self.rows:
            d = asdict(r)
            if not raw:
                d.pop("raw")
            rows.append(d)
        text = json.dumps({"seed": self.seed, "vertex_count": self.vertex_count, "rows": rows},
                          default=_json_default, allow_nan=True)
        _write(sink, text)
        return text


def _fmt(v: float) -> str:
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o))


def _write(sink, text):
    if sink is None:
        return
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", newline="") as f:
            f.write(text)
    else:
        sink.write(text)


def run_benchmark(g: RoadGraph, config: BenchConfig, seed: int = 0, *,
                  lsh_index: LshIndex | None = None, gsh_indexes: dict | None = None) -> BenchReport:
    """Evaluate every (bin, heuristic, depth) combination on shared pair sets.

    Storage is matched: GSH at depth ``k`` uses ``2k`` lines, the same
    number of stored costs as a depth-``k`` tree on both axes.  Heuristics
    without a depth (``dijkstra``, ``exact``) get one row per bin with
    depth 0 and blank separation columns.
    """
    config.validate()
    bins = config.bins if config.bins is not None else default_bins(g)
    depths = sorted(set(int(d) for d in config.depths))
    max_d = depths[-1]
    threads = max(1, int(config.threads))

    if "lsh" in config.heuristics:
        if lsh_index is None or lsh_index.depth < max_d or lsh_index.subgraph_costs != config.subgraph_costs:
            lsh_index = build_lsh_index(g, max_d, subgraph_costs=config.subgraph_costs, threads=threads)
        lsh_index.check(g)
    gsh_indexes = dict(gsh_indexes or {})
    if "gsh" in config.heuristics:
        for d in depths:
            if d not in gsh_indexes:
                gsh_indexes[d] = build_gsh_index(g, d, threads=threads)
            gsh_indexes[d].check(g)

    snapper = _Snapper(g)
    labels = component_labels(g)[1]
    seeds = np.random.SeedSequence(seed).spawn(len(bins))
    rows: list[BenchRow] = []
    report_pairs = {}
    for b, ss in zip(bins, seeds):
        sample = sample_pairs(g, b, config.pairs_per_bin, int(ss.generate_state(1)[0]), snapper, labels)
        arr = sample.pairs
        report_pairs[(b.lo, b.hi)] = arr
        dist = true_distances(g, arr, threads)

        def add_row(name, depth, h, sep=None):
            q = quality(g, h, arr, dist)
            e = efficiency(g, h, arr, threads)
            p_sep = p_det = math.nan
            if sep is not None and arr.shape[0]:
                separated, determined = _separation_flags(sep[0], sep[1], arr)
                p_sep, p_det = float(separated.mean()), float(determined.mean())
            raw = None
            if config.raw:
                raw = {"pairs": arr, "distance": dist, "qual": q.per_pair, "eff": e.per_pair}
            rows.append(BenchRow(b.lo, b.hi, name, depth, int(arr.shape[0]), q.mean, e.mean,
                                 p_sep, p_det, sample.dropped_unreachable, raw))

        for name in config.heuristics:
            if name == "lsh":
                for d in depths:
                    add_row("lsh", d, lsh_index.heuristic(d), (lsh_index.label_arrays(), d))
            elif name == "gsh":
                for d in depths:
                    gi = gsh_indexes[d]
                    add_row("gsh", d, gi.heuristic(), (gi.label_arrays(), 1))
            elif name == "dijkstra":
                add_row("dijkstra", 0, ZeroHeuristic())
            elif name == "exact":
                add_row("exact", 0, ExactHeuristic(g))
    return BenchReport(rows, seed, g.vertex_count, report_pairs)
