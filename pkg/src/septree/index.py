"""Separator-tree (local) and flat-line (global) separator heuristics.

Preprocessing recursively halves the x extent (and, independently, the y
extent) of the map.  Every tree node owns a strip of the plane; its midline
defines a separator, every vertex in the strip records which side of the
midline it lies on (one code bit) and its travel time to the separator (one
cost).  At query time two vertices share code bits down to the level where
their strips split; each shared level gives a triangle-inequality bound and
the splitting level gives the stronger "must cross the separator" bound.

By default a node's separator is taken from *all* edges the infinite
midline crosses and costs are full-graph distances, which keeps the bound
admissible even when edges reach outside the strip.  ``subgraph_costs=True``
restricts both the cut and the distances to the strip's vertices, exactly
as the recursion is usually written; that variant can overestimate.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import StaleIndexError, ValidationError
from .graph import BoundingBox, GraphFingerprint, RoadGraph, bounding_box, is_connected
from .search import LabelHeuristic, multi_source_dijkstra
from .separator import Axis, AxisLine, build_cut

MAX_DEPTH = 24


@dataclass
class LevelStats:
    nodes: int = 0
    nonempty_separators: int = 0
    separator_vertices: int = 0
    dijkstra_calls: int = 0


@dataclass
class BuildStats:
    axis_levels: dict = field(default_factory=dict)  # axis name -> list[LevelStats]

    @property
    def dijkstra_calls(self) -> int:
        return sum(l.dijkstra_calls for levels in self.axis_levels.values() for l in levels)

    def tree_nodes(self, axis: str) -> int:
        return sum(l.nodes for l in self.axis_levels[axis])


@dataclass(eq=False)
class AxisLabels:
    """Per-vertex code bits and separator costs for one axis.

    ``codes[v]`` holds the level-``i`` side in bit ``i`` (level 1 is bit 0);
    ``costs[v, i]`` is the travel time to that level's separator, inf when
    the separator was empty or unreachable.
    """

    axis: Axis
    depth: int
    codes: np.ndarray
    costs: np.ndarray
    valid_depth: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, AxisLabels):
            return NotImplemented
        return (
            self.axis == other.axis
            and self.depth == other.depth
            and np.array_equal(self.codes, other.codes)
            and np.array_equal(self.costs, other.costs)
            and np.array_equal(self.valid_depth, other.valid_depth)
        )

    def code_bits(self, v: int) -> str:
        """Code of ``v`` as a string, level 1 first."""
        c = int(self.codes[v])
        return "".join(str((c >> i) & 1) for i in range(self.depth))


class _CheckedIndex:
    fingerprint: GraphFingerprint

    def check(self, g: RoadGraph | None) -> None:
        if g is not None and g.fingerprint() != self.fingerprint:
            raise StaleIndexError(
                f"index was built for a graph with fingerprint {self.fingerprint}, got {g.fingerprint()}"
            )

    def _check_vertex(self, v) -> int:
        iv = int(v)
        if iv != v or not 0 <= iv < self.fingerprint.vertex_count:
            raise ValidationError(f"invalid vertex id {v!r}")
        return iv


@dataclass(eq=False)
class LshIndex(_CheckedIndex):
    x_labels: AxisLabels
    y_labels: AxisLabels
    depth: int
    bbox: BoundingBox
    fingerprint: GraphFingerprint
    subgraph_costs: bool = False
    build_stats: BuildStats | None = field(default=None, repr=False)
    _arrays: tuple | None = field(default=None, repr=False)

    kind = "lsh"

    def __eq__(self, other):
        if not isinstance(other, LshIndex):
            return NotImplemented
        return (
            self.depth == other.depth
            and self.bbox == other.bbox
            and self.fingerprint == other.fingerprint
            and self.subgraph_costs == other.subgraph_costs
            and self.x_labels == other.x_labels
            and self.y_labels == other.y_labels
        )

    def label_arrays(self):
        if self._arrays is None:
            self._arrays = (
                np.ascontiguousarray(np.stack([self.x_labels.codes, self.y_labels.codes]).astype(np.int64)),
                np.ascontiguousarray(np.stack([self.x_labels.costs, self.y_labels.costs])),
                np.ascontiguousarray(np.stack([self.x_labels.valid_depth, self.y_labels.valid_depth]).astype(np.int64)),
            )
        return self._arrays

    def heuristic(self, d: int | None = None, graph: RoadGraph | None = None) -> LabelHeuristic:
        self.check(graph)
        d = self.depth if d is None else _check_depth(d, self.depth)
        return LabelHeuristic(self.label_arrays(), d, name="lsh")

    def labels(self, axis) -> AxisLabels:
        return self.x_labels if Axis(axis) == Axis.X else self.y_labels


@dataclass(eq=False)
class GshIndex(_CheckedIndex):
    """``k`` vertical and ``k`` horizontal separators at equal spacing.

    ``sides[v]`` has bit ``j`` set when ``v`` lies right of vertical line
    ``j`` and bit ``k + j`` when it lies above horizontal line ``j``;
    ``costs[v]`` lists the matching ``2k`` separator distances.
    """

    k: int
    x_positions: np.ndarray
    y_positions: np.ndarray
    sides: np.ndarray
    costs: np.ndarray
    bbox: BoundingBox
    fingerprint: GraphFingerprint
    build_stats: BuildStats | None = field(default=None, repr=False)
    _arrays: tuple | None = field(default=None, repr=False)

    kind = "gsh"

    def __eq__(self, other):
        if not isinstance(other, GshIndex):
            return NotImplemented
        return (
            self.k == other.k
            and self.bbox == other.bbox
            and self.fingerprint == other.fingerprint
            and np.array_equal(self.x_positions, other.x_positions)
            and np.array_equal(self.y_positions, other.y_positions)
            and np.array_equal(self.sides, other.sides)
            and np.array_equal(self.costs, other.costs)
        )

    @property
    def lines(self) -> list[AxisLine]:
        return [AxisLine(Axis.X, float(p)) for p in self.x_positions] + [
            AxisLine(Axis.Y, float(p)) for p in self.y_positions
        ]

    def label_arrays(self):
        # each separator becomes a one-level label axis
        if self._arrays is None:
            n_sep = 2 * self.k
            bits = np.arange(n_sep, dtype=np.int64)
            codes = (self.sides[None, :].astype(np.int64) >> bits[:, None]) & 1
            self._arrays = (
                np.ascontiguousarray(codes),
                np.ascontiguousarray(self.costs.T[:, :, None]),
                np.ones((n_sep, self.sides.shape[0]), dtype=np.int64),
            )
        return self._arrays

    def heuristic(self, graph: RoadGraph | None = None) -> LabelHeuristic:
        self.check(graph)
        return LabelHeuristic(self.label_arrays(), 1, name="gsh")


def _check_depth(d, k) -> int:
    if int(d) != d or not 1 <= d <= k:
        raise ValidationError(f"depth must be an integer in [1, {k}], got {d!r}")
    return int(d)


def _validate_build(g: RoadGraph, k, max_k=MAX_DEPTH) -> int:
    if int(k) != k or not 1 <= k <= max_k:
        raise ValidationError(f"k must be an integer in [1, {max_k}], got {k!r}")
    if not is_connected(g):
        raise ValidationError("graph must be connected (use largest_connected_component)")
    return int(k)


def _map(fn, jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def build_axis_labels(g: RoadGraph, axis, k: int, *, subgraph_costs: bool = False,
                      threads: int = 1, stats: list | None = None) -> AxisLabels:
    """Codes and separator costs for one axis, tree depth ``k``.

    Nodes are processed breadth first; each level's separator searches are
    independent and may run on ``threads`` workers without affecting the
    result.  If ``stats`` is a list it receives one :class:`LevelStats` per
    level.
    """
    k = _validate_build(g, k)
    axis = Axis(axis)
    n = g.vertex_count
    coord = g.coords(axis)
    codes = np.zeros(n, dtype=np.int64)
    costs = np.full((n, k), np.inf)
    valid_depth = np.zeros(n, dtype=np.int64)
    everywhere = np.ones(n, dtype=np.bool_)

    nodes = [(np.arange(n, dtype=np.int64), float(coord.min()), float(coord.max()))]
    for level in range(k):
        level_stats = LevelStats()
        jobs = []
        children = []
        for scope, lo, hi in nodes:
            if scope.size == 0:
                continue
            level_stats.nodes += 1
            mid = (lo + hi) / 2
            cut = build_cut(g, AxisLine(axis, mid), scope, clip_to_scope=subgraph_costs)
            right = coord[scope] > mid
            codes[scope[right]] |= np.int64(1) << level
            valid_depth[scope] = level + 1
            if cut.separator.size:
                level_stats.nonempty_separators += 1
                level_stats.separator_vertices += int(cut.separator.size)
                jobs.append((scope, cut.separator))
            children.append((scope[~right], lo, mid))
            children.append((scope[right], mid, hi))

        def solve(job):
            scope, sep = job
            mask = np.zeros(n, dtype=np.bool_)
            mask[scope] = True
            allowed = mask if subgraph_costs else everywhere
            return multi_source_dijkstra(g, sep, allowed=allowed, targets=mask)[scope]

        for (scope, _), dist in zip(jobs, _map(solve, jobs, threads)):
            costs[scope, level] = dist
        level_stats.dijkstra_calls = len(jobs)
        if stats is not None:
            stats.append(level_stats)
        nodes = children
    return AxisLabels(axis, k, codes, costs, valid_depth)


def build_lsh_index(g: RoadGraph, k: int, *, subgraph_costs: bool = False, threads: int = 1) -> LshIndex:
    """Both axis trees plus the metadata needed to validate later use."""
    k = _validate_build(g, k)
    stats = BuildStats()
    labels = []
    for axis in (Axis.X, Axis.Y):
        levels: list = []
        labels.append(build_axis_labels(g, axis, k, subgraph_costs=subgraph_costs, threads=threads, stats=levels))
        stats.axis_levels[axis.name] = levels
    return LshIndex(labels[0], labels[1], k, bounding_box(g), g.fingerprint(), subgraph_costs, stats)


def gsh_positions(lo: float, hi: float, k: int) -> np.ndarray:
    # (lo*(k+1-j) + hi*j)/(k+1) so that k=1 reproduces (lo+hi)/2 bit for bit
    j = np.arange(1, k + 1, dtype=np.float64)
    return (lo * (k + 1 - j) + hi * j) / (k + 1)


def build_gsh_index(g: RoadGraph, k: int, *, threads: int = 1) -> GshIndex:
    """``k`` equally spaced separators per axis, costs from full-graph searches."""
    k = _validate_build(g, k)
    bbox = bounding_box(g)
    xs = gsh_positions(bbox.x_min, bbox.x_max, k)
    ys = gsh_positions(bbox.y_min, bbox.y_max, k)
    lines = [AxisLine(Axis.X, float(p)) for p in xs] + [AxisLine(Axis.Y, float(p)) for p in ys]
    n = g.vertex_count
    sides = np.zeros(n, dtype=np.int64)
    costs = np.full((n, 2 * k), np.inf)
    level = LevelStats(nodes=2 * k)
    jobs = []
    for j, line in enumerate(lines):
        sides |= line.side(g).astype(np.int64) << j
        cut = build_cut(g, line)
        if cut.separator.size:
            level.nonempty_separators += 1
            level.separator_vertices += int(cut.separator.size)
            jobs.append((j, cut.separator))
    dists = _map(lambda job: multi_source_dijkstra(g, job[1]), jobs, threads)
    for (j, _), dist in zip(jobs, dists):
        costs[:, j] = dist
    level.dijkstra_calls = len(jobs)
    stats = BuildStats({"GLOBAL": [level]})
    return GshIndex(k, xs, ys, sides, costs, bbox, g.fingerprint(), stats)


def lsh_evaluate(index: LshIndex, s: int, t: int, d: int | None = None, graph: RoadGraph | None = None) -> float:
    """Heuristic bound on the s-t travel time using the top ``d`` tree levels."""
    index.check(graph)
    s, t = index._check_vertex(s), index._check_vertex(t)
    d = index.depth if d is None else _check_depth(d, index.depth)
    codes, lcosts, vdepth = index.label_arrays()
    return float(_kernels.label_pair(codes, lcosts, vdepth, d, s, t))


def gsh_evaluate(index: GshIndex, s: int, t: int, graph: RoadGraph | None = None) -> float:
    index.check(graph)
    s, t = index._check_vertex(s), index._check_vertex(t)
    codes, lcosts, vdepth = index.label_arrays()
    return float(_kernels.label_pair(codes, lcosts, vdepth, 1, s, t))


class Separation(NamedTuple):
    separated: bool
    axis: Axis | None
    level: int | None  # 1-based
    separator_determined: bool


def separation_diagnostics(index: LshIndex, s: int, t: int, d: int | None = None,
                           graph: RoadGraph | None = None) -> Separation:
    """Whether a tree separator splits ``s`` and ``t`` and whether it sets the final value.

    When both axes separate, the shallower level is reported (x on ties).
    The value counts as separator-determined when the largest separated
    bound equals the overall maximum.
    """
    index.check(graph)
    s, t = index._check_vertex(s), index._check_vertex(t)
    d = index.depth if d is None else _check_depth(d, index.depth)
    codes, lcosts, vdepth = index.label_arrays()
    h, best_sep, axis, level = _kernels.label_pair_detail(codes, lcosts, vdepth, d, s, t)
    if axis < 0:
        return Separation(False, None, None, False)
    return Separation(True, Axis(int(axis)), int(level) + 1, bool(best_sep >= h))


def common_prefix_levels(index: LshIndex, axis, s: int, t: int, d: int | None = None) -> int:
    """Number of levels scanned on one axis: shared prefix plus the splitting level, capped."""
    lab = index.labels(axis)
    d = index.depth if d is None else d
    cap = int(min(d, lab.valid_depth[s], lab.valid_depth[t]))
    diff = int(lab.codes[s]) ^ int(lab.codes[t])
    if diff == 0:
        return cap
    first = (diff & -diff).bit_length() - 1
    return min(first + 1, cap)


__all__ = [
    "AxisLabels", "LshIndex", "GshIndex", "BuildStats", "LevelStats", "Separation",
    "build_axis_labels", "build_lsh_index", "build_gsh_index", "gsh_positions",
    "lsh_evaluate", "gsh_evaluate", "separation_diagnostics", "common_prefix_levels",
    "MAX_DEPTH",
]
