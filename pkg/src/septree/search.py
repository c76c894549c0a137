"""Dijkstra, multi-source Dijkstra and A* over a :class:`RoadGraph`."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, runtime_checkable

import numpy as np

from . import _kernels
from .errors import ValidationError
from .graph import RoadGraph

_EMPTY_I = np.zeros((0, 1), dtype=np.int64)
_EMPTY_F = np.zeros((0, 1, 1), dtype=np.float64)
_EMPTY_T = np.zeros(1, dtype=np.float64)


@dataclass(frozen=True)
class QueryStats:
    settled_count: int = 0
    relaxed_edge_count: int = 0
    path_vertex_count: int = 0

    @property
    def efficiency(self) -> float:
        if self.settled_count == 0:
            return 0.0
        return self.path_vertex_count / self.settled_count


@dataclass(frozen=True)
class PathResult:
    cost: float
    path: list[int]
    stats: QueryStats
    settled_order: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def found(self) -> bool:
        return math.isfinite(self.cost)


@runtime_checkable
class Heuristic(Protocol):
    def __call__(self, s: int, t: int) -> float: ...


class ZeroHeuristic:
    """h = 0; A* degenerates to Dijkstra."""

    def __call__(self, s: int, t: int) -> float:
        return 0.0


class ExactHeuristic:
    """The true distance, via a Dijkstra rooted at the target.

    Keeps the most recent target's distance array, so repeated queries to
    the same target cost one search.
    """

    def __init__(self, g: RoadGraph):
        self.graph = g
        self._cache = (-1, None)

    def table(self, t: int) -> np.ndarray:
        target, dist = self._cache  # single read keeps concurrent queries consistent
        if target != t:
            dist = dijkstra_all(self.graph, t)
            self._cache = (t, dist)
        return dist

    def __call__(self, s: int, t: int) -> float:
        return float(self.table(t)[s])


class LabelHeuristic:
    """Separator-label heuristic (local tree or global lines) at a given depth.

    ``labels`` is the ``(codes, costs, valid_depth)`` triple produced by an
    index's ``label_arrays()``.
    """

    def __init__(self, labels, depth: int, name: str = "labels"):
        self.codes, self.lcosts, self.vdepth = labels
        self.depth = int(depth)
        self.name = name

    def __call__(self, s: int, t: int) -> float:
        return float(_kernels.label_pair(self.codes, self.lcosts, self.vdepth, self.depth, int(s), int(t)))

    def many(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Values for paired vertex arrays in one kernel call."""
        s = np.ascontiguousarray(s, dtype=np.int64)
        t = np.ascontiguousarray(t, dtype=np.int64)
        return _kernels.label_many(self.codes, self.lcosts, self.vdepth, self.depth, s, t)

    def __repr__(self) -> str:
        return f"LabelHeuristic({self.name}, depth={self.depth})"


def _check(g: RoadGraph, v) -> int:
    return g._check_vertex(v)


def dijkstra_all(g: RoadGraph, s: int, *, return_settled: bool = False):
    """Distance from ``s`` to every vertex (inf where unreachable)."""
    s = _check(g, s)
    dist, settled = _kernels.multi_source_dijkstra(
        g.indptr, g.indices, g.costs, np.array([s], dtype=np.int64),
        np.ones(g.vertex_count, dtype=np.bool_), np.zeros(1, dtype=np.bool_), 0,
    )
    return (dist, int(settled)) if return_settled else dist


def multi_source_dijkstra(g: RoadGraph, sources: Iterable[int], allowed: np.ndarray | None = None,
                          targets: np.ndarray | None = None) -> np.ndarray:
    """Distance from each vertex to the nearest source.

    ``allowed`` restricts the search to an induced subgraph.  ``targets``
    (boolean mask) lets the search stop once all flagged vertices are
    settled; entries for other vertices are then unreliable.
    """
    src = np.unique(np.asarray(list(sources) if not isinstance(sources, np.ndarray) else sources, dtype=np.int64))
    if src.size == 0:
        raise ValidationError("multi-source Dijkstra needs at least one source")
    if src[0] < 0 or src[-1] >= g.vertex_count:
        raise ValidationError("source vertex out of range")
    n = g.vertex_count
    if allowed is None:
        allowed = np.ones(n, dtype=np.bool_)
    if targets is None:
        targets, n_targets = np.zeros(1, dtype=np.bool_), 0
    else:
        targets = np.asarray(targets, dtype=np.bool_)
        reachable_targets = targets & allowed
        n_targets = int(reachable_targets.sum())
        if n_targets == 0:
            return np.full(n, np.inf)
        targets = reachable_targets
    dist, _ = _kernels.multi_source_dijkstra(g.indptr, g.indices, g.costs, src, allowed, targets, n_targets)
    return dist


def shortest_distance(g: RoadGraph, s: int, t: int) -> float:
    """Single-pair distance via Dijkstra with early exit at ``t``."""
    s, t = _check(g, s), _check(g, t)
    mask = np.zeros(g.vertex_count, dtype=np.bool_)
    mask[t] = True
    dist, _ = _kernels.multi_source_dijkstra(
        g.indptr, g.indices, g.costs, np.array([s], dtype=np.int64),
        np.ones(g.vertex_count, dtype=np.bool_), mask, 1,
    )
    return float(dist[t])


def _result(cost, path, settled, relaxed, order) -> PathResult:
    path = [int(v) for v in path]
    return PathResult(float(cost), path, QueryStats(int(settled), int(relaxed), len(path)), order)


def astar(g: RoadGraph, s: int, t: int, h: Heuristic | Callable[[int, int], float] | None = None) -> PathResult:
    """Fastest path from ``s`` to ``t`` guided by heuristic ``h``.

    Remains optimal for admissible but inconsistent heuristics: a closed
    vertex whose distance improves is pushed again.  ``stats.settled_count``
    counts distinct vertices.  An unreachable target gives ``cost = inf``
    and an empty path.
    """
    s, t = _check(g, s), _check(g, t)
    if h is None or isinstance(h, ZeroHeuristic):
        out = _kernels.astar(g.indptr, g.indices, g.costs, s, t, _kernels.HEUR_ZERO,
                             _EMPTY_T, _EMPTY_I, _EMPTY_F, _EMPTY_I, 0)
    elif isinstance(h, ExactHeuristic) and h.graph is g:
        out = _kernels.astar(g.indptr, g.indices, g.costs, s, t, _kernels.HEUR_TABLE,
                             h.table(t), _EMPTY_I, _EMPTY_F, _EMPTY_I, 0)
    elif isinstance(h, LabelHeuristic):
        if h.codes.shape[1] != g.vertex_count:
            raise ValidationError("heuristic labels do not match the graph size")
        out = _kernels.astar(g.indptr, g.indices, g.costs, s, t, _kernels.HEUR_LABELS,
                             _EMPTY_T, h.codes, h.lcosts, h.vdepth, h.depth)
    else:
        return astar_generic(g, s, t, h)
    return _result(*out)


def astar_generic(g: RoadGraph, s: int, t: int, h: Callable[[int, int], float]) -> PathResult:
    """Pure-Python A* for arbitrary heuristic callables.

    Same ordering and re-opening rules as the kernel, so on the built-in
    heuristics it reproduces the kernel's statistics exactly.
    """
    s, t = _check(g, s), _check(g, t)
    indptr = g.indptr.tolist()
    indices = g.indices.tolist()
    costs = g.costs.tolist()
    gdist = {s: 0.0}
    hcache: dict[int, float] = {}
    parent = {s: -1}
    closed: set[int] = set()
    order: list[int] = []
    relaxed = 0
    seq = 0
    heap = [(0.0, -0.0, 0, s)]
    while heap:
        _, neg_g, _, v = heapq.heappop(heap)
        if -neg_g > gdist[v]:
            continue
        if v not in closed:
            closed.add(v)
            order.append(v)
        if v == t:
            path = [t]
            while path[-1] != s:
                path.append(parent[path[-1]])
            path.reverse()
            return _result(gdist[t], path, len(order), relaxed, np.array(order, dtype=np.int64))
        gv = gdist[v]
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            relaxed += 1
            ng = gv + costs[j]
            if ng < gdist.get(w, math.inf):
                gdist[w] = ng
                parent[w] = v
                hw = hcache.get(w)
                if hw is None:
                    hw = float(h(w, t))
                    hcache[w] = hw
                seq += 1
                heapq.heappush(heap, (ng + hw, -ng, seq, w))
    return _result(math.inf, [], len(order), relaxed, np.array(order, dtype=np.int64))
