"""Hot loops: Dijkstra, A* and separator-label evaluation.

Every function here takes only numpy arrays and scalars so the same source
runs under numba or plain CPython (see :mod:`septree._accel`).  Heaps are
``heapq`` lists of tuples, which numba supports natively.

Separator labels are stored as ``codes[a, v]`` (int64 bit field, level ``i``
in bit ``i``), ``lcosts[a, v, i]`` and ``vdepth[a, v]`` for each label axis
``a``.  A local-separator index has two axes of depth ``k``; the global
baseline is encoded as ``2k`` axes of depth 1, which makes the same scan
compute both heuristics.
"""
import heapq
import math

import numpy as np

from ._accel import kernel

HEUR_ZERO = 0
HEUR_TABLE = 1
HEUR_LABELS = 2


@kernel
def multi_source_dijkstra(indptr, indices, costs, sources, allowed, targets, n_targets):
    """Distances from the nearest source.

    Only vertices with ``allowed[v]`` are entered.  When ``n_targets > 0``
    the search stops once that many vertices flagged in ``targets`` are
    settled; distances of unsettled vertices are then upper bounds.
    Returns ``(dist, settled_count)``.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    done = np.zeros(n, dtype=np.bool_)
    heap = [(0.0, np.int64(0))]
    heap.pop()
    for i in range(sources.shape[0]):
        s = sources[i]
        if allowed[s] and dist[s] > 0.0:
            dist[s] = 0.0
            heapq.heappush(heap, (0.0, np.int64(s)))
    settled = 0
    remaining = n_targets
    while len(heap) > 0:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        done[v] = True
        settled += 1
        if n_targets > 0 and targets[v]:
            remaining -= 1
            if remaining == 0:
                break
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            if not allowed[w] or done[w]:
                continue
            nd = d + costs[j]
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, np.int64(w)))
    return dist, settled


@kernel
def label_pair(codes, lcosts, vdepth, depth, s, t):
    """Max over label axes of the separator bound between ``s`` and ``t``."""
    h = 0.0
    for a in range(codes.shape[0]):
        levels = min(depth, vdepth[a, s], vdepth[a, t])
        cs_bits = codes[a, s]
        ct_bits = codes[a, t]
        for i in range(levels):
            cs = lcosts[a, s, i]
            ct = lcosts[a, t, i]
            finite = cs != math.inf and ct != math.inf
            if ((cs_bits >> i) & 1) == ((ct_bits >> i) & 1):
                if finite:
                    b = abs(cs - ct)
                    if b > h:
                        h = b
            else:
                if finite:
                    b = cs + ct
                    if b > h:
                        h = b
                break
    return h


@kernel
def label_many(codes, lcosts, vdepth, depth, ss, ts):
    """:func:`label_pair` over paired arrays of sources and targets."""
    out = np.zeros(ss.shape[0])
    for p in range(ss.shape[0]):
        s = ss[p]
        t = ts[p]
        h = 0.0
        for a in range(codes.shape[0]):
            levels = min(depth, vdepth[a, s], vdepth[a, t])
            cs_bits = codes[a, s]
            ct_bits = codes[a, t]
            for i in range(levels):
                cs = lcosts[a, s, i]
                ct = lcosts[a, t, i]
                finite = cs != math.inf and ct != math.inf
                if ((cs_bits >> i) & 1) == ((ct_bits >> i) & 1):
                    if finite:
                        b = abs(cs - ct)
                        if b > h:
                            h = b
                else:
                    if finite:
                        b = cs + ct
                        if b > h:
                            h = b
                    break
        out[p] = h
    return out


@kernel
def label_pair_detail(codes, lcosts, vdepth, depth, s, t):
    """Like :func:`label_pair` but also reports how the value arose.

    Returns ``(h, best_sep, sep_axis, sep_level)``: ``best_sep`` is the
    largest separated-branch bound (``-1`` if none), ``sep_axis`` and
    ``sep_level`` (0-based) locate the shallowest finite separation, or -1.
    """
    h = 0.0
    best_sep = -1.0
    sep_axis = -1
    sep_level = -1
    for a in range(codes.shape[0]):
        levels = min(depth, vdepth[a, s], vdepth[a, t])
        cs_bits = codes[a, s]
        ct_bits = codes[a, t]
        for i in range(levels):
            cs = lcosts[a, s, i]
            ct = lcosts[a, t, i]
            finite = cs != math.inf and ct != math.inf
            if ((cs_bits >> i) & 1) == ((ct_bits >> i) & 1):
                if finite:
                    b = abs(cs - ct)
                    if b > h:
                        h = b
            else:
                if finite:
                    b = cs + ct
                    if b > h:
                        h = b
                    if b > best_sep:
                        best_sep = b
                    if sep_level < 0 or i < sep_level:
                        sep_level = i
                        sep_axis = a
                break
    return h, best_sep, sep_axis, sep_level


@kernel
def astar(indptr, indices, costs, s, t, mode, table, codes, lcosts, vdepth, depth):
    """A* from ``s`` to ``t`` with re-opening of closed vertices.

    ``mode`` selects the heuristic: zero, ``table[v]`` (a bound to ``t``
    precomputed for every vertex) or the label scan.  Heap keys are
    ``(f, -g, seq)`` so equal ``f`` prefers the deeper entry and remaining
    ties follow insertion order.

    Returns ``(cost, path, settled_count, relaxed_count, settle_order)``;
    ``cost`` is inf and ``path`` empty when ``t`` is unreachable.
    """
    n = indptr.shape[0] - 1
    g = np.full(n, np.inf)
    hval = np.full(n, -1.0)
    parent = np.full(n, -1, dtype=np.int64)
    closed = np.zeros(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    settled = 0
    relaxed = 0
    seq = 0

    g[s] = 0.0
    heap = [(0.0, -0.0, np.int64(0), np.int64(s))]
    found = False
    while len(heap) > 0:
        _, neg_g, _, v = heapq.heappop(heap)
        if -neg_g > g[v]:
            continue
        if not closed[v]:
            closed[v] = True
            order[settled] = v
            settled += 1
        if v == t:
            found = True
            break
        gv = g[v]
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            relaxed += 1
            ng = gv + costs[j]
            if ng < g[w]:
                g[w] = ng
                parent[w] = v
                hw = hval[w]
                if hw < 0.0:
                    if mode == 1:
                        hw = table[w]
                    elif mode == 2:
                        hw = 0.0
                        for a in range(codes.shape[0]):
                            levels = min(depth, vdepth[a, w], vdepth[a, t])
                            cw_bits = codes[a, w]
                            ct_bits = codes[a, t]
                            for i in range(levels):
                                cw = lcosts[a, w, i]
                                ct = lcosts[a, t, i]
                                finite = cw != math.inf and ct != math.inf
                                if ((cw_bits >> i) & 1) == ((ct_bits >> i) & 1):
                                    if finite:
                                        b = abs(cw - ct)
                                        if b > hw:
                                            hw = b
                                else:
                                    if finite:
                                        b = cw + ct
                                        if b > hw:
                                            hw = b
                                    break
                    else:
                        hw = 0.0
                    hval[w] = hw
                seq += 1
                heapq.heappush(heap, (ng + hw, -ng, np.int64(seq), np.int64(w)))
    if not found:
        return math.inf, np.empty(0, dtype=np.int64), settled, relaxed, order[:settled].copy()
    length = 1
    v = t
    while v != s:
        v = parent[v]
        length += 1
    path = np.empty(length, dtype=np.int64)
    v = t
    for i in range(length - 1, -1, -1):
        path[i] = v
        v = parent[v]
    return g[t], path, settled, relaxed, order[:settled].copy()
