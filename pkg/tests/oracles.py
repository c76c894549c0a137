"""Reference computations that share no code with the package under test."""
import math
from collections import deque

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path


def edge_list(g):
    return [(int(a), int(b), float(c)) for (a, b), c in zip(g.edges.tolist(), g.edge_costs.tolist())]


def bellman_ford(n, edges, s):
    dist = [math.inf] * n
    dist[s] = 0.0
    for _ in range(n):
        changed = False
        for a, b, c in edges:
            if dist[a] + c < dist[b]:
                dist[b] = dist[a] + c
                changed = True
            if dist[b] + c < dist[a]:
                dist[a] = dist[b] + c
                changed = True
        if not changed:
            break
    return dist


def all_pairs(g):
    """All-pairs distances from scipy's Dijkstra."""
    n = g.vertex_count
    e = g.edges
    m = csr_matrix((g.edge_costs, (e[:, 0], e[:, 1])), shape=(n, n))
    return shortest_path(m, method="D", directed=False)


def bfs_reachable(n, edges, start, removed=()):
    adj = [[] for _ in range(n)]
    for a, b, *_ in edges:
        adj[a].append(b)
        adj[b].append(a)
    removed = set(removed)
    seen = {start}
    q = deque([start])
    while q:
        v = q.popleft()
        for w in adj[v]:
            if w not in seen and w not in removed:
                seen.add(w)
                q.append(w)
    return seen


def is_connected(g):
    if g.vertex_count == 0:
        return False
    return len(bfs_reachable(g.vertex_count, edge_list(g), 0)) == g.vertex_count


def parse_dimacs_naive(gr_text, co_text):
    """Throwaway parser: undirected edge multiset with min cost, coords by id."""
    best = {}
    for line in gr_text.splitlines():
        if line.startswith("a "):
            _, u, v, w = line.split()
            key = tuple(sorted((int(u) - 1, int(v) - 1)))
            best[key] = min(best.get(key, math.inf), float(w))
    coords = {}
    for line in co_text.splitlines():
        if line.startswith("v "):
            _, i, x, y = line.split()
            coords[int(i) - 1] = (float(x), float(y))
    return best, coords
