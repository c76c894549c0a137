"""Road graph container, DIMACS ingestion and synthetic map generation.

A :class:`RoadGraph` is an immutable undirected graph embedded in the plane.
Adjacency is stored in CSR form (``indptr``/``indices``/``costs``) so the
search kernels can walk it without touching Python objects, plus a canonical
edge list (``u < v``) used by the separator code and for serialisation.
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from typing import BinaryIO, TextIO, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import GraphParseError, StructuralError, ValidationError

EARTH_RADIUS_M = 6_371_008.8

Source = Union[str, os.PathLike, bytes, BinaryIO, TextIO]


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


@dataclass(frozen=True)
class GraphFingerprint:
    vertex_count: int
    edge_count: int
    cost_checksum: float


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class RoadGraph:
    """Undirected plane-embedded graph with positive edge costs (seconds).

    Build instances with :meth:`from_edges`; the constructor trusts its
    arguments.  All arrays are read-only.
    """

    __slots__ = ("x", "y", "edges", "edge_costs", "indptr", "indices", "costs", "_fingerprint")

    def __init__(self, x, y, edges, edge_costs, indptr, indices, costs):
        self.x = _readonly(np.asarray(x, dtype=np.float64))
        self.y = _readonly(np.asarray(y, dtype=np.float64))
        self.edges = _readonly(np.asarray(edges, dtype=np.int64).reshape(-1, 2))
        self.edge_costs = _readonly(np.asarray(edge_costs, dtype=np.float64))
        self.indptr = _readonly(np.asarray(indptr, dtype=np.int64))
        self.indices = _readonly(np.asarray(indices, dtype=np.int64))
        self.costs = _readonly(np.asarray(costs, dtype=np.float64))
        self._fingerprint = None

    @classmethod
    def from_edges(cls, x, y, edges, costs) -> "RoadGraph":
        """Validate and normalise an edge list.

        Edges may be given in either orientation and may repeat; parallel
        edges collapse to their minimum cost.  Self-loops are rejected, as are
        non-finite or non-positive costs and non-finite coordinates.
        """
        x = np.asarray(x, dtype=np.float64).ravel()
        y = np.asarray(y, dtype=np.float64).ravel()
        if x.shape != y.shape:
            raise ValidationError("x and y must have the same length")
        n = x.shape[0]
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValidationError("coordinates must be finite")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        costs = np.asarray(costs, dtype=np.float64).ravel()
        if costs.shape[0] != edges.shape[0]:
            raise ValidationError("one cost per edge is required")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValidationError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValidationError("self-loops are not allowed")
        if not np.all(np.isfinite(costs)) or np.any(costs <= 0):
            raise ValidationError("edge costs must be finite and strictly positive")

        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        # sort by (lo, hi, cost) so the first of each run is the cheapest
        order = np.lexsort((costs, hi, lo))
        lo, hi, costs = lo[order], hi[order], costs[order]
        if lo.size:
            first = np.ones(lo.size, dtype=bool)
            first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
            lo, hi, costs = lo[first], hi[first], costs[first]
        canon = np.stack([lo, hi], axis=1) if lo.size else np.empty((0, 2), dtype=np.int64)

        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        arc_costs = np.concatenate([costs, costs])
        order = np.lexsort((dst, src))
        src, dst, arc_costs = src[order], dst[order], arc_costs[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(x, y, canon, costs, indptr, dst, arc_costs)

    @property
    def vertex_count(self) -> int:
        return int(self.x.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def __len__(self) -> int:
        return self.vertex_count

    def neighbors(self, v: int):
        """List of ``(neighbor, cost)`` pairs of vertex ``v``."""
        self._check_vertex(v)
        a, b = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.indices[a:b].tolist(), self.costs[a:b].tolist()))

    def coords(self, axis: int) -> np.ndarray:
        return self.x if int(axis) == 0 else self.y

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def fingerprint(self) -> GraphFingerprint:
        if self._fingerprint is None:
            self._fingerprint = GraphFingerprint(
                self.vertex_count, self.edge_count, math.fsum(self.edge_costs.tolist())
            )
        return self._fingerprint

    def subgraph(self, keep: np.ndarray) -> tuple["RoadGraph", np.ndarray]:
        """Induced subgraph on a boolean mask; returns it with the old-to-new map (-1 = dropped)."""
        keep = np.asarray(keep, dtype=bool)
        id_map = np.full(self.vertex_count, -1, dtype=np.int64)
        id_map[keep] = np.arange(int(keep.sum()), dtype=np.int64)
        e_keep = keep[self.edges[:, 0]] & keep[self.edges[:, 1]]
        edges = id_map[self.edges[e_keep]]
        return RoadGraph.from_edges(self.x[keep], self.y[keep], edges, self.edge_costs[e_keep]), id_map

    def _check_vertex(self, v) -> int:
        iv = int(v)
        if iv != v or not 0 <= iv < self.vertex_count:
            raise ValidationError(f"invalid vertex id {v!r} (graph has {self.vertex_count} vertices)")
        return iv

    def __eq__(self, other) -> bool:
        if not isinstance(other, RoadGraph):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.edge_costs, other.edge_costs)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"RoadGraph(n={self.vertex_count}, m={self.edge_count})"


def bounding_box(g: RoadGraph) -> BoundingBox:
    if g.vertex_count == 0:
        raise ValidationError("bounding box of an empty graph")
    return BoundingBox(float(g.x.min()), float(g.x.max()), float(g.y.min()), float(g.y.max()))


def euclidean_distance(g: RoadGraph, u: int, v: int) -> float:
    u = g._check_vertex(u)
    v = g._check_vertex(v)
    return math.hypot(g.x[u] - g.x[v], g.y[u] - g.y[v])


def component_labels(g: RoadGraph) -> tuple[int, np.ndarray]:
    n = g.vertex_count
    a = coo_matrix(
        (np.ones(g.edge_count), (g.edges[:, 0], g.edges[:, 1])), shape=(n, n)
    )
    return connected_components(a, directed=False)


def is_connected(g: RoadGraph) -> bool:
    return g.vertex_count > 0 and component_labels(g)[0] == 1


def largest_connected_component(g: RoadGraph) -> tuple[RoadGraph, np.ndarray]:
    """Keep the largest component.  Ties go to the component holding the lowest vertex id."""
    if g.vertex_count == 0:
        return g, np.empty(0, dtype=np.int64)
    ncomp, labels = component_labels(g)
    if ncomp == 1:
        return g, np.arange(g.vertex_count, dtype=np.int64)
    sizes = np.bincount(labels, minlength=ncomp)
    # connected_components numbers components in order of their lowest vertex
    best = int(np.argmax(sizes))
    return g.subgraph(labels == best)


# --------------------------------------------------------------------------
# synthetic maps

DEFAULT_SPEEDS = (2.78, 8.33, 13.89, 22.22, 33.33)  # 10, 30, 50, 80, 120 km/h


def generate_synthetic(
    rows: int,
    cols: int,
    cell_size: float = 100.0,
    speed_classes=DEFAULT_SPEEDS,
    drop_prob: float = 0.0,
    seed: int = 0,
) -> RoadGraph:
    """Jittered grid road map restricted to its largest connected component.

    Vertices sit on a ``rows x cols`` lattice with spacing ``cell_size``
    meters, each coordinate perturbed by up to ``0.3 * cell_size``.  Every
    lattice edge survives with probability ``1 - drop_prob`` and costs its
    Euclidean length divided by a speed drawn from ``speed_classes``.
    """
    if int(rows) != rows or int(cols) != cols or rows < 2 or cols < 2:
        raise ValidationError("rows and cols must be integers >= 2")
    if not (cell_size > 0 and math.isfinite(cell_size)):
        raise ValidationError("cell_size must be positive")
    if not 0 <= drop_prob < 0.3:
        raise ValidationError("drop_prob must lie in [0, 0.3)")
    speeds = np.asarray(list(speed_classes), dtype=np.float64)
    if speeds.size == 0 or np.any(~np.isfinite(speeds)) or np.any(speeds <= 0):
        raise ValidationError("speed_classes must be a nonempty list of positive speeds")
    rows, cols = int(rows), int(cols)

    rng = np.random.default_rng(seed)
    r, c = np.divmod(np.arange(rows * cols), cols)
    jitter = rng.uniform(-0.3, 0.3, size=(rows * cols, 2)) * cell_size
    x = c * cell_size + jitter[:, 0]
    y = r * cell_size + jitter[:, 1]

    ids = np.arange(rows * cols).reshape(rows, cols)
    horizontal = np.stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()], axis=1)
    vertical = np.stack([ids[:-1, :].ravel(), ids[1:, :].ravel()], axis=1)
    edges = np.concatenate([horizontal, vertical])
    keep = rng.random(edges.shape[0]) >= drop_prob
    speed = speeds[rng.integers(0, speeds.size, size=edges.shape[0])]
    edges, speed = edges[keep], speed[keep]
    length = np.hypot(x[edges[:, 0]] - x[edges[:, 1]], y[edges[:, 0]] - y[edges[:, 1]])
    g = RoadGraph.from_edges(x, y, edges, length / speed)
    return largest_connected_component(g)[0]


# --------------------------------------------------------------------------
# DIMACS text formats


def _open_text(source: Source):
    """Return (text stream, display name, needs_close)."""
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="ascii", errors="replace"), os.fspath(source), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("ascii", errors="replace")), "", False
    if isinstance(source, io.TextIOBase):
        return source, getattr(source, "name", ""), False
    return io.TextIOWrapper(source, encoding="ascii", errors="replace"), getattr(source, "name", ""), False


def _parse_gr(stream, name):
    n = None
    us, vs, ws = [], [], []
    for lineno, line in enumerate(stream, 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if len(parts) != 4 or parts[1] != "sp":
                raise GraphParseError("expected 'p sp <n> <m>'", lineno, name)
            if n is not None:
                raise GraphParseError("duplicate problem line", lineno, name)
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise GraphParseError("non-integer counts in problem line", lineno, name) from None
        elif tag == "a":
            if n is None:
                raise GraphParseError("arc before problem line", lineno, name)
            if len(parts) != 4:
                raise GraphParseError("expected 'a <u> <v> <w>'", lineno, name)
            try:
                u, v, w = int(parts[1]), int(parts[2]), float(parts[3])
            except ValueError:
                raise GraphParseError("malformed arc", lineno, name) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise StructuralError(f"{name or '.gr'}:{lineno}: arc references unknown vertex")
            if not (math.isfinite(w) and w > 0):
                raise ValidationError(f"{name or '.gr'}:{lineno}: arc weight must be positive, got {parts[3]}")
            us.append(u)
            vs.append(v)
            ws.append(w)
        else:
            raise GraphParseError(f"unknown line type {tag!r}", lineno, name)
    if n is None:
        raise GraphParseError("missing problem line", 0, name)
    return n, np.array(us, dtype=np.int64) - 1, np.array(vs, dtype=np.int64) - 1, np.array(ws, dtype=np.float64)


def _parse_co(stream, name):
    n = None
    coords = {}
    for lineno, line in enumerate(stream, 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if len(parts) != 5 or parts[1:4] != ["aux", "sp", "co"]:
                raise GraphParseError("expected 'p aux sp co <n>'", lineno, name)
            try:
                n = int(parts[4])
            except ValueError:
                raise GraphParseError("non-integer count in problem line", lineno, name) from None
        elif tag == "v":
            if len(parts) != 4:
                raise GraphParseError("expected 'v <id> <x> <y>'", lineno, name)
            try:
                vid, cx, cy = int(parts[1]), float(parts[2]), float(parts[3])
            except ValueError:
                raise GraphParseError("malformed vertex line", lineno, name) from None
            if vid in coords:
                raise StructuralError(f"{name or '.co'}:{lineno}: duplicate vertex {vid}")
            coords[vid] = (cx, cy)
        else:
            raise GraphParseError(f"unknown line type {tag!r}", lineno, name)
    return n, coords


def project_equirectangular(lon_deg: np.ndarray, lat_deg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Planar meters from degrees, x scaled by cos of the mean latitude."""
    lat0 = math.radians(float(np.mean(lat_deg))) if lat_deg.size else 0.0
    x = EARTH_RADIUS_M * np.radians(lon_deg) * math.cos(lat0)
    y = EARTH_RADIUS_M * np.radians(lat_deg)
    return x, y


def load_dimacs(gr_source: Source, co_source: Source, coord_scale: float = 1.0, geographic: bool = False) -> RoadGraph:
    """Read a DIMACS ``.gr``/``.co`` pair.

    ``coord_scale`` multiplies raw file coordinates.  With ``geographic``
    the scaled values are longitude/latitude in degrees (DIMACS road files
    use ``coord_scale=1e-6``) and get projected to meters; otherwise they are
    taken as planar meters.  Arcs in both directions become one undirected
    edge carrying the smaller weight.
    """
    if not (coord_scale > 0 and math.isfinite(coord_scale)):
        raise ValidationError("coord_scale must be positive")
    stream, name, close = _open_text(gr_source)
    try:
        n, u, v, w = _parse_gr(stream, name)
    finally:
        if close:
            stream.close()
    stream, cname, close = _open_text(co_source)
    try:
        n_co, coords = _parse_co(stream, cname)
    finally:
        if close:
            stream.close()
    if n_co is not None and n_co != n:
        raise StructuralError(f".co declares {n_co} vertices but .gr declares {n}")
    missing = [i for i in range(1, n + 1) if i not in coords]
    if missing:
        raise StructuralError(f".co is missing coordinates for {len(missing)} vertices (first: {missing[0]})")
    extra = [i for i in coords if not 1 <= i <= n]
    if extra:
        raise StructuralError(f".co lists unknown vertex {extra[0]}")
    xy = np.array([coords[i] for i in range(1, n + 1)], dtype=np.float64).reshape(n, 2) * coord_scale
    x, y = xy[:, 0], xy[:, 1]
    if geographic:
        x, y = project_equirectangular(x, y)
    loops = u == v
    if np.any(loops):
        u, v, w = u[~loops], v[~loops], w[~loops]
    return RoadGraph.from_edges(x, y, np.stack([u, v], axis=1), w)


def load_dimacs_files(stem: str, **kwargs) -> RoadGraph:
    return load_dimacs(f"{stem}.gr", f"{stem}.co", **kwargs)


def write_dimacs(g: RoadGraph, gr_sink, co_sink, comment: str = "") -> None:
    """Write both directions of every edge to ``gr_sink`` and coordinates (meters) to ``co_sink``.

    Values use ``repr`` so a reload reproduces every double exactly.
    """
    gr = [f"c {comment}\n"] if comment else []
    gr.append(f"p sp {g.vertex_count} {2 * g.edge_count}\n")
    for (a, b), c in zip(g.edges.tolist(), g.edge_costs.tolist()):
        gr.append(f"a {a + 1} {b + 1} {c!r}\n")
        gr.append(f"a {b + 1} {a + 1} {c!r}\n")
    co = [f"c {comment}\n"] if comment else []
    co.append(f"p aux sp co {g.vertex_count}\n")
    for i, (cx, cy) in enumerate(zip(g.x.tolist(), g.y.tolist()), 1):
        co.append(f"v {i} {cx!r} {cy!r}\n")
    _write_text(gr_sink, "".join(gr))
    _write_text(co_sink, "".join(co))


def _write_text(sink, text: str) -> None:
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="ascii", newline="\n") as f:
            f.write(text)
    elif isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("ascii"))
