"""Axis-aligned line cuts of a plane-embedded graph.

An edge is cut by the line ``coord = position`` when one endpoint has
``coord <= position`` and the other ``coord > position``.  The separator
takes the endpoint on the ``>`` side of every cut edge, so once it is
removed no edge joins the ``<=`` side to the rest of the ``>`` side.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .graph import RoadGraph


class Axis(enum.IntEnum):
    X = 0
    Y = 1


@dataclass(frozen=True)
class AxisLine:
    axis: Axis
    position: float

    def __post_init__(self):
        if not math.isfinite(self.position):
            raise ValueError("line position must be finite")
        object.__setattr__(self, "axis", Axis(self.axis))

    def side(self, g: RoadGraph, vertices=None) -> np.ndarray:
        """0 for ``coord <= position``, 1 otherwise."""
        c = g.coords(self.axis)
        if vertices is not None:
            c = c[vertices]
        return (c > self.position).astype(np.int8)


@dataclass(frozen=True, eq=False)
class SeparatorCut:
    line: AxisLine
    cut_edges: np.ndarray  # (f, 2) rows of (low-side endpoint, high-side endpoint)
    separator: np.ndarray
    left_side: np.ndarray
    right_side: np.ndarray


def _scope_mask(g: RoadGraph, scope) -> np.ndarray | None:
    if scope is None:
        return None
    scope = np.asarray(scope)
    if scope.dtype == np.bool_:
        return scope
    mask = np.zeros(g.vertex_count, dtype=bool)
    mask[scope] = True
    return mask


def cut_edges(g: RoadGraph, line: AxisLine, scope=None) -> np.ndarray:
    """Edges crossed by ``line``, oriented as ``(low side, high side)``.

    With a ``scope`` (index array or boolean mask) only edges with both
    endpoints in scope are considered; ``None`` means the whole graph.
    Rows are sorted by edge order in ``g.edges``.
    """
    c = g.coords(line.axis)
    a, b = g.edges[:, 0], g.edges[:, 1]
    ca, cb = c[a], c[b]
    crossing = np.minimum(ca, cb) <= line.position
    crossing &= line.position < np.maximum(ca, cb)
    mask = _scope_mask(g, scope)
    if mask is not None:
        crossing &= mask[a] & mask[b]
    a, b, ca, cb = a[crossing], b[crossing], ca[crossing], cb[crossing]
    flip = ca > cb
    low = np.where(flip, b, a)
    high = np.where(flip, a, b)
    return np.stack([low, high], axis=1)


def build_cut(g: RoadGraph, line: AxisLine, scope=None, *, clip_to_scope: bool = True) -> SeparatorCut:
    """Cut ``scope`` (default: every vertex) with ``line``.

    The separator is the high-side endpoint of every cut edge.  With
    ``clip_to_scope=False`` the cut runs over the whole graph (the line is
    treated as infinite) while the left/right partition still covers only
    the scope; the separator then also blocks paths that leave the scope.
    """
    mask = _scope_mask(g, scope)
    f = cut_edges(g, line, mask if clip_to_scope else None)
    sep = np.unique(f[:, 1])
    if mask is None:
        members = np.arange(g.vertex_count)
    else:
        members = np.flatnonzero(mask)
    high = g.coords(line.axis)[members] > line.position
    in_sep = np.zeros(g.vertex_count, dtype=bool)
    in_sep[sep] = True
    left = members[~high & ~in_sep[members]]
    right = members[high & ~in_sep[members]]
    return SeparatorCut(line, f, sep, left, right)
