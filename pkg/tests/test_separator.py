import numpy as np
import pytest

from septree import Axis, AxisLine, RoadGraph, build_cut, cut_edges

from .oracles import bfs_reachable, edge_list


def test_line_outside_gives_empty_cut(small_grid):
    line = AxisLine(Axis.X, float(small_grid.x.max()) + 1)
    assert cut_edges(small_grid, line).shape == (0, 2)
    cut = build_cut(small_grid, line)
    assert cut.separator.size == 0
    assert cut.right_side.size == 0
    assert cut.left_side.size == small_grid.vertex_count


def test_single_edge():
    g = RoadGraph.from_edges([0.0, 1.0], [0.0, 0.0], [(0, 1)], [1.0])
    cut = build_cut(g, AxisLine(Axis.X, 0.5))
    assert cut.cut_edges.tolist() == [[0, 1]]
    assert cut.separator.tolist() == [1]
    assert cut.left_side.tolist() == [0]
    assert cut.right_side.tolist() == []


def test_endpoint_on_line_counts_as_left():
    g = RoadGraph.from_edges([0.0, 1.0, 2.0], [0.0, 0.0, 0.0], [(0, 1), (1, 2)], [1.0, 1.0])
    line = AxisLine(Axis.X, 1.0)
    assert line.side(g).tolist() == [0, 0, 1]
    assert cut_edges(g, line).tolist() == [[1, 2]]


def test_orientation_low_high():
    g = RoadGraph.from_edges([5.0, 0.0], [0.0, 0.0], [(0, 1)], [1.0])
    assert cut_edges(g, AxisLine(Axis.X, 2.0)).tolist() == [[1, 0]]


def test_exhaustive_scan(small_grid):
    g = small_grid
    for axis in Axis:
        c = g.coords(axis)
        pos = float(np.median(c)) + 0.25
        got = cut_edges(g, AxisLine(axis, pos))
        ref = []
        for a, b, _ in edge_list(g):
            lo, hi = (a, b) if c[a] <= c[b] else (b, a)
            if c[lo] <= pos < c[hi]:
                ref.append([lo, hi])
        assert got.tolist() == ref


def test_separator_disconnects_four_cycle():
    g = RoadGraph.from_edges([0, 1, 1, 0], [0, 0, 1, 1], [(0, 1), (1, 2), (2, 3), (3, 0)], [1.0] * 4)
    cut = build_cut(g, AxisLine(Axis.X, 0.5))
    assert cut.separator.tolist() == [1, 2]
    seen = bfs_reachable(4, edge_list(g), 0, removed=cut.separator.tolist())
    assert seen == {0, 3}


@pytest.mark.parametrize("axis", list(Axis))
def test_separation_property(small_grid, axis):
    # no left vertex reaches a right vertex once the separator is removed
    g = small_grid
    c = g.coords(axis)
    for pos in np.quantile(c, [0.2, 0.5, 0.8]):
        cut = build_cut(g, AxisLine(axis, float(pos)))
        assert len(cut.left_side) + len(cut.right_side) + len(cut.separator) == g.vertex_count
        right = set(cut.right_side.tolist())
        edges = edge_list(g)
        for v in cut.left_side.tolist()[::7]:
            reach = bfs_reachable(g.vertex_count, edges, v, removed=cut.separator.tolist())
            assert not reach & right


def test_scope_clipping(small_grid):
    g = small_grid
    scope = np.flatnonzero(g.y <= np.median(g.y))
    line = AxisLine(Axis.X, float(np.median(g.x)))
    clipped = build_cut(g, line, scope)
    full = build_cut(g, line, scope, clip_to_scope=False)
    in_scope = set(scope.tolist())
    assert all(a in in_scope and b in in_scope for a, b in clipped.cut_edges.tolist())
    assert set(clipped.separator.tolist()) <= set(full.separator.tolist())
    assert set(full.left_side.tolist()) | set(full.right_side.tolist()) <= in_scope


def test_deterministic(small_grid):
    line = AxisLine(Axis.Y, float(np.mean(small_grid.y)))
    a, b = build_cut(small_grid, line), build_cut(small_grid, line)
    for name in ("cut_edges", "separator", "left_side", "right_side"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_non_finite_position():
    with pytest.raises(ValueError):
        AxisLine(Axis.X, float("nan"))
