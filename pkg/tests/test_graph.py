import io
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from septree import (
    GraphParseError, RoadGraph, StructuralError, ValidationError, bounding_box, euclidean_distance,
    generate_synthetic, largest_connected_component, load_dimacs, write_dimacs,
)

from .oracles import bfs_reachable, edge_list, is_connected, parse_dimacs_naive

DATA = Path(__file__).parent / "data"


def test_min_of_two_directions():
    gr = b"p sp 2 2\na 1 2 5\na 2 1 7\n"
    co = b"p aux sp co 2\nv 1 0 0\nv 2 10 0\n"
    g = load_dimacs(gr, co)
    assert g.edge_count == 1
    assert g.edges.tolist() == [[0, 1]]
    assert g.edge_costs.tolist() == [5.0]
    assert g.neighbors(1) == [(0, 5.0)]


def test_missing_coordinate_is_structural_error():
    gr = b"p sp 3 2\na 1 2 5\na 2 3 5\n"
    co = b"p aux sp co 3\nv 1 0 0\nv 2 10 0\n"
    with pytest.raises(StructuralError):
        load_dimacs(gr, co)


def test_fixture_matches_naive_parser():
    g = load_dimacs(DATA / "fixture100.gr", DATA / "fixture100.co")
    best, coords = parse_dimacs_naive((DATA / "fixture100.gr").read_text(), (DATA / "fixture100.co").read_text())
    got = {(a, b): c for a, b, c in edge_list(g)}
    assert got == best
    assert g.vertex_count == len(coords)
    for i, (x, y) in coords.items():
        assert (g.x[i], g.y[i]) == (x, y)


@pytest.mark.parametrize(
    "gr, message",
    [
        (b"p sp 2 1\na 1 2\n", "line 2"),
        (b"p sp 2 1\na 1 two 3\n", "line 2"),
        (b"c ok\np sp 2 1\nx 1 2 3\n", "line 3"),
        (b"a 1 2 3\n", "line 1"),
    ],
)
def test_parse_errors_carry_line_numbers(gr, message):
    co = b"p aux sp co 2\nv 1 0 0\nv 2 1 0\n"
    with pytest.raises(GraphParseError, match=message):
        load_dimacs(gr, co)


def test_unknown_vertex_and_bad_weights():
    co = b"p aux sp co 2\nv 1 0 0\nv 2 1 0\n"
    with pytest.raises(StructuralError):
        load_dimacs(b"p sp 2 1\na 1 3 4\n", co)
    with pytest.raises(ValidationError):
        load_dimacs(b"p sp 2 1\na 1 2 0\n", co)
    with pytest.raises(ValidationError):
        load_dimacs(b"p sp 2 1\na 1 2 -3\n", co)


def test_geographic_projection_scales_longitude():
    # 0.01 degrees at latitude 60 is half as wide as it is tall
    gr = b"p sp 3 2\na 1 2 1\na 1 3 1\n"
    co = b"p aux sp co 3\nv 1 0 60000000\nv 2 10000 60000000\nv 3 0 60010000\n"
    g = load_dimacs(gr, co, coord_scale=1e-6, geographic=True)
    dx = euclidean_distance(g, 0, 1)
    dy = euclidean_distance(g, 0, 2)
    assert dy == pytest.approx(1111.95, rel=1e-3)
    assert dx / dy == pytest.approx(math.cos(math.radians(60.003333)), rel=1e-4)


def test_round_trip(small_grid):
    gr, co = io.StringIO(), io.StringIO()
    write_dimacs(small_grid, gr, co)
    g2 = load_dimacs(gr.getvalue().encode(), co.getvalue().encode())
    assert g2 == small_grid
    assert np.array_equal(g2.indptr, small_grid.indptr)
    assert np.array_equal(g2.costs, small_grid.costs)


def test_rejects_bad_graphs():
    with pytest.raises(ValidationError):
        RoadGraph.from_edges([0, 1], [0, 0], [(0, 0)], [1.0])
    with pytest.raises(ValidationError):
        RoadGraph.from_edges([0, 1], [0, 0], [(0, 1)], [0.0])
    with pytest.raises(ValidationError):
        RoadGraph.from_edges([0, np.nan], [0, 0], [(0, 1)], [1.0])


def test_adjacency_symmetric(small_grid):
    g = small_grid
    arcs = set()
    for v in range(g.vertex_count):
        for w, c in g.neighbors(v):
            arcs.add((v, w, c))
    assert all((w, v, c) in arcs for v, w, c in arcs)
    assert len(arcs) == 2 * g.edge_count


def test_arrays_are_read_only(small_grid):
    with pytest.raises(ValueError):
        small_grid.costs[0] = 1.0


class TestSynthetic:
    def test_two_by_two(self):
        g = generate_synthetic(2, 2, drop_prob=0.0, seed=0)
        assert (g.vertex_count, g.edge_count) == (4, 4)

    def test_deterministic(self):
        a = generate_synthetic(20, 30, seed=9, drop_prob=0.2)
        b = generate_synthetic(20, 30, seed=9, drop_prob=0.2)
        assert a == b
        assert a.edge_costs.tobytes() == b.edge_costs.tobytes()
        assert generate_synthetic(20, 30, seed=10, drop_prob=0.2) != a

    def test_hundred_grid_connected(self, grid_100):
        assert 9000 <= grid_100.vertex_count <= 10000
        assert is_connected(grid_100)

    def test_cost_is_length_over_speed(self):
        speeds = (5.0, 10.0)
        g = generate_synthetic(6, 6, cell_size=50.0, speed_classes=speeds, seed=1)
        for (a, b), c in zip(g.edges.tolist(), g.edge_costs.tolist()):
            length = math.hypot(g.x[a] - g.x[b], g.y[a] - g.y[b])
            assert min(abs(length / s - c) for s in speeds) < 1e-9 * c

    @pytest.mark.parametrize(
        "kw",
        [dict(rows=1, cols=5), dict(rows=5, cols=5, drop_prob=0.3), dict(rows=5, cols=5, speed_classes=[]),
         dict(rows=5, cols=5, drop_prob=-0.1)],
    )
    def test_validation(self, kw):
        with pytest.raises(ValidationError):
            generate_synthetic(**kw)


class TestComponents:
    def test_connected_identity(self, small_grid):
        g2, id_map = largest_connected_component(small_grid)
        assert g2 is small_grid
        assert np.array_equal(id_map, np.arange(small_grid.vertex_count))

    def test_larger_triangle_wins(self):
        x = list(range(7))
        y = [0.0] * 7
        edges = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (5, 6)]
        g = RoadGraph.from_edges(x, y, edges, [1.0] * 7)
        g2, id_map = largest_connected_component(g)
        assert g2.vertex_count == 4
        assert g2.edge_count == 4
        assert id_map.tolist() == [-1, -1, -1, 0, 1, 2, 3]

    def test_random_drop_output_connected(self):
        # build the uncropped grid by hand so that components really exist
        rng = np.random.default_rng(4)
        n = 30 * 30
        ids = np.arange(n).reshape(30, 30)
        edges = np.concatenate([
            np.stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()], 1),
            np.stack([ids[:-1].ravel(), ids[1:].ravel()], 1),
        ])
        edges = edges[rng.random(len(edges)) >= 0.45]
        g = RoadGraph.from_edges(ids.ravel() % 30, ids.ravel() // 30, edges, np.ones(len(edges)))
        assert not is_connected(g)
        g2, id_map = largest_connected_component(g)
        assert is_connected(g2)
        kept = id_map[id_map >= 0]
        assert len(set(kept.tolist())) == kept.size == g2.vertex_count
        reach = bfs_reachable(n, edge_list(g), int(np.flatnonzero(id_map >= 0)[0]))
        assert len(reach) == g2.vertex_count


class TestGeometry:
    def test_bbox_single(self):
        g = RoadGraph.from_edges([3.0], [4.0], np.empty((0, 2)), [])
        b = bounding_box(g)
        assert (b.x_min, b.x_max, b.y_min, b.y_max) == (3, 3, 4, 4)

    def test_bbox_two(self):
        g = RoadGraph.from_edges([0.0, 10.0], [0.0, 5.0], [(0, 1)], [1.0])
        b = bounding_box(g)
        assert (b.x_min, b.x_max, b.y_min, b.y_max) == (0, 10, 0, 5)

    def test_bbox_scan(self):
        rng = np.random.default_rng(0)
        xy = rng.normal(size=(1000, 2)) * 1000
        g = RoadGraph.from_edges(xy[:, 0], xy[:, 1], np.empty((0, 2)), [])
        b = bounding_box(g)
        xs, ys = xy[:, 0].tolist(), xy[:, 1].tolist()
        lo_x = hi_x = xs[0]
        lo_y = hi_y = ys[0]
        for x, y in zip(xs, ys):
            lo_x, hi_x, lo_y, hi_y = min(lo_x, x), max(hi_x, x), min(lo_y, y), max(hi_y, y)
        assert (b.x_min, b.x_max, b.y_min, b.y_max) == (lo_x, hi_x, lo_y, hi_y)

    def test_bbox_empty(self):
        g = RoadGraph.from_edges([], [], np.empty((0, 2)), [])
        with pytest.raises(ValidationError):
            bounding_box(g)

    def test_distance(self):
        g = RoadGraph.from_edges([0.0, 3.0], [0.0, 4.0], [(0, 1)], [1.0])
        assert euclidean_distance(g, 0, 0) == 0
        assert euclidean_distance(g, 0, 1) == 5
        with pytest.raises(ValidationError):
            euclidean_distance(g, 0, 2)

    def test_distance_random(self, small_grid):
        rng = np.random.default_rng(1)
        for u, v in rng.integers(0, small_grid.vertex_count, size=(200, 2)).tolist():
            dx = small_grid.x[u] - small_grid.x[v]
            dy = small_grid.y[u] - small_grid.y[v]
            assert euclidean_distance(small_grid, u, v) == pytest.approx(math.sqrt(dx * dx + dy * dy), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    rows=st.integers(2, 8), cols=st.integers(2, 8), drop=st.floats(0, 0.29), seed=st.integers(0, 2**31),
)
def test_round_trip_property(rows, cols, drop, seed):
    g = generate_synthetic(rows, cols, drop_prob=drop, seed=seed)
    gr, co = io.BytesIO(), io.BytesIO()
    write_dimacs(g, gr, co)
    assert load_dimacs(gr.getvalue(), co.getvalue()) == g
