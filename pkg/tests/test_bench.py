import csv
import io
import json
import math

import numpy as np
import pytest

from septree import ExactHeuristic, ValidationError, ZeroHeuristic, build_lsh_index, euclidean_distance
from septree.bench import (
    CSV_COLUMNS, BenchConfig, DistanceBin, default_bins, efficiency, quality, run_benchmark, sample_pairs,
    separation_report, true_distances,
)

from .conftest import path_graph, random_pairs
from .oracles import all_pairs


@pytest.fixture(scope="module")
def short_sample(grid_100):
    return sample_pairs(grid_100, DistanceBin(200, 500), 400, seed=1)


class TestSampling:
    def test_bounds_rechecked(self, grid_100, short_sample):
        assert len(short_sample) == 400 and not short_sample.exhausted
        for s, t in short_sample:
            assert 200 <= euclidean_distance(grid_100, s, t) <= 500
            assert s != t

    def test_deterministic(self, grid_100):
        a = sample_pairs(grid_100, DistanceBin(1000, 2000), 50, seed=3)
        b = sample_pairs(grid_100, DistanceBin(1000, 2000), 50, seed=3)
        c = sample_pairs(grid_100, DistanceBin(1000, 2000), 50, seed=4)
        assert np.array_equal(a.pairs, b.pairs)
        assert not np.array_equal(a.pairs, c.pairs)

    def test_annulus_mean(self, grid_100, short_sample):
        b = DistanceBin(200, 500)
        assert b.annulus_mean() == pytest.approx(2 / 3 * (500**3 - 200**3) / (500**2 - 200**2))
        got = np.mean([euclidean_distance(grid_100, s, t) for s, t in short_sample])
        assert abs(got - b.annulus_mean()) <= 0.1 * b.annulus_mean()

    def test_snap_radius(self):
        assert DistanceBin(200, 500).snap_radius == 100
        assert DistanceBin(5000, 10000).snap_radius == 500

    def test_bin_outside_map(self, small_grid):
        with pytest.raises(ValidationError):
            sample_pairs(small_grid, DistanceBin(1e6, 2e6), 10)

    def test_bad_bins(self):
        with pytest.raises(ValidationError):
            DistanceBin(5, 5)
        with pytest.raises(ValidationError):
            DistanceBin(-1, 5)

    def test_exhaustion_warns(self, small_grid):
        # 12x12 cells of 100 m: pairs ~1.5 km apart are nearly impossible
        diag = math.hypot(np.ptp(small_grid.x), np.ptp(small_grid.y))
        with pytest.warns(UserWarning):
            out = sample_pairs(small_grid, DistanceBin(diag - 1, diag), 3)
        assert out.exhausted and out.draws == 3000

    def test_default_bins_truncated(self, grid_100):
        bins = default_bins(grid_100)
        assert [(b.lo, b.hi) for b in bins[:2]] == [(1000, 5000), (5000, 10000)]
        assert bins[-1].hi <= math.hypot(np.ptp(grid_100.x), np.ptp(grid_100.y))


class TestMetrics:
    def test_anchors(self, small_grid):
        pairs = random_pairs(small_grid.vertex_count, 60, seed=2)
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        assert quality(small_grid, ZeroHeuristic(), pairs).mean == 0.0
        exact = quality(small_grid, ExactHeuristic(small_grid), pairs)
        assert exact.mean == 1.0 and (exact.per_pair == 1.0).all()
        e0 = efficiency(small_grid, ZeroHeuristic(), pairs).mean
        e1 = efficiency(small_grid, ExactHeuristic(small_grid), pairs).mean
        assert 0 < e0 < e1 <= 1

    def test_true_distances_match_oracle(self, small_grid):
        pairs = random_pairs(small_grid.vertex_count, 40, seed=3)
        d = all_pairs(small_grid)
        assert np.allclose(true_distances(small_grid, pairs), d[pairs[:, 0], pairs[:, 1]], rtol=1e-12)

    def test_path_graph_efficiency_one(self):
        g = path_graph([0, 1, 2, 3, 4, 5, 6], [1.0, 3.0, 2.0, 1.0, 1.0, 4.0])
        idx = build_lsh_index(g, 2)
        for h in (idx.heuristic(), ExactHeuristic(g)):
            assert efficiency(g, h, [(1, 5), (6, 0), (2, 3)]).mean == 1.0

    def test_lsh_quality_bounded(self, grid_300):
        idx = build_lsh_index(grid_300, 6)
        pairs = random_pairs(grid_300.vertex_count, 500, seed=4)
        q = quality(grid_300, idx.heuristic(), pairs)
        ok = np.isfinite(q.per_pair)
        assert (q.per_pair[ok] <= 1 + 1e-12).all() and (q.per_pair[ok] >= 0).all()
        assert q.excluded == int((pairs[:, 0] == pairs[:, 1]).sum())

    def test_unreachable_excluded(self):
        from septree import RoadGraph

        g = RoadGraph.from_edges([0, 1, 2, 3], [0, 0, 0, 0], [(0, 1), (2, 3)], [1.0, 1.0])
        q = quality(g, ZeroHeuristic(), [(0, 1), (0, 2)])
        assert q.excluded == 1 and q.mean == 0.0
        e = efficiency(g, ZeroHeuristic(), [(0, 1), (0, 2)])
        assert e.excluded == 1 and e.mean == 1.0


class TestSeparation:
    def test_monotone_and_implication(self, grid_100, short_sample):
        idx = build_lsh_index(grid_100, 9)
        rep = separation_report(idx, short_sample, graph=grid_100)
        seps = [rep[d][0] for d in range(1, 10)]
        assert seps == sorted(seps)
        assert all(rep[d][1] <= rep[d][0] for d in rep)
        assert seps[-1] >= 0.95

    def test_long_bin_level_one_is_geometric(self, grid_100):
        idx = build_lsh_index(grid_100, 3)
        sample = sample_pairs(grid_100, DistanceBin(7500, 9500), 200, seed=5)
        mx = (grid_100.x.min() + grid_100.x.max()) / 2
        my = (grid_100.y.min() + grid_100.y.max()) / 2
        straddle = np.mean([
            (grid_100.x[s] <= mx) != (grid_100.x[t] <= mx) or (grid_100.y[s] <= my) != (grid_100.y[t] <= my)
            for s, t in sample
        ])
        p1 = separation_report(idx, sample, [1])[1][0]
        assert p1 == straddle
        assert p1 >= 0.95


def _config(**kw):
    return BenchConfig(bins=[DistanceBin(200, 600), DistanceBin(600, 1200)],
                       heuristics=("lsh", "gsh", "dijkstra", "exact"), depths=(1, 2, 3, 4), pairs_per_bin=60, **kw)


@pytest.fixture(scope="module")
def report(grid_300):
    return run_benchmark(grid_300, _config(), seed=9)


class TestRunBenchmark:
    def test_row_count_and_columns(self, report):
        assert len(report.rows) == 2 * (4 + 4 + 1 + 1)
        rows = list(csv.reader(io.StringIO(report.to_csv())))
        assert rows[0] == CSV_COLUMNS
        assert len(rows) == 1 + len(report.rows)

    def test_single_row(self, grid_300):
        cfg = BenchConfig(bins=[DistanceBin(200, 600)], heuristics=("lsh",), depths=(2,), pairs_per_bin=10)
        assert len(run_benchmark(grid_300, cfg).rows) == 1

    def test_ranges_and_invariants(self, report):
        for r in report.rows:
            assert 0 <= r.mean_qual <= 1 + 1e-12
            assert 0 < r.mean_eff <= 1
            if r.heuristic in ("lsh", "gsh"):
                assert r.p_determined <= r.p_separated
        for b in (0, 1):
            q = [report.row("lsh", d, b).mean_qual for d in (1, 2, 3, 4)]
            assert q == sorted(q)
            assert report.row("dijkstra", 0, b).mean_qual == 0.0
            assert report.row("exact", 0, b).mean_qual == 1.0

    def test_deterministic(self, grid_300, report):
        assert run_benchmark(grid_300, _config(), seed=9).to_csv() == report.to_csv()

    def test_threads_do_not_change_report(self, grid_300, report):
        assert run_benchmark(grid_300, _config(threads=3), seed=9).to_csv() == report.to_csv()

    def test_json_raw(self, grid_300):
        cfg = BenchConfig(bins=[DistanceBin(200, 600)], heuristics=("gsh",), depths=(1,), pairs_per_bin=5, raw=True)
        doc = json.loads(run_benchmark(grid_300, cfg).to_json())
        assert len(doc["rows"][0]["raw"]["qual"]) == 5
        doc = json.loads(run_benchmark(grid_300, cfg).to_json(raw=False))
        assert "raw" not in doc["rows"][0]

    @pytest.mark.parametrize("kw", [dict(heuristics=("astar",)), dict(depths=(0,)), dict(pairs_per_bin=0),
                                    dict(heuristics=())])
    def test_bad_config(self, grid_300, kw):
        with pytest.raises(ValidationError):
            run_benchmark(grid_300, BenchConfig(bins=[DistanceBin(200, 600)], **kw))
