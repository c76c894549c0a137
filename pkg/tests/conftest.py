import numpy as np
import pytest

import septree
from septree import RoadGraph, generate_synthetic


@pytest.fixture(params=[True, False], ids=["numba", "python"])
def backend(request):
    """Run a test once with compiled kernels and once interpreted."""
    with septree.use_numba(request.param):
        yield request.param


def path_graph(xs, costs):
    n = len(xs)
    edges = [(i, i + 1) for i in range(n - 1)]
    return RoadGraph.from_edges(xs, [0.0] * n, edges, costs)


@pytest.fixture
def small_grid():
    return generate_synthetic(12, 12, seed=3, drop_prob=0.1)


@pytest.fixture(scope="session")
def grid_300():
    g = generate_synthetic(17, 18, seed=5, drop_prob=0.1)
    assert 250 <= g.vertex_count <= 306
    return g


@pytest.fixture(scope="session")
def grid_100():
    return generate_synthetic(100, 100, seed=7, drop_prob=0.05)


def random_pairs(n, count, seed):
    rng = np.random.default_rng(seed)
    return rng.integers(0, n, size=(count, 2))
