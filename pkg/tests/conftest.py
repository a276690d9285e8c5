import numpy as np
import pytest

from ohmgraph import (
    build_graph,
    complete,
    erdos_renyi,
    is_connected,
    laplacian_matrix,
    parallel_paths,
    path,
    random_regular_expander,
    torus,
)


def oracle_pinv_quad(graph, a, b):
    """Independent oracle: quadratic form a^T L^+ b via numpy's dense SVD pinv."""
    Lp = np.linalg.pinv(laplacian_matrix(graph))
    return float(np.asarray(a) @ Lp @ np.asarray(b))


def oracle_pinv_apply(graph, b):
    Lp = np.linalg.pinv(laplacian_matrix(graph))
    return Lp @ np.asarray(b)


def indicator_drop(n, u, v):
    b = np.zeros(n)
    b[u] = 1.0
    b[v] = -1.0
    return b


def single_edge():
    return build_graph([(0, 1, 1.0)])


def triangle():
    return complete(3)


def random_connected_graph(rng, max_n=24, weighted=False):
    """Seeded small connected graph drawn from a mixed pool, for sweeps."""
    kind = rng.integers(5)
    if kind == 0:
        g = torus(int(rng.integers(2, 5)))
    elif kind == 1:
        g = complete(int(rng.integers(3, 7)))
    elif kind == 2:
        g = path(int(rng.integers(3, max_n)))
    elif kind == 3:
        g = random_regular_expander(2 * int(rng.integers(3, max_n // 2)), 4, seed=int(rng.integers(10_000)))
    else:
        while True:
            g = erdos_renyi(int(rng.integers(5, max_n)), 0.4, seed=int(rng.integers(10_000)))
            if is_connected(g):
                break
    if weighted:
        conds = rng.uniform(0.1, 10.0, size=g.n_edges)
        g = build_graph(
            [(t, h, float(c)) for (t, h, _), c in zip(g.edge_list(), conds)],
            n_vertices=g.n_vertices,
        )
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
