import numpy as np
import pytest

from dldl.hypergraph import Hypergraph, build_knn_hypergraph, compute_laplacian
from dldl.io import build_prior
from dldl.model import HyperParams
from dldl.solver import init_state


def random_hypergraph(rng, n, n_edges=None, density=0.4):
    n_edges = n_edges or n
    h = rng.uniform(0.05, 1.0, (n, n_edges)) * (rng.random((n, n_edges)) < density)
    # guarantee no empty hyperedge and no isolated vertex
    h[rng.integers(0, n, n_edges), np.arange(n_edges)] = rng.uniform(0.1, 1.0, n_edges)
    h[np.arange(n), rng.integers(0, n_edges, n)] = rng.uniform(0.1, 1.0, n)
    return Hypergraph(incidence=h, edge_weights=rng.uniform(0.5, 2.0, n_edges))


def random_instance(seed, dim=None, n=None, k=None, c=None, alpha=None, beta=None, delta=None):
    """Small random problem with a partially labeled prior and a kNN Laplacian."""
    rng = np.random.default_rng(seed)
    dim = dim or int(rng.integers(2, 9))
    n = n or int(rng.integers(4, 13))
    k = k or int(rng.integers(1, 6))
    c = c or int(rng.integers(1, 4))
    grid = [0.0, 2.0**-4, 1.0]
    hp = HyperParams(
        alpha=grid[rng.integers(3)] if alpha is None else alpha,
        beta=grid[rng.integers(3)] if beta is None else beta,
        delta=grid[rng.integers(3)] if delta is None else delta,
        dict_size=k, knn=min(3, n - 1), max_iter=5, seed=seed,
    )
    x = rng.standard_normal((dim, n))
    labels = np.where(rng.random(n) < 0.5, rng.integers(0, c, n), -1)
    prior = build_prior(labels, c)
    lap = compute_laplacian(build_knn_hypergraph(x, hp.knn))
    return x, prior, lap, hp


def random_state(seed, x, prior, hp):
    """Non-trivial state: random codes, classifier and labels on top of the init."""
    rng = np.random.default_rng(seed + 1000)
    state = init_state(x, prior, hp)
    state.s = rng.standard_normal(state.s.shape) * (rng.random(state.s.shape) < 0.7)
    b = rng.standard_normal(state.b.shape)
    state.b = b / np.maximum(np.linalg.norm(b, axis=0), 1.0)
    state.f = rng.standard_normal(state.f.shape)
    return state


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
