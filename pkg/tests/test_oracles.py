import numpy as np
import pytest

from conftest import random_hypergraph
from dldl.hypergraph import Hypergraph, compute_laplacian
from dldl.matrix import trace_quadratic
from dldl.oracles import (OracleReport, certify, column_subproblem_value, finite_difference_gradient,
                          golden_section, pairwise_smoothness, projected_gradient_column_solver,
                          scalar_coordinate_minimizer)


@pytest.mark.parametrize("d, j, a, expected", [(1, 2, 0.5, 1.5), (2, 2, 0.5, 0.75), (1, 0.3, 0.5, 0.0),
                                               (1, -2, 0.5, -1.5)])
def test_scalar_coordinate_minimizer(d, j, a, expected):
    assert scalar_coordinate_minimizer(d, j, a) == pytest.approx(expected, abs=1e-8)


def test_golden_section_quadratic():
    assert golden_section(lambda t: (t - 0.3) ** 2, -1, 2) == pytest.approx(0.3, abs=1e-9)


def test_pairwise_smoothness_examples():
    rng = np.random.default_rng(0)
    g = random_hypergraph(rng, 6)
    assert pairwise_smoothness(g, np.zeros((2, 6))) == 0.0
    loops = Hypergraph(incidence=np.eye(5), edge_weights=np.ones(5))
    assert pairwise_smoothness(loops, rng.standard_normal((3, 5))) == 0.0
    m = rng.standard_normal((2, 6))
    assert pairwise_smoothness(g, m) == pytest.approx(trace_quadratic(compute_laplacian(g), m), abs=1e-8)


def test_finite_difference_gradient_examples():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((2, 3))
    np.testing.assert_allclose(finite_difference_gradient(lambda z: np.sum(z**2), m), 2 * m, atol=1e-6)
    lap = rng.standard_normal((3, 3))
    grad = finite_difference_gradient(lambda z: np.trace(lap @ z.T @ z), m)
    np.testing.assert_allclose(grad, m @ (lap + lap.T), atol=1e-5)
    np.testing.assert_array_equal(finite_difference_gradient(lambda z: 3.0, m), np.zeros_like(m))


def test_projected_gradient_interior_matches_least_squares():
    rng = np.random.default_rng(2)
    codes = rng.standard_normal((1, 8)) * 3
    col = np.array([0.2, -0.3, 0.1])
    target = np.outer(col, codes[0])
    out = projected_gradient_column_solver(target, np.zeros((3, 1)), codes, 0)
    np.testing.assert_allclose(out, col, atol=1e-9)


def test_projected_gradient_active_constraint():
    rng = np.random.default_rng(3)
    codes = rng.standard_normal((1, 8))
    target = np.outer([5.0, 1.0, -2.0], codes[0])
    out = projected_gradient_column_solver(target, np.zeros((3, 1)), codes, 0)
    assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(out, np.array([5.0, 1.0, -2.0]) / np.sqrt(30), atol=1e-8)


def test_projected_gradient_flat_subproblem():
    assert projected_gradient_column_solver(np.ones((2, 3)), np.zeros((2, 2)), np.zeros((2, 3)), 1) is None


def test_column_subproblem_value():
    codes = np.array([[1.0, 2.0]])
    assert column_subproblem_value(np.zeros((1, 2)), np.zeros((1, 1)), codes, 0, [1.0]) == 5.0


def test_report():
    r = certify("x", [1.0, 2.0], [1.0, 2.5], 0.1)
    assert isinstance(r, OracleReport) and not r.passed and r.max_abs_error == 0.5
    assert certify("y", [1.0], [1.0 + 1e-9], 1e-6).passed
    assert "FAIL" in str(r)
