import warnings

import numpy as np
import pytest

from dldl.errors import InvalidArgumentError
from dldl.hypergraph import build_knn_hypergraph, compute_laplacian
from dldl.inference import (encode, encode_batch, evaluate, lasso_objective, predict_inductive,
                            predict_transductive)
from dldl.io import build_prior
from dldl.model import HyperParams, ModelState
from dldl.solver import fit, update_f
from dldl.synthetic import gaussian_clusters


def subgradient_oracle(d, y, alpha, iters=200000):
    """Plain subgradient descent with 1/sqrt(t) steps, keeping the best objective seen."""
    s = np.zeros(d.shape[1])
    best = lasso_objective(d, y[:, None], s[:, None], alpha)[0]
    for t in range(1, iters + 1):
        g = -2 * d.T @ (y - d @ s) + 2 * alpha * np.sign(s)
        s = s - (0.05 / np.sqrt(t)) * g
        val = lasso_objective(d, y[:, None], s[:, None], alpha)[0]
        best = min(best, val)
    return best


def test_encode_zero_input():
    d = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 3)))[0]
    np.testing.assert_array_equal(encode(d, np.zeros(4), 0.1), 0.0)


def test_encode_single_atom():
    atom = np.array([0.6, 0.8])
    s = encode(atom[:, None], 2 * atom, 0.5)
    assert s == pytest.approx([1.5], abs=1e-15)


def test_encode_matches_subgradient_oracle():
    rng = np.random.default_rng(1)
    d = rng.standard_normal((4, 3))
    d /= np.linalg.norm(d, axis=0)
    y = rng.standard_normal(4)
    s = encode(d, y, 0.2)
    got = lasso_objective(d, y[:, None], s[:, None], 0.2)[0]
    assert abs(got - subgradient_oracle(d, y, 0.2, iters=50000)) <= 1e-6
    # and it is a genuine minimizer: no coordinate perturbation helps
    for k in range(3):
        for eps in (1e-4, -1e-4):
            probe = s.copy()
            probe[k] += eps
            assert lasso_objective(d, y[:, None], probe[:, None], 0.2)[0] >= got - 1e-12


def test_encode_least_squares_when_alpha_zero():
    rng = np.random.default_rng(2)
    for _ in range(5):
        d = rng.standard_normal((6, 3))
        d /= np.linalg.norm(d, axis=0)
        y = rng.standard_normal(6)
        expected = np.linalg.solve(d.T @ d, d.T @ y)
        np.testing.assert_allclose(encode(d, y, 0.0), expected, atol=1e-6)


def test_encode_sparsity_monotone_in_alpha():
    rng = np.random.default_rng(3)
    ok = 0
    for _ in range(100):
        d = rng.standard_normal((5, 8))
        d /= np.linalg.norm(d, axis=0)
        y = rng.standard_normal(5)
        a1, a2 = sorted(rng.uniform(0, 1, 2))
        nnz1 = np.sum(np.abs(encode(d, y, a1)) > 1e-10)
        nnz2 = np.sum(np.abs(encode(d, y, a2)) > 1e-10)
        ok += nnz1 >= nnz2
    assert ok >= 95


def test_encode_batch_independent_of_batch():
    rng = np.random.default_rng(4)
    d = rng.standard_normal((5, 4))
    d /= np.linalg.norm(d, axis=0)
    y = rng.standard_normal((5, 6))
    batch = encode_batch(d, y, 0.1)
    for m in range(6):
        np.testing.assert_allclose(batch[:, m], encode(d, y[:, m], 0.1), atol=1e-14)


def test_encode_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        encode(np.eye(3), np.ones(4), 0.1)


def _model(b, d):
    c = b.shape[0]
    return ModelState(d=d, s=np.zeros((d.shape[1], 1)), b=b, f=np.zeros((c, 1)))


def test_predict_identity_classifier():
    d = np.eye(3)
    model = _model(np.eye(3), d)
    rep = predict_inductive(model, np.array([[0.0], [0.0], [5.0]]), alpha=0.1)
    assert rep.decisions.tolist() == [2]


def test_predict_zero_input_ties_to_class_zero():
    model = _model(np.eye(3), np.eye(3))
    rep = predict_inductive(model, np.zeros((3, 2)), alpha=0.1)
    assert rep.decisions.tolist() == [0, 0]


def test_predict_untrained_warns():
    model = _model(np.zeros((2, 3)), np.eye(3))
    with pytest.warns(RuntimeWarning):
        rep = predict_inductive(model, np.ones((3, 2)), alpha=0.1)
    assert rep.decisions.tolist() == [0, 0]


def test_predict_score_scaling_invariance():
    rng = np.random.default_rng(5)
    d = rng.standard_normal((4, 5))
    d /= np.linalg.norm(d, axis=0)
    b = rng.standard_normal((3, 5))
    y = rng.standard_normal((4, 10))
    a = predict_inductive(_model(b, d), y, 0.05)
    scaled = predict_inductive(_model(3.7 * b, d), y, 0.05)
    np.testing.assert_array_equal(a.decisions, scaled.decisions)


def test_predict_inductive_matches_recomputation():
    x, truth, prior = gaussian_clusters(seed=1)
    lap = compute_laplacian(build_knn_hypergraph(x, 10))
    hp = HyperParams(dict_size=40, max_iter=5)
    model = fit(x, prior, lap, hp)
    xt, tt, _ = gaussian_clusters(seed=99, per_class=10)
    rep = predict_inductive(model, xt, hp.alpha, truth=tt)

    # independent loop: scalar coordinate descent per sample
    g = model.d.T @ model.d
    decisions = []
    for m in range(xt.shape[1]):
        y = xt[:, m]
        s = np.zeros(hp.dict_size)
        for _ in range(1000):
            before = s.copy()
            for k in range(hp.dict_size):
                j = model.d[:, k] @ y - sum(g[k, l] * s[l] for l in range(hp.dict_size) if l != k)
                s[k] = np.sign(j) * max(abs(j) - hp.alpha, 0.0) / g[k, k]
            if np.max(np.abs(s - before)) <= 1e-8 * max(np.max(np.abs(s)), 1.0):
                break
        decisions.append(int(np.argmax(model.b @ s)))
    np.testing.assert_array_equal(rep.decisions, decisions)
    assert rep.accuracy == evaluate(np.array(decisions), tt)


def test_transductive_examples():
    f = np.array([[0.9, 0.5], [0.1, 0.5]])
    model = ModelState(d=np.eye(1), s=np.zeros((1, 2)), b=np.zeros((2, 1)), f=f)
    rep = predict_transductive(model)
    assert rep.decisions.tolist() == [0, 0]


def test_transductive_reports_unlabeled_only():
    prior = build_prior(np.array([1, -1, 0, -1]), 2)
    model = ModelState(d=np.eye(1), s=np.zeros((1, 4)), b=np.zeros((2, 1)), f=prior.o.copy(), prior=prior)
    rep = predict_transductive(model, truth=np.array([1, 0, 0, 1]))
    assert rep.indices.tolist() == [1, 3]
    assert rep.decisions.tolist() == [0, 0]
    assert rep.accuracy == 0.5


def test_transductive_recovers_labels_with_large_beta():
    prior = build_prior(np.array([1, 0, 2, -1]), 3)
    model = ModelState(d=np.eye(2), s=np.zeros((2, 4)), b=np.zeros((3, 2)), f=prior.o.copy())
    model = update_f(prior, np.zeros((4, 4)), model, HyperParams(beta=2.0**10, dict_size=2))
    np.testing.assert_allclose(model.f, prior.o / 2)
    assert np.argmax(model.f, axis=0)[:3].tolist() == [1, 0, 2]


def test_evaluate():
    assert evaluate([1, 2, 3], [1, 2, 3]) == 1.0
    assert evaluate([0, 0], [1, 1]) == 0.0
    assert evaluate([0, 1, 1, 0], [0, 1, 0, 0]) == 0.75
    with pytest.raises(InvalidArgumentError):
        evaluate([0, 1], [0])
    with pytest.raises(InvalidArgumentError):
        evaluate([], [])


def test_no_warning_for_trained_classifier():
    model = _model(np.eye(2), np.eye(2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        predict_inductive(model, np.ones((2, 1)), 0.1)


def test_encode_objective_monotone_across_sweeps():
    rng = np.random.default_rng(6)
    d = rng.standard_normal((5, 7))
    y = rng.standard_normal((5, 3))
    vals = [lasso_objective(d, y, encode_batch(d, y, 0.1, max_sweeps=t), 0.1) for t in range(1, 30)]
    assert np.all(np.diff(vals, axis=0) <= 1e-12)
