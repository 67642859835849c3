"""Classification with a trained model.

Inductive: lasso-encode each unseen sample over D and take argmax of B s.
Transductive: argmax over the soft-label matrix F for training samples.
Ties always go to the smallest class index.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .matrix import as_matrix, soft_threshold

ENCODE_TOL = 1e-8
ENCODE_MAX_SWEEPS = 1000


@dataclass
class PredictionReport:
    indices: np.ndarray
    decisions: np.ndarray
    scores: np.ndarray
    accuracy: float | None = None


def lasso_objective(d, y, s, alpha):
    """Per-column ``||y - D s||^2 + 2 alpha |s|_1``."""
    r = y - d @ s
    return np.sum(r * r, axis=0) + 2.0 * alpha * np.abs(s).sum(axis=0)


def encode_batch(d, y, alpha, tol=ENCODE_TOL, max_sweeps=ENCODE_MAX_SWEEPS):
    """Sparse-code every column of ``y`` over the fixed dictionary ``d``.

    Cyclic coordinate descent per column. A column stops once a sweep moves
    none of its entries by more than ``tol`` relative to its largest entry,
    so its result does not depend on which other columns share the batch.
    A flat objective can stall long before the codes settle, hence the test
    on the iterates rather than on the loss.
    """
    d = as_matrix(d, "dictionary")
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        y = y[:, None]
    y = as_matrix(y, "features")
    if y.shape[0] != d.shape[0]:
        raise InvalidArgumentError(f"feature dim {y.shape[0]} does not match dictionary dim {d.shape[0]}")
    if alpha < 0:
        raise InvalidArgumentError(f"alpha must be >= 0, got {alpha}")
    g = d.T @ d
    p = d.T @ y
    k_atoms, m = d.shape[1], y.shape[1]
    s = np.zeros((k_atoms, m))
    active = np.ones(m, dtype=bool)
    for _ in range(max_sweeps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        sa = s[:, idx]
        before = sa.copy()
        pa = p[:, idx]
        for k in range(k_atoms):
            if g[k, k] <= 0:
                sa[k] = 0.0
                continue
            j = pa[k] - g[k] @ sa + g[k, k] * sa[k]
            sa[k] = soft_threshold(j, alpha) / g[k, k]
        s[:, idx] = sa
        moved = np.max(np.abs(sa - before), axis=0)
        done = moved <= tol * np.maximum(np.max(np.abs(sa), axis=0), 1.0)
        active[idx[done]] = False
    return s


def encode(d, y, alpha):
    y = np.asarray(y, dtype=np.float64).ravel()
    return encode_batch(d, y[:, None], alpha)[:, 0]


def _decide(scores):
    # np.argmax returns the first maximum, i.e. the smallest class index
    return np.argmax(scores, axis=0).astype(np.int64)


def evaluate(decisions, truth):
    decisions = np.asarray(decisions)
    truth = np.asarray(truth)
    if decisions.shape != truth.shape or decisions.ndim != 1:
        raise InvalidArgumentError(f"length mismatch: {decisions.shape} vs {truth.shape}")
    if decisions.size < 1:
        raise InvalidArgumentError("cannot evaluate an empty prediction set")
    return float(np.mean(decisions == truth))


def predict_inductive(model, features, alpha, truth=None):
    y = as_matrix(features, "features")
    if not np.any(model.b):
        warnings.warn("classifier is all zeros; every sample falls to class 0", RuntimeWarning)
    codes = encode_batch(model.d, y, alpha)
    scores = model.b @ codes
    decisions = _decide(scores)
    acc = None if truth is None else evaluate(decisions, truth)
    return PredictionReport(np.arange(y.shape[1]), decisions, scores, acc)


def predict_transductive(model, prior=None, truth=None):
    """Argmax of F over training samples; only unlabeled ones when a mask is known.

    ``truth`` is indexed like the full training set.
    """
    f = model.f
    prior = prior if prior is not None else model.prior
    if prior is not None:
        if prior.n_samples != f.shape[1]:
            raise InvalidArgumentError("prior does not match the model's training set")
        idx = np.flatnonzero(~prior.labeled_mask)
    else:
        idx = np.arange(f.shape[1])
    scores = f[:, idx]
    decisions = _decide(scores)
    acc = None
    if truth is not None:
        truth = np.asarray(truth)
        if truth.shape != (f.shape[1],):
            raise InvalidArgumentError("truth must cover every training sample")
        acc = evaluate(decisions, truth[idx])
    return PredictionReport(idx, decisions, scores, acc)
