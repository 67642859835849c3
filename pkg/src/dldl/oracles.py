"""Slow reference computations used to certify the fast solver paths.

Nothing here calls into :mod:`dldl.solver` or :func:`dldl.matrix.soft_threshold`;
each routine is a direct, brute-force transcription of the quantity it
checks. Intended for small instances only.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHypergraphError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_abs_error: float
    tolerance: float

    @property
    def passed(self):
        return self.max_abs_error <= self.tolerance

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: max error {self.max_abs_error:.3g} (tol {self.tolerance:g})"


def certify(name, expected, actual, tolerance):
    err = float(np.max(np.abs(np.asarray(expected, float) - np.asarray(actual, float)), initial=0.0))
    return OracleReport(name, err, tolerance)


def golden_section(fun, lo, hi, tol=1e-13, max_iter=500):
    """Minimize a unimodal scalar function on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if b - a <= tol * (1.0 + abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def _polish(slope, guess, lo, hi, width=1e-5, iters=200):
    """Bisect an increasing ``slope`` near ``guess``; golden section alone stalls at ~sqrt(eps)."""
    a, b = max(lo, guess - width), min(hi, guess + width)
    if slope(a) > 0 or slope(b) < 0:
        return guess
    for _ in range(iters):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if slope(mid) < 0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def scalar_coordinate_minimizer(d_quad, j_lin, alpha):
    """Global minimizer of ``0.5 d s^2 - j s + alpha |s|`` by search on each sign branch."""
    if not d_quad > 0:
        raise ValueError("d_quad must be positive")

    def q(s):
        return 0.5 * d_quad * s * s - j_lin * s + alpha * abs(s)

    bound = (abs(j_lin) + alpha) / d_quad + 1.0
    pos = golden_section(q, 0.0, bound)
    pos = _polish(lambda s: d_quad * s - j_lin + alpha, pos, 0.0, bound)
    neg = golden_section(q, -bound, 0.0)
    neg = _polish(lambda s: d_quad * s - j_lin - alpha, neg, -bound, 0.0)
    return min([0.0, pos, neg], key=q)


def coordinate_quadratic(fun, s, k, n):
    """Recover ``(a, b)`` with ``fun`` restricted to entry ``(k, n)`` equal to ``a t^2 + b t + c``.

    ``fun`` must be quadratic in that entry; three probes determine it exactly.
    """
    probe = s.copy()
    vals = []
    for t in (-1.0, 0.0, 1.0):
        probe[k, n] = t
        vals.append(fun(probe))
    fm, f0, fp = vals
    return 0.5 * (fp + fm - 2.0 * f0), 0.5 * (fp - fm)


def pairwise_smoothness(g, m):
    """Label non-smoothness as the literal weighted pairwise double sum over hyperedges."""
    h = np.asarray(g.incidence, float)
    w = np.asarray(g.edge_weights, float)
    m = np.asarray(m, float)
    n_v, n_e = h.shape
    edge_deg = [sum(h[v, e] for v in range(n_v)) for e in range(n_e)]
    vert_deg = [sum(w[e] * h[v, e] for e in range(n_e)) for v in range(n_v)]
    if min(edge_deg) <= 0 or min(vert_deg) <= 0:
        raise DegenerateHypergraphError("zero degree in pairwise smoothness")
    total = 0.0
    for c in range(m.shape[0]):
        for e in range(n_e):
            for u in range(n_v):
                if h[u, e] == 0:
                    continue
                for v in range(n_v):
                    if h[v, e] == 0:
                        continue
                    diff = m[c, u] / math.sqrt(vert_deg[u]) - m[c, v] / math.sqrt(vert_deg[v])
                    total += w[e] * h[u, e] * h[v, e] / edge_deg[e] * diff * diff
    return 0.5 * total


def finite_difference_gradient(fun, at, h=1e-4):
    """Central-difference gradient of a scalar function of a matrix."""
    at = np.asarray(at, dtype=np.float64)
    grad = np.zeros_like(at)
    probe = at.copy()
    for idx in np.ndindex(at.shape):
        orig = probe[idx]
        probe[idx] = orig + h
        up = fun(probe)
        probe[idx] = orig - h
        down = fun(probe)
        probe[idx] = orig
        grad[idx] = (up - down) / (2.0 * h)
    return grad


def column_subproblem_value(target, basis, codes, k, column):
    trial = basis.copy()
    trial[:, k] = column
    r = target - trial @ codes
    return float(np.sum(r * r))


def projected_gradient_column_solver(target, basis, codes, k, tol=1e-10, max_iter=100000):
    """Minimize ``||T - B S||^2`` over column ``k`` of ``B`` within the unit ball.

    Plain projected gradient with a deliberately short step; returns ``None``
    when the column has zero curvature (its code row is zero).
    """
    row = codes[k]
    curvature = 2.0 * float(row @ row)
    if curvature <= 0:
        return None
    step = 0.5 / curvature
    col = basis[:, k].copy()
    trial = basis.copy()
    for _ in range(max_iter):
        trial[:, k] = col
        grad = -2.0 * (target - trial @ codes) @ row
        nxt = col - step * grad
        norm = np.linalg.norm(nxt)
        if norm > 1.0:
            nxt = nxt / norm
        moved = np.max(np.abs(nxt - col))
        col = nxt
        if moved <= tol:
            break
    return col
