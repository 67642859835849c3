"""Dense numeric primitives used throughout the solver.

Matrices are plain ``float64`` numpy arrays. :func:`as_matrix` is the single
gate that enforces the shape and finiteness contract.
"""
import numpy as np
from scipy import linalg

from .errors import DegenerateColumnError, InvalidArgumentError, SingularSystemError

EPS_NORM = 1e-12
SYMMETRY_TOL = 1e-10


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array with at least one row and column."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2-D, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidArgumentError(f"{name} must be non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgumentError(f"{name} contains non-finite values")
    return m


def soft_threshold(j, alpha):
    """Shrink ``j`` towards zero by ``alpha``.

    Computes ``max(j - alpha, 0) + min(j + alpha, 0)``. Works elementwise on
    arrays; scalar input gives a Python float.
    """
    if not np.isfinite(alpha) or alpha < 0:
        raise InvalidArgumentError(f"alpha must be finite and >= 0, got {alpha}")
    j_arr = np.asarray(j, dtype=np.float64)
    if not np.all(np.isfinite(j_arr)):
        raise InvalidArgumentError("soft_threshold input must be finite")
    out = np.maximum(j_arr - alpha, 0.0) + np.minimum(j_arr + alpha, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def unit_normalize_column(v):
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size < 1:
        raise InvalidArgumentError("cannot normalize an empty vector")
    norm = np.linalg.norm(v)
    if not norm > EPS_NORM:
        raise DegenerateColumnError(f"column norm {norm:.3g} <= {EPS_NORM:g}")
    return v / norm


def solve_spd_system(m, rhs):
    """Solve ``m @ z = rhs`` for symmetric positive-definite ``m`` via Cholesky."""
    m = as_matrix(m, "m")
    rhs = np.asarray(rhs, dtype=np.float64)
    vector_rhs = rhs.ndim == 1
    rhs = as_matrix(rhs[:, None] if vector_rhs else rhs, "rhs")
    n = m.shape[0]
    if m.shape != (n, n):
        raise InvalidArgumentError(f"m must be square, got {m.shape}")
    if rhs.shape[0] != n:
        raise InvalidArgumentError(f"rhs has {rhs.shape[0]} rows, expected {n}")
    if np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise InvalidArgumentError("m is not symmetric")
    try:
        factor = linalg.cho_factor(m, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SingularSystemError(f"matrix is not positive definite: {exc}") from exc
    z = linalg.cho_solve(factor, rhs, check_finite=False)
    return z[:, 0] if vector_rhs else z


def trace_quadratic(lap, m):
    """Return ``tr(lap @ m.T @ m)`` without forming the N x N Gram matrix."""
    lap = as_matrix(lap, "lap")
    m = as_matrix(m, "m")
    n = lap.shape[0]
    if lap.shape != (n, n):
        raise InvalidArgumentError(f"lap must be square, got {lap.shape}")
    if m.shape[1] != n:
        raise InvalidArgumentError(f"m has {m.shape[1]} columns, expected {n}")
    # tr(L M^T M) = sum_{r,s} L_rs (M^T M)_sr = sum_c sum_r M_cr (M L)_cr
    return float(np.sum(m * (m @ lap)))
