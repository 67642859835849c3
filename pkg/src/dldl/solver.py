"""Alternating minimization for dynamic-label dictionary learning.

The objective minimized by :func:`fit` is::

    ||X - DS||^2 + 2 alpha |S|_1 + delta tr(L S^T S)
        + beta ||F - BS||^2 + beta ||F - O||^2 + tr(L F^T F)

subject to unit-ball constraints on the columns of D and B, where L is the
normalized hypergraph Laplacian. The label-smoothness term carries weight 1
so that the closed-form F update is the exact block minimizer.

:func:`fit_fixed_label` drops F and instead fits B against the one-hot
labels of the labeled columns only::

    ||X - DS||^2 + 2 alpha |S|_1 + beta ||E - B S_l||^2 + delta tr(L S^T S)
"""
import logging
from dataclasses import replace

import numpy as np

from .errors import ConsistencyError, InvalidArgumentError
from .matrix import EPS_NORM, as_matrix, soft_threshold, solve_spd_system, trace_quadratic
from .model import ModelState

log = logging.getLogger(__name__)

DESCENT_SLACK = 1e-9


def _check_problem(x, prior, lap):
    x = as_matrix(x, "features")
    n = x.shape[1]
    if prior is not None and prior.n_samples != n:
        raise InvalidArgumentError(f"prior covers {prior.n_samples} samples, features have {n}")
    if lap is not None:
        lap = as_matrix(lap, "laplacian")
        if lap.shape != (n, n):
            raise InvalidArgumentError(f"laplacian shape {lap.shape} does not match {n} samples")
    return x, lap


def init_state(x, prior, hp, init_dict=None):
    """Random-atom initialization: S = 0, B = 0, F = O.

    Atoms are ``dict_size`` distinct training samples (unit-normalized) drawn
    with ``hp.seed``; when there are fewer samples than atoms the dictionary
    is unit Gaussian columns instead. ``init_dict`` overrides the draw.
    """
    x, _ = _check_problem(x, prior, None)
    dim, n = x.shape
    k = hp.dict_size
    rng = np.random.default_rng(hp.seed)
    if init_dict is not None:
        d = as_matrix(init_dict, "init_dict").copy()
        if d.shape != (dim, k):
            raise InvalidArgumentError(f"init_dict must be {(dim, k)}, got {d.shape}")
        norms = np.linalg.norm(d, axis=0)
        if np.any(norms > 1 + 1e-12):
            raise InvalidArgumentError("init_dict columns must lie in the unit ball")
    else:
        if n >= k:
            d = x[:, rng.choice(n, size=k, replace=False)].copy()
        else:
            d = rng.standard_normal((dim, k))
        norms = np.linalg.norm(d, axis=0)
        dead = norms <= EPS_NORM
        if np.any(dead):
            # all-zero samples cannot serve as atoms
            d[:, dead] = rng.standard_normal((dim, int(dead.sum())))
            norms = np.linalg.norm(d, axis=0)
        d = d / norms
    c = prior.n_classes
    return ModelState(
        d=d,
        s=np.zeros((k, n)),
        b=np.zeros((c, k)),
        f=prior.o.copy(),
        prior=prior,
    )


def objective_terms(x, prior, lap, state, hp):
    """Individual objective terms, keyed by name."""
    x, lap = _check_problem(x, prior, lap)
    d, s, b, f = state.d, state.s, state.b, state.f
    if d.shape[0] != x.shape[0] or s.shape != (d.shape[1], x.shape[1]):
        raise InvalidArgumentError("model dimensions do not match the data")
    if b.shape != (prior.n_classes, d.shape[1]) or f.shape != prior.o.shape:
        raise InvalidArgumentError("classifier or label dimensions do not match the prior")
    return {
        "reconstruction": float(np.sum((x - d @ s) ** 2)),
        "sparsity": 2.0 * hp.alpha * float(np.abs(s).sum()),
        "code_smoothness": hp.delta * trace_quadratic(lap, s),
        "label_fit": hp.beta * float(np.sum((f - b @ s) ** 2)),
        "prior_fit": hp.beta * float(np.sum((f - prior.o) ** 2)),
        "label_smoothness": trace_quadratic(lap, f),
    }


def objective_value(x, prior, lap, state, hp):
    return sum(objective_terms(x, prior, lap, state, hp).values())


def fixed_label_objective(x, prior, lap, state, hp):
    x, lap = _check_problem(x, prior, lap)
    mask = prior.labeled_mask
    d, s, b = state.d, state.s, state.b
    e = prior.o[:, mask]
    return (
        float(np.sum((x - d @ s) ** 2))
        + 2.0 * hp.alpha * float(np.abs(s).sum())
        + hp.beta * float(np.sum((e - b @ s[:, mask]) ** 2))
        + hp.delta * trace_quadratic(lap, s)
    )


def _shrink(j, alpha):
    if j > alpha:
        return j - alpha
    if j < -alpha:
        return j + alpha
    return 0.0


class _CodeSystem:
    """Per-coordinate quadratic data for the S subproblem.

    Columns flagged in ``label_cols`` carry the classifier term
    ``beta ||T - B S||^2``; the remaining columns only see reconstruction.
    """

    def __init__(self, x, lap, d, b, target, beta, delta, label_cols=None):
        n = x.shape[1]
        self.g_plain = d.T @ d
        self.p_plain = d.T @ x
        self.g_label = self.g_plain + beta * (b.T @ b)
        p_label = self.p_plain + beta * (b.T @ target) if beta else self.p_plain
        if label_cols is None:
            label_cols = np.ones(n, dtype=bool)
        self.label_cols = label_cols
        self.p = np.where(label_cols[None, :], p_label, self.p_plain)
        self.lap = lap
        self.delta = delta
        self.lap_diag = np.diag(lap).copy()

    def gram(self, n):
        return self.g_label if self.label_cols[n] else self.g_plain

    def denominator(self, k, n):
        return self.gram(n)[k, k] + self.delta * self.lap_diag[n]

    def linear_term(self, s, k, n):
        """The shrinkage argument J for entry (k, n) given the current codes."""
        g = self.gram(n)
        cross = g[k] @ s[:, n] - g[k, k] * s[k, n]
        smooth = self.lap[n] @ s[k] - self.lap[n, n] * s[k, n]
        return self.p[k, n] - cross - self.delta * smooth


def _sweep_codes(system, s, alpha, coords=None):
    """In-place Gauss-Seidel pass over entries of ``s``; returns the zero-denominator count."""
    degenerate = 0
    if coords is not None:
        for k, n in coords:
            den = system.denominator(k, n)
            if den <= 0:
                s[k, n] = 0.0
                degenerate += 1
                continue
            s[k, n] = _shrink(system.linear_term(s, k, n), alpha) / den
        return degenerate

    kdim, n = s.shape
    lab = system.label_cols
    coupled = system.delta > 0 and np.any(system.lap - np.diag(system.lap_diag))
    for k in range(kdim):
        # rows other than k are frozen while row k is swept
        g_row = np.where(lab, system.g_label[k] @ s - system.g_label[k, k] * s[k],
                         system.g_plain[k] @ s - system.g_plain[k, k] * s[k])
        c = system.p[k] - g_row
        den = np.where(lab, system.g_label[k, k], system.g_plain[k, k]) + system.delta * system.lap_diag
        bad = den <= 0
        degenerate += int(bad.sum())
        safe = np.where(bad, 1.0, den)
        row = s[k]
        if not coupled:
            row[:] = np.where(bad, 0.0, soft_threshold(c, alpha) / safe)
            continue
        lap, dw = system.lap, system.delta
        for j in range(n):
            if bad[j]:
                row[j] = 0.0
                continue
            arg = c[j] - dw * (lap[j] @ row - lap[j, j] * row[j])
            row[j] = _shrink(arg, alpha) / safe[j]
    return degenerate


def update_s(x, lap, state, hp, coords=None):
    """One Gauss-Seidel sweep of exact coordinate minimizations over S.

    Entries are visited atom-major (``k`` outer, sample ``n`` inner), each
    one using the freshest values of all others. ``coords`` restricts the
    sweep to the given ``(k, n)`` entries, in that order.
    """
    x, lap = _check_problem(x, None, lap)
    s = state.s.copy()
    system = _CodeSystem(x, lap, state.d, state.b, state.f, hp.beta, hp.delta)
    bad = _sweep_codes(system, s, hp.alpha, coords)
    new = replace(state, s=s, notes=list(state.notes))
    if bad:
        new.note("update_s: zero denominator, affected codes set to 0")
    return new


def _update_columns(target, basis, codes, name, state):
    """Blockwise coordinate descent over the columns of ``basis``.

    Column k becomes the normalized residual correlation
    ``(T s_k^T - B~ S s_k^T) / ||.||``. A candidate that would raise the
    column subproblem value (possible only when the current column is
    strictly inside the unit ball) is rejected and the column kept.
    """
    basis = basis.copy()
    ts = target @ codes.T
    ss = codes @ codes.T
    for k in range(basis.shape[1]):
        a = ss[k, k]
        r = ts[:, k] - basis @ ss[:, k] + basis[:, k] * a
        norm = np.linalg.norm(r)
        if not norm > EPS_NORM:
            state.note(f"{name}: column {k} unused, kept unchanged")
            continue
        current = basis[:, k]
        value_now = a * float(current @ current) - 2.0 * float(current @ r)
        value_new = a - 2.0 * norm
        if value_new <= value_now:
            basis[:, k] = r / norm
        else:
            state.note(f"{name}: column {k} kept, normalized update would not descend")
    return basis


def update_d(x, state):
    x = as_matrix(x, "features")
    new = replace(state, notes=list(state.notes))
    new.d = _update_columns(x, state.d, state.s, "update_d", new)
    return new


def update_b(state, hp):
    new = replace(state, notes=list(state.notes))
    new.b = _update_columns(state.f, state.b, state.s, "update_b", new)
    return new


def update_f(prior, lap, state, hp):
    """Closed-form soft-label update: solve ``F (L + 2 beta I) = beta (BS + O)``."""
    new = replace(state, notes=list(state.notes))
    if hp.beta == 0:
        new.note("update_f: beta = 0, soft labels left unchanged")
        return new
    lap = as_matrix(lap, "laplacian")
    rhs = hp.beta * (state.b @ state.s + prior.o)
    system = lap + 2.0 * hp.beta * np.eye(lap.shape[0])
    new.f = solve_spd_system(system, rhs.T).T
    return new


def _stop(prev, cur, hp, history):
    if cur > prev + DESCENT_SLACK * (1.0 + abs(prev)):
        raise ConsistencyError(
            f"objective increased from {prev!r} to {cur!r} at iteration {len(history) + 1}",
            history + [cur],
        )
    history.append(cur)
    return (prev - cur) / max(prev, 1e-12) < hp.rel_tol


def fit(x, prior, lap, hp, init_dict=None):
    """Minimize the dynamic-label objective by alternating S, D, B, F updates.

    Stops when the relative decrease of one full iteration drops below
    ``hp.rel_tol`` or after ``hp.max_iter`` iterations.
    """
    x, lap = _check_problem(x, prior, lap)
    state = init_state(x, prior, hp, init_dict)
    prev = objective_value(x, prior, lap, state, hp)
    state.initial_loss = prev
    history = []
    for it in range(hp.max_iter):
        state = update_s(x, lap, state, hp)
        state = update_d(x, state)
        state = update_b(state, hp)
        state = update_f(prior, lap, state, hp)
        cur = objective_value(x, prior, lap, state, hp)
        log.debug("iteration %d objective %.12g", it + 1, cur)
        if _stop(prev, cur, hp, history):
            break
        prev = cur
    state.loss_history = history
    return state


def update_s_fixed(x, prior, lap, state, hp, coords=None):
    x, lap = _check_problem(x, prior, lap)
    s = state.s.copy()
    system = _CodeSystem(x, lap, state.d, state.b, prior.o, hp.beta, hp.delta,
                         label_cols=prior.labeled_mask)
    bad = _sweep_codes(system, s, hp.alpha, coords)
    new = replace(state, s=s, notes=list(state.notes))
    if bad:
        new.note("update_s: zero denominator, affected codes set to 0")
    return new


def update_b_fixed(prior, state):
    mask = prior.labeled_mask
    new = replace(state, notes=list(state.notes))
    new.b = _update_columns(prior.o[:, mask], state.b, state.s[:, mask], "update_b", new)
    return new


def fit_fixed_label(x, prior, lap, hp, init_dict=None):
    """Ablation: same alternation with F replaced by the fixed one-hot labels.

    The returned state stores ``B @ S`` in ``f``.
    """
    x, lap = _check_problem(x, prior, lap)
    if prior.n_labeled < 1:
        raise InvalidArgumentError("fixed-label training needs at least one labeled sample")
    state = init_state(x, prior, hp, init_dict)
    state.variant = "fixed"
    prev = fixed_label_objective(x, prior, lap, state, hp)
    state.initial_loss = prev
    history = []
    for it in range(hp.max_iter):
        state = update_s_fixed(x, prior, lap, state, hp)
        state = update_d(x, state)
        state = update_b_fixed(prior, state)
        cur = fixed_label_objective(x, prior, lap, state, hp)
        log.debug("iteration %d fixed-label objective %.12g", it + 1, cur)
        if _stop(prev, cur, hp, history):
            break
        prev = cur
    state.loss_history = history
    state.f = state.b @ state.s
    return state
