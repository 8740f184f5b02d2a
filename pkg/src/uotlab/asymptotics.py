"""Trajectory asymptotics: rescaled dual deviation, its limit, ODE residual,
saturated-span diagnostics and log-log rate fitting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DualPotential, InvalidInput, apply_A, apply_A_adjoint
from .divergence import F_conj_hess_diag, divergence_for

# sweep errors below this are solver noise and are excluded from rate fits
ERROR_FLOOR = 1e-12


@dataclass
class TrajectoryPoint:
    t: float
    xi: DualPotential
    gamma: np.ndarray
    d: np.ndarray
    dual_err: float
    primal_err: float
    ode_residual: float
    entropy_val: float
    iters: int
    converged: bool
    flags: list
    log_gamma_off_max: float  # max over off-saturated entries of log gamma(t)


@dataclass
class RateFit:
    slope: float
    intercept: float
    r2: float
    t_window: tuple
    n_points: int


def compute_d(xi_t, xi_star, t):
    """Rescaled dual deviation t (xi(t) - xi*), stacked over both clouds."""
    if t <= 0:
        raise InvalidInput("t must be positive")
    return t * (xi_t.stacked - xi_star.stacked)


def _incidence_columns(I0, n_x, n_y):
    B = np.zeros((n_x + n_y, len(I0)))
    for col, (i, j) in enumerate(I0):
        B[i, col] = 1.0
        B[n_x + j, col] = 1.0
    return B


def e0_diagnostics(exact, shape):
    """Basis of the saturated span and the projection residual of m*.

    Returns (dim, relative residual, orthonormal basis) where the basis
    comes from a rank-revealing SVD of the saturated incidence columns.
    """
    n_x, n_y = shape
    B = _incidence_columns(exact.I0, n_x, n_y)
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    rank = int(np.sum(s > s[0] * max(n_x + n_y, len(exact.I0)) * np.finfo(float).eps))
    basis = U[:, :rank]
    m = exact.m_star.stacked
    resid = m - basis @ (basis.T @ m)
    denom = np.linalg.norm(m)
    rel = float(np.linalg.norm(resid) / denom) if denom > 0 else 0.0
    return rank, rel, basis


def solve_d_star(exact, div, shape, max_iters=200):
    """Limit of the rescaled dual deviation.

    First minimizes the strictly convex reduced functional
    -<m*|z> + sum_{saturated} exp((A* z)_{xy}) over the saturated span, then
    selects the minimal weighted-norm point (weight grad^2 F*(-xi*)) on the
    affine solution set.
    """
    n_x, n_y = shape
    if not exact.I0:
        raise InvalidInput("saturated set is empty")
    B = _incidence_columns(exact.I0, n_x, n_y)
    rank, rel, basis = e0_diagnostics(exact, shape)
    if rel > 1e-6:
        raise RuntimeError("optimal marginals do not lie in the saturated span")
    m = exact.m_star.stacked
    Bb = B.T @ basis  # saturated coordinates of the basis vectors
    mb = basis.T @ m
    w = np.zeros(rank)
    for _ in range(max_iters):
        s = np.exp(np.minimum(Bb @ w, 690))
        grad = Bb.T @ s - mb
        if np.max(np.abs(grad)) <= 1e-13 * max(1.0, np.max(np.abs(mb))):
            break
        H = Bb.T @ (s[:, None] * Bb)
        H[np.diag_indices_from(H)] += 1e-14
        step = -np.linalg.solve(H, grad)
        val = float(s.sum() - mb @ w)
        alpha = 1.0
        for _ in range(60):
            trial = w + alpha * step
            tval = float(np.sum(np.exp(np.minimum(Bb @ trial, 690))) - mb @ trial)
            if tval <= val + 1e-4 * alpha * float(grad @ step):
                w = trial
                break
            alpha *= 0.5
        else:
            raise RuntimeError("reduced functional minimization stalled")
    else:
        raise RuntimeError("reduced functional minimization did not converge")
    z0 = basis @ w
    # minimal weighted norm over z0 + (orthogonal complement of the span)
    weights = F_conj_hess_diag(-exact.xi_star.stacked, div)
    U, s_full, _ = np.linalg.svd(B, full_matrices=True)
    N = U[:, rank:]
    if N.shape[1] == 0:
        return z0
    G = N.T @ (weights[:, None] * N)
    rhs = -N.T @ (weights * z0)
    u = np.linalg.solve(G, rhs)
    return z0 + N @ u


def ode_residual(xi, xi_dot, t, problem, div=None):
    """Sup-norm of the trajectory ODE left-hand side at (xi, xi_dot, t)."""
    if t <= 0:
        raise InvalidInput("t must be positive")
    div = divergence_for(problem) if div is None else div
    lhs, _ = _ode_terms(xi, xi_dot, t, problem, div)
    return float(np.max(np.abs(lhs)))


def _ode_terms(xi, xi_dot, t, problem, div):
    """Returns (full left-hand side, inhomogeneous term) of the trajectory ODE."""
    log_g = t * (apply_A_adjoint(xi) - problem.cost)
    gamma = np.exp(np.minimum(log_g, 690))
    dot = np.asarray(xi_dot, dtype=float)
    n_x = problem.n_x
    adj_dot = dot[:n_x, None] + dot[None, n_x:]
    term1 = apply_A(gamma * adj_dot).stacked
    term2 = F_conj_hess_diag(-xi.stacked, div) * dot / t
    term3 = apply_A(gamma * log_g).stacked / (t * t)
    return term1 + term2 + term3, term3


def ode_inhomogeneous_norm(xi, t, problem):
    """Sup-norm of the (1/t^2) A diag(gamma) log(gamma) forcing term."""
    div = divergence_for(problem)
    zero = np.zeros(problem.n_x + problem.n_y)
    _, term3 = _ode_terms(xi, zero, t, problem, div)
    return float(np.max(np.abs(term3)))


def xi_dot_finite_difference(t_prev, xi_prev, t_next, xi_next, t_mid, xi_mid):
    """Second-order central difference on a nonuniform (geometric) grid."""
    h1 = t_mid - t_prev
    h2 = t_next - t_mid
    if h1 <= 0 or h2 <= 0:
        raise InvalidInput("differencing requires ordered adjacent sweep points")
    a, b, c = xi_prev.stacked, xi_mid.stacked, xi_next.stacked
    return (h1 * h1 * c - h2 * h2 * a + (h2 * h2 - h1 * h1) * b) / (
        h1 * h2 * (h1 + h2)
    )


def xi_dot_log_grid(ts, xis, k):
    """High-order derivative estimate d xi / dt at grid index k.

    Assumes ts is (close to) geometric, so log t is uniformly spaced;
    differentiates in log t with a fourth-order central stencil where the
    five-point window fits, third-order one-sided at the first and last
    interior indices, and falls back to the nonuniform three-point formula
    if the grid is not geometric.
    """
    n = len(ts)
    if not 0 < k < n - 1:
        raise InvalidInput("derivative estimate needs an interior index")
    s = np.log(np.asarray(ts, dtype=float))
    steps = np.diff(s)
    h = float(steps.mean())
    uniform = float(np.max(np.abs(steps - h))) <= 1e-8 * h
    stacked = [x.stacked for x in xis]
    if uniform and n >= 5:
        if 2 <= k <= n - 3:
            ds = (
                stacked[k - 2]
                - 8.0 * stacked[k - 1]
                + 8.0 * stacked[k + 1]
                - stacked[k + 2]
            ) / (12.0 * h)
        elif k == 1:
            ds = (
                -2.0 * stacked[0]
                - 3.0 * stacked[1]
                + 6.0 * stacked[2]
                - stacked[3]
            ) / (6.0 * h)
        else:  # k == n - 2
            ds = (
                2.0 * stacked[n - 1]
                + 3.0 * stacked[n - 2]
                - 6.0 * stacked[n - 3]
                + stacked[n - 4]
            ) / (6.0 * h)
        return ds / ts[k]
    return xi_dot_finite_difference(
        ts[k - 1], xis[k - 1], ts[k + 1], xis[k + 1], ts[k], xis[k]
    )


def fit_rate(series, window=None):
    """Least-squares slope of log(err) against log(t).

    `series` is a list of (t, err) pairs; `window` is an inclusive (t_lo,
    t_hi) range, defaulting to the upper half of the grid in log scale.
    Points at or below the numerical floor are excluded.
    """
    pts = [(t, e) for t, e in series if e > ERROR_FLOOR]
    if not pts:
        raise InvalidInput("no usable points above the numerical floor")
    ts = np.array([p[0] for p in pts])
    if window is None:
        log_mid = 0.5 * (np.log(ts.min()) + np.log(ts.max()))
        window = (float(np.exp(log_mid)), float(ts.max()))
        if np.sum((ts >= window[0]) & (ts <= window[1])) < 8:
            # short series: widen to the whole grid rather than refuse
            window = (float(ts.min()), float(ts.max()))
    lo, hi = window
    sel = (ts >= lo) & (ts <= hi)
    if sel.sum() < 8:
        raise InvalidInput("rate fit requires at least 8 usable points")
    x = np.log(ts[sel])
    y = np.log(np.array([p[1] for p in pts])[sel])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(
        slope=float(slope),
        intercept=float(intercept),
        r2=r2,
        t_window=(float(lo), float(hi)),
        n_points=int(sel.sum()),
    )


def fit_linear_decay(series, window=None):
    """Least-squares slope of log-value against t (exponential decay rate).

    `series` is a list of (t, log_value); returns the fitted slope, so a
    value behaving like C exp(-k t) yields approximately -k.
    """
    ts = np.array([p[0] for p in series])
    ys = np.array([p[1] for p in series])
    if window is None:
        log_mid = 0.5 * (np.log(ts.min()) + np.log(ts.max()))
        window = (float(np.exp(log_mid)), float(ts.max()))
    sel = (ts >= window[0]) & (ts <= window[1])
    if sel.sum() < 2:
        raise InvalidInput("decay fit requires at least 2 points")
    slope, _ = np.polyfit(ts[sel], ys[sel], 1)
    return float(slope)
