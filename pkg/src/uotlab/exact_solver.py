"""Ground-truth solver for the unregularized dual and the limit plan.

The constrained dual  min F*(-xi)  s.t.  A* xi <= c  is solved by a
log-barrier interior-point method followed by an active-set polish that
drives the KKT residual to machine precision.  From the optimizer we read
off the saturated set, the slack matrix, the common optimal marginals
m* = grad F*(-xi*), and finally the minimal-entropy optimal plan by a
support-masked scaling iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .core import DualPotential, InvalidInput, apply_A, apply_A_adjoint, Marginals
from .divergence import (
    F_conj,
    F_conj_grad,
    F_conj_hess_diag,
    F_value,
    divergence_for,
)


class DegenerateInstance(RuntimeError):
    """No saturated constraint at the dual optimum."""


@dataclass
class ExactConfig:
    barrier_t0: float = 1.0
    barrier_factor: float = 10.0
    barrier_gap: float = 1e-10
    inner_tol: float = 1e-11
    max_inner_iters: int = 100
    feas_tol: float = 1e-8
    kkt_tol: float = 1e-9
    sat_tol: float | None = None  # default max(1e-7, 1e-6 * ||c||_inf)
    proj_residual_tol: float = 1e-10
    max_scaling_iters: int = 200_000


@dataclass
class ExactSolution:
    xi_star: DualPotential
    kappa: np.ndarray
    I0: list
    kappa_star: float
    m_star: Marginals
    gamma_star: np.ndarray
    lam: np.ndarray  # KKT multipliers (a primal optimizer, support in I0)
    converged: bool
    flags: list = field(default_factory=list)


def _sat_tol(problem, config):
    if config.sat_tol is not None:
        return config.sat_tol
    return max(1e-7, 1e-6 * float(np.max(problem.cost, initial=0.0)))


def _slack(xi, problem):
    return problem.cost - apply_A_adjoint(xi)


def _barrier_minimize(problem, div, config):
    """Central-path interior point for min F*(-xi) s.t. A* xi <= c."""
    n_x, n_y = problem.n_x, problem.n_y
    n = n_x + n_y
    # strictly feasible start: A* xi = -2 < c since c >= 0
    xi = DualPotential(-np.ones(n_x), -np.ones(n_y))
    tau = config.barrier_t0
    n_cons = n_x * n_y
    flags = []
    while True:
        for _ in range(config.max_inner_iters):
            kappa = _slack(xi, problem)
            inv_k = 1.0 / kappa
            grad = -F_conj_grad(-xi.stacked, div) + apply_A(inv_k).stacked / tau
            if np.max(np.abs(grad)) <= config.inner_tol * max(1.0, tau):
                break
            w = inv_k * inv_k / tau
            H = np.zeros((n, n))
            H[:n_x, :n_x] = np.diag(w.sum(axis=1))
            H[n_x:, n_x:] = np.diag(w.sum(axis=0))
            H[:n_x, n_x:] = w
            H[n_x:, :n_x] = w.T
            H[np.diag_indices_from(H)] += F_conj_hess_diag(-xi.stacked, div)
            try:
                cf = scipy.linalg.cho_factor(H, check_finite=False)
                step = -scipy.linalg.cho_solve(cf, grad, check_finite=False)
            except np.linalg.LinAlgError:
                H[np.diag_indices_from(H)] += 1e-10 * max(np.trace(H) / n, 1.0)
                step = -np.linalg.solve(H, grad)
                flags.append("barrier-ridge")
            # fraction-to-boundary cap, then Armijo on the barrier objective
            dslack = apply_A_adjoint(DualPotential.from_stacked(step, n_x))
            hurting = dslack > 0
            alpha = 1.0
            if np.any(hurting):
                alpha = min(1.0, 0.99 * float(np.min(kappa[hurting] / dslack[hurting])))
            base = F_conj(-xi.stacked, div) - float(np.sum(np.log(kappa))) / tau
            slope = float(grad @ step)
            accepted = False
            for _ in range(60):
                trial = DualPotential.from_stacked(xi.stacked + alpha * step, n_x)
                tk = _slack(trial, problem)
                if np.all(tk > 0):
                    tval = F_conj(-trial.stacked, div) - float(np.sum(np.log(tk))) / tau
                    if tval <= base + 1e-4 * alpha * slope:
                        accepted = True
                        break
                alpha *= 0.5
            if not accepted:
                flags.append("barrier-linesearch-stalled")
                break
            xi = trial
        if n_cons / tau < config.barrier_gap:
            break
        tau *= config.barrier_factor
    kappa = _slack(xi, problem)
    lam = 1.0 / (tau * kappa)
    return xi, lam, flags


def _polish(problem, div, xi, I0_mask, config):
    """Newton on the KKT system of min F*(-xi) s.t. (A* xi)_{I0} = c_{I0}.

    Drops constraints whose multipliers come out negative and retries, so a
    slightly over-greedy saturation threshold self-corrects.
    """
    n_x, n_y = problem.n_x, problem.n_y
    n = n_x + n_y
    mask = I0_mask.copy()
    for _ in range(mask.sum() + 1):
        idx = np.argwhere(mask)
        k = len(idx)
        if k == 0:
            return None
        B = np.zeros((n, k))
        for col, (i, j) in enumerate(idx):
            B[i, col] = 1.0
            B[n_x + j, col] = 1.0
        c_act = problem.cost[mask]
        x = xi.stacked.copy()
        lam = np.zeros(k)
        ok = False
        for _ in range(100):
            g1 = -F_conj_grad(-x, div) + B @ lam
            g2 = B.T @ x - c_act
            res = max(np.max(np.abs(g1)), np.max(np.abs(g2)))
            if res <= 1e-13 * max(1.0, np.max(np.abs(c_act), initial=1.0)):
                ok = True
                break
            D = F_conj_hess_diag(-x, div)
            KKT = np.zeros((n + k, n + k))
            KKT[:n, :n] = np.diag(D)
            KKT[:n, n:] = B
            KKT[n:, :n] = B.T
            rhs = -np.concatenate([g1, g2])
            sol, *_ = scipy.linalg.lstsq(KKT, rhs, check_finite=False, lapack_driver="gelsd")
            x = x + sol[:n]
            lam = lam + sol[n:]
        if not ok:
            return None
        neg = lam < -1e-12
        if not np.any(neg):
            lam_full = np.zeros((n_x, n_y))
            lam_full[mask] = np.maximum(lam, 0.0)
            xi_new = DualPotential.from_stacked(x, n_x)
            if np.min(_slack(xi_new, problem)) < -config.feas_tol:
                return None
            return xi_new, lam_full
        drop = mask.copy()
        drop[tuple(idx[np.argmin(lam)])] = False
        mask = drop
    return None


def solve_dual_exact(problem, config=None):
    """Minimizer of F*(-xi) over the polyhedron A* xi <= c."""
    xi, _, _ = _solve_dual_kkt(problem, config)
    return xi


def _solve_dual_kkt(problem, config=None):
    """Dual minimizer together with KKT multipliers and diagnostic flags."""
    config = config or ExactConfig()
    div = divergence_for(problem)
    xi, lam, flags = _barrier_minimize(problem, div, config)
    sat = _sat_tol(problem, config)
    kappa = _slack(xi, problem)
    polished = _polish(problem, div, xi, kappa <= sat, config)
    if polished is not None:
        xi, lam_full = polished
    else:
        flags.append("polish-failed")
        lam_full = lam
    return xi, lam_full, flags


def saturated_set(xi_star, problem, sat_tol=None):
    """Slack matrix, saturated index set and the minimal off-set slack."""
    if sat_tol is None:
        sat_tol = max(1e-7, 1e-6 * float(np.max(problem.cost, initial=0.0)))
    kappa = _slack(xi_star, problem)
    if np.min(kappa) < -10 * sat_tol:
        raise InvalidInput("xi_star is infeasible beyond tolerance")
    mask = kappa <= sat_tol
    I0 = [(int(i), int(j)) for i, j in np.argwhere(mask)]
    if not I0:
        raise DegenerateInstance("no saturated constraint at the dual optimum")
    off = kappa[~mask]
    kappa_star = float(off.min()) if off.size else math.inf
    return I0, kappa, kappa_star


def optimal_marginals(xi_star, div):
    """Common marginal vector of every primal optimizer: grad F*(-xi*)."""
    n = xi_star.phi.size
    m = F_conj_grad(-xi_star.stacked, div)
    return Marginals(m[:n], m[n:])


def minimal_entropy_plan(I0, m_star, shape, init=None, config=None):
    """Entropy-minimal plan with marginals m_star supported on I0.

    Support-masked alternating scaling; falls back to Newton on the
    restricted dual when scaling stagnates.
    """
    config = config or ExactConfig()
    n_x, n_y = shape
    mask = np.zeros(shape, dtype=bool)
    for i, j in I0:
        mask[i, j] = True
    M = mask.astype(float)
    m1 = np.maximum(m_star.row, 0.0)
    m2 = np.maximum(m_star.col, 0.0)
    rows = m1 > 0
    cols = m2 > 0
    tol = config.proj_residual_tol
    scale = max(m1.sum(), m2.sum(), 1.0)

    v = np.ones(n_y)
    gamma = None
    for _ in range(config.max_scaling_iters):
        Mv = M @ v
        u = np.divide(m1, Mv, out=np.zeros(n_x), where=rows & (Mv > 0))
        Mu = M.T @ u
        v = np.divide(m2, Mu, out=np.zeros(n_y), where=cols & (Mu > 0))
        gamma = u[:, None] * M * v[None, :]
        marg = apply_A(gamma)
        err = max(np.max(np.abs(marg.row - m1)), np.max(np.abs(marg.col - m2)))
        if err <= tol * scale:
            return gamma

    gamma_newton = _restricted_dual_newton(mask, m1, m2, tol * scale)
    if gamma_newton is not None:
        return gamma_newton
    raise RuntimeError("minimal-entropy projection did not converge")


def _restricted_dual_newton(mask, m1, m2, tol):
    """Newton fallback: minimize sum_{I0} exp((A* eta)_{xy}) - <m | eta>."""
    n_x, n_y = mask.shape
    n = n_x + n_y
    m = np.concatenate([m1, m2])
    eta = np.zeros(n)
    for _ in range(200):
        E = np.where(mask, np.exp(np.minimum(eta[:n_x, None] + eta[None, n_x:], 690)), 0.0)
        grad = apply_A(E).stacked - m
        if np.max(np.abs(grad)) <= tol:
            return E
        H = np.zeros((n, n))
        H[:n_x, :n_x] = np.diag(E.sum(axis=1))
        H[n_x:, n_x:] = np.diag(E.sum(axis=0))
        H[:n_x, n_x:] = E
        H[n_x:, :n_x] = E.T
        H[np.diag_indices_from(H)] += 1e-12
        try:
            step = -np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            return None
        # plain backtracking on the dual objective
        val = float(E.sum() - m @ eta)
        alpha = 1.0
        for _ in range(60):
            trial = eta + alpha * step
            Et = np.where(
                mask, np.exp(np.minimum(trial[:n_x, None] + trial[None, n_x:], 690)), 0.0
            )
            tval = float(Et.sum() - m @ trial)
            if tval <= val - 1e-4 * alpha * float(grad @ -step):
                eta = trial
                break
            alpha *= 0.5
        else:
            return None
    return None


def solve_exact(problem, config=None):
    """Full exact pipeline: dual optimizer, saturated set, marginals, limit plan."""
    config = config or ExactConfig()
    div = divergence_for(problem)
    xi_star, lam, flags = _solve_dual_kkt(problem, config)
    I0, kappa, kappa_star = saturated_set(xi_star, problem, _sat_tol(problem, config))
    m_star = optimal_marginals(xi_star, div)
    gamma_star = minimal_entropy_plan(
        I0, m_star, (problem.n_x, problem.n_y), init=lam, config=config
    )
    converged = "polish-failed" not in flags and "barrier-linesearch-stalled" not in flags
    return ExactSolution(
        xi_star=xi_star,
        kappa=kappa,
        I0=I0,
        kappa_star=kappa_star,
        m_star=m_star,
        gamma_star=gamma_star,
        lam=lam,
        converged=converged,
        flags=flags,
    )


def brute_force_primal(problem, n_restarts=20, seed=0):
    """Oracle-grade direct minimization of <c|gamma> + F(A gamma) over gamma >= 0.

    Bound-constrained quasi-Newton from many random starts plus a polishing
    pass; best-found semantics, intended for instances with at most 9 cells.
    """
    n_x, n_y = problem.n_x, problem.n_y
    if n_x * n_y > 9:
        raise InvalidInput("brute-force oracle is limited to 9 plan entries")
    div = divergence_for(problem)
    c = problem.cost.ravel()
    q = problem.q
    ent = div.entropy

    def objective(g):
        gamma = g.reshape(n_x, n_y)
        p = apply_A(gamma).stacked
        return float(c @ g) + F_value(p, div)

    def grad(g):
        gamma = g.reshape(n_x, n_y)
        p = apply_A(gamma).stacked
        ratio = np.maximum(p, 1e-300) / q
        if ent.name.startswith("kl"):
            dF = np.log(ratio)
        elif ent.name == "quadratic":
            dF = ratio - 1.0
        else:
            h = 1e-7
            dF = np.array(
                [
                    (F_value(p + h * e, div) - F_value(p - h * e, div)) / (2 * h)
                    for e in np.eye(p.size)
                ]
            )
        mat = dF[:n_x, None] + dF[None, n_x:]
        return c + mat.ravel()

    rng = np.random.default_rng(seed)
    total = max(problem.mu.sum() + problem.nu.sum(), 1.0)
    best_g, best_val = None, math.inf
    starts = [np.full(n_x * n_y, total / (2 * n_x * n_y))]
    starts += [rng.uniform(1e-3, total, n_x * n_y) for _ in range(n_restarts)]
    bounds = [(0.0, None)] * (n_x * n_y)
    for g0 in starts:
        res = scipy.optimize.minimize(
            objective,
            g0,
            jac=grad,
            bounds=bounds,
            method="L-BFGS-B",
            options={"maxiter": 2000, "ftol": 1e-16, "gtol": 1e-12},
        )
        if res.fun < best_val:
            best_val, best_g = res.fun, res.x
    # polishing pass from the incumbent
    res = scipy.optimize.minimize(
        objective,
        best_g,
        jac=grad,
        bounds=bounds,
        method="L-BFGS-B",
        options={"maxiter": 5000, "ftol": 1e-18, "gtol": 1e-14},
    )
    if res.fun < best_val:
        best_val, best_g = res.fun, res.x
    return best_g.reshape(n_x, n_y)
