"""JSON (de)serialization of problems and solver outputs."""

from __future__ import annotations

import json

import numpy as np

from .core import COST_KINDS, DivergenceSpec, InvalidInput, Problem, build_cost
from .divergence import _ENTROPIES


def problem_to_dict(problem):
    out = {
        "points_x": problem.points_x.tolist(),
        "points_y": problem.points_y.tolist(),
        "mu": problem.mu.tolist(),
        "nu": problem.nu.tolist(),
        "cost": {"kind": problem.cost_kind},
        "divergence": {"kind": problem.divergence.kind},
    }
    if problem.cost_kind == "explicit":
        out["cost"]["matrix"] = problem.cost.tolist()
    div = problem.divergence
    if div.mu_ref is not None or div.nu_ref is not None:
        out["divergence"]["q"] = {
            "mu_ref": np.asarray(div.mu_ref).tolist(),
            "nu_ref": np.asarray(div.nu_ref).tolist(),
        }
    return out


def problem_from_dict(data):
    try:
        points_x = data["points_x"]
        points_y = data["points_y"]
        mu = data["mu"]
        nu = data["nu"]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed problem document: missing {exc}") from None
    cost_spec = data.get("cost", {"kind": "sqeuclidean"})
    kind = cost_spec.get("kind", "sqeuclidean")
    if kind not in COST_KINDS:
        raise InvalidInput(f"unknown cost kind: {kind!r}")
    cost = build_cost(points_x, points_y, kind, matrix=cost_spec.get("matrix"))
    div_spec = data.get("divergence", {"kind": "kl"})
    div_kind = div_spec.get("kind", "kl")
    if div_kind not in _ENTROPIES:
        raise InvalidInput(f"unknown divergence kind: {div_kind!r}")
    qref = div_spec.get("q")
    div = DivergenceSpec(
        kind=div_kind,
        mu_ref=None if qref is None else np.asarray(qref["mu_ref"], float),
        nu_ref=None if qref is None else np.asarray(qref["nu_ref"], float),
    )
    return Problem(points_x, points_y, mu, nu, cost, divergence=div, cost_kind=kind)


def save_problem(problem, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(problem_to_dict(problem), fh, indent=1)
        fh.write("\n")


def load_problem(path):
    with open(path, encoding="utf-8") as fh:
        return problem_from_dict(json.load(fh))


def solution_to_dict(sol):
    return {
        "t": sol.t,
        "phi": sol.xi.phi.tolist(),
        "psi": sol.xi.psi.tolist(),
        "gamma": sol.gamma.tolist(),
        "iters": sol.iters,
        "grad_norm": sol.grad_norm,
        "converged": sol.converged,
        "flags": sol.flags,
    }


def exact_to_dict(exact):
    return {
        "xi_star": {"phi": exact.xi_star.phi.tolist(), "psi": exact.xi_star.psi.tolist()},
        "kappa": exact.kappa.tolist(),
        "I0": [[int(i), int(j)] for i, j in exact.I0],
        "kappa_star_min": None if np.isinf(exact.kappa_star) else exact.kappa_star,
        "m_star": {"row": exact.m_star.row.tolist(), "col": exact.m_star.col.tolist()},
        "gamma_star": exact.gamma_star.tolist(),
        "converged": exact.converged,
        "flags": exact.flags,
    }


def save_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")
