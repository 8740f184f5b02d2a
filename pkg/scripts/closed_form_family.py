#!/usr/bin/env python3
"""Sanity run on the 1-point instance where everything is known in closed form.

Prints solver outputs against the analytic trajectory xi(t) = t/(1+2t) (both
coordinates), the limit pair xi* = 1/2, gamma* = e^{-1/2}, and the rescaled
deviation limit d* = -1/4, then fits the dual and primal rates.
"""

import sys

import numpy as np

from uotlab.core import DivergenceSpec, Problem
from uotlab.exact_solver import solve_exact
from uotlab.reg_solver import solve_dual_t
from uotlab.sweep import SweepConfig, run_sweep


def main():
    problem = Problem(
        [[0.0]], [[0.0]], [1.0], [1.0], [[1.0]],
        divergence=DivergenceSpec(kind="kl"), cost_kind="explicit",
    )
    print("t        solver xi      analytic xi    |err|")
    for t in (1.0, 10.0, 100.0, 1e3, 1e4):
        sol = solve_dual_t(problem, t)
        s = t / (1.0 + 2.0 * t)
        err = abs(sol.xi.phi[0] - s)
        print(f"{t:<8g} {sol.xi.phi[0]:.12f} {s:.12f} {err:.2e}")

    exact = solve_exact(problem)
    print(f"xi*    = {exact.xi_star.phi[0]:.12f}  (analytic 0.5)")
    print(f"gamma* = {exact.gamma_star[0, 0]:.12f}  (analytic {np.exp(-0.5):.12f})")

    result = run_sweep(problem, SweepConfig(t_min=10.0, t_max=1e4, n_points=40))
    print(f"d*     = {result.d_star[0]:.12f}  (analytic -0.25)")
    print(f"dual slope   {result.dual_fit.slope:.4f}  (analytic -1)")
    print(f"primal slope {result.primal_fit.slope:.4f}  (analytic -1 here)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
