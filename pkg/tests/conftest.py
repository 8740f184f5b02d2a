"""Shared fixtures: tiny closed-form instances and random problem factories."""

import numpy as np
import pytest

from uotlab.core import DivergenceSpec, Problem


def make_1x1(c=1.0, kind="kl", mass=1.0):
    """The 1-point instance with every quantity available in closed form."""
    return Problem(
        points_x=[[0.0]],
        points_y=[[0.0]],
        mu=[mass],
        nu=[mass],
        cost=[[c]],
        divergence=DivergenceSpec(kind=kind),
        cost_kind="explicit",
    )


def random_problem(rng, n_x=None, n_y=None, kind="kl", max_n=3):
    """Small random instance with strictly positive weights and O(1) costs."""
    n_x = n_x or int(rng.integers(1, max_n + 1))
    n_y = n_y or int(rng.integers(1, max_n + 1))
    px = rng.random((n_x, 2))
    py = rng.random((n_y, 2))
    mu = rng.uniform(0.3, 2.0, n_x)
    nu = rng.uniform(0.3, 2.0, n_y)
    cost = rng.uniform(0.1, 2.0, (n_x, n_y))
    return Problem(
        px, py, mu, nu, cost,
        divergence=DivergenceSpec(kind=kind),
        cost_kind="explicit",
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def one_by_one_kl():
    return make_1x1(c=1.0, kind="kl")
