"""Marginal operator, adjoint, entropy and problem validation."""

import numpy as np
import pytest

from uotlab.core import (
    DualPotential,
    InvalidInput,
    Marginals,
    Problem,
    apply_A,
    apply_A_adjoint,
    build_cost,
    discrete_entropy,
    marginal_matrix,
)


def test_apply_A_small_matrix():
    m = apply_A(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert np.allclose(m.row, [3.0, 7.0])
    assert np.allclose(m.col, [4.0, 6.0])


def test_apply_A_zero():
    m = apply_A(np.zeros((3, 2)))
    assert np.all(m.row == 0) and np.all(m.col == 0)


def test_apply_A_matches_dense_operator():
    rng = np.random.default_rng(1)
    g = rng.random((3, 3))
    A = marginal_matrix(3, 3)
    assert np.allclose(apply_A(g).stacked, A @ g.ravel(), atol=1e-14)


def test_adjoint_small():
    xi = DualPotential([1.0, 2.0], [10.0])
    assert np.allclose(apply_A_adjoint(xi), [[11.0], [12.0]])


def test_adjoint_zero():
    xi = DualPotential.zeros(2, 3)
    assert np.all(apply_A_adjoint(xi) == 0)


def test_adjointness_identity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n_x, n_y = rng.integers(1, 6, size=2)
        gamma = rng.random((n_x, n_y))
        xi = DualPotential(rng.standard_normal(n_x), rng.standard_normal(n_y))
        lhs = float(np.sum(apply_A_adjoint(xi) * gamma))
        rhs = float(xi.stacked @ apply_A(gamma).stacked)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_mass_conservation():
    rng = np.random.default_rng(3)
    gamma = rng.random((4, 5))
    m = apply_A(gamma)
    assert np.isclose(m.row.sum(), gamma.sum())
    assert np.isclose(m.col.sum(), gamma.sum())


def test_adjoint_kernel_is_ones_minus_ones():
    # A*(1, -1) = 0, and A* is injective on the orthogonal complement
    n_x, n_y = 3, 4
    xi0 = DualPotential(np.ones(n_x), -np.ones(n_y))
    assert np.all(apply_A_adjoint(xi0) == 0)
    A = marginal_matrix(n_x, n_y)
    # singular values of A^T acting on potentials: exactly one zero
    s = np.linalg.svd(A.T, compute_uv=False)
    assert np.sum(s < 1e-12) == 1


def test_entropy_values():
    assert discrete_entropy([[1.0]]) == pytest.approx(-1.0)
    assert discrete_entropy([[np.e]]) == pytest.approx(0.0, abs=1e-15)
    assert discrete_entropy([[0.0, 1.0], [0.0, 0.0]]) == pytest.approx(-1.0)


def test_entropy_rejects_negative():
    with pytest.raises(InvalidInput):
        discrete_entropy([[-0.5]])


def test_entropy_strictly_convex_midpoint():
    rng = np.random.default_rng(4)
    for _ in range(20):
        a = rng.uniform(0.05, 3.0, (2, 2))
        b = rng.uniform(0.05, 3.0, (2, 2))
        if np.allclose(a, b):
            continue
        mid = discrete_entropy(0.5 * (a + b))
        assert mid < 0.5 * (discrete_entropy(a) + discrete_entropy(b))


def test_build_cost_values():
    assert build_cost([[0.0]], [[2.0]])[0, 0] == pytest.approx(4.0)
    assert build_cost([[0.0]], [[2.0]], kind="euclidean")[0, 0] == pytest.approx(2.0)
    p = [[0.3, 0.4]]
    assert build_cost(p, p)[0, 0] == 0.0


def test_build_cost_matches_direct():
    rng = np.random.default_rng(5)
    px, py = rng.random((3, 2)), rng.random((3, 2))
    c = build_cost(px, py)
    for i in range(3):
        for j in range(3):
            assert c[i, j] == pytest.approx(np.sum((px[i] - py[j]) ** 2), abs=1e-12)


def test_build_cost_dimension_mismatch():
    with pytest.raises(InvalidInput):
        build_cost([[0.0, 1.0]], [[0.0]])


def test_build_cost_explicit_requires_matrix():
    with pytest.raises(InvalidInput):
        build_cost(None, None, kind="explicit")


def test_problem_validation():
    with pytest.raises(InvalidInput):
        Problem([[0.0]], [[0.0]], [1.0], [1.0], [[-1.0]], cost_kind="explicit")
    with pytest.raises(InvalidInput):
        Problem([[0.0]], [[0.0]], [-1.0], [1.0], [[1.0]], cost_kind="explicit")
    with pytest.raises(InvalidInput):
        Problem([[0.0]], [[0.0]], [1.0, 1.0], [1.0], [[1.0]], cost_kind="explicit")


def test_dual_potential_rejects_nonfinite():
    with pytest.raises(InvalidInput):
        DualPotential([np.inf], [0.0])


def test_stacked_round_trip():
    xi = DualPotential([1.0, 2.0], [3.0])
    back = DualPotential.from_stacked(xi.stacked, 2)
    assert np.all(back.phi == xi.phi) and np.all(back.psi == xi.psi)
    assert np.allclose(Marginals([1.0], [2.0, 3.0]).stacked, [1.0, 2.0, 3.0])
