"""Tests for the ell-1 recovery solvers.

The combinatorial `oracle_bp` routine (exhaustive support enumeration,
exact on tiny instances) serves as the independent reference for the
iterative solver, so both routes to the same minimizer are compared
rather than the solver being checked against itself.
"""

import numpy as np
import pytest

from revsense import solver
from revsense.solver import SolverConfig, basis_pursuit, basis_pursuit_denoise


def random_instance(rng, m=6, n=12, s=None):
    A = rng.standard_normal((m, n))
    if s is None:
        s = int(rng.integers(0, 3))
    c = np.zeros(n)
    if s:
        support = rng.choice(n, size=s, replace=False)
        c[support] = rng.standard_normal(s) + np.sign(rng.standard_normal(s)) * 0.5
    return A, c, A @ c


def test_agrees_with_enumeration_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(25):
        A, c, y = random_instance(rng)
        z_star, obj_star, unique = solver.oracle_bp(A, y)
        result = basis_pursuit(A, y)
        assert result.converged, result.status
        assert result.objective <= obj_star + 1e-6 * (1.0 + obj_star)
        assert result.objective >= obj_star - 1e-6 * (1.0 + obj_star)
        if unique:
            np.testing.assert_allclose(result.c_sharp.real, z_star, atol=2e-6)
            assert np.abs(result.c_sharp.imag).max() <= 1e-8


def test_oracle_flags_non_unique_minimizer():
    # both coordinates of [[1, 1]] z = [1] give objective 1
    z, obj, unique = solver.oracle_bp(np.array([[1.0, 1.0]]), np.array([1.0]))
    assert obj == pytest.approx(1.0, abs=1e-12)
    assert not unique
    # identity system has a unique minimizer
    z, obj, unique = solver.oracle_bp(np.eye(2), np.array([1.0, 0.0]))
    assert unique
    np.testing.assert_allclose(z, [1.0, 0.0], atol=1e-12)


def test_zero_rhs_returns_zero():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((5, 9))
    result = basis_pursuit(A, np.zeros(5))
    assert result.converged
    assert np.linalg.norm(result.c_sharp) <= 1e-9
    assert result.objective <= 1e-9


def test_identity_system_recovers_exactly():
    y = np.array([0.5, -2.0, 0.0, 1.25])
    result = basis_pursuit(np.eye(4), y)
    assert result.converged
    np.testing.assert_allclose(result.c_sharp.real, y, atol=1e-8)


def test_scaling_invariance():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((8, 20))
    c = np.zeros(20)
    c[[3, 11]] = [2.0, -1.0]
    y = A @ c
    base = basis_pursuit(A, y)
    for t in (0.1, 10.0):
        scaled = basis_pursuit(t * A, t * y)
        assert scaled.converged
        assert np.linalg.norm(scaled.c_sharp - base.c_sharp) <= 1e-7


def test_denoise_tube_and_objective():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((8, 20))
    c = np.zeros(20)
    c[[3, 11]] = [2.0, -1.0]
    y = A @ c
    eps = 1e-3
    result = basis_pursuit_denoise(A, y, eps=eps)
    assert result.converged and result.status == "feasible"
    # eps is a per-sample RMS level: the tube constraint is ||Az - y|| <= eps*sqrt(m)
    assert result.residual <= eps * np.sqrt(8) * (1.0 + 1e-6) + 1e-12
    # relaxing the constraint can only lower the optimum
    assert result.objective <= np.abs(c).sum() + 1e-3


def test_denoise_huge_eps_gives_zero():
    rng = np.random.default_rng(8)
    A = rng.standard_normal((6, 10))
    y = rng.standard_normal(6)
    result = basis_pursuit_denoise(A, y, eps=10.0 * np.linalg.norm(y))
    assert result.converged and result.status == "feasible"
    assert np.linalg.norm(result.c_sharp) == 0.0


def test_denoise_zero_eps_equals_basis_pursuit():
    rng = np.random.default_rng(9)
    A = rng.standard_normal((5, 12))
    c = np.zeros(12)
    c[4] = 1.5
    y = A @ c
    r1 = basis_pursuit(A, y)
    r2 = basis_pursuit_denoise(A, y, eps=0.0)
    np.testing.assert_array_equal(r1.c_sharp, r2.c_sharp)
    assert r1.iterations == r2.iterations


def test_infeasible_system_is_detected():
    A = np.array([[1.0, 0.0], [1.0, 0.0]])
    y = np.array([0.0, 1.0])
    result = basis_pursuit(A, y)
    assert result.status == "infeasible"
    assert not result.converged


def test_monitor_ignored_while_infeasible():
    # the early-exit callback must only be honored once the iterate is feasible
    A = np.array([[1.0, 0.0], [1.0, 0.0]])
    y = np.array([0.0, 1.0])
    result = basis_pursuit(A, y, monitor=lambda it, z: True)
    assert result.status == "infeasible"
    assert not result.converged


def test_monitor_early_stop():
    calls = []

    def monitor(it, z):
        calls.append(it)
        return True

    result = basis_pursuit(np.eye(8), np.ones(8), monitor=monitor)
    assert result.status == "feasible"
    assert result.converged
    assert result.iterations == calls[0]
    assert result.iterations <= 10 * SolverConfig().check_every


def test_complex_data_recovery():
    for seed, s, m in [(42, 1, 6), (7, 2, 10)]:
        rng = np.random.default_rng(seed)
        A = (rng.standard_normal((m, 12)) + 1j * rng.standard_normal((m, 12))) / np.sqrt(2)
        c = np.zeros(12, dtype=complex)
        support = rng.choice(12, size=s, replace=False)
        c[support] = rng.standard_normal(s) + 1j * rng.standard_normal(s)
        y = A @ c
        result = basis_pursuit(A, y)
        assert result.converged
        assert solver.recovered(c, result.c_sharp, tol=1e-6)


def test_overdetermined_consistent_system():
    rng = np.random.default_rng(12)
    A = rng.standard_normal((24, 16))
    c = np.zeros(16)
    c[[2, 9]] = [1.0, -0.75]
    y = A @ c
    result = basis_pursuit(A, y)
    assert result.converged
    assert solver.recovered(c, result.c_sharp, tol=1e-6)


def test_recovered_boundary_is_inclusive():
    c = np.array([1.0, 0.0])
    assert solver.recovered(c, np.array([1.0, 0.99e-4]), tol=1e-4)
    assert not solver.recovered(c, np.array([1.0, 1.02e-4]), tol=1e-4)
    # zero ground truth demands exact equality
    assert solver.recovered(np.zeros(3), np.zeros(3), tol=1e-4)
    assert not solver.recovered(np.zeros(3), np.array([0.0, 1e-9, 0.0]), tol=1e-4)
    with pytest.raises(ValueError):
        solver.recovered(np.zeros(3), np.zeros(4))


def test_operator_norm_matches_svd():
    rng = np.random.default_rng(77)
    for shape in [(20, 30), (15, 7)]:
        A = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        exact = np.linalg.svd(A, compute_uv=False)[0]
        assert solver.operator_norm(A) == pytest.approx(exact, rel=1e-4)
    assert solver.operator_norm(np.zeros((4, 4))) == 0.0


def test_result_diagnostics_populated():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((6, 12))
    c = np.zeros(12)
    c[5] = 1.0
    result = basis_pursuit(A, A @ c)
    assert result.op_norm == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-3)
    assert result.residual <= 1e-8 * (1.0 + np.linalg.norm(A @ c))
    assert result.iterations >= 1
    assert result.c_sharp.dtype == np.complex128


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)
    with pytest.raises(ValueError):
        SolverConfig(step_margin=1.5)
    with pytest.raises(ValueError):
        SolverConfig(eps_feas=0.0)
    A = np.eye(3)
    with pytest.raises(ValueError):
        basis_pursuit(A, np.zeros(4))
    with pytest.raises(ValueError):
        basis_pursuit_denoise(A, np.zeros(3), eps=-1.0)
