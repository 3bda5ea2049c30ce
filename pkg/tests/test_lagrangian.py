import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Quadratic, Smooth
from sparse_lna.lagrangian import (
    assemble_newton_system,
    classify_stationarity,
    eta,
    eval_F,
    full_jacobian,
    grad_L,
    hess_L,
)
from sparse_lna.problem import Iterate
from sparse_lna.problems import MvskInstance, SensingSetup, generate, lambdas_from_xi, synthetic_panel
from sparse_lna.solver import solve
from sparse_lna.sparse import IndexSet


@pytest.fixture(scope="module")
def cs_inst():
    return generate(SensingSetup(40, 16, 4, "gaussian", seed=9))


def _random_z(inst, rng):
    return Iterate(rng.standard_normal(inst.n), rng.standard_normal(inst.m))


def _random_T(inst, rng):
    return IndexSet(rng.choice(inst.n, inst.s, replace=False), inst.n)


def test_grad_L_examples(cs_inst, rng):
    x = rng.standard_normal(cs_inst.n)
    np.testing.assert_array_equal(grad_L(cs_inst, Iterate(x, np.zeros(cs_inst.m))), cs_inst.grad_f(x))
    y = rng.standard_normal(cs_inst.m)
    expected = cs_inst.A.T @ (cs_inst.A @ x - cs_inst.b) - cs_inst.C.T @ y
    np.testing.assert_allclose(grad_L(cs_inst, Iterate(x, y)), expected, atol=1e-12)


def test_grad_L_mvsk_origin():
    inst = MvskInstance.from_panel(synthetic_panel(5, 100, seed=1), lambdas_from_xi(5.0), 2)
    np.testing.assert_allclose(grad_L(inst, Iterate.zeros(5, 1)), -1.0 * inst.mu)


def test_hess_L_examples(cs_inst, rng):
    z = _random_z(cs_inst, rng)
    np.testing.assert_allclose(hess_L(cs_inst, z), cs_inst.A.T @ cs_inst.A, atol=1e-13)
    np.testing.assert_array_equal(hess_L(cs_inst, z), cs_inst.hess_f(z.x))


def test_hess_L_curved_constraint(smooth_problem, rng):
    z = _random_z(smooth_problem, rng)
    expected = smooth_problem.hess_f(z.x) - z.y[0] * 2 * np.eye(smooth_problem.n)
    np.testing.assert_allclose(hess_L(smooth_problem, z), expected)
    z0 = Iterate(z.x, np.zeros(2))
    np.testing.assert_array_equal(hess_L(smooth_problem, z0), smooth_problem.hess_f(z.x))


def test_F_blocks(cs_inst, rng):
    T = _random_T(cs_inst, rng)
    F = eval_F(cs_inst, Iterate.zeros(cs_inst.n, cs_inst.m), T)
    assert F.shape == (cs_inst.n + cs_inst.m,)
    np.testing.assert_array_equal(F[cs_inst.n:], cs_inst.d)
    x = np.zeros(cs_inst.n)
    x[T.indices] = rng.standard_normal(T.s)
    F = eval_F(cs_inst, Iterate(x, rng.standard_normal(cs_inst.m)), T)
    np.testing.assert_array_equal(F[T.s:cs_inst.n], 0.0)


def test_F_vanishes_at_stationary_point(cs_inst):
    rep = solve(cs_inst, beta=0.5)
    assert rep.converged
    assert np.max(np.abs(eval_F(cs_inst, rep.final, rep.final_T))) <= 1e-10
    assert eta(cs_inst, rep.final, rep.final_T, 0.5) <= 1e-10


def test_newton_system_cs_form(cs_inst, rng):
    z = _random_z(cs_inst, rng)
    T = _random_T(cs_inst, rng)
    sys = assemble_newton_system(cs_inst, z, T)
    At, Ct = cs_inst.A[:, T.indices], cs_inst.C[:, T.indices]
    expected = np.block([[At.T @ At, -Ct.T], [-Ct, np.zeros((cs_inst.m, cs_inst.m))]])
    np.testing.assert_allclose(sys.G, expected, atol=1e-12)
    assert sys.T == T


def test_newton_rhs_at_origin(cs_inst, rng):
    T = _random_T(cs_inst, rng)
    z = Iterate(np.zeros(cs_inst.n), rng.standard_normal(cs_inst.m))
    sys = assemble_newton_system(cs_inst, z, T)
    top = -cs_inst.grad_f(np.zeros(cs_inst.n))[T.indices]
    np.testing.assert_allclose(sys.rhs, np.concatenate([top, cs_inst.h(np.zeros(cs_inst.n))]))


def test_newton_system_matches_full_elimination(rng):
    # Newton's equation on the full (n+m) system, with identity rows for x_{T^c}
    # eliminated, must give the same next iterate as the reduced system
    p = Smooth(rng.uniform(0.2, 1.0, 5), rng.standard_normal(5), 2.0, 2)
    z = _random_z(p, rng)
    T = IndexSet([1, 3], 5)
    F = eval_F(p, z, T)
    J = full_jacobian(p, z, T)
    z_full = z.stacked() + np.linalg.solve(J, -F)
    sys = assemble_newton_system(p, z, T)
    sol = np.linalg.solve(sys.G, sys.rhs)
    np.testing.assert_allclose(z_full[T.indices], sol[:2], atol=1e-10)
    np.testing.assert_allclose(z_full[T.complement], 0.0, atol=1e-12)
    np.testing.assert_allclose(z_full[5:], sol[2:], atol=1e-10)


def test_assemble_rejects_wrong_T(cs_inst):
    with pytest.raises(ValueError):
        assemble_newton_system(cs_inst, Iterate.zeros(cs_inst.n, cs_inst.m), IndexSet([0], cs_inst.n))


def test_eta_hinge_inactive():
    p = Quadratic(np.array([2.0, 1.0, 0.1, 0.0]), 2)
    z = Iterate(np.array([1.0, 0.5, 0.0, 0.0]), np.zeros(0))
    T = IndexSet([0, 1], 4)
    assert eta(p, z, T, 1.0) == pytest.approx(np.linalg.norm(eval_F(p, z, T)), abs=0)


def test_eta_hinge_active_at_origin():
    g = 0.7
    p = Quadratic(np.array([0.0, 0.0, 0.0, -g]), 2)
    z = Iterate.zeros(4, 0)
    T = IndexSet([0, 1], 4)
    assert eta(p, z, T, 1.0) == pytest.approx(np.linalg.norm(eval_F(p, z, T)) + g, abs=1e-15)
    with pytest.raises(ValueError):
        eta(p, z, T, 0.0)


def test_classifier_slack_case():
    c = np.array([1.0, 0.0, 0.0, 0.0])
    v = classify_stationarity(Quadratic(c, 2), Iterate(c, np.zeros(0)), 1.0, 1e-8)
    assert v.is_strong_LS and v.case == "slack_support"
    assert v.beta_hat == math.inf
    assert v.sufficient == "global_minimizer"


def test_classifier_full_support_examples():
    x = np.array([0.5, 1.0, 0.0, 0.0])
    p = Quadratic(np.array([0.5, 1.0, 0.1, 0.0]), 2)
    z = Iterate(x, np.zeros(0))
    v = classify_stationarity(p, z, 1.0, 1e-10)
    assert v.is_strong_LS and v.case == "full_support"
    assert v.beta_hat == pytest.approx(5.0)
    assert v.margin == pytest.approx(0.4)
    assert "is_strong_LS = true" in str(v)
    v10 = classify_stationarity(p, z, 10.0, 1e-10)
    assert not v10.is_strong_LS
    assert v10.margin < 0


def test_classifier_infeasible_and_over_support():
    p = Quadratic(np.ones(3), 1, C=np.ones((1, 3)), d=[5.0])
    v = classify_stationarity(p, Iterate([1.0, 0.0, 0.0], [0.0]), 1.0, 1e-8)
    assert not v.is_strong_LS and v.feasibility == pytest.approx(4.0)
    v = classify_stationarity(p, Iterate(np.ones(3), [0.0]), 1.0, 1e-8)
    assert v.case == "over_support" and not v.is_strong_LS
    with pytest.raises(ValueError):
        classify_stationarity(p, Iterate(np.ones(3), [0.0]), 1.0, 0.0)


def test_residuals_nonnegative(cs_inst, rng):
    for _ in range(10):
        v = classify_stationarity(cs_inst, _random_z(cs_inst, rng), 0.1, 1e-6)
        assert v.residual_eq >= 0 and v.feasibility >= 0


def _fd_jacobian(p, z, T, step=1e-6):
    base = z.stacked()
    n = p.n
    cols = []
    for j in range(base.size):
        e = np.zeros(base.size)
        e[j] = step * (1 + abs(base[j]))
        Fp = eval_F(p, Iterate.from_stacked(base + e, n), T)
        Fm = eval_F(p, Iterate.from_stacked(base - e, n), T)
        cols.append((Fp - Fm) / (2 * e[j]))
    return np.column_stack(cols)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_property_jacobian_fd(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(3, 8))
    s = int(r.integers(2, n))
    p = Smooth(r.uniform(0.2, 1.0, n), r.standard_normal(n), 2.0, s)
    z = Iterate(r.standard_normal(n), r.standard_normal(2))
    T = IndexSet(r.choice(n, s, replace=False), n)
    J = full_jacobian(p, z, T)
    fd = _fd_jacobian(p, z, T)
    assert np.max(np.abs(fd - J)) <= 1e-4 * max(1.0, np.max(np.abs(J)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_property_G_structure(seed):
    r = np.random.default_rng(seed)
    inst = generate(SensingSetup(30, 12, 5, "dct" if seed % 2 else "gaussian", seed=seed % 1000))
    for p in (inst, Smooth(r.uniform(0.2, 1.0, 6), r.standard_normal(6), 2.0, 3)):
        z = _random_z(p, r)
        G = assemble_newton_system(p, z, _random_T(p, r)).G
        s = p.s
        assert np.max(np.abs(G - G.T)) <= 1e-12 * np.linalg.norm(G)
        assert np.all(G[s:, s:] == 0.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_property_cs_F_affine(seed):
    r = np.random.default_rng(seed)
    inst = generate(SensingSetup(30, 12, 5, "gaussian", seed=seed % 1000))
    T = _random_T(inst, r)
    z, w = _random_z(inst, r), _random_z(inst, r)
    J = full_jacobian(inst, z, T)
    diff = eval_F(inst, z, T) - eval_F(inst, w, T)
    pred = J @ (z.stacked() - w.stacked())
    assert np.max(np.abs(diff - pred)) <= 1e-12 * max(1.0, np.max(np.abs(diff)))
