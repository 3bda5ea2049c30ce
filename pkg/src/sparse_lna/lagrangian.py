"""Lagrangian quantities: gradients, the equation residual, the reduced
Newton system, the progress measure and the stationarity verdict.

The Lagrangian is ``L(x, y) = f(x) - <y, h(x)>``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .sparse import IndexSet, sth_largest_abs, support


def grad_L(problem, z):
    x, y = z.x, z.y
    g = np.array(problem.grad_f(x), dtype=np.float64)
    if problem.m:
        g -= np.asarray(problem.jac_h(x)).reshape(problem.m, problem.n).T @ y
    return g


def hess_L(problem, z):
    hess = np.array(problem.hess_f(z.x), dtype=np.float64)
    if problem.m and not problem.affine_constraints:
        for i, yi in enumerate(z.y):
            if yi != 0.0:
                hess -= yi * np.asarray(problem.hess_h(i, z.x))
    return hess


class _Point:
    """Lazily cached evaluations at one iterate, shared within a solver step."""

    def __init__(self, problem, z):
        self.problem = problem
        self.z = z
        self._cache = {}

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def grad_f(self):
        return self._get("grad_f", lambda: np.asarray(self.problem.grad_f(self.z.x), dtype=np.float64))

    @property
    def jac_h(self):
        p = self.problem
        return self._get("jac_h", lambda: np.asarray(p.jac_h(self.z.x), dtype=np.float64).reshape(p.m, p.n))

    @property
    def h(self):
        return self._get("h", lambda: np.ravel(np.asarray(self.problem.h(self.z.x), dtype=np.float64)))

    @property
    def q(self):
        def build():
            if self.problem.m:
                return self.grad_f - self.jac_h.T @ self.z.y
            return self.grad_f.copy()

        return self._get("q", build)

    @property
    def hess(self):
        return self._get("hess", lambda: hess_L(self.problem, self.z))


def _residual(pt, T):
    x = pt.z.x
    return np.concatenate([pt.q[T.indices], x[T.complement], -pt.h])


def _eta(pt, T, beta):
    resid = float(np.linalg.norm(_residual(pt, T)))
    comp = T.complement
    if comp.size == 0:
        return resid
    xs = sth_largest_abs(pt.z.x, pt.problem.s)
    hinge = float(np.max(np.abs(pt.q[comp]))) - xs / beta
    return resid + max(hinge, 0.0)


def eval_F(problem, z, T):
    """Stacked residual ``[(grad_x L)_T ; x_{T^c} ; -h(x)]`` of length n+m."""
    return _residual(_Point(problem, z), T)


def eta(problem, z, T, beta):
    if beta <= 0:
        raise ValueError("beta must be positive")
    return _eta(_Point(problem, z), T, beta)


def full_jacobian(problem, z, T):
    """The ``(n+m)`` square Jacobian of ``eval_F`` in ``(x, y)`` with ``T`` held fixed."""
    pt = _Point(problem, z)
    n, m = problem.n, problem.m
    jac = np.zeros((n + m, n + m))
    s = T.s
    jac[:s, :n] = pt.hess[T.indices, :]
    jac[:s, n:] = -pt.jac_h[:, T.indices].T
    comp = T.complement
    jac[s + np.arange(comp.size), comp] = 1.0
    jac[n:, :n] = -pt.jac_h
    return jac


@dataclass
class NewtonSystem:
    G: np.ndarray
    rhs: np.ndarray
    T: IndexSet


def _assemble(pt, T):
    p = pt.problem
    s, m = T.s, p.m
    idx = T.indices
    hess_rows = pt.hess[idx, :]
    jt = pt.jac_h[:, idx]
    G = np.zeros((s + m, s + m))
    G[:s, :s] = hess_rows[:, idx]
    G[:s, s:] = -jt.T
    G[s:, :s] = -jt
    # full-row contraction against the whole x, not only x_T
    top = -pt.grad_f[idx] + hess_rows @ pt.z.x
    bottom = pt.h - pt.jac_h @ pt.z.x
    return NewtonSystem(G=G, rhs=np.concatenate([top, bottom]), T=T)


def assemble_newton_system(problem, z, T):
    if T.s != problem.s or T.n != problem.n:
        raise ValueError(f"index set {T!r} does not match problem with n={problem.n}, s={problem.s}")
    return _assemble(_Point(problem, z), T)


@dataclass
class StationarityVerdict:
    is_strong_LS: bool
    case: str
    residual_eq: float
    margin: float
    feasibility: float
    beta_hat: float
    support: list
    sufficient: str | None = None

    def __str__(self):
        return (
            f"is_strong_LS = {str(self.is_strong_LS).lower()} (case={self.case}, "
            f"|h|={self.feasibility:.3e}, residual={self.residual_eq:.3e}, "
            f"margin={self.margin:.3e}, beta_hat={self.beta_hat:.6g})"
        )


def classify_stationarity(problem, z, beta, tol):
    """Check the strong beta-Lagrangian stationarity conditions at ``z``.

    Entries with ``|x_i| <= tol * (1 + ||x||_inf)`` count as zero.  The
    strict margin condition is relaxed by ``+tol``.
    """
    if beta <= 0 or tol <= 0:
        raise ValueError("beta and tol must be positive")
    pt = _Point(problem, z)
    x, q = z.x, pt.q
    s = problem.s
    gamma = support(x, tol * (1.0 + float(np.max(np.abs(x), initial=0.0))))
    feas = float(np.linalg.norm(pt.h))
    xs = sth_largest_abs(x, s)

    if gamma.size > s:
        return StationarityVerdict(False, "over_support", float(np.linalg.norm(q)), -math.inf,
                                   feas, math.inf, gamma.tolist())

    if gamma.size == s:
        mask = np.zeros(problem.n, dtype=bool)
        mask[gamma] = True
        res = float(np.linalg.norm(q[mask]))
        qc = float(np.max(np.abs(q[~mask]), initial=0.0))
        margin = xs - beta * qc
        beta_hat = xs / qc if qc > 0 else math.inf
        ok = feas <= tol and res <= tol and beta * qc < xs + tol
        case = "full_support"
    else:
        res = float(np.linalg.norm(q))
        margin = math.inf
        beta_hat = math.inf
        ok = feas <= tol and res <= tol
        case = "slack_support"

    sufficient = None
    if ok and problem.convex_affine:
        sufficient = "local_minimizer" if case == "full_support" else "global_minimizer"
    return StationarityVerdict(bool(ok), case, res, margin, feas, beta_hat, gamma.tolist(), sufficient)
