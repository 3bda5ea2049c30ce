"""Equality-constrained compressed sensing.

    minimize 0.5 * ||A x - b||^2   subject to   C x = d,  ||x||_0 <= s

Instances come from a ``p x n`` sensing matrix whose rows are split at
random into ``m = ceil(0.1 s)`` constraint rows ``(C, d)`` and ``p - m``
objective rows ``(A, b)``.
"""
import math
from dataclasses import dataclass

import numpy as np

from ..linalg import as_matrix, as_vector, pivot_rank
from ..problem import Problem


class MissingGroundTruth(ValueError):
    pass


class CsInstance(Problem):
    family = "cs"
    affine_constraints = True
    convex_affine = True

    def __init__(self, A, b, C, d, s, x_true=None, kind="custom", setup=None):
        self.A = as_matrix(A, name="A")
        self.n = self.A.shape[1]
        self.b = as_vector(b, self.A.shape[0], "b")
        C = np.asarray(C, dtype=np.float64)
        self.C = as_matrix(C.reshape(-1, self.n) if C.size == 0 else C, (None, self.n), "C")
        self.m = self.C.shape[0]
        self.d = as_vector(np.atleast_1d(d) if self.m else np.zeros(0), self.m, "d")
        self.s = int(s)
        self._check_dims()
        if self.m > self.s:
            raise ValueError(f"m={self.m} constraints exceed the sparsity level s={self.s}")
        self.x_true = None if x_true is None else as_vector(x_true, self.n, "x_true")
        self.kind = kind
        self.setup = setup
        AtA = self.A.T @ self.A
        AtA.setflags(write=False)
        self._AtA = AtA
        self._Atb = self.A.T @ self.b

    def f(self, x):
        r = self.A @ x - self.b
        return 0.5 * float(r @ r)

    def grad_f(self, x):
        return self._AtA @ x - self._Atb

    def hess_f(self, x):
        return self._AtA

    def h(self, x):
        return self.C @ x - self.d

    def jac_h(self, x):
        return self.C

    def hess_h(self, i, x):
        return np.zeros((self.n, self.n))


def recovery_success(x, x_true):
    """Relative recovery test ``||x - x*|| < 0.01 ||x*||``."""
    if x_true is None:
        raise MissingGroundTruth("instance carries no planted signal")
    x = np.asarray(x, dtype=np.float64)
    x_true = np.asarray(x_true, dtype=np.float64)
    return bool(np.linalg.norm(x - x_true) < 0.01 * np.linalg.norm(x_true))


@dataclass(frozen=True)
class SensingSetup:
    n: int
    p: int
    s: int
    matrix_kind: str = "gaussian"
    seed: int = 0
    m: int | None = None

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", math.ceil(0.1 * self.s))
        if not self.p < self.n:
            raise ValueError(f"need p < n, got p={self.p}, n={self.n}")
        if not (0 < self.s < self.n):
            raise ValueError(f"need 0 < s < n, got s={self.s}")
        if self.m > min(self.p, self.s):
            raise ValueError(f"m={self.m} exceeds min(p, s)")
        if self.matrix_kind not in ("gaussian", "dct"):
            raise ValueError(f"unknown matrix kind {self.matrix_kind!r}")


def _planted(setup, sensing, rng):
    n, s = setup.n, setup.s
    x_true = np.zeros(n)
    gamma = rng.permutation(n)
    x_true[gamma[:s]] = rng.standard_normal(s)
    full_b = sensing @ x_true
    order = rng.permutation(setup.p)
    cons, obj = order[: setup.m], order[setup.m:]
    return CsInstance(
        sensing[obj], full_b[obj], sensing[cons], full_b[cons], s,
        x_true=x_true, kind=setup.matrix_kind, setup=setup,
    )


def _normalize_columns(a):
    return a / np.linalg.norm(a, axis=0)


def gaussian_matrix(p, n, rng):
    return rng.standard_normal((p, n))


def dct_matrix(p, n, rng):
    psi = rng.uniform(0.0, 1.0, size=p)
    return np.cos(2.0 * np.pi * np.outer(psi, np.arange(n)))


def generate_gaussian(setup):
    """Unit-column Gaussian sensing matrix with a planted ``s``-sparse signal.

    Uses numpy's PCG64 stream (``default_rng(seed)``): matrix first, then the
    support permutation and signal values, then the row split.
    """
    rng = np.random.default_rng(setup.seed)
    sensing = _normalize_columns(gaussian_matrix(setup.p, setup.n, rng))
    return _planted(setup, sensing, rng)


def generate_partial_dct(setup):
    """Rows ``cos(2 pi j psi_i)`` for one uniform ``psi_i`` per row, then unit columns."""
    rng = np.random.default_rng(setup.seed)
    sensing = _normalize_columns(dct_matrix(setup.p, setup.n, rng))
    return _planted(setup, sensing, rng)


def generate(setup):
    return generate_gaussian(setup) if setup.matrix_kind == "gaussian" else generate_partial_dct(setup)


def support_rank_probe(inst, trials=20, seed=0):
    """Rank probe on random supports: counts of ``T`` with rank-deficient
    ``A_T`` (needs rank ``s``) or ``C_T`` (needs rank ``m``)."""
    rng = np.random.default_rng(seed)
    bad_a = bad_c = 0
    for _ in range(trials):
        T = np.sort(rng.choice(inst.n, size=inst.s, replace=False))
        if pivot_rank(inst.A[:, T]) < inst.s:
            bad_a += 1
        if inst.m and pivot_rank(inst.C[:, T]) < inst.m:
            bad_c += 1
    return {"trials": trials, "rank_deficient_A": bad_a, "rank_deficient_C": bad_c}
