"""Problem interface shared by the solver and the built-in families."""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_vector

FD_REL_STEP = 1e-6
FD_PASS_THRESHOLD = 1e-4


class Problem(ABC):
    """Minimize ``f(x)`` subject to ``h(x) = 0`` and ``||x||_0 <= s``.

    Subclasses set ``n``, ``m``, ``s`` and implement the six evaluators.
    Evaluators must not mutate shared state; instances are read by
    concurrent trial workers.
    """

    n: int
    m: int
    s: int
    #: all constraints affine, so ``hess_h`` is identically zero
    affine_constraints = False
    #: f convex and h affine (enables the sufficiency verdict)
    convex_affine = False
    family = "custom"

    def _check_dims(self):
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if not (0 < self.s < self.n):
            raise ValueError(f"sparsity level must satisfy 0 < s < n, got s={self.s}, n={self.n}")

    @abstractmethod
    def f(self, x): ...

    @abstractmethod
    def grad_f(self, x): ...

    @abstractmethod
    def hess_f(self, x): ...

    @abstractmethod
    def h(self, x): ...

    @abstractmethod
    def jac_h(self, x): ...

    def hess_h(self, i, x):
        """Hessian of constraint ``i``; zero unless overridden."""
        return np.zeros((self.n, self.n))


@dataclass
class Iterate:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = as_vector(self.x, name="x")
        self.y = as_vector(np.atleast_1d(np.asarray(self.y, dtype=np.float64)), name="y")

    @classmethod
    def zeros(cls, n, m):
        return cls(np.zeros(n), np.zeros(m))

    @classmethod
    def from_stacked(cls, z, n):
        z = np.asarray(z, dtype=np.float64)
        return cls(z[:n].copy(), z[n:].copy())

    def stacked(self):
        return np.concatenate([self.x, self.y])

    def check(self, problem):
        if self.x.shape != (problem.n,) or self.y.shape != (problem.m,):
            raise ValueError(
                f"iterate shapes ({self.x.shape}, {self.y.shape}) do not match "
                f"n={problem.n}, m={problem.m}"
            )


@dataclass
class DerivativeReport:
    errors: dict = field(default_factory=dict)
    threshold: float = FD_PASS_THRESHOLD
    coords: list = field(default_factory=list)

    @property
    def max_error(self):
        return max(self.errors.values(), default=0.0)

    @property
    def passed(self):
        return self.max_error <= self.threshold

    def __str__(self):
        parts = ", ".join(f"{k}={v:.2e}" for k, v in self.errors.items())
        return f"derivatives {'PASS' if self.passed else 'FAIL'} ({parts})"


def _rel_err(approx, exact):
    approx = np.asarray(approx, dtype=np.float64)
    exact = np.asarray(exact, dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(exact), initial=0.0)))
    return float(np.max(np.abs(approx - exact), initial=0.0)) / scale


def validate_derivatives(problem, x, seed=0, max_coords=40, threshold=FD_PASS_THRESHOLD):
    """Central-difference audit of every analytic derivative of ``problem``.

    Differences are taken along at most ``max_coords`` coordinates drawn
    with ``seed`` (all of them when ``n <= max_coords``); the step for
    coordinate ``i`` is ``1e-6 * (1 + |x_i|)``.  Errors are absolute
    deviations divided by ``max(1, max |analytic|)`` for each block.
    """
    x = as_vector(x, problem.n, "x")
    n, m = problem.n, problem.m
    if n <= max_coords:
        coords = np.arange(n)
    else:
        coords = np.sort(np.random.default_rng(seed).choice(n, size=max_coords, replace=False))

    g = problem.grad_f(x)
    hf = problem.hess_f(x)
    jh = np.asarray(problem.jac_h(x), dtype=np.float64).reshape(m, n)
    hh = [problem.hess_h(i, x) for i in range(m)]

    fd_g = np.empty(coords.size)
    fd_hf = np.empty((n, coords.size))
    fd_jh = np.empty((m, coords.size))
    fd_hh = np.empty((m, n, coords.size))
    for c, i in enumerate(coords):
        step = FD_REL_STEP * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        fd_g[c] = (problem.f(xp) - problem.f(xm)) / (2 * step)
        fd_hf[:, c] = (problem.grad_f(xp) - problem.grad_f(xm)) / (2 * step)
        fd_jh[:, c] = (np.ravel(problem.h(xp)) - np.ravel(problem.h(xm))) / (2 * step)
        jp = np.asarray(problem.jac_h(xp)).reshape(m, n)
        jm = np.asarray(problem.jac_h(xm)).reshape(m, n)
        fd_hh[:, :, c] = (jp - jm) / (2 * step)

    errors = {
        "grad_f": _rel_err(fd_g, g[coords]),
        "hess_f": _rel_err(fd_hf, hf[:, coords]),
        "jac_h": _rel_err(fd_jh, jh[:, coords]) if m else 0.0,
        "hess_h": max((_rel_err(fd_hh[i], hh[i][:, coords]) for i in range(m)), default=0.0),
    }
    return DerivativeReport(errors=errors, threshold=threshold, coords=coords.tolist())
