"""Sparse mean-variance-skewness-kurtosis portfolio selection.

    minimize  -l1 x'mu + l2 x'Sigma x - l3 x'Phi(x kron x) + l4 x'Psi(x kron x kron x)
    subject to  sum(x) = 1,  ||x||_0 <= s

``Phi`` and ``Psi`` are the third and fourth co-moment tensors of centered
returns, flattened to ``(n, n**2)`` and ``(n, n**3)``.  Contractions run in
:mod:`sparse_lna.kernels` and never build ``I kron x``.
"""
import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .. import kernels
from ..linalg import as_matrix, as_vector
from ..problem import Problem

MAX_ASSETS = 40


class InsufficientSamples(ValueError):
    pass


class ZeroVector(ValueError):
    pass


@dataclass
class ReturnPanel:
    """``T_obs x n`` matrix of period returns, one column per asset."""

    observations: np.ndarray
    assets: list = field(default_factory=list)

    def __post_init__(self):
        self.observations = as_matrix(self.observations, name="observations")
        if not self.assets:
            self.assets = [f"a{j}" for j in range(self.observations.shape[1])]
        if len(self.assets) != self.observations.shape[1]:
            raise ValueError("asset names do not match the number of columns")

    @property
    def t_obs(self):
        return self.observations.shape[0]

    @property
    def n(self):
        return self.observations.shape[1]

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[float(v) for v in row] for row in reader if row]
        return cls(np.array(rows, dtype=np.float64).reshape(-1, len(header)), header)

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.assets)
            for row in self.observations:
                writer.writerow([f"{v:.17g}" for v in row])


class Comoments(NamedTuple):
    mu: np.ndarray
    sigma: np.ndarray
    phi: np.ndarray
    psi: np.ndarray


def estimate_comoments(panel):
    """Sample mean and 1/T-normalized second, third and fourth co-moments."""
    obs = panel.observations if isinstance(panel, ReturnPanel) else as_matrix(panel)
    if obs.shape[0] < 2:
        raise InsufficientSamples(f"need at least 2 observations, got {obs.shape[0]}")
    mu = obs.mean(axis=0)
    centered = np.ascontiguousarray(obs - mu)
    sigma, phi, psi = kernels.comoments(centered)
    return Comoments(mu, sigma, phi, psi)


def lambdas_from_xi(xi):
    """Preference weights from a risk-aversion level ``xi``."""
    if not xi > 0:
        raise ValueError("xi must be positive")
    return (1.0, xi / 2.0, xi * (xi + 1.0) / 6.0, xi * (xi + 1.0) * (xi + 2.0) / 24.0)


class MvskInstance(Problem):
    family = "mvsk"
    affine_constraints = True

    def __init__(self, mu, sigma, phi, psi, lambdas, s):
        self.mu = as_vector(mu, name="mu")
        n = self.n = self.mu.size
        if n > MAX_ASSETS:
            raise ValueError(f"dense co-kurtosis storage is capped at n <= {MAX_ASSETS}")
        self.sigma = as_matrix(sigma, (n, n), "sigma")
        self.phi = np.ascontiguousarray(as_matrix(phi, (n, n * n), "phi"))
        self.psi = np.ascontiguousarray(as_matrix(psi, (n, n ** 3), "psi"))
        self.lambdas = tuple(float(v) for v in lambdas)
        if len(self.lambdas) != 4 or min(self.lambdas) <= 0:
            raise ValueError("need four positive lambdas")
        self.m = 1
        self.s = int(s)
        self._check_dims()
        self._last = None

    @classmethod
    def from_panel(cls, panel, lambdas, s):
        mom = estimate_comoments(panel)
        return cls(mom.mu, mom.sigma, mom.phi, mom.psi, lambdas, s)

    def _tensors(self, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        key = x.tobytes()
        last = self._last
        if last is not None and last[0] == key:
            return last[1], last[2]
        m3 = kernels.phi_ix(self.phi, x)
        m4 = kernels.psi_ixx(self.psi, x)
        self._last = (key, m3, m4)
        return m3, m4

    def moments_at(self, x):
        """``(x'Sigma x, x'Phi(x kron x), x'Psi(x kron x kron x))``."""
        m3, m4 = self._tensors(x)
        return float(x @ self.sigma @ x), float(x @ m3 @ x), float(x @ m4 @ x)

    def f(self, x):
        l1, l2, l3, l4 = self.lambdas
        var, skew, kurt = self.moments_at(x)
        return -l1 * float(x @ self.mu) + l2 * var - l3 * skew + l4 * kurt

    def grad_f(self, x):
        l1, l2, l3, l4 = self.lambdas
        m3, m4 = self._tensors(x)
        return -l1 * self.mu + 2 * l2 * (self.sigma @ x) - 3 * l3 * (m3 @ x) + 4 * l4 * (m4 @ x)

    def hess_f(self, x):
        l1, l2, l3, l4 = self.lambdas
        m3, m4 = self._tensors(x)
        return 2 * l2 * self.sigma - 6 * l3 * m3 + 12 * l4 * m4

    def h(self, x):
        return np.array([float(np.sum(x)) - 1.0])

    def jac_h(self, x):
        return np.ones((1, self.n))


def _leading_pivots(g):
    """Pivots of unpivoted elimination; all positive iff ``g`` is positive definite."""
    a = np.array(g, dtype=np.float64)
    k = a.shape[0]
    pivots = np.empty(k)
    for j in range(k):
        pivots[j] = a[j, j]
        if pivots[j] == 0.0:
            pivots[j + 1:] = 0.0
            break
        a[j + 1:, j + 1:] -= np.outer(a[j + 1:, j], a[j, j + 1:]) / a[j, j]
    return pivots


@dataclass
class CurvatureReport:
    scalar_lhs: float
    scalar_rhs: float
    min_pivot: float

    @property
    def scalar_ok(self):
        return self.scalar_lhs > self.scalar_rhs

    @property
    def restricted_pd(self):
        return self.min_pivot > 0

    @property
    def passed(self):
        return self.scalar_ok and self.restricted_pd


def check_curvature_conditions(lambdas, sigma, rtol=1e-12):
    """Check ``4 l4 (2 l2 - 1) > l3**2`` and that ``sigma`` is positive definite
    on the hyperplane ``sum(d) = 0`` (basis ``e_k - e_n``)."""
    l1, l2, l3, l4 = lambdas
    sigma = as_matrix(sigma, name="sigma")
    n = sigma.shape[0]
    basis = np.zeros((n, n - 1))
    basis[np.arange(n - 1), np.arange(n - 1)] = 1.0
    basis[n - 1, :] = -1.0
    gram = basis.T @ sigma @ basis
    piv = _leading_pivots(gram)
    floor = rtol * max(1.0, float(np.max(np.abs(gram), initial=0.0)))
    min_pivot = float(piv.min()) if piv.size else 0.0
    if min_pivot <= floor:
        min_pivot = min(min_pivot, 0.0)
    return CurvatureReport(4 * l4 * (2 * l2 - 1), l3 ** 2, min_pivot)


def sparsity_hat(x):
    """Smallest ``t`` such that the ``t`` largest ``|x_i|`` hold 99% of ``||x||_1``."""
    a = np.sort(np.abs(np.asarray(x, dtype=np.float64)))[::-1]
    total = a.sum()
    if total == 0:
        raise ZeroVector("sparsity_hat of the zero vector is undefined")
    return int(np.argmax(np.cumsum(a) >= 0.99 * total)) + 1


def synthetic_panel(n, t_obs=500, seed=0, vol=0.2, drift=0.05, factors=3):
    """Skewed factor-model returns with per-asset volatility ``vol``.

    Log-normal shocks give nonzero third moments; each column is rescaled to
    standard deviation ``vol`` and shifted to a mean drawn from ``U[0, drift]``.
    """
    rng = np.random.default_rng(seed)
    loadings = rng.standard_normal((n, factors))
    f = rng.standard_normal((t_obs, factors))
    eps = rng.standard_normal((t_obs, n))
    z = np.exp(0.5 * (0.6 * f @ loadings.T / np.sqrt(factors) + 0.8 * eps))
    z = (z - z.mean(axis=0)) / z.std(axis=0)
    returns = vol * z + drift * rng.uniform(0.0, 1.0, size=n)
    return ReturnPanel(returns, [f"asset{j:02d}" for j in range(n)])
