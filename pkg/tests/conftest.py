import numpy as np
import pytest

from sparse_lna.problem import Problem


class Quadratic(Problem):
    """``0.5 ||x - c||^2`` with optional affine constraints ``C x = d``."""

    affine_constraints = True
    convex_affine = True

    def __init__(self, c, s, C=None, d=None):
        self.c = np.asarray(c, dtype=float)
        self.n = self.c.size
        self.C = np.zeros((0, self.n)) if C is None else np.asarray(C, dtype=float)
        self.d = np.zeros(0) if d is None else np.asarray(d, dtype=float)
        self.m = self.C.shape[0]
        self.s = s
        self._check_dims()

    def f(self, x):
        return 0.5 * float((x - self.c) @ (x - self.c))

    def grad_f(self, x):
        return x - self.c

    def hess_f(self, x):
        return np.eye(self.n)

    def h(self, x):
        return self.C @ x - self.d

    def jac_h(self, x):
        return self.C


class Smooth(Problem):
    """Non-quadratic test problem with a curved constraint.

    f(x) = sum(exp(a_i x_i)) + 0.25 * sum(x^4), h(x) = [||x||^2 - r, w'x - 1]
    """

    def __init__(self, a, w, r, s):
        self.a = np.asarray(a, dtype=float)
        self.w = np.asarray(w, dtype=float)
        self.r = float(r)
        self.n = self.a.size
        self.m = 2
        self.s = s
        self._check_dims()

    def f(self, x):
        return float(np.sum(np.exp(self.a * x)) + 0.25 * np.sum(x ** 4))

    def grad_f(self, x):
        return self.a * np.exp(self.a * x) + x ** 3

    def hess_f(self, x):
        return np.diag(self.a ** 2 * np.exp(self.a * x) + 3 * x ** 2)

    def h(self, x):
        return np.array([x @ x - self.r, self.w @ x - 1.0])

    def jac_h(self, x):
        return np.vstack([2 * x, self.w])

    def hess_h(self, i, x):
        return 2 * np.eye(self.n) if i == 0 else np.zeros((self.n, self.n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def smooth_problem(rng):
    n = 6
    return Smooth(rng.uniform(0.2, 1.0, n), rng.standard_normal(n), 2.0, 3)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(RESULTS, key=lambda r: (r[0], not r[1].startswith("INFO"))):
        terminalreporter.write_line(line)
