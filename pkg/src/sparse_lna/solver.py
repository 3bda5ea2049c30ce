"""Lagrange-Newton iteration for sparse equality-constrained programs.

Each iteration picks an index set ``T`` from the largest entries of
``x - beta * grad_x L``, stops once the progress measure ``eta`` is below
``epsilon``, and otherwise solves the reduced ``(s+m)``-dimensional Newton
system with ``x`` zeroed off ``T``.  There is no line search.
"""
import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .lagrangian import StationarityVerdict, _assemble, _eta, _Point, classify_stationarity
from .linalg import SingularMatrix, lu_solve
from .problem import Iterate
from .sparse import IndexSet, select_index_set, support

DIVERGENCE_BOUND = 1e12


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    SINGULAR_SYSTEM = "SingularSystem"


class SingularSystem(ArithmeticError):
    def __init__(self, T, cause=None, iteration=None):
        where = "" if iteration is None else f" at iteration {iteration}"
        super().__init__(f"reduced Newton matrix singular{where} for T={T.tolist()}")
        self.T = T
        self.iteration = iteration
        self.__cause__ = cause


class InsufficientHistory(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    beta: float
    epsilon: float = 1e-6
    max_iter: int = 1000
    support_tol: float = 0.0
    keep_iterates: bool = True

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.support_tol < 0:
            raise ValueError("support_tol must be non-negative")


@dataclass
class SolverReport:
    status: Status
    final: Iterate
    final_T: IndexSet
    iterations: int
    eta_trace: list
    support_trace: list
    step_norm_trace: list
    wall_time: float
    verdict: StationarityVerdict | None = None
    iterates: list = field(default_factory=list, repr=False)
    failed_iteration: int | None = None
    message: str = ""
    support_tol: float = 0.0

    @property
    def support(self):
        return support(self.final.x, self.support_tol).tolist()

    @property
    def converged(self):
        return self.status is Status.CONVERGED

    @property
    def eta_final(self):
        return self.eta_trace[-1]

    def summary(self):
        x = self.final.x
        lines = [
            f"status          {self.status.value}",
            f"iterations      {self.iterations}",
            f"eta             {self.eta_final:.6e}",
            f"support         {self.final_T.tolist()}",
            f"nnz(x)          {int(np.count_nonzero(x))}",
            f"wall_time       {self.wall_time:.6f} s",
        ]
        if self.verdict is not None:
            lines.append(f"stationarity    {self.verdict}")
        if self.message:
            lines.append(f"message         {self.message}")
        return "\n".join(lines)


def _newton_from(pt, T):
    system = _assemble(pt, T)
    try:
        sol = lu_solve(system.G, system.rhs)
    except SingularMatrix as exc:
        raise SingularSystem(T, exc) from exc
    n, s = pt.problem.n, T.s
    x_new = np.zeros(n)
    x_new[T.indices] = sol[:s]
    return Iterate(x_new, sol[s:])


def newton_step(problem, z, T):
    """One reduced Newton step; ``x`` is set to exactly zero off ``T``."""
    z.check(problem)
    return _newton_from(_Point(problem, z), T)


def solve(problem, z0=None, cfg=None, beta=None):
    """Run the Lagrange-Newton iteration from ``z0`` (origin by default).

    Returns a :class:`SolverReport`; a singular reduced system ends the run
    with status ``SingularSystem`` and ``failed_iteration`` set.
    """
    if cfg is None:
        if beta is None:
            raise ValueError("pass either cfg or beta")
        cfg = SolverConfig(beta=beta)
    z = Iterate.zeros(problem.n, problem.m) if z0 is None else Iterate(z0.x.copy(), z0.y.copy())
    z.check(problem)

    t0 = time.perf_counter()
    etas, supports, steps, iterates = [], [], [], []
    status = Status.MAX_ITERATIONS
    failed = None
    message = ""
    k = 0
    while True:
        if cfg.keep_iterates:
            iterates.append(z)
        pt = _Point(problem, z)
        T = select_index_set(z.x, pt.q, cfg.beta, problem.s)
        supports.append(T)
        etas.append(_eta(pt, T, cfg.beta))
        if etas[-1] <= cfg.epsilon:
            status = Status.CONVERGED
            break
        if k >= cfg.max_iter:
            break
        try:
            z_new = _newton_from(pt, T)
        except SingularSystem as exc:
            exc.iteration = k
            status = Status.SINGULAR_SYSTEM
            failed = k
            message = str(exc)
            break
        if not (np.all(np.isfinite(z_new.x)) and np.all(np.isfinite(z_new.y))):
            status = Status.SINGULAR_SYSTEM
            failed = k
            message = "Newton step produced non-finite values"
            break
        steps.append(float(np.linalg.norm(z_new.stacked() - z.stacked())))
        z = z_new
        k += 1
        if np.linalg.norm(z.stacked()) > DIVERGENCE_BOUND:
            message = f"iterate norm exceeded {DIVERGENCE_BOUND:.0e}"
            if cfg.keep_iterates:
                iterates.append(z)
            pt = _Point(problem, z)
            T = select_index_set(z.x, pt.q, cfg.beta, problem.s)
            supports.append(T)
            etas.append(_eta(pt, T, cfg.beta))
            break

    wall = time.perf_counter() - t0
    verdict = None
    if status is Status.CONVERGED:
        tol = 1e-6 * (1.0 + float(np.linalg.norm(z.x)))
        verdict = classify_stationarity(problem, z, cfg.beta, tol)
    return SolverReport(
        status=status,
        final=z,
        final_T=supports[-1],
        iterations=k,
        eta_trace=etas,
        support_trace=supports,
        step_norm_trace=steps,
        wall_time=wall,
        verdict=verdict,
        iterates=iterates,
        failed_iteration=failed,
        message=message,
        support_tol=cfg.support_tol,
    )


def convergence_ratio_trace(report, z_star=None, floor=1e-8):
    """Ratios ``||z^{k+1} - z*|| / ||z^k - z*||**2`` over recorded iterates.

    ``z_star`` defaults to the final iterate.  Entries with
    ``||z^k - z*|| <= floor`` are skipped.
    """
    if len(report.iterates) < 3:
        raise InsufficientHistory(
            f"need at least 3 recorded iterates, have {len(report.iterates)}"
            " (was keep_iterates disabled?)"
        )
    ref = (report.final if z_star is None else z_star).stacked()
    errs = [float(np.linalg.norm(z.stacked() - ref)) for z in report.iterates]
    return [errs[k + 1] / errs[k] ** 2 for k in range(len(errs) - 1) if errs[k] > floor]


def error_trace(report, z_star=None):
    ref = (report.final if z_star is None else z_star).stacked()
    return [float(np.linalg.norm(z.stacked() - ref)) for z in report.iterates]
