"""Lagrange-Newton solver for sparsity-constrained, equality-constrained NLPs.

    minimize f(x)  subject to  h(x) = 0,  ||x||_0 <= s

Hot kernels (LU, co-moments, tensor contractions) are numba-compiled when
numba is importable; set ``SPARSE_LNA_NUMBA=0`` to force the numpy versions.
"""
from ._accel import backend_name
from .lagrangian import (
    NewtonSystem,
    StationarityVerdict,
    assemble_newton_system,
    classify_stationarity,
    eta,
    eval_F,
    full_jacobian,
    grad_L,
    hess_L,
)
from .linalg import DimensionMismatch, LUFactors, NonFiniteData, SingularMatrix, lu_factor, lu_solve
from .problem import DerivativeReport, Iterate, Problem, validate_derivatives
from .solver import (
    InsufficientHistory,
    SingularSystem,
    SolverConfig,
    SolverReport,
    Status,
    convergence_ratio_trace,
    error_trace,
    newton_step,
    solve,
)
from .sparse import BadSparsityLevel, IndexSet, project_sparse, select_index_set, support

__version__ = "0.1.0"
