"""Dense vector/matrix helpers and the LU solver used for every Newton step.

Matrices and vectors are plain float64 numpy arrays (row-major).  The
functions here check shapes at the boundary and raise
:class:`DimensionMismatch` on misuse.
"""
import numpy as np

from . import kernels

PIVOT_RTOL = 1e-14


class DimensionMismatch(ValueError):
    pass


class SingularMatrix(ArithmeticError):
    """Raised when an LU pivot drops below ``1e-14 * ||M||_inf``."""

    def __init__(self, column, pivot_floor):
        super().__init__(
            f"pivot in column {column} below {pivot_floor:.3e}; matrix is numerically singular"
        )
        self.column = column
        self.pivot_floor = pivot_floor


class NonFiniteData(ValueError):
    pass


def as_vector(v, length=None, name="vector"):
    """Return ``v`` as a finite 1-d float64 array, optionally of fixed length."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-d, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise DimensionMismatch(f"{name} has length {arr.shape[0]}, expected {length}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteData(f"{name} contains NaN or Inf")
    return arr


def as_matrix(m, shape=None, name="matrix"):
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-d, got shape {arr.shape}")
    if shape is not None:
        for got, want in zip(arr.shape, shape):
            if want is not None and got != want:
                raise DimensionMismatch(f"{name} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteData(f"{name} contains NaN or Inf")
    return arr


def matvec(m, v):
    m = np.asarray(m, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"cannot multiply {m.shape} by {v.shape}")
    return m @ v


def transpose(m):
    return np.ascontiguousarray(np.asarray(m, dtype=np.float64).T)


def norm2(v):
    return float(np.linalg.norm(np.asarray(v, dtype=np.float64)))


def norm_inf(v):
    v = np.asarray(v, dtype=np.float64)
    return float(np.max(np.abs(v))) if v.size else 0.0


def frobenius(m):
    return float(np.linalg.norm(np.asarray(m, dtype=np.float64), "fro"))


def matrix_norm_inf(m):
    """Maximum absolute row sum."""
    m = np.asarray(m, dtype=np.float64)
    return float(np.max(np.sum(np.abs(m), axis=1))) if m.size else 0.0


class LUFactors:
    """Packed LU factors of a square matrix with its row permutation."""

    __slots__ = ("lu", "perm")

    def __init__(self, lu, perm):
        self.lu = lu
        self.perm = perm

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape != (self.lu.shape[0],):
            raise DimensionMismatch(f"rhs shape {rhs.shape} does not match {self.lu.shape}")
        return kernels.lu_substitute(self.lu, self.perm, np.ascontiguousarray(rhs))


def lu_factor(m):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"LU needs a square matrix, got {m.shape}")
    floor = PIVOT_RTOL * matrix_norm_inf(m)
    if m.shape[0] == 0:
        return LUFactors(m.copy(), np.arange(0))
    lu, perm, bad = kernels.lu_factor(np.array(m, dtype=np.float64, order="C"), floor)
    if bad >= 0:
        raise SingularMatrix(int(bad), floor)
    return LUFactors(lu, perm)


def lu_solve(m, rhs):
    """Solve ``m @ v = rhs`` by LU with partial (row) pivoting."""
    m = np.asarray(m, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or rhs.shape != (m.shape[0],):
        raise DimensionMismatch(f"cannot solve {m.shape} system with rhs {rhs.shape}")
    return lu_factor(m).solve(rhs)


def pivot_rank(m):
    """Numerical rank of ``m`` from diagonally pivoted elimination of its Gram
    matrix (pivots below ``1e-10`` relative count as zero)."""
    m = np.asarray(m, dtype=np.float64)
    g = m.T @ m if m.shape[0] >= m.shape[1] else m @ m.T
    k = g.shape[0]
    if k == 0:
        return 0
    floor = 1e-10 * matrix_norm_inf(g)
    a = np.array(g, order="C")
    rank = 0
    for j in range(k):
        p = j + int(np.argmax(np.abs(np.diag(a)[j:])))
        if abs(a[p, p]) <= floor:
            break
        if p != j:
            a[[j, p], :] = a[[p, j], :]
            a[:, [j, p]] = a[:, [p, j]]
        a[j + 1:, j + 1:] -= np.outer(a[j + 1:, j], a[j, j + 1:]) / a[j, j]
        rank += 1
    return rank
