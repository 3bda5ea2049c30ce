"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

Every public kernel name is bound to one of the two implementations at
import time (see ``_accel``).  Both flavours are importable directly as
``<name>_nb`` / ``<name>_np`` so that tests and the benchmark can compare
them inside a single process.

Tensor layout: co-skewness is stored as an ``(n, n*n)`` array whose column
``j*n + k`` holds entry ``(i; j, k)``; co-kurtosis as ``(n, n**3)`` with
column ``j*n*n + k*n + l``.  This matches ``np.kron(x, x)`` ordering.
"""
import numpy as np

from ._accel import njit, pick

# ---------------------------------------------------------------- LU


@njit
def lu_factor_nb(a, tiny):
    """In-place LU with partial pivoting; returns ``(lu, perm, bad_col)``.

    ``bad_col`` is -1 on success, otherwise the column whose best pivot
    magnitude is at or below ``tiny``.
    """
    k = a.shape[0]
    perm = np.arange(k)
    for j in range(k):
        p = j
        best = abs(a[j, j])
        for i in range(j + 1, k):
            v = abs(a[i, j])
            if v > best:
                best = v
                p = i
        if best <= tiny:
            return a, perm, j
        if p != j:
            for c in range(k):
                tmp = a[j, c]
                a[j, c] = a[p, c]
                a[p, c] = tmp
            tp = perm[j]
            perm[j] = perm[p]
            perm[p] = tp
        piv = a[j, j]
        for i in range(j + 1, k):
            lij = a[i, j] / piv
            a[i, j] = lij
            if lij != 0.0:
                for c in range(j + 1, k):
                    a[i, c] -= lij * a[j, c]
    return a, perm, -1


def lu_factor_np(a, tiny):
    k = a.shape[0]
    perm = np.arange(k)
    for j in range(k):
        p = j + int(np.argmax(np.abs(a[j:, j])))
        if abs(a[p, j]) <= tiny:
            return a, perm, j
        if p != j:
            a[[j, p], :] = a[[p, j], :]
            perm[[j, p]] = perm[[p, j]]
        a[j + 1:, j] /= a[j, j]
        a[j + 1:, j + 1:] -= np.outer(a[j + 1:, j], a[j, j + 1:])
    return a, perm, -1


@njit
def lu_substitute_nb(lu, perm, rhs):
    k = lu.shape[0]
    out = np.empty(k)
    for i in range(k):
        acc = rhs[perm[i]]
        for c in range(i):
            acc -= lu[i, c] * out[c]
        out[i] = acc
    for i in range(k - 1, -1, -1):
        acc = out[i]
        for c in range(i + 1, k):
            acc -= lu[i, c] * out[c]
        out[i] = acc / lu[i, i]
    return out


def lu_substitute_np(lu, perm, rhs):
    k = lu.shape[0]
    out = rhs[perm].astype(np.float64, copy=True)
    for i in range(1, k):
        out[i] -= lu[i, :i] @ out[:i]
    for i in range(k - 1, -1, -1):
        out[i] = (out[i] - lu[i, i + 1:] @ out[i + 1:]) / lu[i, i]
    return out


# ---------------------------------------------------------- co-moments


@njit(fastmath=True)
def comoments_nb(r):
    t_obs, n = r.shape
    rt = np.ascontiguousarray(r.T)
    sigma = np.zeros((n, n))
    phi = np.zeros((n, n * n))
    psi = np.zeros((n, n * n * n))
    nn = n * n
    inv = 1.0 / t_obs
    w2 = np.empty(t_obs)
    w3 = np.empty(t_obs)
    idx = np.empty(4, dtype=np.int64)
    # unique index tuples i <= j <= k <= l, scattered to every permutation
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for t in range(t_obs):
                w2[t] = rt[i, t] * rt[j, t]
                acc += w2[t]
            sigma[i, j] = acc * inv
            sigma[j, i] = acc * inv
            for k in range(j, n):
                acc = 0.0
                for t in range(t_obs):
                    w3[t] = w2[t] * rt[k, t]
                    acc += w3[t]
                acc *= inv
                idx[0] = i
                idx[1] = j
                idx[2] = k
                for a in range(3):
                    for b in range(3):
                        if b == a:
                            continue
                        c = 3 - a - b
                        phi[idx[a], idx[b] * n + idx[c]] = acc
                for l in range(k, n):
                    acc4 = 0.0
                    for t in range(t_obs):
                        acc4 += w3[t] * rt[l, t]
                    acc4 *= inv
                    idx[3] = l
                    for a in range(4):
                        for b in range(4):
                            if b == a:
                                continue
                            for c in range(4):
                                if c == a or c == b:
                                    continue
                                d = 6 - a - b - c
                                psi[idx[a], idx[b] * nn + idx[c] * n + idx[d]] = acc4
    return sigma, phi, psi


def comoments_np(r):
    t_obs, n = r.shape
    sigma = r.T @ r / t_obs
    rr = (r[:, :, None] * r[:, None, :]).reshape(t_obs, n * n)
    phi = r.T @ rr / t_obs
    psi = (rr.T @ rr / t_obs).reshape(n, n ** 3)
    return sigma, phi, psi


# ------------------------------------------------ Kronecker contractions


@njit(fastmath=True)
def phi_ix_nb(phi, x):
    """``Phi (I kron x)`` as an ``(n, n)`` matrix."""
    n = x.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            base = j * n
            for k in range(n):
                acc += phi[i, base + k] * x[k]
            out[i, j] = acc
    return out


def phi_ix_np(phi, x):
    n = x.shape[0]
    return phi.reshape(n, n, n) @ x


@njit(fastmath=True)
def psi_ixx_nb(psi, x):
    """``Psi (I kron x kron x)`` as an ``(n, n)`` matrix."""
    n = x.shape[0]
    nn = n * n
    xx = np.empty(nn)
    for k in range(n):
        for l in range(n):
            xx[k * n + l] = x[k] * x[l]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            base = j * nn
            for kl in range(nn):
                acc += psi[i, base + kl] * xx[kl]
            out[i, j] = acc
    return out


def psi_ixx_np(psi, x):
    n = x.shape[0]
    return psi.reshape(n, n, n, n) @ x @ x


lu_factor = pick(lu_factor_nb, lu_factor_np)
lu_substitute = pick(lu_substitute_nb, lu_substitute_np)
comoments = pick(comoments_nb, comoments_np)
phi_ix = pick(phi_ix_nb, phi_ix_np)
psi_ixx = pick(psi_ixx_nb, psi_ixx_np)
