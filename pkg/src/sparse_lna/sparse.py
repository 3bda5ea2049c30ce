"""l0 geometry: supports, hard thresholding and index-set selection."""
import numpy as np


class BadSparsityLevel(ValueError):
    pass


def _check_level(s, n):
    if not (1 <= s <= n):
        raise BadSparsityLevel(f"sparsity level {s} outside [1, {n}]")


class IndexSet:
    """Sorted set of ``s`` distinct positions in ``range(n)``."""

    __slots__ = ("indices", "n", "_complement")

    def __init__(self, indices, n):
        idx = np.array(sorted(int(i) for i in indices), dtype=np.int64)
        if idx.size and (idx[0] < 0 or idx[-1] >= n):
            raise BadSparsityLevel(f"index out of range for n={n}: {idx.tolist()}")
        if np.any(np.diff(idx) <= 0):
            raise BadSparsityLevel(f"duplicate indices: {idx.tolist()}")
        idx.setflags(write=False)
        self.indices = idx
        self.n = int(n)
        self._complement = None

    @property
    def s(self):
        return int(self.indices.size)

    @property
    def complement(self):
        if self._complement is None:
            mask = np.ones(self.n, dtype=bool)
            mask[self.indices] = False
            comp = np.flatnonzero(mask)
            comp.setflags(write=False)
            self._complement = comp
        return self._complement

    def mask(self):
        m = np.zeros(self.n, dtype=bool)
        m[self.indices] = True
        return m

    def tolist(self):
        return self.indices.tolist()

    def __len__(self):
        return self.s

    def __iter__(self):
        return iter(self.tolist())

    def __contains__(self, i):
        return bool(np.any(self.indices == i))

    def __eq__(self, other):
        if isinstance(other, IndexSet):
            return self.n == other.n and np.array_equal(self.indices, other.indices)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self):
        return f"IndexSet({self.tolist()}, n={self.n})"


def support(x, tol=0.0):
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return np.flatnonzero(np.abs(np.asarray(x, dtype=np.float64)) > tol)


def sth_largest_abs(x, s):
    """The ``s``-th largest entry of ``|x|`` (counting multiplicity)."""
    a = np.abs(np.asarray(x, dtype=np.float64))
    _check_level(s, a.size)
    return float(np.partition(a, a.size - s)[a.size - s])


def _top_s(keys_primary, s, prefer=None):
    n = keys_primary.size
    idx = np.arange(n)
    if prefer is None:
        order = np.lexsort((idx, -keys_primary))
    else:
        order = np.lexsort((idx, ~prefer, -keys_primary))
    return np.sort(order[:s])


def project_sparse(z, s):
    """One element of the projection onto ``{x : ||x||_0 <= s}``.

    Keeps the ``s`` largest magnitudes; ties go to the smaller index.
    """
    z = np.asarray(z, dtype=np.float64)
    _check_level(s, z.size)
    keep = _top_s(np.abs(z), s)
    out = np.zeros_like(z)
    out[keep] = z[keep]
    return out


def select_index_set(x, grad_l, beta, s):
    """Pick ``T`` collecting the ``s`` largest ``|x - beta * grad_l|``.

    Ties prefer indices already in ``supp(x)``, then the smaller index, so
    the choice is deterministic and sticks to the current support.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    x = np.asarray(x, dtype=np.float64)
    grad_l = np.asarray(grad_l, dtype=np.float64)
    if x.shape != grad_l.shape:
        raise ValueError(f"x {x.shape} and gradient {grad_l.shape} differ in shape")
    _check_level(s, x.size)
    u = x - beta * grad_l
    return IndexSet(_top_s(np.abs(u), s, prefer=(x != 0)), x.size)
