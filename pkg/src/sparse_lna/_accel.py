"""Backend switch for the hot numeric kernels.

Set ``SPARSE_LNA_NUMBA=0`` before import to force the pure-numpy path.
Numba is used whenever it is importable and not disabled.
"""
import os

_FLAG = os.environ.get("SPARSE_LNA_NUMBA", "1").strip().lower()

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _FLAG not in ("0", "false", "no", "off")


def njit(fn=None, *, fastmath=False):
    """Compile ``fn`` with numba when available, otherwise return it as is.

    ``fastmath`` lets numba reorder floating-point reductions (vectorized
    sums); use it only where the summation order is not part of the contract.
    The returned object keeps the python function reachable through
    ``.py_func`` in both cases so tests can exercise the interpreted loop.
    """
    if fn is None:
        return lambda f: njit(f, fastmath=fastmath)
    if not HAS_NUMBA:
        fn.py_func = fn
        return fn
    return numba.njit(cache=True, nogil=True, fastmath=fastmath)(fn)


def pick(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
