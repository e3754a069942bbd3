"""Backend selection for the hot kernels.

Kernels are written in the subset of numpy that numba can compile. When numba
is importable and ``NETWEIGHT_DISABLE_NUMBA`` is unset (or ``0``), they are
compiled with ``@njit``; otherwise the same source runs as plain numpy.
The choice is made once, at import time.
"""

import os

_flag = os.environ.get("NETWEIGHT_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit

    USE_NUMBA = True
except ImportError:
    _njit = None
    USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(func):
    """Compile ``func`` with numba in nopython/nogil mode, or return it unchanged."""
    if USE_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func


def when_numba(numba_impl, numpy_impl):
    """Pick between a loop implementation (compiled) and a vectorized one."""
    if USE_NUMBA:
        return _njit(cache=True, nogil=True)(numba_impl)
    return numpy_impl
