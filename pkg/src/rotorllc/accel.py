"""Numba acceleration toggle.

Hot numeric kernels (see kernels.py) are compiled with numba when it is
available.  Setting the environment variable ROTORLLC_DISABLE_NUMBA=1 before
import forces the pure-numpy fallback path; benchmarks/bench_kernels.py
compares the two.
"""

import os

DISABLE_ENV = "ROTORLLC_DISABLE_NUMBA"


def _probe() -> bool:
    if os.environ.get(DISABLE_ENV, "0") not in ("", "0", "false", "False"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _probe()


def maybe_jit(fn):
    """Compile fn with numba.njit when enabled, else return fn unchanged.

    The decorated function keeps the original python implementation reachable
    via .py_func (numba path) or by being the original itself (fallback).
    """
    if NUMBA_ENABLED:
        from numba import njit

        return njit(cache=True)(fn)
    return fn
