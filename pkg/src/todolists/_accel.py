"""Kernel compilation backend selection.

Hot loops live in module-level functions decorated with :func:`kernel`.
By default they are compiled with numba's ``@njit``; setting the
environment variable ``TODOLISTS_NUMBA=0`` (or numba being missing)
selects a pure-Python path that runs the very same functions on the
same numpy arrays.  The two paths are observationally identical; the
``backends`` CLI subcommand benchmarks one against the other.
"""

import os

NIL = -1

_flag = os.environ.get("TODOLISTS_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

if _want_numba:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _njit = None
        _want_numba = False
else:
    _njit = None

NUMBA_ENABLED = _want_numba


def kernel(fn):
    """JIT-compile ``fn`` unless the pure-Python backend is selected.

    The returned callable always carries ``py_func`` pointing at the
    original function so both variants stay reachable.
    """
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    fn.py_func = fn
    return fn


def backend_name():
    return "numba" if NUMBA_ENABLED else "python"
