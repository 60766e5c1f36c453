"""Kernel backend selection.

Set ``STOLARSKY_BACKEND=numpy`` to bypass numba and run the pure-numpy
path. The default is numba when it is importable.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

REQUESTED = os.environ.get("STOLARSKY_BACKEND", "numba").strip().lower()
USE_NUMBA = numba is not None and REQUESTED != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(fn):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
