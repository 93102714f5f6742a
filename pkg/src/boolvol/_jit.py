"""Backend selection for the hot kernels.

Kernels are written once in numba-compatible Python.  With numba available
they are compiled with ``@njit``; setting ``BOOLVOL_DISABLE_NUMBA=1`` (or a
missing numba install) leaves them as plain Python/numpy functions.  Both
paths consume the random streams identically, so results are bit-identical.
"""

import os

_disabled = os.environ.get("BOOLVOL_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    import numba
except ImportError:  # pragma: no cover - exercised through the env flag
    numba = None

NUMBA_ENABLED = numba is not None


def jit(fn):
    """Compile ``fn`` with numba when enabled, otherwise return it unchanged."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def backend_name():
    return "numba" if NUMBA_ENABLED else "python"
