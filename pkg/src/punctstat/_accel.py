"""Backend switch for the numeric kernels.

Kernels are written twice: a numba ``@njit`` loop version and a vectorised
numpy version. ``PUNCTSTAT_BACKEND=numpy`` (or ``PUNCTSTAT_NO_NUMBA=1``)
forces the numpy path; otherwise numba is used when it imports.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - depends on environment
    numba = None

HAVE_NUMBA = numba is not None


def _numba_requested() -> bool:
    if os.environ.get("PUNCTSTAT_NO_NUMBA", "").strip().lower() in ("1", "true", "yes"):
        return False
    return os.environ.get("PUNCTSTAT_BACKEND", "numba").strip().lower() != "numpy"


USE_NUMBA = HAVE_NUMBA and _numba_requested()
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(fn):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)
