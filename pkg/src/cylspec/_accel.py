"""Select between numba-compiled kernels and the pure-numpy fallback.

Set ``CYLSPEC_NO_NUMBA=1`` to force the numpy path (also used when numba is
not importable). The choice is made once, at import time.
"""
import os

_flag = os.environ.get("CYLSPEC_NO_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _flag not in ("1", "true", "yes", "on")


def njit(fn):
    """Compile ``fn`` with numba when available, else return None."""
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True, nogil=True)(fn)


def backend():
    return "numba" if USE_NUMBA else "numpy"
