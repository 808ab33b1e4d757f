"""Optional numba acceleration.

Set ``QAEVO_DISABLE_NUMBA=1`` to force the pure-numpy kernels.  numba's own
``NUMBA_DISABLE_JIT`` is honoured as well (the jitted kernels then run as
plain Python, which is slow but useful under a debugger).
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None


def numba_enabled() -> bool:
    flag = os.environ.get("QAEVO_DISABLE_NUMBA", "").strip().lower()
    return HAS_NUMBA and flag not in ("1", "true", "yes", "on")


USE_NUMBA = numba_enabled()


def njit(fn):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise."""
    if not HAS_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)
