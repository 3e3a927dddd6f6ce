"""Optional numba acceleration for the hot loops.

Kernels are written once as plain Python over numpy arrays and compiled with
``numba.njit`` when available. Set ``NSFD_HIV_NUMBA=0`` in the environment
(before import) to run the uncompiled path.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

ENV_FLAG = "NSFD_HIV_NUMBA"


def _enabled_by_env():
    value = os.environ.get(ENV_FLAG, "1").strip().lower()
    return value not in ("0", "false", "no", "off")


USE_NUMBA = numba is not None and _enabled_by_env()


def maybe_njit(**options):
    """Decorator: ``numba.njit(**options)`` if enabled, identity otherwise."""
    def decorate(fn):
        if not USE_NUMBA:
            return fn
        return numba.njit(**options)(fn)
    return decorate
