"""Backend switch for the compiled kernels.

Set ``NCLUSTER_BACKEND=numpy`` to force the pure-numpy path (useful for
debugging and for platforms without numba).  Any other value, or leaving the
variable unset, uses numba when it can be imported.
"""
import logging
import os

logger = logging.getLogger(__name__)

_requested = os.environ.get("NCLUSTER_BACKEND", "numba").strip().lower()

try:
    if _requested == "numpy":
        raise ImportError("numba disabled by NCLUSTER_BACKEND=numpy")
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    HAVE_NUMBA = True
except ImportError as exc:
    numba = None
    HAVE_NUMBA = False
    if _requested != "numpy":
        logger.warning("numba unavailable (%s); using numpy kernels", exc)

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
