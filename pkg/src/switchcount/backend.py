"""Numerical backend selection.

The hot kernels (pmf evaluation, forward recursion, state sampling) exist in
two implementations: a numba ``@njit`` version and a vectorized pure-numpy
version.  The active backend is chosen once at import time:

* ``SWITCHCOUNT_BACKEND=numpy`` forces the numpy fallback,
* ``SWITCHCOUNT_BACKEND=numba`` requires numba and fails loudly if missing,
* unset: numba when importable, numpy otherwise.

``SWITCHCOUNT_THREADS`` caps numba's thread pool (the kernels themselves are
single-threaded per call; the cap exists so callers that parallelize across
chains or seeds can bound total CPU use).
"""

import os

_VALID = ("numba", "numpy")


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _select() -> str:
    requested = os.environ.get("SWITCHCOUNT_BACKEND", "").strip().lower()
    if requested and requested not in _VALID:
        raise ValueError(
            f"SWITCHCOUNT_BACKEND={requested!r}: expected one of {_VALID}"
        )
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not _numba_available():
            raise ImportError("SWITCHCOUNT_BACKEND=numba but numba is not installed")
        return "numba"
    return "numba" if _numba_available() else "numpy"


ACTIVE_BACKEND = _select()


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return ACTIVE_BACKEND


def _apply_thread_cap() -> None:
    cap = os.environ.get("SWITCHCOUNT_THREADS", "").strip()
    if not cap or ACTIVE_BACKEND != "numba":
        return
    import numba

    n = max(1, int(cap))
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


_apply_thread_cap()
