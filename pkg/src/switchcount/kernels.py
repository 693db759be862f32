"""Backend dispatch for the hot kernels.

Imports resolve once, at module load, to either the numba or the numpy
implementations depending on :mod:`switchcount.backend`.  Downstream code
imports names from here and stays backend-agnostic.
"""

from .backend import ACTIVE_BACKEND

if ACTIVE_BACKEND == "numba":
    from ._kernels_numba import (  # noqa: F401
        FAMILY_NB,
        FAMILY_POISSON,
        ffbs,
        forward_loglik,
        masked_loglik,
        nb_logpmf,
        plain_loglik,
        poisson_logpmf,
        state_stats,
        zi_loglik,
    )
else:
    from ._kernels_numpy import (  # noqa: F401
        FAMILY_NB,
        FAMILY_POISSON,
        ffbs,
        forward_loglik,
        masked_loglik,
        nb_logpmf,
        plain_loglik,
        poisson_logpmf,
        state_stats,
        zi_loglik,
    )
