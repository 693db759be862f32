"""Elementary count distributions and the log-link rate.

All probability mass functions are computed and consumed in log space;
callers exponentiate only for presentation.  The negative binomial is
parametrized by its mean ``lam`` and over-dispersion ``alpha``, so the
variance is ``lam * (1 + alpha * lam)`` and ``alpha -> 0`` recovers the
Poisson.  ``alpha`` itself is handled as ``log(alpha)`` wherever it is
estimated, which keeps it nonnegative without constrained optimization.
"""

import numpy as np

from . import kernels
from .errors import ParamDomainError, SchemaError

__all__ = ["nb_log_pmf", "poisson_log_pmf", "zero_mass", "rate"]


def _check_counts(a):
    arr = np.atleast_1d(np.asarray(a))
    if np.any(arr < 0):
        raise ParamDomainError("counts must be nonnegative")
    if not np.all(arr == np.floor(arr)):
        raise ParamDomainError("counts must be integers")
    return arr.astype(np.float64)


def _check_rates(lam, shape):
    arr = np.broadcast_to(np.asarray(lam, dtype=np.float64), shape).copy()
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise ParamDomainError("rate lambda must be finite and > 0")
    return arr


def nb_log_pmf(a, lam, alpha):
    """Negative binomial log pmf at count ``a`` for mean ``lam``, dispersion ``alpha``.

    Scalars or broadcastable arrays are accepted; scalars in give a scalar
    out.  ``alpha`` must be strictly positive; use :func:`poisson_log_pmf`
    for the ``alpha = 0`` limit.
    """
    scalar = np.isscalar(a) and np.isscalar(lam)
    arr = _check_counts(a)
    lam_arr = _check_rates(lam, arr.shape)
    if not np.isscalar(alpha) or alpha <= 0:
        raise ParamDomainError("alpha must be a scalar > 0")
    out = kernels.nb_logpmf(arr.ravel(), lam_arr.ravel(), float(alpha))
    out = out.reshape(arr.shape)
    return float(out[0]) if scalar else out


def poisson_log_pmf(a, lam):
    """Poisson log pmf at count ``a`` for rate ``lam``, via log-gamma."""
    scalar = np.isscalar(a) and np.isscalar(lam)
    arr = _check_counts(a)
    lam_arr = _check_rates(lam, arr.shape)
    out = kernels.poisson_logpmf(arr.ravel(), lam_arr.ravel())
    out = out.reshape(arr.shape)
    return float(out[0]) if scalar else out


def zero_mass(a):
    """Point mass at zero: 1 if ``a`` is 0, else 0."""
    if np.isscalar(a):
        return 1.0 if a == 0 else 0.0
    arr = np.asarray(a)
    return np.where(arr == 0, 1.0, 0.0)


def rate(beta, x):
    """Exponential-link rate exp(beta' x).

    Raises SchemaError when the coefficient and covariate vectors disagree
    in length.
    """
    beta = np.asarray(beta, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if beta.shape != x.shape or beta.ndim != 1:
        raise SchemaError(
            f"beta and x must be 1-d vectors of equal length, got {beta.shape} and {x.shape}"
        )
    return float(np.exp(beta @ x))
