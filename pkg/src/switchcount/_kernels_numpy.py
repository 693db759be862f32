"""Vectorized numpy implementations of the hot kernels.

Every function here has a numba twin in ``_kernels_numba`` with the same
signature and semantics.  All inputs are plain ndarrays; validation happens
in the public layers.  ``family`` is 0 for Poisson and 1 for negative
binomial.  Counts/rate matrices are indexed ``[segment, period]``.

Log-likelihood kernels return exact ``-inf`` only for a state/count
contradiction (a zero-state cell with a positive count); every other valid
input yields a finite value because all probability mass functions are
evaluated in log space.
"""

import numpy as np
from scipy.special import gammaln

FAMILY_POISSON = 0
FAMILY_NB = 1


def nb_logpmf(a, lam, alpha):
    """Elementwise negative binomial log pmf with mean lam, variance lam(1+alpha*lam).

    Overflowed rates (lam = inf) propagate as NaN, matching the numba twin;
    callers treat non-finite log-likelihoods as rejections.
    """
    a = np.asarray(a, dtype=np.float64)
    r = 1.0 / alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            gammaln(a + r)
            - gammaln(r)
            - gammaln(a + 1.0)
            + r * np.log(r / (r + lam))
            + a * np.log(lam / (r + lam))
        )


def poisson_logpmf(a, lam):
    """Elementwise Poisson log pmf via log-gamma."""
    a = np.asarray(a, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        return a * np.log(lam) - lam - gammaln(a + 1.0)


def _logpmf(counts, lam, alpha, family):
    if family == FAMILY_POISSON:
        return poisson_logpmf(counts, lam)
    return nb_logpmf(counts, lam, alpha)


def plain_loglik(counts, lam, alpha, family):
    """Log-likelihood with every cell in the normal-count state."""
    return float(np.sum(_logpmf(counts, lam, alpha, family)))


def masked_loglik(counts, states, lam, alpha, family):
    """Complete-data log-likelihood given a 0/1 state matrix.

    Zero-state cells must have zero counts; otherwise the exact ``-inf``
    contradiction marker is returned.
    """
    if np.any((states == 0) & (counts > 0)):
        return -np.inf
    logpmf = _logpmf(counts, lam, alpha, family)
    return float(np.sum(logpmf[states == 1]))


def state_stats(counts, states, lam, alpha, family):
    """One pass over the cells: complete-data loglik plus per-segment transition counts."""
    total = masked_loglik(counts, states, lam, alpha, family)
    prev, nxt = states[:, :-1], states[:, 1:]
    trans = np.zeros((states.shape[0], 4), dtype=np.int64)
    code = 2 * prev + nxt
    for c in range(4):
        trans[:, c] = np.sum(code == c, axis=1)
    return total, trans


def zi_loglik(counts, lam, z, alpha, family):
    """Zero-inflated mixture log-likelihood; z is the logit of the zero-state probability."""
    logq = -np.logaddexp(0.0, -z)
    log1mq = -np.logaddexp(0.0, z)
    logpmf = _logpmf(counts, lam, alpha, family)
    positive = log1mq + logpmf
    cell = np.where(counts == 0, np.logaddexp(logq, positive), positive)
    return float(np.sum(cell))


def forward_loglik(counts, lam, alpha, family, p01, p10):
    """Per-segment log-likelihood with the two-state chain summed out.

    Scaled forward recursion in log space, initialized at the stationary
    distribution.  ``p01``/``p10`` must lie strictly inside (0, 1).
    Returns an (n_segments,) vector.
    """
    n, t_len = counts.shape
    logp1 = _logpmf(counts, lam, alpha, family)
    loge0 = np.where(counts == 0, 0.0, -np.inf)

    lp01 = np.log(p01)
    l1mp01 = np.log1p(-p01)
    lp10 = np.log(p10)
    l1mp10 = np.log1p(-p10)
    pbar1 = p01 / (p01 + p10)

    la0 = np.log1p(-pbar1) + loge0[:, 0]
    la1 = np.log(pbar1) + logp1[:, 0]
    total = np.zeros(n)
    m = np.maximum(la0, la1)
    total += m
    la0 = la0 - m
    la1 = la1 - m
    for t in range(1, t_len):
        na0 = loge0[:, t] + np.logaddexp(la0 + l1mp01, la1 + lp10)
        na1 = logp1[:, t] + np.logaddexp(la0 + lp01, la1 + l1mp10)
        m = np.maximum(na0, na1)
        total += m
        la0 = na0 - m
        la1 = na1 - m
    return total + np.logaddexp(la0, la1)


def ffbs(counts, lam, alpha, family, p01, p10, u):
    """Exact backward sampling of state paths from forward-filtered probabilities.

    ``u`` is an (n_segments, n_periods) matrix of uniforms, one per drawn
    state.  Returns an int64 state matrix; cells with positive counts are
    always 1.
    """
    n, t_len = counts.shape
    logp1 = _logpmf(counts, lam, alpha, family)
    loge0 = np.where(counts == 0, 0.0, -np.inf)

    lp01 = np.log(p01)
    l1mp01 = np.log1p(-p01)
    lp10 = np.log(p10)
    l1mp10 = np.log1p(-p10)
    pbar1 = p01 / (p01 + p10)

    lf0 = np.empty((n, t_len))
    lf1 = np.empty((n, t_len))
    lf0[:, 0] = np.log1p(-pbar1) + loge0[:, 0]
    lf1[:, 0] = np.log(pbar1) + logp1[:, 0]
    norm = np.logaddexp(lf0[:, 0], lf1[:, 0])
    lf0[:, 0] -= norm
    lf1[:, 0] -= norm
    for t in range(1, t_len):
        pred0 = np.logaddexp(lf0[:, t - 1] + l1mp01, lf1[:, t - 1] + lp10)
        pred1 = np.logaddexp(lf0[:, t - 1] + lp01, lf1[:, t - 1] + l1mp10)
        lf0[:, t] = loge0[:, t] + pred0
        lf1[:, t] = logp1[:, t] + pred1
        norm = np.logaddexp(lf0[:, t], lf1[:, t])
        lf0[:, t] -= norm
        lf1[:, t] -= norm

    states = np.zeros((n, t_len), dtype=np.int64)
    with np.errstate(over="ignore"):
        p1 = np.exp(lf1[:, t_len - 1])
        states[:, t_len - 1] = u[:, t_len - 1] < p1
        for t in range(t_len - 2, -1, -1):
            nxt = states[:, t + 1]
            w1 = lf1[:, t] + np.where(nxt == 1, l1mp10, lp10)
            w0 = lf0[:, t] + np.where(nxt == 1, lp01, l1mp01)
            p1 = 1.0 / (1.0 + np.exp(w0 - w1))
            states[:, t] = u[:, t] < p1
    return states
