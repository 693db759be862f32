"""Independent reference implementations used to check the production paths.

Everything here deliberately avoids switchcount's kernels: emissions come
from scipy.stats, state sums from explicit path enumeration, so agreement
with the package is a genuine dual-route check.
"""

import itertools

import numpy as np
from scipy.special import logsumexp
from scipy.stats import nbinom, poisson


def emission_logpmf(counts, lam, alpha=None):
    """State-1 emission log pmf via scipy's distributions."""
    if alpha is None:
        return poisson.logpmf(counts, lam)
    r = 1.0 / alpha
    return nbinom.logpmf(counts, r, r / (r + lam))


def path_log_prior(path, p01, p10):
    """Log prior of one 0/1 state path under the stationary two-state chain."""
    pbar1 = p01 / (p01 + p10)
    lp = np.log(pbar1) if path[0] == 1 else np.log(1.0 - pbar1)
    for prev, nxt in zip(path[:-1], path[1:]):
        if prev == 0:
            lp += np.log(p01) if nxt == 1 else np.log(1.0 - p01)
        else:
            lp += np.log(p10) if nxt == 0 else np.log(1.0 - p10)
    return lp


def segment_loglik_enumerated(counts, lam, alpha, p01, p10):
    """Exact per-segment marginal log-likelihood by summing all 2^T paths."""
    t_len = len(counts)
    le1 = emission_logpmf(np.asarray(counts), np.asarray(lam), alpha)
    le0 = np.where(np.asarray(counts) == 0, 0.0, -np.inf)
    terms = []
    for path in itertools.product([0, 1], repeat=t_len):
        em = sum(le1[t] if s == 1 else le0[t] for t, s in enumerate(path))
        terms.append(em + path_log_prior(path, p01, p10))
    return logsumexp(terms)


def panel_loglik_enumerated(counts, lam, alpha, transitions):
    """Exact switching log-likelihood via full state-matrix enumeration.

    Enumerates every 0/1 matrix over the N*T cells (2^(N*T) terms), scoring
    complete-data emissions plus the chain prior of every row.
    """
    n, t_len = counts.shape
    le1 = emission_logpmf(counts, lam, alpha)
    le0 = np.where(counts == 0, 0.0, -np.inf)
    terms = []
    for bits in itertools.product([0, 1], repeat=n * t_len):
        mat = np.array(bits).reshape(n, t_len)
        em = np.where(mat == 1, le1, le0).sum()
        if em == -np.inf:
            continue
        lp = sum(
            path_log_prior(mat[i], transitions[i, 0], transitions[i, 1])
            for i in range(n)
        )
        terms.append(em + lp)
    return logsumexp(terms)


def smoothed_state_probs(counts, lam, alpha, p01, p10):
    """Exact per-cell P(s=1 | data) for one segment, by path enumeration."""
    t_len = len(counts)
    le1 = emission_logpmf(np.asarray(counts), np.asarray(lam), alpha)
    le0 = np.where(np.asarray(counts) == 0, 0.0, -np.inf)
    paths = np.array(list(itertools.product([0, 1], repeat=t_len)))
    weights = np.array([
        sum(le1[t] if s == 1 else le0[t] for t, s in enumerate(path))
        + path_log_prior(path, p01, p10)
        for path in paths
    ])
    weights = np.exp(weights - logsumexp(weights))
    return weights @ paths
