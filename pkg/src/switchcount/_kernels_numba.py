"""Numba ``@njit`` implementations of the hot kernels.

Same signatures and semantics as ``_kernels_numpy``; see that module for the
contracts.  Scalar loops over segments keep the working set in registers,
which is what makes the MCMC sweep loop cheap.
"""

import math

import numpy as np
from numba import njit

FAMILY_POISSON = 0
FAMILY_NB = 1

_NJIT = {"cache": True, "fastmath": False}


@njit(**_NJIT)
def _cell_logpmf(a, lam, alpha, family):
    if family == FAMILY_POISSON:
        return a * math.log(lam) - lam - math.lgamma(a + 1.0)
    r = 1.0 / alpha
    return (
        math.lgamma(a + r)
        - math.lgamma(r)
        - math.lgamma(a + 1.0)
        + r * math.log(r / (r + lam))
        + a * math.log(lam / (r + lam))
    )


@njit(**_NJIT)
def _logaddexp(x, y):
    if x == -np.inf:
        return y
    if y == -np.inf:
        return x
    m = x if x > y else y
    return m + math.log(math.exp(x - m) + math.exp(y - m))


@njit(**_NJIT)
def nb_logpmf(a, lam, alpha):
    out = np.empty(a.shape[0])
    for i in range(a.shape[0]):
        out[i] = _cell_logpmf(a[i], lam[i], alpha, FAMILY_NB)
    return out


@njit(**_NJIT)
def poisson_logpmf(a, lam):
    out = np.empty(a.shape[0])
    for i in range(a.shape[0]):
        out[i] = _cell_logpmf(a[i], lam[i], 1.0, FAMILY_POISSON)
    return out


@njit(**_NJIT)
def plain_loglik(counts, lam, alpha, family):
    total = 0.0
    for i in range(counts.shape[0]):
        for t in range(counts.shape[1]):
            total += _cell_logpmf(counts[i, t], lam[i, t], alpha, family)
    return total


@njit(**_NJIT)
def masked_loglik(counts, states, lam, alpha, family):
    total = 0.0
    for i in range(counts.shape[0]):
        for t in range(counts.shape[1]):
            if states[i, t] == 1:
                total += _cell_logpmf(counts[i, t], lam[i, t], alpha, family)
            elif counts[i, t] > 0:
                return -np.inf
    return total


@njit(**_NJIT)
def state_stats(counts, states, lam, alpha, family):
    """One pass over the cells: complete-data loglik plus per-segment transition counts."""
    n, t_len = counts.shape
    total = 0.0
    trans = np.zeros((n, 4), dtype=np.int64)  # n00, n01, n10, n11
    for i in range(n):
        for t in range(t_len):
            if states[i, t] == 1:
                total += _cell_logpmf(counts[i, t], lam[i, t], alpha, family)
            elif counts[i, t] > 0:
                total = -np.inf
            if t > 0:
                trans[i, 2 * states[i, t - 1] + states[i, t]] += 1
    return total, trans


@njit(**_NJIT)
def zi_loglik(counts, lam, z, alpha, family):
    total = 0.0
    for i in range(counts.shape[0]):
        for t in range(counts.shape[1]):
            zc = z[i, t]
            logq = -_logaddexp(0.0, -zc)
            log1mq = -_logaddexp(0.0, zc)
            logpmf = _cell_logpmf(counts[i, t], lam[i, t], alpha, family)
            if counts[i, t] == 0:
                total += _logaddexp(logq, log1mq + logpmf)
            else:
                total += log1mq + logpmf
    return total


@njit(**_NJIT)
def forward_loglik(counts, lam, alpha, family, p01, p10):
    n, t_len = counts.shape
    out = np.empty(n)
    for i in range(n):
        lp01 = math.log(p01[i])
        l1mp01 = math.log1p(-p01[i])
        lp10 = math.log(p10[i])
        l1mp10 = math.log1p(-p10[i])
        pbar1 = p01[i] / (p01[i] + p10[i])

        e1 = _cell_logpmf(counts[i, 0], lam[i, 0], alpha, family)
        la0 = math.log1p(-pbar1) + (0.0 if counts[i, 0] == 0 else -np.inf)
        la1 = math.log(pbar1) + e1
        total = la0 if la0 > la1 else la1
        la0 -= total
        la1 -= total
        for t in range(1, t_len):
            e0 = 0.0 if counts[i, t] == 0 else -np.inf
            e1 = _cell_logpmf(counts[i, t], lam[i, t], alpha, family)
            na0 = e0 + _logaddexp(la0 + l1mp01, la1 + lp10)
            na1 = e1 + _logaddexp(la0 + lp01, la1 + l1mp10)
            m = na0 if na0 > na1 else na1
            total += m
            la0 = na0 - m
            la1 = na1 - m
        out[i] = total + _logaddexp(la0, la1)
    return out


@njit(**_NJIT)
def ffbs(counts, lam, alpha, family, p01, p10, u):
    n, t_len = counts.shape
    states = np.zeros((n, t_len), dtype=np.int64)
    lf0 = np.empty(t_len)
    lf1 = np.empty(t_len)
    for i in range(n):
        lp01 = math.log(p01[i])
        l1mp01 = math.log1p(-p01[i])
        lp10 = math.log(p10[i])
        l1mp10 = math.log1p(-p10[i])
        pbar1 = p01[i] / (p01[i] + p10[i])

        e1 = _cell_logpmf(counts[i, 0], lam[i, 0], alpha, family)
        lf0[0] = math.log1p(-pbar1) + (0.0 if counts[i, 0] == 0 else -np.inf)
        lf1[0] = math.log(pbar1) + e1
        norm = _logaddexp(lf0[0], lf1[0])
        lf0[0] -= norm
        lf1[0] -= norm
        for t in range(1, t_len):
            e0 = 0.0 if counts[i, t] == 0 else -np.inf
            e1 = _cell_logpmf(counts[i, t], lam[i, t], alpha, family)
            pred0 = _logaddexp(lf0[t - 1] + l1mp01, lf1[t - 1] + lp10)
            pred1 = _logaddexp(lf0[t - 1] + lp01, lf1[t - 1] + l1mp10)
            lf0[t] = e0 + pred0
            lf1[t] = e1 + pred1
            norm = _logaddexp(lf0[t], lf1[t])
            lf0[t] -= norm
            lf1[t] -= norm

        states[i, t_len - 1] = 1 if u[i, t_len - 1] < math.exp(lf1[t_len - 1]) else 0
        for t in range(t_len - 2, -1, -1):
            if states[i, t + 1] == 1:
                w1 = lf1[t] + l1mp10
                w0 = lf0[t] + lp01
            else:
                w1 = lf1[t] + lp10
                w0 = lf0[t] + l1mp01
            if w0 == -np.inf:
                prob1 = 1.0
            else:
                d = w0 - w1
                prob1 = 1.0 / (1.0 + math.exp(d)) if d < 700.0 else 0.0
            states[i, t] = 1 if u[i, t] < prob1 else 0
    return states
