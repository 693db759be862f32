"""Gelman-Rubin convergence diagnostics for multi-chain MCMC output.

PSRF is the univariate potential scale reduction factor
sqrt(((n-1)/n * W + B/n) / W); MPSRF is the Brooks-Gelman multivariate
version sqrt((n-1)/n + (m+1)/m * lambda1) with lambda1 the top eigenvalue
of W^{-1} B/n.  Both are computed over continuous parameters only --
coefficients, log dispersion, zero-inflation parameters, and transition
probabilities -- never the latent states.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegenerateVarianceError, ParamDomainError
from .mcmc import ChainDraws

__all__ = ["ConvergenceReport", "psrf", "mpsrf", "convergence_report"]

DEFAULT_PSRF_THRESHOLD = 1.1
_RIDGE = 1e-10


@dataclass(frozen=True)
class ConvergenceReport:
    psrf: dict
    max_psrf: float
    mpsrf: float
    n_chains: int
    n_draws_per_chain: int
    threshold: float
    converged: bool
    ridge_applied: bool


def _within_between(chains):
    """W (within-chain variance) and B/n (variance of chain means)."""
    means = chains.mean(axis=1)
    w = chains.var(axis=1, ddof=1).mean(axis=0)
    b_over_n = means.var(axis=0, ddof=1)
    return w, b_over_n


def psrf(chains) -> float:
    """Potential scale reduction factor for one parameter.

    chains is (m, n): m >= 2 chains of n >= 10 draws each.  Raises
    DegenerateVarianceError when the within-chain variance is zero.
    """
    chains = np.asarray(chains, dtype=np.float64)
    if chains.ndim != 2 or chains.shape[0] < 2:
        raise ParamDomainError("psrf needs an (m, n) matrix with m >= 2 chains")
    m, n = chains.shape
    if n < 10:
        raise ParamDomainError("psrf needs at least 10 draws per chain")
    w, b_over_n = _within_between(chains)
    if w == 0.0:
        raise DegenerateVarianceError("all draws identical; PSRF undefined")
    vhat = (n - 1) / n * w + b_over_n
    return float(np.sqrt(vhat / w))


def mpsrf(chains) -> tuple:
    """Multivariate potential scale reduction factor.

    chains is (m, n, p) with m >= 2 and n > p.  Returns (value,
    ridge_applied); a singular within-chain covariance is regularized by a
    ridge of 1e-10 * trace(W)/p and flagged.
    """
    chains = np.asarray(chains, dtype=np.float64)
    if chains.ndim != 3 or chains.shape[0] < 2:
        raise ParamDomainError("mpsrf needs an (m, n, p) array with m >= 2 chains")
    m, n, p = chains.shape
    if n <= p:
        raise ParamDomainError(f"need more draws than parameters (n={n}, p={p})")

    means = chains.mean(axis=1)
    grand = means.mean(axis=0)
    b_over_n = np.zeros((p, p))
    for j in range(m):
        d = means[j] - grand
        b_over_n += np.outer(d, d)
    b_over_n /= m - 1

    w = np.zeros((p, p))
    for j in range(m):
        d = chains[j] - means[j]
        w += d.T @ d / (n - 1)
    w /= m

    ridge_applied = False
    lam1 = None
    for attempt in (0, 1):
        try:
            eigvals = linalg.eigh(b_over_n, w, eigvals_only=True)
            lam1 = float(eigvals[-1])
            break
        except linalg.LinAlgError:
            if attempt == 1:
                raise
            w = w + np.eye(p) * (_RIDGE * np.trace(w) / p)
            ridge_applied = True
    value = float(np.sqrt((n - 1) / n + (m + 1) / m * lam1))
    return value, ridge_applied


def convergence_report(draws: ChainDraws, threshold: float = DEFAULT_PSRF_THRESHOLD) -> ConvergenceReport:
    """PSRF per continuous parameter plus the joint MPSRF for a fit."""
    chains = draws.draws
    names = list(draws.param_names)
    if draws.transition_draws is not None:
        td = draws.transition_draws
        n_seg = td.shape[2]
        flat = td.reshape(td.shape[0], td.shape[1], 2 * n_seg)
        chains = np.concatenate([chains, flat], axis=2)
        for i in range(n_seg):
            names.append(f"p01[{i}]")
            names.append(f"p10[{i}]")

    per_param = {}
    for idx, name in enumerate(names):
        try:
            per_param[name] = psrf(chains[:, :, idx])
        except DegenerateVarianceError:
            per_param[name] = float("nan")
    finite = [v for v in per_param.values() if np.isfinite(v)]
    max_psrf = float(np.max(finite)) if finite else float("nan")

    m, n, p = chains.shape
    if n > p:
        joint, ridge_applied = mpsrf(chains)
    else:
        # more parameters than draws per chain (very long transition vectors):
        # fall back to the global continuous block for the joint statistic
        joint, ridge_applied = mpsrf(draws.draws)
    converged = bool(np.isfinite(max_psrf) and max_psrf <= threshold
                     and np.isfinite(joint) and joint <= threshold)
    return ConvergenceReport(
        psrf=per_param,
        max_psrf=max_psrf,
        mpsrf=joint,
        n_chains=m,
        n_draws_per_chain=n,
        threshold=threshold,
        converged=converged,
        ridge_applied=ridge_applied,
    )
