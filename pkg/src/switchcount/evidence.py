"""Marginal likelihoods, Bayes factors, and DIC.

The log marginal likelihood uses the harmonic mean of the per-draw
likelihoods, stabilized by a max shift.  The estimator's instability is a
known property; reports therefore carry a bootstrap confidence interval
and a warning flag when that interval is wider than 2 nats.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .mcmc import ChainDraws, posterior_mean_params
from .models import loglik_integrated

__all__ = [
    "EvidenceReport",
    "log_marginal_harmonic",
    "bayes_log_factor",
    "bootstrap_log_ml_ci",
    "dic",
    "evidence_report",
]

WIDE_CI_NATS = 2.0


@dataclass(frozen=True)
class EvidenceReport:
    log_ml: float
    log_ml_ci: tuple
    dic: float
    posterior_mean_loglik: float
    max_observed_loglik: float
    unstable: bool


def _check_draws(loglik_draws, minimum=100):
    arr = np.asarray(loglik_draws, dtype=np.float64).ravel()
    if arr.size < minimum:
        raise DataError(f"need at least {minimum} draws, got {arr.size}")
    if np.any(~np.isfinite(arr)):
        raise DataError("log-likelihood draws must all be finite")
    return arr


def log_marginal_harmonic(loglik_draws) -> float:
    """Harmonic-mean log marginal likelihood from posterior log-likelihood draws.

    Computes -(log mean exp(-ll)) with a max shift; a constant sequence c
    returns exactly c.  Never exceeds the largest draw.
    """
    ll = _check_draws(loglik_draws)
    neg = -ll
    m = np.max(neg)
    return float(-(m + np.log(np.mean(np.exp(neg - m)))))


def bayes_log_factor(log_ml_2: float, log_ml_1: float) -> float:
    """Log Bayes factor of model 2 over model 1 under equal prior odds; positive favors 2."""
    if not (np.isfinite(log_ml_2) and np.isfinite(log_ml_1)):
        raise DataError("log marginal likelihoods must be finite")
    return float(log_ml_2) - float(log_ml_1)


def bootstrap_log_ml_ci(loglik_draws, n_boot: int = 1000, level: float = 0.95,
                        seed: int = 0) -> tuple:
    """Percentile bootstrap interval for the harmonic-mean log marginal likelihood."""
    ll = _check_draws(loglik_draws)
    rng = np.random.default_rng(seed)
    neg = -ll
    m = np.max(neg)
    shifted = np.exp(neg - m)
    estimates = np.empty(n_boot)
    for b in range(n_boot):
        sample = shifted[rng.integers(0, ll.size, ll.size)]
        estimates[b] = -(m + np.log(np.mean(sample)))
    a = (1.0 - level) / 2.0
    lo, hi = np.quantile(estimates, [a, 1.0 - a])
    return (float(lo), float(hi))


def dic(deviance_draws, deviance_at_posterior_mean: float) -> float:
    """Deviance information criterion: 2 * mean deviance - deviance at the posterior mean."""
    dev = np.asarray(deviance_draws, dtype=np.float64).ravel()
    if np.any(~np.isfinite(dev)) or not np.isfinite(deviance_at_posterior_mean):
        raise DataError("deviances must be finite")
    return float(2.0 * np.mean(dev) - deviance_at_posterior_mean)


def evidence_report(draws: ChainDraws, data, n_boot: int = 1000, seed: int = 0) -> EvidenceReport:
    """Assemble the model-selection summary for one fit.

    The deviance at the posterior mean plugs in posterior means of the
    continuous parameters (and transitions); for switching specs the
    latent states are integrated out there, since a point state matrix
    has no meaningful mean.
    """
    ll = draws.pooled_logliks()
    log_ml = log_marginal_harmonic(ll)
    ci = bootstrap_log_ml_ci(ll, n_boot=n_boot, seed=seed)
    mean_params = posterior_mean_params(draws)
    ll_at_mean = loglik_integrated(draws.spec, mean_params, data)
    return EvidenceReport(
        log_ml=log_ml,
        log_ml_ci=ci,
        dic=dic(-2.0 * ll, -2.0 * ll_at_mean),
        posterior_mean_loglik=float(np.mean(ll)),
        max_observed_loglik=float(np.max(ll)),
        unstable=bool(ci[1] - ci[0] > WIDE_CI_NATS),
    )
