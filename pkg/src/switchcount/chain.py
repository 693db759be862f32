"""Two-state transition structure and exact latent-state marginalization.

State 0 is the zero-count regime (counts identically zero), state 1 the
normal-count regime.  Each segment carries its own pair of transition
probabilities; the chain is stationary, so recursions start from the
stationary distribution rather than an estimated initial law.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParamDomainError

__all__ = [
    "TransitionPair",
    "StationaryPair",
    "stationary",
    "stationary_probs",
    "segment_forward_loglik",
    "state_path_log_prior",
    "count_transitions",
]


@dataclass(frozen=True)
class TransitionPair:
    """Per-segment switching probabilities, both strictly inside (0, 1).

    p01 is the zero-state -> normal-state probability, p10 the reverse.
    Boundary values are rejected: they would degenerate the stationary
    distribution and break the conjugate Beta update.
    """

    p01: float
    p10: float

    def __post_init__(self):
        for name in ("p01", "p10"):
            p = getattr(self, name)
            if not (0.0 < p < 1.0) or not np.isfinite(p):
                raise ParamDomainError(f"{name}={p!r} must lie strictly in (0, 1)")


@dataclass(frozen=True)
class StationaryPair:
    """Long-run state probabilities (pbar0, pbar1), summing to one."""

    pbar0: float
    pbar1: float


def stationary(tp: TransitionPair) -> StationaryPair:
    """Stationary distribution of the two-state chain.

    Closed form pbar0 = p10/(p01+p10), pbar1 = p01/(p01+p10); both solve
    the stationarity fixed-point equations to machine precision.
    """
    denom = tp.p01 + tp.p10
    return StationaryPair(pbar0=tp.p10 / denom, pbar1=tp.p01 / denom)


def stationary_probs(p01, p10):
    """Vectorized pbar1 for arrays of transition probabilities."""
    p01 = np.asarray(p01, dtype=np.float64)
    p10 = np.asarray(p10, dtype=np.float64)
    return p01 / (p01 + p10)


def segment_forward_loglik(counts, rates, alpha, tp: TransitionPair) -> float:
    """Log-likelihood of one segment's count sequence with states summed out.

    Marginalizes the 2^T latent state paths exactly by the scaled forward
    recursion, initialized at the stationary distribution.  ``alpha`` is the
    NB dispersion, or None for a Poisson normal-count state.

    Parameters
    ----------
    counts : (T,) int array
    rates : (T,) positive rates of the normal-count state
    alpha : float > 0 or None
    tp : TransitionPair
    """
    counts = np.asarray(counts, dtype=np.int64).reshape(1, -1)
    rates = np.asarray(rates, dtype=np.float64).reshape(1, -1)
    if counts.shape != rates.shape:
        raise ParamDomainError("counts and rates must have equal length")
    if np.any(rates <= 0):
        raise ParamDomainError("rates must be > 0")
    if alpha is None:
        family, a = kernels.FAMILY_POISSON, 1.0
    else:
        if alpha <= 0:
            raise ParamDomainError("alpha must be > 0 (None selects Poisson)")
        family, a = kernels.FAMILY_NB, float(alpha)
    out = kernels.forward_loglik(
        counts, rates, a, family, np.array([tp.p01]), np.array([tp.p10])
    )
    return float(out[0])


def state_path_log_prior(states, p01, p10):
    """Log prior probability of per-segment state paths under the chain.

    ``states`` is (N, T) in {0,1}; ``p01``/``p10`` are (N,) arrays.  The
    first state is weighted by the stationary distribution.  Returns (N,).
    """
    states = np.asarray(states)
    p01 = np.asarray(p01, dtype=np.float64)
    p10 = np.asarray(p10, dtype=np.float64)
    pbar1 = stationary_probs(p01, p10)
    first = np.where(states[:, 0] == 1, np.log(pbar1), np.log1p(-pbar1))
    prev, nxt = states[:, :-1], states[:, 1:]
    step = np.where(
        prev == 0,
        np.where(nxt == 1, np.log(p01)[:, None], np.log1p(-p01)[:, None]),
        np.where(nxt == 0, np.log(p10)[:, None], np.log1p(-p10)[:, None]),
    )
    return first + step.sum(axis=1)


def count_transitions(states):
    """Per-segment transition counts (n00, n01, n10, n11) from a state matrix."""
    prev, nxt = states[:, :-1], states[:, 1:]
    n00 = np.sum((prev == 0) & (nxt == 0), axis=1)
    n01 = np.sum((prev == 0) & (nxt == 1), axis=1)
    n10 = np.sum((prev == 1) & (nxt == 0), axis=1)
    n11 = np.sum((prev == 1) & (nxt == 1), axis=1)
    return n00, n01, n10, n11
