"""Model specifications and full-data log-likelihoods.

Eight model variants are supported: {negative binomial, Poisson} crossed
with {standard, zero-inflated with rate-linked mixing, zero-inflated with
covariate-linked mixing, Markov switching}.  The Markov switching variants
have a latent zero state per (segment, period) cell; the zero-inflated
variants mix a point mass at zero with the count pmf through a logistic
probability; the standard variants are plain count regressions.

Complete-data likelihoods condition on a 0/1 state matrix and return the
exact ``-inf`` marker (never an exception) when a zero-state cell carries a
positive count, because samplers must be able to reject such proposals.
State-integrated likelihoods sum the latent states out: exactly, via the
per-segment forward recursion, for the switching variants.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import kernels
from .errors import ParamDomainError, SpecError

__all__ = [
    "Family",
    "Structure",
    "ModelSpec",
    "ParamSet",
    "loglik_complete",
    "loglik_integrated",
    "zero_state_prob",
    "rate_matrix",
    "IMPOSSIBLE",
]

#: Sentinel log-likelihood for a state/count contradiction.  Exact ``-inf``
#: is produced only by that contradiction: pmf values are evaluated in log
#: space and stay finite for every in-domain input, so underflow cannot
#: alias into this marker.
IMPOSSIBLE = -math.inf


class Family(str, Enum):
    NEGATIVE_BINOMIAL = "nb"
    POISSON = "poisson"


class Structure(str, Enum):
    STANDARD = "standard"
    ZERO_INFLATED_TAU = "zi_tau"
    ZERO_INFLATED_GAMMA = "zi_gamma"
    MARKOV_SWITCHING = "markov_switching"


_CLI_NAMES = {
    "nb": (Family.NEGATIVE_BINOMIAL, Structure.STANDARD),
    "poisson": (Family.POISSON, Structure.STANDARD),
    "zinb-tau": (Family.NEGATIVE_BINOMIAL, Structure.ZERO_INFLATED_TAU),
    "zinb-gamma": (Family.NEGATIVE_BINOMIAL, Structure.ZERO_INFLATED_GAMMA),
    "zip-tau": (Family.POISSON, Structure.ZERO_INFLATED_TAU),
    "zip-gamma": (Family.POISSON, Structure.ZERO_INFLATED_GAMMA),
    "msnb": (Family.NEGATIVE_BINOMIAL, Structure.MARKOV_SWITCHING),
    "msp": (Family.POISSON, Structure.MARKOV_SWITCHING),
}


@dataclass(frozen=True)
class ModelSpec:
    """One family plus one structure; immutable and hashable."""

    family: Family
    structure: Structure

    @classmethod
    def from_name(cls, name: str) -> "ModelSpec":
        try:
            family, structure = _CLI_NAMES[name.lower()]
        except KeyError:
            valid = ", ".join(sorted(_CLI_NAMES))
            raise SpecError(f"unknown model {name!r}; valid names: {valid}") from None
        return cls(family, structure)

    @property
    def name(self) -> str:
        for name, (fam, struct) in _CLI_NAMES.items():
            if fam == self.family and struct == self.structure:
                return name
        raise AssertionError("unreachable")

    @property
    def has_dispersion(self) -> bool:
        return self.family == Family.NEGATIVE_BINOMIAL

    @property
    def is_switching(self) -> bool:
        return self.structure == Structure.MARKOV_SWITCHING

    @property
    def is_zero_inflated(self) -> bool:
        return self.structure in (Structure.ZERO_INFLATED_TAU, Structure.ZERO_INFLATED_GAMMA)


def model_names() -> list:
    """All CLI-facing model names."""
    return sorted(_CLI_NAMES)


@dataclass
class ParamSet:
    """Parameters for one model spec.

    beta are the log-link coefficients (first entry is the intercept term).
    Dispersion is carried as log_alpha so that alpha stays positive without
    constrained updates.  gamma applies to the covariate subset gamma_idx
    (default: every column, intercept included).  transitions is (N, 2)
    holding (p01, p10) rows; states is the latent (N, T) matrix, present
    only when conditioning on it.
    """

    beta: np.ndarray
    log_alpha: float | None = None
    tau: float | None = None
    gamma: np.ndarray | None = None
    gamma_idx: np.ndarray | None = None
    transitions: np.ndarray | None = None
    states: np.ndarray | None = None

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=np.float64)
        if self.gamma is not None:
            self.gamma = np.asarray(self.gamma, dtype=np.float64)
        if self.gamma_idx is not None:
            self.gamma_idx = np.asarray(self.gamma_idx, dtype=np.int64)
        if self.transitions is not None:
            self.transitions = np.asarray(self.transitions, dtype=np.float64)
        if self.states is not None:
            self.states = np.asarray(self.states, dtype=np.int64)

    @property
    def alpha(self) -> float | None:
        return None if self.log_alpha is None else math.exp(self.log_alpha)

    def with_states(self, states) -> "ParamSet":
        return replace(self, states=np.asarray(states, dtype=np.int64))

    def validate_for(self, spec: ModelSpec, n_covariates: int) -> None:
        """Raise ParamDomainError unless the fields required by spec are present and in domain."""
        if self.beta.ndim != 1 or self.beta.shape[0] != n_covariates:
            raise ParamDomainError(
                f"beta must have length {n_covariates}, got shape {self.beta.shape}"
            )
        if not np.all(np.isfinite(self.beta)):
            raise ParamDomainError("beta must be finite")
        if spec.has_dispersion:
            if self.log_alpha is None or not np.isfinite(self.log_alpha):
                raise ParamDomainError("log_alpha is required and must be finite")
        if spec.structure == Structure.ZERO_INFLATED_TAU:
            if self.tau is None or not np.isfinite(self.tau):
                raise ParamDomainError("tau is required and must be finite")
        if spec.structure == Structure.ZERO_INFLATED_GAMMA:
            idx = self.resolved_gamma_idx(n_covariates)
            if self.gamma is None or self.gamma.shape != idx.shape:
                raise ParamDomainError("gamma must match its covariate subset")
            if not np.all(np.isfinite(self.gamma)):
                raise ParamDomainError("gamma must be finite")
        if spec.is_switching:
            if self.transitions is None or self.transitions.ndim != 2 or self.transitions.shape[1] != 2:
                raise ParamDomainError("transitions must be an (N, 2) array")
            if np.any(self.transitions <= 0.0) or np.any(self.transitions >= 1.0):
                raise ParamDomainError("transition probabilities must lie strictly in (0, 1)")

    def resolved_gamma_idx(self, n_covariates: int) -> np.ndarray:
        if self.gamma_idx is None:
            return np.arange(n_covariates, dtype=np.int64)
        idx = self.gamma_idx
        if np.any(idx < 0) or np.any(idx >= n_covariates):
            raise ParamDomainError("gamma_idx out of covariate range")
        return idx


def rate_matrix(beta, covariates):
    """Cellwise rates exp(beta' x) as an (N, T) matrix.

    Overflow deliberately propagates as inf so that downstream likelihoods
    go NaN and samplers/optimizers reject the point.
    """
    eta = covariates @ np.asarray(beta, dtype=np.float64)
    with np.errstate(over="ignore"):
        return np.exp(eta)


def _family_args(spec: ModelSpec, params: ParamSet):
    if spec.has_dispersion:
        return float(np.exp(params.log_alpha)), kernels.FAMILY_NB
    return 1.0, kernels.FAMILY_POISSON


def zero_logit_matrix(spec: ModelSpec, params: ParamSet, covariates, lam):
    """Logit of the zero-state probability per cell for zero-inflated specs."""
    if spec.structure == Structure.ZERO_INFLATED_TAU:
        return params.tau * np.log(lam)
    idx = params.resolved_gamma_idx(covariates.shape[2])
    return covariates[:, :, idx] @ params.gamma


def loglik_complete(spec: ModelSpec, params: ParamSet, data) -> float:
    """Complete-data log-likelihood, conditioning on a given state matrix.

    States default to all-ones when absent (standard models).  A zero-state
    cell with a positive count yields the IMPOSSIBLE marker rather than an
    exception.
    """
    params.validate_for(spec, data.n_covariates)
    if params.states is None:
        if spec.is_switching:
            raise ParamDomainError("states are required for the switching complete-data likelihood")
        states = np.ones_like(data.counts)
    else:
        states = params.states
        if states.shape != data.counts.shape:
            raise ParamDomainError("states shape must match the count matrix")
    lam = rate_matrix(params.beta, data.covariates)
    alpha, family = _family_args(spec, params)
    return kernels.masked_loglik(data.counts, states, lam, alpha, family)


def loglik_integrated(spec: ModelSpec, params: ParamSet, data) -> float:
    """Log-likelihood with latent structure summed out.

    Standard: plain pmf product.  Zero-inflated: cellwise two-component
    mixture.  Markov switching: per-segment forward recursion over the
    2^T state paths, summed across segments.
    """
    params.validate_for(spec, data.n_covariates)
    lam = rate_matrix(params.beta, data.covariates)
    alpha, family = _family_args(spec, params)
    if spec.structure == Structure.STANDARD:
        return kernels.plain_loglik(data.counts, lam, alpha, family)
    if spec.is_zero_inflated:
        z = zero_logit_matrix(spec, params, data.covariates, lam)
        return kernels.zi_loglik(data.counts, lam, z, alpha, family)
    per_segment = kernels.forward_loglik(
        data.counts, lam, alpha, family,
        np.ascontiguousarray(params.transitions[:, 0]),
        np.ascontiguousarray(params.transitions[:, 1]),
    )
    return float(np.sum(per_segment))


def zero_state_prob(spec: ModelSpec, params: ParamSet, x) -> float:
    """Zero-state probability q for one covariate vector (zero-inflated specs only)."""
    if not spec.is_zero_inflated:
        raise SpecError("zero_state_prob is defined only for zero-inflated structures")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != params.beta.shape[0]:
        raise ParamDomainError("covariate vector must match beta length")
    if spec.structure == Structure.ZERO_INFLATED_TAU:
        if params.tau is None:
            raise ParamDomainError("tau is required")
        z = params.tau * (params.beta @ x)
    else:
        idx = params.resolved_gamma_idx(x.shape[0])
        if params.gamma is None or params.gamma.shape != idx.shape:
            raise ParamDomainError("gamma must match its covariate subset")
        z = params.gamma @ x[idx]
    return 1.0 / (1.0 + math.exp(-z)) if z > -700 else 0.0


def free_param_names(spec: ModelSpec, variable_names, gamma_idx=None) -> list:
    """Names of the free continuous parameters, in estimation order."""
    names = [f"beta:{v}" for v in variable_names]
    if spec.has_dispersion:
        names.append("log_alpha")
    if spec.structure == Structure.ZERO_INFLATED_TAU:
        names.append("tau")
    if spec.structure == Structure.ZERO_INFLATED_GAMMA:
        idx = gamma_idx if gamma_idx is not None else range(len(variable_names))
        names.extend(f"gamma:{variable_names[i]}" for i in idx)
    return names


def pack_params(spec: ModelSpec, params: ParamSet) -> np.ndarray:
    """Flatten the free continuous parameters into the estimation vector."""
    parts = [params.beta]
    if spec.has_dispersion:
        parts.append([params.log_alpha])
    if spec.structure == Structure.ZERO_INFLATED_TAU:
        parts.append([params.tau])
    if spec.structure == Structure.ZERO_INFLATED_GAMMA:
        parts.append(params.gamma)
    return np.concatenate([np.asarray(p, dtype=np.float64) for p in parts])


def unpack_params(spec: ModelSpec, theta, n_covariates, gamma_idx=None,
                  transitions=None, states=None) -> ParamSet:
    """Inverse of pack_params; optional switching fields are attached unchanged."""
    theta = np.asarray(theta, dtype=np.float64)
    k = n_covariates
    beta = theta[:k]
    pos = k
    log_alpha = None
    if spec.has_dispersion:
        log_alpha = float(theta[pos])
        pos += 1
    tau = None
    if spec.structure == Structure.ZERO_INFLATED_TAU:
        tau = float(theta[pos])
        pos += 1
    gamma = None
    idx = None
    if spec.structure == Structure.ZERO_INFLATED_GAMMA:
        idx = np.asarray(gamma_idx, dtype=np.int64) if gamma_idx is not None else np.arange(k)
        gamma = theta[pos:pos + len(idx)]
        pos += len(idx)
    if pos != theta.shape[0]:
        raise ParamDomainError(
            f"parameter vector has length {theta.shape[0]}, expected {pos}"
        )
    return ParamSet(beta=beta, log_alpha=log_alpha, tau=tau, gamma=gamma,
                    gamma_idx=idx, transitions=transitions, states=states)
