"""Bayesian posterior sampling by Metropolis-within-Gibbs.

One sweep updates, in order:

1. each continuous scalar block (log-link coefficients, log dispersion,
   and the zero-inflation parameters where present) by Gaussian
   random-walk Metropolis against the appropriate likelihood -- the
   state-conditional one for switching specs, the state-integrated one
   otherwise;
2. for switching specs, the full latent state matrix, redrawn exactly per
   segment by backward sampling from forward-filtered probabilities;
3. per-segment transition probabilities from their conjugate Beta
   conditionals given the state-path transition counts.

Proposal scales adapt multiplicatively toward a target acceptance rate
during burn-in only, so the retained draws form a valid Markov chain.
Every chain owns one seeded generator; runs are deterministic given the
seed and chains are overdispersed by jittering the start point with the
standard-model MLE standard errors.

Priors are deliberately wide: independent zero-mean normals for
coefficients, a flat window for the log dispersion, Beta(1, 1) for
transition probabilities.  The exact values are echoed into every report.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InitError, ParamDomainError, SpecError
from .mle import default_init, fit_mle
from .models import (
    ModelSpec,
    ParamSet,
    Structure,
    free_param_names,
    pack_params,
    unpack_params,
)

__all__ = [
    "PriorConfig",
    "McmcConfig",
    "ChainDraws",
    "sample_posterior",
    "adapt_proposals",
    "state_posterior",
    "posterior_mean_params",
]

_SCALE_FLOOR = 1e-8
_TRANS_CLIP = 1e-12


@dataclass(frozen=True)
class PriorConfig:
    """Widths of the nearly-flat priors; all must be positive."""

    beta_sd: float = 100.0
    log_alpha_bounds: tuple = (-20.0, 5.0)
    tau_sd: float = 100.0
    gamma_sd: float = 100.0
    transition_a: float = 1.0
    transition_b: float = 1.0

    def __post_init__(self):
        if min(self.beta_sd, self.tau_sd, self.gamma_sd) <= 0:
            raise ParamDomainError("prior standard deviations must be > 0")
        if min(self.transition_a, self.transition_b) <= 0:
            raise ParamDomainError("Beta hyperparameters must be > 0")
        lo, hi = self.log_alpha_bounds
        if not lo < hi:
            raise ParamDomainError("log_alpha_bounds must be an increasing pair")


@dataclass(frozen=True)
class McmcConfig:
    n_chains: int = 4
    n_draws: int = 20_000
    n_burnin: int = 5_000
    thin: int = 5
    seed: int = 0
    adapt_window: int = 50
    target_accept: float = 0.3
    store_states: str = "freq"

    def __post_init__(self):
        if self.n_chains < 2:
            raise ParamDomainError("need at least 2 chains (convergence diagnostics)")
        if self.n_draws <= self.n_burnin:
            raise ParamDomainError("n_draws must exceed n_burnin")
        if self.thin < 1 or (self.n_draws - self.n_burnin) // self.thin < 1:
            raise ParamDomainError("thinning leaves no retained draws")
        if self.store_states not in ("freq", "full"):
            raise ParamDomainError("store_states must be 'freq' or 'full'")

    @property
    def n_retained(self) -> int:
        return (self.n_draws - self.n_burnin) // self.thin


@dataclass
class ChainDraws:
    """Retained posterior draws, kept per chain.

    draws is (chains, retained, P) over the continuous parameters in
    free_param_names order; logliks holds the state-integrated
    log-likelihood of each retained draw.  For switching specs,
    transition_draws is (chains, retained, N, 2) and state_freq counts,
    per cell, the retained draws with the cell in the normal-count state.
    """

    spec: ModelSpec
    param_names: list
    variable_names: tuple
    draws: np.ndarray
    logliks: np.ndarray
    transition_draws: np.ndarray | None
    state_freq: np.ndarray | None
    states_packed: np.ndarray | None
    accept_rates: np.ndarray
    proposal_scales: np.ndarray
    priors: PriorConfig
    config: McmcConfig
    gamma_idx: np.ndarray | None = None

    @property
    def n_chains(self) -> int:
        return self.draws.shape[0]

    @property
    def n_retained(self) -> int:
        return self.draws.shape[1]

    def pooled(self) -> np.ndarray:
        """All chains stacked: (chains * retained, P)."""
        return self.draws.reshape(-1, self.draws.shape[2])

    def pooled_logliks(self) -> np.ndarray:
        return self.logliks.reshape(-1)


def adapt_proposals(scales, accept_rates, step, target_accept=0.3):
    """Multiplicative scale update exp(kappa * (rate - target)), kappa = min(1, 10/step).

    ``step`` is the adaptation step index (one per burn-in window), so the
    schedule is diminishing but keeps enough authority to fix a badly
    scaled start.  Used during burn-in only; scales are floored at 1e-8 so
    a dead block cannot collapse to zero.
    """
    kappa = min(1.0, 10.0 / max(1, step))
    scales = np.asarray(scales, dtype=np.float64)
    rates = np.asarray(accept_rates, dtype=np.float64)
    return np.maximum(_SCALE_FLOOR, scales * np.exp(kappa * (rates - target_accept)))


def state_posterior(draws: ChainDraws) -> np.ndarray:
    """Per-cell posterior probability of the normal-count state, pooled across chains."""
    if draws.state_freq is None:
        raise SpecError("state posterior exists only for Markov switching fits")
    total = draws.n_chains * draws.n_retained
    return draws.state_freq.sum(axis=0) / float(total)


def posterior_mean_params(draws: ChainDraws) -> ParamSet:
    """Posterior means of the continuous parameters (and transitions, if any)."""
    theta = draws.pooled().mean(axis=0)
    transitions = None
    if draws.transition_draws is not None:
        transitions = draws.transition_draws.reshape(
            -1, draws.transition_draws.shape[2], 2
        ).mean(axis=0)
    k = len(draws.variable_names)
    return unpack_params(draws.spec, theta, k, draws.gamma_idx, transitions=transitions)


def _initial_point(spec, data, init):
    """Center of the chain starting distribution plus per-parameter jitter scales."""
    k = data.n_covariates
    if init is not None:
        gamma_idx = init.resolved_gamma_idx(k) if spec.structure == Structure.ZERO_INFLATED_GAMMA else None
        theta = pack_params(spec, init)
        return theta, np.full(theta.shape, 0.1), gamma_idx

    base = default_init(spec, data)
    gamma_idx = base.resolved_gamma_idx(k) if spec.structure == Structure.ZERO_INFLATED_GAMMA else None
    beta, log_alpha = base.beta, base.log_alpha
    beta_se = np.full(k, 0.1)
    la_se = 0.1
    std_spec = ModelSpec(spec.family, Structure.STANDARD)
    try:
        res = fit_mle(std_spec, data)
        beta = res.estimates.beta
        if spec.has_dispersion:
            log_alpha = res.estimates.log_alpha
        if res.std_errors is not None:
            beta_se = res.std_errors[:k]
            if spec.has_dispersion:
                la_se = res.std_errors[k]
    except Exception:
        pass  # fall back to the neutral init; jitter stays at 0.1

    parts = [beta]
    scales = [np.clip(beta_se, 1e-3, 2.0)]
    if spec.has_dispersion:
        parts.append([log_alpha])
        scales.append([min(max(la_se, 1e-3), 2.0)])
    if spec.structure == Structure.ZERO_INFLATED_TAU:
        parts.append([base.tau])
        scales.append([0.5])
    if spec.structure == Structure.ZERO_INFLATED_GAMMA:
        parts.append(base.gamma)
        scales.append(np.full(len(gamma_idx), 0.5))
    theta = np.concatenate([np.asarray(p, dtype=np.float64) for p in parts])
    return theta, np.concatenate([np.asarray(s, dtype=np.float64) for s in scales]), gamma_idx


class _Target:
    """Likelihood + log-prior evaluations for one spec on one dataset."""

    def __init__(self, spec, data, priors, gamma_idx):
        self.spec = spec
        self.priors = priors
        self.counts = np.ascontiguousarray(data.counts)
        self.n, self.t = self.counts.shape
        self.k = data.n_covariates
        self.xflat = np.ascontiguousarray(data.covariates.reshape(-1, self.k))
        self.family = kernels.FAMILY_NB if spec.has_dispersion else kernels.FAMILY_POISSON
        self.gamma_idx = gamma_idx
        if gamma_idx is not None:
            self.xgamma = np.ascontiguousarray(self.xflat[:, gamma_idx])
        self.ia = self.k if spec.has_dispersion else None
        self.it = None
        self.ig = None
        pos = self.k + (1 if spec.has_dispersion else 0)
        if spec.structure == Structure.ZERO_INFLATED_TAU:
            self.it = pos
        elif spec.structure == Structure.ZERO_INFLATED_GAMMA:
            self.ig = pos

    def rates(self, theta):
        with np.errstate(over="ignore"):
            return np.exp(self.xflat @ theta[: self.k]).reshape(self.n, self.t)

    def _alpha(self, theta):
        return math.exp(theta[self.ia]) if self.ia is not None else 1.0

    def loglik(self, theta, states=None, lam=None):
        """Target log-likelihood; NaN (overflowed rates) maps to -inf so callers reject."""
        if lam is None:
            lam = self.rates(theta)
        alpha = self._alpha(theta)
        spec = self.spec
        if spec.structure == Structure.STANDARD:
            ll = kernels.plain_loglik(self.counts, lam, alpha, self.family)
        elif spec.structure == Structure.ZERO_INFLATED_TAU:
            with np.errstate(divide="ignore", invalid="ignore"):
                z = theta[self.it] * np.log(lam)
            ll = kernels.zi_loglik(self.counts, lam, z, alpha, self.family)
        elif spec.structure == Structure.ZERO_INFLATED_GAMMA:
            z = (self.xgamma @ theta[self.ig:]).reshape(self.n, self.t)
            ll = kernels.zi_loglik(self.counts, lam, z, alpha, self.family)
        else:
            ll = kernels.masked_loglik(self.counts, states, lam, alpha, self.family)
        return ll if not math.isnan(ll) else -math.inf, lam

    def integrated_loglik(self, theta, p01, p10, lam=None):
        if self.spec.structure != Structure.MARKOV_SWITCHING:
            return self.loglik(theta)[0]
        if lam is None:
            lam = self.rates(theta)
        alpha = self._alpha(theta)
        per_seg = kernels.forward_loglik(self.counts, lam, alpha, self.family, p01, p10)
        total = float(np.sum(per_seg))
        return total if not math.isnan(total) else -math.inf

    def log_prior(self, theta):
        pr = self.priors
        b = theta[: self.k]
        lp = -0.5 * float(b @ b) / (pr.beta_sd * pr.beta_sd)
        if self.ia is not None:
            lo, hi = pr.log_alpha_bounds
            if not lo <= theta[self.ia] <= hi:
                return -math.inf
        if self.it is not None:
            lp += -0.5 * (theta[self.it] / pr.tau_sd) ** 2
        if self.ig is not None:
            g = theta[self.ig:]
            lp += -0.5 * float(g @ g) / (pr.gamma_sd * pr.gamma_sd)
        return lp


def _run_chain(target, cfg, priors, theta0, states0, trans0, rng, init_scales):
    spec = target.spec
    switching = spec.structure == Structure.MARKOV_SWITCHING
    counts = target.counts
    n, t = target.n, target.t
    p = theta0.shape[0]

    theta = theta0.copy()
    states = states0.copy() if switching else None
    if switching:
        p01 = np.ascontiguousarray(trans0[:, 0].copy())
        p10 = np.ascontiguousarray(trans0[:, 1].copy())
    cur_ll, lam = target.loglik(theta, states)
    cur_lp = target.log_prior(theta)
    if not np.isfinite(cur_ll + cur_lp):
        raise InitError("non-finite posterior density at the chain starting point")

    n_ret = cfg.n_retained
    draws = np.empty((n_ret, p))
    logliks = np.empty(n_ret)
    trans_draws = np.empty((n_ret, n, 2)) if switching else None
    state_freq = np.zeros((n, t), dtype=np.int64) if switching else None
    packed = None
    if switching and cfg.store_states == "full":
        packed = np.empty((n_ret, (n * t + 7) // 8), dtype=np.uint8)

    scales = np.maximum(np.asarray(init_scales, dtype=np.float64), _SCALE_FLOOR)
    win_accept = np.zeros(p)
    win_count = 0
    adapt_step = 0
    tot_accept = np.zeros(p)
    a0, b0 = priors.transition_a, priors.transition_b
    ridx = 0

    for sweep in range(1, cfg.n_draws + 1):
        zs = rng.standard_normal(p)
        us = rng.random(p)
        for j in range(p):
            prop = theta.copy()
            prop[j] += scales[j] * zs[j]
            lp_prop = target.log_prior(prop)
            if lp_prop == -math.inf:
                continue
            ll_prop, lam_prop = target.loglik(prop, states)
            log_u = math.log(us[j]) if us[j] > 0.0 else -math.inf
            if log_u < (ll_prop + lp_prop) - (cur_ll + cur_lp):
                theta = prop
                cur_ll, cur_lp, lam = ll_prop, lp_prop, lam_prop
                win_accept[j] += 1
                tot_accept[j] += 1

        if switching:
            alpha = target._alpha(theta)
            u = rng.random((n, t))
            states = kernels.ffbs(counts, lam, alpha, target.family, p01, p10, u)
            cur_ll, trans = kernels.state_stats(counts, states, lam, alpha, target.family)
            p01 = np.clip(rng.beta(a0 + trans[:, 1], b0 + trans[:, 0]),
                          _TRANS_CLIP, 1 - _TRANS_CLIP)
            p10 = np.clip(rng.beta(a0 + trans[:, 2], b0 + trans[:, 3]),
                          _TRANS_CLIP, 1 - _TRANS_CLIP)

        win_count += 1
        if sweep <= cfg.n_burnin and win_count == cfg.adapt_window:
            adapt_step += 1
            scales = adapt_proposals(scales, win_accept / win_count, adapt_step, cfg.target_accept)
            win_accept[:] = 0.0
            win_count = 0

        if sweep > cfg.n_burnin and (sweep - cfg.n_burnin) % cfg.thin == 0:
            draws[ridx] = theta
            if switching:
                logliks[ridx] = target.integrated_loglik(theta, p01, p10, lam=lam)
                trans_draws[ridx, :, 0] = p01
                trans_draws[ridx, :, 1] = p10
                state_freq += states
                if packed is not None:
                    packed[ridx] = np.packbits(states.ravel().astype(np.uint8))
            else:
                logliks[ridx] = cur_ll
            ridx += 1

    return {
        "draws": draws,
        "logliks": logliks,
        "transition_draws": trans_draws,
        "state_freq": state_freq,
        "states_packed": packed,
        "accept_rates": tot_accept / cfg.n_draws,
        "scales": scales,
    }


def sample_posterior(spec: ModelSpec, data, priors: PriorConfig | None = None,
                     cfg: McmcConfig | None = None, init: ParamSet | None = None) -> ChainDraws:
    """Draw from the posterior of a model spec on a panel.

    Chains start from the standard-model MLE (jittered by its standard
    errors to overdisperse them), transitions at (0.5, 0.5), and states at
    1 wherever the count is positive, else a fair coin.  Deterministic
    given cfg.seed.
    """
    priors = priors or PriorConfig()
    cfg = cfg or McmcConfig()
    theta0, jitter, gamma_idx = _initial_point(spec, data, init)
    target = _Target(spec, data, priors, gamma_idx)
    names = free_param_names(spec, data.variable_names, gamma_idx)
    switching = spec.structure == Structure.MARKOV_SWITCHING
    n, t = data.counts.shape

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_chains)
    results = []
    for c in range(cfg.n_chains):
        rng = np.random.default_rng(seeds[c])
        states0 = trans0 = None
        if switching:
            states0 = np.where(data.counts > 0, 1, (rng.random((n, t)) < 0.5)).astype(np.int64)
            trans0 = np.full((n, 2), 0.5)
        z = rng.standard_normal(theta0.shape[0])
        start = theta0 + jitter * z
        shrink = 0
        while (not np.isfinite(target.loglik(start, states0)[0] + target.log_prior(start))
               and shrink < 10):
            shrink += 1
            start = theta0 + jitter * z / (2.0 ** shrink)
        results.append(_run_chain(target, cfg, priors, start, states0, trans0, rng,
                                  init_scales=np.clip(jitter, 1e-3, 2.0)))

    return ChainDraws(
        spec=spec,
        param_names=names,
        variable_names=data.variable_names,
        draws=np.stack([r["draws"] for r in results]),
        logliks=np.stack([r["logliks"] for r in results]),
        transition_draws=(np.stack([r["transition_draws"] for r in results]) if switching else None),
        state_freq=(np.stack([r["state_freq"] for r in results]) if switching else None),
        states_packed=(np.stack([r["states_packed"] for r in results])
                       if switching and cfg.store_states == "full" else None),
        accept_rates=np.stack([r["accept_rates"] for r in results]),
        proposal_scales=np.stack([r["scales"] for r in results]),
        priors=priors,
        config=cfg,
        gamma_idx=gamma_idx,
    )
