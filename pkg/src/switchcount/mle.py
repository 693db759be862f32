"""Maximum-likelihood estimation for the non-switching models.

Fits run a Nelder-Mead warm start (robust to the flat regions of the
zero-inflated mixtures) followed by BFGS on central finite-difference
gradients.  Standard errors come from the inverse negative Hessian of the
log-likelihood, again by central differences.  Switching specs are
rejected: their latent state space makes MLE impractical, use the MCMC
engine instead.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .errors import DiagnosticsUnavailable, InitError, SpecError
from .models import (
    ModelSpec,
    ParamSet,
    Structure,
    free_param_names,
    loglik_integrated,
    pack_params,
    unpack_params,
)

__all__ = ["MleOptions", "MleResult", "fit_mle", "t_test", "confidence_interval", "default_init"]

_FD_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)
_HESS_STEP = float(np.finfo(float).eps) ** 0.25


@dataclass
class MleOptions:
    grad_tol: float = 1e-5
    step_tol: float = 1e-8
    max_evals: int = 10_000
    multistart: int = 1
    seed: int = 0


@dataclass
class MleResult:
    spec: ModelSpec
    param_names: list
    theta: np.ndarray
    estimates: ParamSet
    std_errors: np.ndarray | None
    max_loglik: float
    aic: float
    converged: bool
    iterations: int
    hessian_singular: bool
    grad_inf_norm: float

    @property
    def n_free_params(self) -> int:
        return self.theta.shape[0]


def default_init(spec: ModelSpec, data) -> ParamSet:
    """Neutral starting point: log-linear least-squares beta, alpha=0.5, tau=-1, gamma=0."""
    x = data.covariates.reshape(-1, data.n_covariates)
    y = np.log(np.maximum(data.counts.ravel(), 0.5))
    beta, *_ = np.linalg.lstsq(x, y, rcond=None)
    log_alpha = math.log(0.5) if spec.has_dispersion else None
    tau = -1.0 if spec.structure == Structure.ZERO_INFLATED_TAU else None
    gamma = None
    if spec.structure == Structure.ZERO_INFLATED_GAMMA:
        gamma = np.zeros(data.n_covariates)
    return ParamSet(beta=beta, log_alpha=log_alpha, tau=tau, gamma=gamma)


def _central_gradient(fun, x, scale=None):
    g = np.empty_like(x)
    h = _FD_STEP * np.maximum(1.0, np.abs(x))
    for j in range(x.shape[0]):
        e = np.zeros_like(x)
        e[j] = h[j]
        g[j] = (fun(x + e) - fun(x - e)) / (2.0 * h[j])
    return g


def _central_hessian(fun, x):
    p = x.shape[0]
    h = _HESS_STEP * np.maximum(1.0, np.abs(x))
    hess = np.empty((p, p))
    f0 = fun(x)
    for i in range(p):
        ei = np.zeros(p)
        ei[i] = h[i]
        hess[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / (h[i] ** 2)
        for j in range(i + 1, p):
            ej = np.zeros(p)
            ej[j] = h[j]
            hess[i, j] = hess[j, i] = (
                fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej) + fun(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return hess


def fit_mle(spec: ModelSpec, data, init: ParamSet | None = None,
            opts: MleOptions | None = None) -> MleResult:
    """Maximize the state-integrated log-likelihood of a non-switching spec.

    Returns point estimates, finite-difference standard errors (None when
    the Hessian is singular, with ``hessian_singular`` set), the maximized
    log-likelihood and AIC = 2K - 2LL over the K free continuous
    parameters.
    """
    if spec.structure == Structure.MARKOV_SWITCHING:
        raise SpecError("MLE is not supported for Markov switching specs; use sample_posterior")
    opts = opts or MleOptions()
    if init is None:
        init = default_init(spec, data)
    gamma_idx = init.resolved_gamma_idx(data.n_covariates) if spec.structure == Structure.ZERO_INFLATED_GAMMA else None
    theta0 = pack_params(spec, init)
    names = free_param_names(spec, data.variable_names, gamma_idx)

    def negloglik(theta):
        params = unpack_params(spec, theta, data.n_covariates, gamma_idx)
        ll = loglik_integrated(spec, params, data)
        return -ll if np.isfinite(ll) else np.inf

    f0 = negloglik(theta0)
    if not np.isfinite(f0):
        raise InitError("log-likelihood is not finite at the starting point")

    starts = [theta0]
    if opts.multistart > 1:
        rng = np.random.default_rng(opts.seed)
        starts += [theta0 + 0.5 * rng.standard_normal(theta0.shape)
                   for _ in range(opts.multistart - 1)]

    best_x, best_f, total_iters = theta0, f0, 0
    for start in starts:
        if not np.isfinite(negloglik(start)):
            continue
        nm = optimize.minimize(
            negloglik, start, method="Nelder-Mead",
            options={"maxfev": opts.max_evals // 2, "xatol": 1e-6, "fatol": 1e-8},
        )
        total_iters += nm.nit
        bfgs = optimize.minimize(
            negloglik, nm.x, method="BFGS",
            jac=lambda x: _central_gradient(negloglik, x),
            options={"gtol": opts.grad_tol, "xrtol": opts.step_tol,
                     "maxiter": opts.max_evals // 2},
        )
        total_iters += bfgs.nit
        for cand_x, cand_f in ((nm.x, nm.fun), (bfgs.x, bfgs.fun)):
            if np.isfinite(cand_f) and cand_f < best_f:
                best_x, best_f = cand_x, cand_f

    grad = _central_gradient(negloglik, best_x)
    grad_norm = float(np.max(np.abs(grad)))
    converged = grad_norm <= opts.grad_tol * max(1.0, abs(best_f)) * 10.0

    std_errors = None
    singular = False
    hess = _central_hessian(negloglik, best_x)
    try:
        cov = np.linalg.inv(hess)
        diag = np.diag(cov)
        if np.all(np.isfinite(diag)) and np.all(diag > 0):
            std_errors = np.sqrt(diag)
        else:
            singular = True
    except np.linalg.LinAlgError:
        singular = True

    estimates = unpack_params(spec, best_x, data.n_covariates, gamma_idx)
    k = best_x.shape[0]
    max_ll = -best_f
    return MleResult(
        spec=spec,
        param_names=names,
        theta=best_x,
        estimates=estimates,
        std_errors=std_errors,
        max_loglik=max_ll,
        aic=2.0 * k - 2.0 * max_ll,
        converged=converged,
        iterations=total_iters,
        hessian_singular=singular,
        grad_inf_norm=grad_norm,
    )


def t_test(result: MleResult, level: float = 0.05) -> dict:
    """Two-tailed significance flags: |estimate/se| beyond the normal critical value."""
    if result.std_errors is None:
        raise DiagnosticsUnavailable("standard errors unavailable (singular Hessian)")
    crit = stats.norm.ppf(1.0 - level / 2.0)
    flags = {}
    for name, est, se in zip(result.param_names, result.theta, result.std_errors):
        flags[name] = bool(abs(est / se) > crit) if se > 0 else bool(est != 0)
    return flags


def confidence_interval(result: MleResult, level: float = 0.95) -> dict:
    """Symmetric normal-theory intervals, estimate +/- z * se."""
    if result.std_errors is None:
        raise DiagnosticsUnavailable("standard errors unavailable (singular Hessian)")
    z = stats.norm.ppf(0.5 + level / 2.0)
    out = {}
    for name, est, se in zip(result.param_names, result.theta, result.std_errors):
        if se == 0.0:
            warnings.warn(f"zero standard error for {name}; interval has zero width")
        out[name] = (float(est - z * se), float(est + z * se))
    return out
