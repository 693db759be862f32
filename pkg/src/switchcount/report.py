"""Fit reports: posterior/MLE summaries as machine-readable JSON plus CSV extracts.

A report carries everything a consumer needs offline: labeled point and
interval estimates (credible intervals are equal-tail posterior quantiles
and may be asymmetric; confidence intervals are symmetric normal-theory),
model evidence, goodness of fit, convergence diagnostics, per-segment
state-probability series, stationary-state expectations, and long-run mean
rates.  No plotting here: the CSV extracts are the figure feedstock.
"""

import json
import math
from dataclasses import asdict

import numpy as np
from scipy import stats as _sstats

from .chain import stationary_probs
from .errors import ParamDomainError
from .mcmc import ChainDraws, posterior_mean_params, state_posterior
from .models import ModelSpec, ParamSet, Structure, rate_matrix

__all__ = [
    "credible_interval",
    "rate_summaries",
    "build_mcmc_report",
    "build_mle_report",
    "write_report_json",
    "params_from_report",
    "state_series_rows",
    "histogram_rows",
]

SCHEMA_VERSION = 1
ZERO_STATE_PROB_BAR = 0.2  # "likely zero-state" when max_t P(s=1|Y) stays below this
_HIST_BINS = 20


def credible_interval(samples, level: float = 0.95) -> tuple:
    """Equal-tail posterior interval: empirical quantiles with linear interpolation."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 2:
        raise ParamDomainError("need at least 2 samples for a credible interval")
    a = (1.0 - level) / 2.0
    lo, hi = np.quantile(samples, [a, 1.0 - a], method="linear")
    return (float(lo), float(hi))


def _rate_summaries_at(params: ParamSet, spec: ModelSpec, data) -> tuple:
    lam = rate_matrix(params.beta, data.covariates)
    alpha = params.alpha if spec.has_dispersion else 0.0
    sd = np.sqrt(lam * (1.0 + alpha * lam))
    return float(np.mean(lam)), float(np.mean(sd))


def rate_summaries(draws: ChainDraws, data) -> tuple:
    """(mean rate, mean sd of rate) at the posterior-mean parameters, averaged over cells."""
    return _rate_summaries_at(posterior_mean_params(draws), draws.spec, data)


def _segment_categories(counts, state_series):
    """Paper-style four-way segment taxonomy from counts and the state series."""
    cats = []
    for i in range(counts.shape[0]):
        if np.all(counts[i] > 0):
            cats.append("always_normal")
        elif np.max(state_series[i]) < ZERO_STATE_PROB_BAR:
            cats.append("likely_zero_state")
        elif np.all(counts[i] == 0):
            cats.append("uncertain")
        else:
            cats.append("mixed")
    return cats


def _param_entries_mcmc(draws: ChainDraws, level=0.95):
    pooled = draws.pooled()
    entries = []
    for j, name in enumerate(draws.param_names):
        lo, hi = credible_interval(pooled[:, j], level)
        point = float(pooled[:, j].mean())
        entries.append({
            "name": name,
            "point": point,
            "lo": lo,
            "hi": hi,
            "interval": "credible",
            "level": level,
            "excludes_zero": bool(lo > 0.0 or hi < 0.0),
        })
    return entries


def _params_dict(spec: ModelSpec, params: ParamSet) -> dict:
    out = {"beta": [float(b) for b in params.beta]}
    if params.log_alpha is not None:
        out["log_alpha"] = float(params.log_alpha)
    if params.tau is not None:
        out["tau"] = float(params.tau)
    if params.gamma is not None:
        out["gamma"] = [float(g) for g in params.gamma]
        idx = params.gamma_idx if params.gamma_idx is not None else np.arange(len(params.gamma))
        out["gamma_idx"] = [int(i) for i in idx]
    if params.transitions is not None:
        out["transitions"] = [[float(a), float(b)] for a, b in params.transitions]
    return out


def params_from_report(report: dict) -> ParamSet:
    """Rebuild the point ParamSet embedded in a report (for gof/report reruns)."""
    d = report["point_params"]
    return ParamSet(
        beta=np.asarray(d["beta"]),
        log_alpha=d.get("log_alpha"),
        tau=d.get("tau"),
        gamma=np.asarray(d["gamma"]) if "gamma" in d else None,
        gamma_idx=np.asarray(d["gamma_idx"]) if "gamma_idx" in d else None,
        transitions=np.asarray(d["transitions"]) if "transitions" in d else None,
    )


def build_mcmc_report(spec: ModelSpec, data, draws: ChainDraws, evidence, convergence,
                      gof=None, level: float = 0.95) -> dict:
    """Assemble the full posterior fit report as a JSON-ready dict."""
    mean_params = posterior_mean_params(draws)
    mean_rate, mean_sd = _rate_summaries_at(mean_params, spec, data)
    report = {
        "schema": SCHEMA_VERSION,
        "model": spec.name,
        "family": spec.family.value,
        "structure": spec.structure.value,
        "method": "mcmc",
        "data": {
            "n_segments": data.n_segments,
            "n_periods": data.n_periods,
            "variable_names": list(data.variable_names),
        },
        "config": {
            "priors": asdict(draws.priors),
            "mcmc": asdict(draws.config),
        },
        "parameters": _param_entries_mcmc(draws, level),
        "point_params": _params_dict(spec, mean_params),
        "evidence": {
            "log_ml": evidence.log_ml,
            "log_ml_ci": list(evidence.log_ml_ci),
            "dic": evidence.dic,
            "posterior_mean_loglik": evidence.posterior_mean_loglik,
            "max_observed_loglik": evidence.max_observed_loglik,
            "unstable": evidence.unstable,
        },
        "convergence": {
            "psrf": {k: _jsonable(v) for k, v in convergence.psrf.items()},
            "max_psrf": _jsonable(convergence.max_psrf),
            "mpsrf": _jsonable(convergence.mpsrf),
            "threshold": convergence.threshold,
            "converged": convergence.converged,
            "ridge_applied": convergence.ridge_applied,
        },
        "mean_rate": mean_rate,
        "mean_sd_rate": mean_sd,
        "notes": {
            "dic_point": "continuous parameters at posterior means; latent states integrated out",
            "intervals": "equal-tail posterior quantiles",
        },
    }
    if gof is not None:
        report["gof"] = asdict(gof)
    if spec.structure == Structure.MARKOV_SWITCHING:
        series = state_posterior(draws)
        td = draws.transition_draws.reshape(-1, data.n_segments, 2)
        pbar1_draws = stationary_probs(td[:, :, 0], td[:, :, 1])
        pbar1_mean = pbar1_draws.mean(axis=0)
        lam_bar = rate_matrix(mean_params.beta, data.covariates).mean(axis=1)
        report["state_series"] = [[float(v) for v in row] for row in series]
        report["stationary_expectations"] = [float(v) for v in pbar1_mean]
        report["long_run_means"] = [float(v) for v in pbar1_mean * lam_bar]
        report["segment_categories"] = _segment_categories(data.counts, series)
    return report


def build_mle_report(spec: ModelSpec, data, result, gof=None, level: float = 0.95) -> dict:
    """Assemble the MLE fit report (symmetric confidence intervals, AIC)."""
    z = float(_sstats.norm.ppf(0.5 + level / 2.0))
    entries = []
    for j, name in enumerate(result.param_names):
        point = float(result.theta[j])
        if result.std_errors is not None:
            se = float(result.std_errors[j])
            lo, hi = point - z * se, point + z * se
            significant = bool(abs(point / se) > _sstats.norm.ppf(0.975)) if se > 0 else bool(point != 0)
        else:
            lo = hi = point
            significant = None
        entries.append({
            "name": name,
            "point": point,
            "lo": lo,
            "hi": hi,
            "interval": "confidence",
            "level": level,
            "significant": significant,
        })
    mean_rate, mean_sd = _rate_summaries_at(result.estimates, spec, data)
    report = {
        "schema": SCHEMA_VERSION,
        "model": spec.name,
        "family": spec.family.value,
        "structure": spec.structure.value,
        "method": "mle",
        "data": {
            "n_segments": data.n_segments,
            "n_periods": data.n_periods,
            "variable_names": list(data.variable_names),
        },
        "parameters": entries,
        "point_params": _params_dict(spec, result.estimates),
        "max_loglik": result.max_loglik,
        "aic": result.aic,
        "converged": result.converged,
        "iterations": result.iterations,
        "hessian_singular": result.hessian_singular,
        "mean_rate": mean_rate,
        "mean_sd_rate": mean_sd,
        "notes": {"intervals": "symmetric normal-theory (MLE)"},
    }
    if gof is not None:
        report["gof"] = asdict(gof)
    return report


def _jsonable(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def write_report_json(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def state_series_rows(report: dict):
    """Long-format rows (segment, period, p_state1) from a switching report."""
    series = report.get("state_series")
    if series is None:
        raise ParamDomainError("report has no state series (not a switching fit)")
    rows = []
    for i, row in enumerate(series):
        for t, v in enumerate(row):
            rows.append((i, t, v))
    return rows


def histogram_rows(report: dict):
    """Histogram bins of the state probabilities and of E[pbar1 | Y] per segment."""
    series = report.get("state_series")
    expectations = report.get("stationary_expectations")
    if series is None or expectations is None:
        raise ParamDomainError("report has no switching summaries")
    edges = np.linspace(0.0, 1.0, _HIST_BINS + 1)
    rows = []
    flat = np.asarray(series).ravel()
    for name, values in (("state_prob", flat), ("stationary_p1", np.asarray(expectations))):
        hist, _ = np.histogram(values, bins=edges)
        # np.histogram's last bin is closed, so probability-1 cells land in bin 19
        for b in range(_HIST_BINS):
            rows.append((name, float(edges[b]), float(edges[b + 1]), int(hist[b])))
    return rows
