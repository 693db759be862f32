"""Chi-square goodness of fit by Monte Carlo replication.

Counts are pooled into contiguous cells chosen so every cell has a
model-expected occupancy of at least five: singleton cells {0}, {1}, ...,
{c*} as long as each count value carries enough expected mass on its own,
then pooled ranges, with an open-ended tail cell.  For a well-fitting
model this reduces to {0}, {1}, ..., {c*}, {>c*}; under gross
misspecification the pooled ranges keep the statistic powered instead of
collapsing everything into one tail.  The statistic is the Pearson
discrepancy between observed and expected cell occupancies, where the
expectation uses each cell's state-integrated count distribution.  The
null distribution of the statistic comes from replicate datasets simulated
under the fitted parameters -- state chains regenerated from the
transition probabilities, covariates held fixed -- and the p-value uses
the add-one rule so it can never be exactly zero.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .chain import stationary_probs
from .errors import DataError, DegenerateCellsError
from .models import ModelSpec, ParamSet, Structure, rate_matrix, zero_logit_matrix
from .panel import simulate_counts

__all__ = ["GofResult", "chi2_statistic", "gof_pvalue"]

MIN_EXPECTED = 5.0
_MAX_SINGLETON = 100_000
_REP_CHUNK = 2048


@dataclass(frozen=True)
class GofResult:
    chi2_observed: float
    p_value: float
    n_replications: int
    cell_edges: tuple  # inclusive upper count bound per cell; inf marks the open tail
    expected_cell_counts: tuple
    observed_cell_counts: tuple


def _zero_weights(spec: ModelSpec, params: ParamSet, data):
    """Per-cell probability of the normal-count component, flattened.

    Standard: 1.  Zero-inflated: 1-q.  Switching: the stationary
    probability of the normal-count state (the chain is stationary, so
    that is each period's marginal).
    """
    if spec.structure == Structure.STANDARD:
        return np.ones(data.counts.size)
    lam = rate_matrix(params.beta, data.covariates)
    if spec.is_zero_inflated:
        z = zero_logit_matrix(spec, params, data.covariates, lam)
        with np.errstate(over="ignore"):
            q = 1.0 / (1.0 + np.exp(-z))
        return (1.0 - q).ravel()
    pbar1 = stationary_probs(params.transitions[:, 0], params.transitions[:, 1])
    return np.repeat(pbar1, data.n_periods)


def _build_cells(spec: ModelSpec, params: ParamSet, data):
    """Contiguous count cells, each with expected occupancy >= 5.

    Returns (edges, expected): edges are the inclusive upper count bounds
    of the closed cells; counts above the last edge fall into the open
    tail cell, so there are len(edges) + 1 cells.
    """
    params.validate_for(spec, data.n_covariates)
    lam_flat = rate_matrix(params.beta, data.covariates).ravel()
    weight = _zero_weights(spec, params, data)
    zero_extra = float(np.sum(1.0 - weight))
    alpha = params.alpha if spec.has_dispersion else None
    total = float(data.counts.size)

    edges = []
    expected = []
    acc = 0.0
    cum = 0.0
    for k in range(_MAX_SINGLETON + 1):
        kvec = np.full(lam_flat.shape, float(k))
        if alpha is None:
            logpmf = kernels.poisson_logpmf(kvec, lam_flat)
        else:
            logpmf = kernels.nb_logpmf(kvec, lam_flat, alpha)
        e_k = float(np.sum(weight * np.exp(logpmf)))
        if k == 0:
            e_k += zero_extra
        acc += e_k
        cum += e_k
        if total - cum < MIN_EXPECTED:
            break
        if acc >= MIN_EXPECTED:
            edges.append(k)
            expected.append(acc)
            acc = 0.0
    tail = total - float(np.sum(expected))
    if tail < MIN_EXPECTED and edges:
        tail += expected.pop()
        edges.pop()
    expected.append(tail)
    if len(expected) < 2:
        raise DegenerateCellsError(
            "no pooling yields two cells with expected occupancy >= 5"
        )
    return np.asarray(edges, dtype=np.int64), np.asarray(expected)


def _observed_cells(counts, edges, n_cells):
    idx = np.searchsorted(edges, counts.ravel(), side="left")
    return np.bincount(idx, minlength=n_cells).astype(np.float64)


def chi2_statistic(data, spec: ModelSpec, params: ParamSet) -> float:
    """Pearson statistic of the observed panel against the fitted cell expectations."""
    edges, expected = _build_cells(spec, params, data)
    observed = _observed_cells(data.counts, edges, expected.shape[0])
    return float(np.sum((observed - expected) ** 2 / expected))


def gof_pvalue(data, spec: ModelSpec, params: ParamSet, n_reps: int = 10_000,
               seed: int = 0) -> GofResult:
    """Monte Carlo goodness-of-fit p-value under the fitted model.

    Cell edges are fixed once from the observed fit and reused for every
    replicate.  Deterministic given the seed.
    """
    if n_reps < 1:
        raise DataError("n_reps must be >= 1")
    edges, expected = _build_cells(spec, params, data)
    n_cells = expected.shape[0]
    observed = _observed_cells(data.counts, edges, n_cells)
    chi2_obs = float(np.sum((observed - expected) ** 2 / expected))

    rng = np.random.default_rng(seed)
    n_exceed = 0
    done = 0
    while done < n_reps:
        block = min(_REP_CHUNK, n_reps - done)
        rep_counts, _ = simulate_counts(spec, params, data.covariates, rng, n_reps=block)
        idx = np.searchsorted(edges, rep_counts.reshape(block, -1), side="left")
        offsets = np.arange(block)[:, None] * n_cells
        o_rep = np.bincount(
            (idx + offsets).ravel(), minlength=block * n_cells
        ).reshape(block, n_cells).astype(np.float64)
        chi2_rep = np.sum((o_rep - expected) ** 2 / expected, axis=1)
        n_exceed += int(np.sum(chi2_rep >= chi2_obs))
        done += block

    return GofResult(
        chi2_observed=chi2_obs,
        p_value=(n_exceed + 1) / (n_reps + 1),
        n_replications=n_reps,
        cell_edges=tuple(float(e) for e in edges) + (float("inf"),),
        expected_cell_counts=tuple(float(e) for e in expected),
        observed_cell_counts=tuple(float(o) for o in observed),
    )
