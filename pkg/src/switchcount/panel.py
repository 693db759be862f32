"""Balanced panel count data: ingestion, validation, summaries, simulation.

A panel holds N segments observed over T periods.  Internally counts are an
(N, T) int matrix and covariates an (N, T, K) array whose first column is
the intercept (identically 1).  Unbalanced input is rejected rather than
imputed, which keeps every likelihood a plain product over cells.
"""

import io
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .chain import stationary_probs
from .errors import BalancedPanelError, CountDomainError, ParamDomainError, SchemaError
from .models import ModelSpec, ParamSet, Structure, rate_matrix, zero_logit_matrix

__all__ = [
    "PanelData",
    "VariableSummary",
    "load_panel",
    "write_panel",
    "summarize",
    "simulate_panel",
    "simulate_counts",
]

REQUIRED_COLUMNS = ("segment_id", "period", "count")
INTERCEPT_NAME = "intercept"


@dataclass(frozen=True)
class PanelData:
    """Immutable balanced panel of counts and covariates.

    counts[n, t] is the count for segment n in period t; covariates[n, t]
    is that cell's covariate vector with covariates[n, t, 0] == 1.
    segment_ids/period_ids keep the original identifiers so that a panel
    written back to CSV round-trips.
    """

    counts: np.ndarray
    covariates: np.ndarray
    variable_names: tuple
    segment_ids: tuple
    period_ids: tuple

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.size == 0:
            raise SchemaError("counts must be a nonempty (N, T) matrix")
        if np.any(counts < 0):
            raise CountDomainError("counts must be nonnegative")
        if not np.all(counts == np.floor(counts)):
            raise CountDomainError("counts must be integers")
        counts = counts.astype(np.int64)
        cov = np.asarray(self.covariates, dtype=np.float64)
        if cov.ndim != 3 or cov.shape[:2] != counts.shape:
            raise SchemaError("covariates must be (N, T, K) aligned with counts")
        if np.any(~np.isfinite(cov)):
            raise SchemaError("covariates must be finite with no missing cells")
        if not np.all(cov[:, :, 0] == 1.0):
            raise SchemaError("first covariate column must be the intercept (all ones)")
        if len(self.variable_names) != cov.shape[2]:
            raise SchemaError("variable_names must have one entry per covariate column")
        if len(self.segment_ids) != counts.shape[0] or len(self.period_ids) != counts.shape[1]:
            raise SchemaError("segment_ids/period_ids must match the panel shape")
        counts.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "covariates", cov)
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        object.__setattr__(self, "segment_ids", tuple(self.segment_ids))
        object.__setattr__(self, "period_ids", tuple(self.period_ids))

    @property
    def n_segments(self) -> int:
        return self.counts.shape[0]

    @property
    def n_periods(self) -> int:
        return self.counts.shape[1]

    @property
    def n_covariates(self) -> int:
        return self.covariates.shape[2]


@dataclass(frozen=True)
class VariableSummary:
    mean: float
    sd: float
    minimum: float
    median: float
    maximum: float


def load_panel(source) -> PanelData:
    """Read a balanced panel from CSV.

    The header must contain ``segment_id``, ``period`` and ``count``; every
    remaining column is a covariate, kept in header order.  Each (segment,
    period) pair must appear exactly once and the panel must be complete.
    An intercept column is prepended.
    """
    df = pd.read_csv(source)
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise SchemaError(f"missing required columns: {missing}")

    seg_ids = sorted(df["segment_id"].unique().tolist())
    per_ids = sorted(df["period"].unique().tolist())
    n, t = len(seg_ids), len(per_ids)
    if len(df) != n * t:
        raise BalancedPanelError(
            f"expected {n * t} rows for a balanced {n}x{t} panel, found {len(df)}"
        )
    pairs = set(zip(df["segment_id"], df["period"]))
    if len(pairs) != len(df):
        raise BalancedPanelError("duplicate (segment_id, period) rows")

    counts_raw = pd.to_numeric(df["count"], errors="coerce")
    if counts_raw.isna().any():
        raise CountDomainError("count column contains non-numeric values")
    if (counts_raw < 0).any():
        raise CountDomainError("count column contains negative values")
    if not np.all(counts_raw.to_numpy() == np.floor(counts_raw.to_numpy())):
        raise CountDomainError("count column contains non-integer values")

    cov_names = [c for c in df.columns if c not in REQUIRED_COLUMNS]
    seg_pos = {s: i for i, s in enumerate(seg_ids)}
    per_pos = {p: j for j, p in enumerate(per_ids)}
    counts = np.zeros((n, t), dtype=np.int64)
    cov = np.ones((n, t, 1 + len(cov_names)))
    rows_i = df["segment_id"].map(seg_pos).to_numpy()
    rows_j = df["period"].map(per_pos).to_numpy()
    counts[rows_i, rows_j] = counts_raw.to_numpy().astype(np.int64)
    for k, name in enumerate(cov_names):
        vals = pd.to_numeric(df[name], errors="coerce").to_numpy()
        if np.any(~np.isfinite(vals)):
            raise SchemaError(f"covariate column {name!r} has missing or non-numeric cells")
        cov[rows_i, rows_j, 1 + k] = vals
    return PanelData(
        counts=counts,
        covariates=cov,
        variable_names=[INTERCEPT_NAME] + cov_names,
        segment_ids=seg_ids,
        period_ids=per_ids,
    )


def write_panel(data: PanelData, path_or_buffer) -> None:
    """Write a panel to CSV, dropping the intercept column (load_panel restores it)."""
    records = {
        "segment_id": np.repeat(list(data.segment_ids), data.n_periods),
        "period": np.tile(list(data.period_ids), data.n_segments),
        "count": data.counts.ravel(),
    }
    for k, name in enumerate(data.variable_names[1:], start=1):
        records[name] = data.covariates[:, :, k].ravel()
    pd.DataFrame(records).to_csv(path_or_buffer, index=False)


def panel_to_csv_text(data: PanelData) -> str:
    buf = io.StringIO()
    write_panel(data, buf)
    return buf.getvalue()


def summarize(data: PanelData) -> dict:
    """Per-covariate summary statistics over all N*T observations, intercept excluded."""
    out = {}
    for k, name in enumerate(data.variable_names):
        if k == 0:
            continue
        col = data.covariates[:, :, k].ravel()
        sd = float(np.std(col, ddof=1)) if col.size > 1 else 0.0
        out[name] = VariableSummary(
            mean=float(np.mean(col)),
            sd=sd,
            minimum=float(np.min(col)),
            median=float(np.median(col)),
            maximum=float(np.max(col)),
        )
    return out


def _check_sim_transitions(transitions, n_segments):
    tr = np.asarray(transitions, dtype=np.float64)
    if tr.shape != (n_segments, 2):
        raise ParamDomainError(f"transitions must be ({n_segments}, 2)")
    if np.any(tr < 0.0) or np.any(tr > 1.0) or np.any(~np.isfinite(tr)):
        raise ParamDomainError("transition probabilities must lie in [0, 1]")
    if np.any(tr.sum(axis=1) <= 0.0):
        raise ParamDomainError(
            "p01 + p10 must be positive so the stationary distribution exists"
        )
    return tr


def _simulate_ms_states(transitions, n_periods, rng, n_reps):
    """(R, N, T) state paths: stationary initial draw, then chain transitions."""
    p01 = transitions[:, 0]
    p10 = transitions[:, 1]
    pbar1 = stationary_probs(p01, p10)
    n = transitions.shape[0]
    states = np.zeros((n_reps, n, n_periods), dtype=np.int64)
    states[:, :, 0] = rng.random((n_reps, n)) < pbar1
    for t in range(1, n_periods):
        u = rng.random((n_reps, n))
        prev = states[:, :, t - 1]
        states[:, :, t] = np.where(prev == 1, u >= p10, u < p01)
    return states


def simulate_counts(spec: ModelSpec, params: ParamSet, covariates, rng, n_reps=1):
    """Draw n_reps count matrices (R, N, T) and their state matrices from the model.

    Covariates are held fixed across replicates.  For switching specs the
    state chains are regenerated from the transition probabilities; for
    zero-inflated specs each cell draws its own zero-state indicator; the
    normal-count state emits NB via a gamma-Poisson mixture (or Poisson).
    States are 1 wherever a count is positive, by construction.
    """
    covariates = np.asarray(covariates, dtype=np.float64)
    n, t = covariates.shape[0], covariates.shape[1]
    lam = rate_matrix(params.beta, covariates)
    if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
        raise ParamDomainError("simulation rates must be finite and positive")

    if spec.structure == Structure.MARKOV_SWITCHING:
        tr = _check_sim_transitions(params.transitions, n)
        states = _simulate_ms_states(tr, t, rng, n_reps)
    elif spec.is_zero_inflated:
        if spec.structure == Structure.ZERO_INFLATED_TAU and params.tau is None:
            raise ParamDomainError("tau is required for the zero-inflated tau structure")
        if spec.structure == Structure.ZERO_INFLATED_GAMMA and params.gamma is None:
            raise ParamDomainError("gamma is required for the zero-inflated gamma structure")
        z = zero_logit_matrix(spec, params, covariates, lam)
        with np.errstate(over="ignore"):
            q = 1.0 / (1.0 + np.exp(-z))
        states = (rng.random((n_reps, n, t)) >= q).astype(np.int64)
    else:
        states = np.ones((n_reps, n, t), dtype=np.int64)

    if spec.has_dispersion:
        if params.log_alpha is None:
            raise ParamDomainError("log_alpha is required for the NB family")
        alpha = float(np.exp(params.log_alpha))
        mean = rng.gamma(shape=1.0 / alpha, scale=alpha * lam, size=(n_reps, n, t))
    else:
        mean = np.broadcast_to(lam, (n_reps, n, t))
    counts = rng.poisson(mean)
    counts = np.where(states == 1, counts, 0)
    return counts, states


def simulate_panel(spec: ModelSpec, truth: ParamSet, n_segments, n_periods, seed,
                   covariates=None, variable_names=None):
    """Generate one synthetic panel plus its true state matrix.

    covariates may be a ready (N, T, K) array with intercept first, a
    callable ``f(rng, n_segments, n_periods, n_extra) -> (N, T, n_extra)``
    for the non-intercept columns, or None for independent standard-normal
    columns.  Deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    k = truth.beta.shape[0]
    if covariates is None:
        extra = rng.standard_normal((n_segments, n_periods, k - 1))
        cov = np.concatenate([np.ones((n_segments, n_periods, 1)), extra], axis=2)
    elif callable(covariates):
        extra = np.asarray(covariates(rng, n_segments, n_periods, k - 1), dtype=np.float64)
        cov = np.concatenate([np.ones((n_segments, n_periods, 1)), extra], axis=2)
    else:
        cov = np.asarray(covariates, dtype=np.float64)
        if cov.shape != (n_segments, n_periods, k):
            raise SchemaError(
                f"covariates must be ({n_segments}, {n_periods}, {k}), got {cov.shape}"
            )
    if variable_names is None:
        variable_names = [INTERCEPT_NAME] + [f"x{i}" for i in range(1, cov.shape[2])]

    counts, states = simulate_counts(spec, truth, cov, rng, n_reps=1)
    panel = PanelData(
        counts=counts[0],
        covariates=cov,
        variable_names=variable_names,
        segment_ids=list(range(n_segments)),
        period_ids=list(range(n_periods)),
    )
    return panel, states[0]
