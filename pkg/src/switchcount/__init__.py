"""Zero-state Markov switching and zero-inflated count-data models on panel data.

Panel counts are modeled with a latent two-state regime per segment: a
zero state in which counts are identically zero, and a normal-count state
emitting negative binomial or Poisson counts through a log link.  The
package fits the switching models by Metropolis-within-Gibbs MCMC with
exact forward-filter backward-sampling state updates, fits zero-inflated
and standard baselines by MLE or MCMC, and compares models by harmonic
mean marginal likelihoods, Bayes factors, DIC, and simulated chi-square
goodness of fit.
"""

from .backend import active_backend
from .chain import StationaryPair, TransitionPair, segment_forward_loglik, stationary
from .diagnostics import ConvergenceReport, convergence_report, mpsrf, psrf
from .dists import nb_log_pmf, poisson_log_pmf, rate, zero_mass
from .evidence import (
    EvidenceReport,
    bayes_log_factor,
    bootstrap_log_ml_ci,
    dic,
    evidence_report,
    log_marginal_harmonic,
)
from .gof import GofResult, chi2_statistic, gof_pvalue
from .mcmc import (
    ChainDraws,
    McmcConfig,
    PriorConfig,
    adapt_proposals,
    posterior_mean_params,
    sample_posterior,
    state_posterior,
)
from .mle import MleOptions, MleResult, confidence_interval, fit_mle, t_test
from .models import (
    Family,
    ModelSpec,
    ParamSet,
    Structure,
    loglik_complete,
    loglik_integrated,
    zero_state_prob,
)
from .panel import (
    PanelData,
    VariableSummary,
    load_panel,
    simulate_panel,
    summarize,
    write_panel,
)
from .report import credible_interval, rate_summaries

__version__ = "0.1.0"

__all__ = [
    "active_backend",
    "TransitionPair",
    "StationaryPair",
    "stationary",
    "segment_forward_loglik",
    "nb_log_pmf",
    "poisson_log_pmf",
    "zero_mass",
    "rate",
    "Family",
    "Structure",
    "ModelSpec",
    "ParamSet",
    "loglik_complete",
    "loglik_integrated",
    "zero_state_prob",
    "PanelData",
    "VariableSummary",
    "load_panel",
    "write_panel",
    "summarize",
    "simulate_panel",
    "MleOptions",
    "MleResult",
    "fit_mle",
    "t_test",
    "confidence_interval",
    "PriorConfig",
    "McmcConfig",
    "ChainDraws",
    "sample_posterior",
    "adapt_proposals",
    "state_posterior",
    "posterior_mean_params",
    "EvidenceReport",
    "log_marginal_harmonic",
    "bayes_log_factor",
    "bootstrap_log_ml_ci",
    "dic",
    "evidence_report",
    "GofResult",
    "chi2_statistic",
    "gof_pvalue",
    "ConvergenceReport",
    "psrf",
    "mpsrf",
    "convergence_report",
    "credible_interval",
    "rate_summaries",
    "__version__",
]
