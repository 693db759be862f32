"""Command-line interface.

Subcommands: simulate, fit, gof, compare, diagnose, report.  All artifacts
are JSON or CSV under --out; exit status is 0 on success, 2 on usage
errors, 1 on runtime errors.  Every pipeline is deterministic given its
--seed.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import diagnostics as diag
from . import evidence as evid
from . import gof as gof_mod
from . import mcmc, mle, report as report_mod
from .errors import SwitchcountError
from .models import ModelSpec, ParamSet, Structure, model_names
from .panel import load_panel, simulate_panel, write_panel


def _float_list(text):
    return [float(v) for v in text.split(",") if v != ""]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="switchcount",
        description="Markov switching and zero-inflated count-data models on panel data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic panel")
    sim.add_argument("--model", required=True, choices=model_names())
    sim.add_argument("--n-segments", type=int, default=50)
    sim.add_argument("--n-periods", type=int, default=5)
    sim.add_argument("--beta", type=_float_list, default=[0.5, 0.3],
                     help="comma-separated coefficients, intercept first")
    sim.add_argument("--alpha", type=float, default=0.15, help="NB dispersion (NB families)")
    sim.add_argument("--tau", type=float, default=-1.5)
    sim.add_argument("--gamma", type=_float_list, default=None,
                     help="zero-state logit coefficients over all covariates")
    sim.add_argument("--p01", type=float, default=0.4)
    sim.add_argument("--p10", type=float, default=0.4)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)

    fit = sub.add_parser("fit", help="fit a model by MLE or MCMC")
    fit.add_argument("--data", required=True)
    fit.add_argument("--model", required=True, choices=model_names())
    fit.add_argument("--method", required=True, choices=["mle", "mcmc"])
    fit.add_argument("--config", default=None, help="JSON file with priors/mcmc settings")
    fit.add_argument("--chains", type=int, default=None)
    fit.add_argument("--draws", type=int, default=None)
    fit.add_argument("--burnin", type=int, default=None)
    fit.add_argument("--thin", type=int, default=None)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--gof-reps", type=int, default=10_000,
                     help="goodness-of-fit replications (0 skips the test)")
    fit.add_argument("--psrf-threshold", type=float, default=diag.DEFAULT_PSRF_THRESHOLD)
    fit.add_argument("--store-states", choices=["freq", "full"], default=None)
    fit.add_argument("--out", required=True)

    gof = sub.add_parser("gof", help="goodness-of-fit test for a stored fit")
    gof.add_argument("--data", required=True)
    gof.add_argument("--report", required=True)
    gof.add_argument("--gof-reps", type=int, default=10_000)
    gof.add_argument("--seed", type=int, default=0)
    gof.add_argument("--out", default=None)

    cmp_ = sub.add_parser("compare", help="log Bayes factor of the second fit over the first")
    cmp_.add_argument("report_1")
    cmp_.add_argument("report_2")

    dia = sub.add_parser("diagnose", help="convergence diagnostics from stored draws")
    dia.add_argument("--draws", required=True)
    dia.add_argument("--psrf-threshold", type=float, default=diag.DEFAULT_PSRF_THRESHOLD)
    dia.add_argument("--out", default=None)

    rep = sub.add_parser("report", help="emit figure-ready CSV extracts from a fit report")
    rep.add_argument("--fit", required=True)
    rep.add_argument("--out", required=True)
    return parser


def _truth_from_args(spec, args, parser):
    k = len(args.beta)
    log_alpha = float(np.log(args.alpha)) if spec.has_dispersion else None
    tau = gamma = transitions = None
    if spec.structure == Structure.ZERO_INFLATED_TAU:
        tau = args.tau
    elif spec.structure == Structure.ZERO_INFLATED_GAMMA:
        gamma = np.asarray(args.gamma if args.gamma is not None else [0.0] * k)
        if gamma.shape[0] != k:
            parser.error(f"--gamma must have {k} entries to match --beta")
    elif spec.structure == Structure.MARKOV_SWITCHING:
        transitions = np.tile([args.p01, args.p10], (args.n_segments, 1))
    return ParamSet(beta=np.asarray(args.beta), log_alpha=log_alpha, tau=tau,
                    gamma=gamma, transitions=transitions)


def _cmd_simulate(args, parser):
    spec = ModelSpec.from_name(args.model)
    truth = _truth_from_args(spec, args, parser)
    panel, states = simulate_panel(spec, truth, args.n_segments, args.n_periods, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_panel(panel, out / "panel.csv")
    pd.DataFrame({
        "segment_id": np.repeat(range(args.n_segments), args.n_periods),
        "period": np.tile(range(args.n_periods), args.n_segments),
        "state": states.ravel(),
    }).to_csv(out / "states.csv", index=False)
    truth_doc = {
        "model": spec.name,
        "seed": args.seed,
        "beta": list(map(float, truth.beta)),
    }
    if truth.log_alpha is not None:
        truth_doc["alpha"] = float(np.exp(truth.log_alpha))
    if truth.tau is not None:
        truth_doc["tau"] = truth.tau
    if truth.gamma is not None:
        truth_doc["gamma"] = list(map(float, truth.gamma))
    if truth.transitions is not None:
        truth_doc["p01"] = args.p01
        truth_doc["p10"] = args.p10
    with open(out / "truth.json", "w", encoding="utf-8") as fh:
        json.dump(truth_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _load_config(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _mcmc_config(args, config):
    base = dict(config.get("mcmc", {}))
    if args.chains is not None:
        base["n_chains"] = args.chains
    if args.draws is not None:
        base["n_draws"] = args.draws
    if args.burnin is not None:
        base["n_burnin"] = args.burnin
    if args.thin is not None:
        base["thin"] = args.thin
    if args.store_states is not None:
        base["store_states"] = args.store_states
    base["seed"] = args.seed
    return mcmc.McmcConfig(**base)


def _priors_config(config):
    cfg = dict(config.get("priors", {}))
    if "log_alpha_bounds" in cfg:
        cfg["log_alpha_bounds"] = tuple(cfg["log_alpha_bounds"])
    return mcmc.PriorConfig(**cfg)


def _draws_frame(draws):
    """Columnar view of the retained draws: one column per parameter plus loglik."""
    frames = []
    for c in range(draws.n_chains):
        cols = {"chain": np.full(draws.n_retained, c), "draw": np.arange(draws.n_retained)}
        for j, name in enumerate(draws.param_names):
            cols[name] = draws.draws[c, :, j]
        cols["loglik"] = draws.logliks[c]
        if draws.transition_draws is not None:
            n_seg = draws.transition_draws.shape[2]
            for i in range(n_seg):
                cols[f"p01[{i}]"] = draws.transition_draws[c, :, i, 0]
                cols[f"p10[{i}]"] = draws.transition_draws[c, :, i, 1]
        if draws.states_packed is not None:
            cols["states_hex"] = [draws.states_packed[c, r].tobytes().hex()
                                  for r in range(draws.n_retained)]
        frames.append(pd.DataFrame(cols))
    return pd.concat(frames, ignore_index=True)


def _cmd_fit(args, parser):
    spec = ModelSpec.from_name(args.model)
    if args.method == "mle" and spec.structure == Structure.MARKOV_SWITCHING:
        parser.error(f"--method mle is unsupported for switching model {spec.name!r}; use --method mcmc")
    data = load_panel(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _load_config(args.config)

    if args.method == "mle":
        result = mle.fit_mle(spec, data)
        gof_res = None
        if args.gof_reps > 0:
            gof_res = gof_mod.gof_pvalue(data, spec, result.estimates,
                                         n_reps=args.gof_reps, seed=args.seed)
        doc = report_mod.build_mle_report(spec, data, result, gof=gof_res)
    else:
        cfg = _mcmc_config(args, config)
        priors = _priors_config(config)
        init = None
        if "gamma_idx" in config and spec.structure == Structure.ZERO_INFLATED_GAMMA:
            idx = np.asarray(config["gamma_idx"], dtype=np.int64)
            init = mle.default_init(spec, data)
            init.gamma = np.zeros(idx.shape[0])
            init.gamma_idx = idx
        draws = mcmc.sample_posterior(spec, data, priors=priors, cfg=cfg, init=init)
        ev = evid.evidence_report(draws, data, seed=args.seed)
        conv = diag.convergence_report(draws, threshold=args.psrf_threshold)
        gof_res = None
        if args.gof_reps > 0:
            point = mcmc.posterior_mean_params(draws)
            gof_res = gof_mod.gof_pvalue(data, spec, point, n_reps=args.gof_reps, seed=args.seed)
        doc = report_mod.build_mcmc_report(spec, data, draws, ev, conv, gof=gof_res)
        _draws_frame(draws).to_csv(out / "draws.csv", index=False)
        if draws.state_freq is not None and cfg.store_states == "freq":
            freq = draws.state_freq.sum(axis=0)
            total = draws.n_chains * draws.n_retained
            pd.DataFrame({
                "segment_id": np.repeat(range(data.n_segments), data.n_periods),
                "period": np.tile(range(data.n_periods), data.n_segments),
                "state1_draws": freq.ravel(),
                "retained_total": np.full(freq.size, total),
            }).to_csv(out / "states_freq.csv", index=False)

    report_mod.write_report_json(doc, out / "report.json")
    print(f"wrote {out / 'report.json'}")
    return 0


def _cmd_gof(args, parser):
    data = load_panel(args.data)
    with open(args.report, encoding="utf-8") as fh:
        doc = json.load(fh)
    spec = ModelSpec.from_name(doc["model"])
    params = report_mod.params_from_report(doc)
    result = gof_mod.gof_pvalue(data, spec, params, n_reps=args.gof_reps, seed=args.seed)
    payload = {
        "chi2_observed": result.chi2_observed,
        "p_value": result.p_value,
        "n_replications": result.n_replications,
        "cell_edges": list(result.cell_edges),
        "expected_cell_counts": list(result.expected_cell_counts),
        "observed_cell_counts": list(result.observed_cell_counts),
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "gof.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _cmd_compare(args, parser):
    reports = []
    for path in (args.report_1, args.report_2):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if "evidence" not in doc:
            raise SwitchcountError(f"{path}: no evidence block (not an MCMC fit report)")
        reports.append(doc["evidence"]["log_ml"])
    factor = evid.bayes_log_factor(reports[1], reports[0])
    print(f"{factor:.2f}")
    return 0


def _cmd_diagnose(args, parser):
    df = pd.read_csv(args.draws)
    meta = {"chain", "draw", "loglik", "states_hex"}
    param_cols = [c for c in df.columns if c not in meta]
    chains = sorted(df["chain"].unique())
    stacked = np.stack([df[df["chain"] == c][param_cols].to_numpy() for c in chains])
    per_param = {}
    for j, name in enumerate(param_cols):
        try:
            per_param[name] = diag.psrf(stacked[:, :, j])
        except SwitchcountError:
            per_param[name] = None
    finite = [v for v in per_param.values() if v is not None]
    m, n, p = stacked.shape
    joint, ridge = diag.mpsrf(stacked) if n > p else (None, False)
    payload = {
        "psrf": per_param,
        "max_psrf": max(finite) if finite else None,
        "mpsrf": joint,
        "n_chains": m,
        "n_draws_per_chain": n,
        "threshold": args.psrf_threshold,
        "converged": bool(finite and max(finite) <= args.psrf_threshold
                          and joint is not None and joint <= args.psrf_threshold),
        "ridge_applied": ridge,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "diagnostics.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _cmd_report(args, parser):
    with open(args.fit, encoding="utf-8") as fh:
        doc = json.load(fh)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    series = report_mod.state_series_rows(doc)
    pd.DataFrame(series, columns=["segment", "period", "p_state1"]).to_csv(
        out / "state_series.csv", index=False
    )
    hist = report_mod.histogram_rows(doc)
    pd.DataFrame(hist, columns=["histogram", "bin_lo", "bin_hi", "count"]).to_csv(
        out / "histograms.csv", index=False
    )
    print(f"wrote {out / 'state_series.csv'} and {out / 'histograms.csv'}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "gof": _cmd_gof,
    "compare": _cmd_compare,
    "diagnose": _cmd_diagnose,
    "report": _cmd_report,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, parser)
    except SwitchcountError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime boundary: bad files, malformed JSON, ...
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
