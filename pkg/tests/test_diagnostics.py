import numpy as np
import pytest

from switchcount.diagnostics import convergence_report, mpsrf, psrf
from switchcount.errors import DegenerateVarianceError, ParamDomainError


def test_psrf_same_target_near_one():
    rng = np.random.default_rng(0)
    chains = rng.normal(0.0, 1.0, size=(4, 10_000))
    assert psrf(chains) < 1.05


def test_psrf_separated_chains_large():
    rng = np.random.default_rng(1)
    chains = rng.normal(0.0, 1.0, size=(2, 5_000))
    chains[1] += 10.0
    assert psrf(chains) > 1.2


def test_psrf_errors():
    rng = np.random.default_rng(2)
    with pytest.raises(ParamDomainError):
        psrf(rng.normal(size=(1, 100)))
    with pytest.raises(ParamDomainError):
        psrf(rng.normal(size=(2, 5)))
    with pytest.raises(DegenerateVarianceError):
        psrf(np.ones((3, 100)))


def test_psrf_formula_directly():
    rng = np.random.default_rng(3)
    chains = rng.normal(size=(3, 50))
    m, n = chains.shape
    w = chains.var(axis=1, ddof=1).mean()
    b_over_n = chains.mean(axis=1).var(ddof=1)
    expected = np.sqrt(((n - 1) / n * w + b_over_n) / w)
    assert psrf(chains) == pytest.approx(expected, abs=1e-12)


def test_mpsrf_univariate_closed_form():
    rng = np.random.default_rng(4)
    chains = rng.normal(size=(4, 200, 1))
    m, n, _ = chains.shape
    w = chains[:, :, 0].var(axis=1, ddof=1).mean()
    b_over_n = chains[:, :, 0].mean(axis=1).var(ddof=1)
    expected = np.sqrt((n - 1) / n + (m + 1) / m * (b_over_n / w))
    value, ridge = mpsrf(chains)
    assert value == pytest.approx(expected, abs=1e-6)
    assert not ridge


def test_mpsrf_same_target_near_one():
    rng = np.random.default_rng(5)
    chains = rng.normal(size=(4, 5_000, 3))
    value, _ = mpsrf(chains)
    assert value < 1.1


def test_mpsrf_needs_more_draws_than_params():
    rng = np.random.default_rng(6)
    with pytest.raises(ParamDomainError):
        mpsrf(rng.normal(size=(2, 4, 5)))


def test_mpsrf_singular_w_gets_ridge():
    rng = np.random.default_rng(7)
    base = rng.normal(size=(3, 300, 1))
    chains = np.concatenate([base, base], axis=2)  # perfectly collinear pair
    value, ridge = mpsrf(chains)
    assert ridge
    assert np.isfinite(value)


def test_affine_invariance():
    rng = np.random.default_rng(8)
    chains = rng.normal(size=(4, 800))
    a, b = 3.7, -12.0
    assert psrf(a * chains + b) == pytest.approx(psrf(chains), rel=1e-12)
    chains3 = rng.normal(size=(4, 800, 2))
    v1, _ = mpsrf(chains3)
    v2, _ = mpsrf(chains3 * 2.5 - 4.0)
    assert v2 == pytest.approx(v1, rel=1e-9)


def test_convergence_report_from_fit():
    from switchcount.mcmc import McmcConfig, sample_posterior
    from switchcount.models import ModelSpec, ParamSet
    from switchcount.panel import simulate_panel

    spec = ModelSpec.from_name("msnb")
    rng = np.random.default_rng(9)
    truth = ParamSet(beta=np.array([1.2, 0.3]), log_alpha=np.log(0.3),
                     transitions=rng.uniform(0.3, 0.7, (8, 2)))
    panel, _ = simulate_panel(spec, truth, 8, 5, seed=1)
    cfg = McmcConfig(n_chains=2, n_draws=600, n_burnin=200, thin=1, seed=0)
    draws = sample_posterior(spec, panel, cfg=cfg)
    rep = convergence_report(draws)
    assert set(rep.psrf) >= set(draws.param_names)
    assert any(k.startswith("p01[") for k in rep.psrf)
    assert rep.n_chains == 2
    assert np.isfinite(rep.mpsrf)
    assert rep.max_psrf >= 1.0 - 1e-3
