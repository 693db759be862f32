import numpy as np
import pytest

from switchcount.errors import DiagnosticsUnavailable, SpecError
from switchcount.mle import MleResult, confidence_interval, fit_mle, t_test
from switchcount.models import ModelSpec, ParamSet, pack_params
from switchcount.panel import PanelData, simulate_panel


def _fit_standard_nb(seed, n=120, t=4):
    spec = ModelSpec.from_name("nb")
    truth = ParamSet(beta=np.array([0.8, 0.5, -0.4]), log_alpha=np.log(0.3))
    panel, _ = simulate_panel(spec, truth, n, t, seed=seed)
    return spec, truth, panel, fit_mle(spec, panel)


def test_fit_recovers_standard_nb():
    spec, truth, panel, res = _fit_standard_nb(seed=0)
    tvec = pack_params(spec, truth)
    assert res.converged
    assert res.std_errors is not None
    z = np.abs(res.theta - tvec) / res.std_errors
    assert np.all(z < 4.0)
    assert res.grad_inf_norm < 1e-4 * max(1.0, abs(res.max_loglik))


def test_loglik_no_worse_than_init():
    from switchcount.mle import default_init
    from switchcount.models import loglik_integrated

    spec, truth, panel, res = _fit_standard_nb(seed=1)
    init_ll = loglik_integrated(spec, default_init(spec, panel), panel)
    assert res.max_loglik >= init_ll - 1e-9


def test_aic_identity_and_paper_arithmetic():
    spec, truth, panel, res = _fit_standard_nb(seed=2)
    assert res.aic == pytest.approx(2 * res.n_free_params - 2 * res.max_loglik, abs=1e-10)
    # the AIC formula applied to a reported fit: K=16, LL=-2502.67
    assert 2 * 16 - 2 * (-2502.67) == pytest.approx(5037.34, abs=1e-9)


def test_switching_spec_rejected(tiny_panel):
    with pytest.raises(SpecError):
        fit_mle(ModelSpec.from_name("msnb"), tiny_panel)


def test_zero_variance_covariate_flags_singular_hessian():
    spec = ModelSpec.from_name("poisson")
    rng = np.random.default_rng(3)
    counts = rng.poisson(2.0, size=(40, 3))
    cov = np.ones((40, 3, 3))
    cov[:, :, 1] = rng.normal(size=(40, 3))
    cov[:, :, 2] = 0.0  # zero-variance column, collinear with nothing, gradient-flat
    panel = PanelData(counts=counts, covariates=cov,
                      variable_names=["intercept", "x1", "dead"],
                      segment_ids=list(range(40)), period_ids=[0, 1, 2])
    res = fit_mle(spec, panel)
    assert res.hessian_singular or res.std_errors is None or np.any(res.std_errors > 1e3)


def _result(theta, se):
    spec = ModelSpec.from_name("poisson")
    theta = np.asarray(theta, dtype=float)
    return MleResult(
        spec=spec, param_names=[f"b{i}" for i in range(len(theta))],
        theta=theta,
        estimates=ParamSet(beta=theta),
        std_errors=np.asarray(se, dtype=float) if se is not None else None,
        max_loglik=-10.0, aic=20.0, converged=True, iterations=5,
        hessian_singular=False, grad_inf_norm=0.0,
    )


def test_t_test_flags():
    # boundary sits at the exact 5% two-tailed quantile, 1.9599640
    res = _result([0.0, 3.0, 1.96001, 1.95996], [1.0, 1.0, 1.0, 1.0])
    flags = t_test(res, level=0.05)
    assert flags["b0"] is False
    assert flags["b1"] is True
    assert flags["b2"] is True
    assert flags["b3"] is False


def test_t_test_requires_std_errors():
    res = _result([1.0], None)
    with pytest.raises(DiagnosticsUnavailable):
        t_test(res)


def test_confidence_interval_values():
    res = _result([0.0], [1.0])
    lo, hi = confidence_interval(res, level=0.95)["b0"]
    assert lo == pytest.approx(-1.959964, abs=1e-5)
    assert hi == pytest.approx(1.959964, abs=1e-5)
    # 60% level uses the 0.8416 quantile factor
    lo60, hi60 = confidence_interval(res, level=0.60)["b0"]
    assert hi60 == pytest.approx(0.8416212, abs=1e-6)


def test_confidence_interval_zero_se_warns():
    res = _result([2.0], [0.0])
    with pytest.warns(UserWarning):
        iv = confidence_interval(res)["b0"]
    assert iv == (2.0, 2.0)
