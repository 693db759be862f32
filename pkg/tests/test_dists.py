import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from switchcount.dists import nb_log_pmf, poisson_log_pmf, rate, zero_mass
from switchcount.errors import ParamDomainError, SchemaError

# frozen oracle values (exact arithmetic, 40-digit mpmath)
POISSON_10_3 = -7.118289686394418381273257
NB_3_25_04 = -1.930937865161957068362348
LOG_HALF = math.log(0.5)


def test_nb_known_values():
    assert nb_log_pmf(0, 1.0, 1.0) == pytest.approx(LOG_HALF, abs=1e-12)
    assert nb_log_pmf(1, 1.0, 1.0) == pytest.approx(math.log(0.25), abs=1e-12)
    assert nb_log_pmf(3, 2.5, 0.4) == pytest.approx(NB_3_25_04, abs=1e-12)


def test_nb_poisson_limit():
    # alpha -> 0 recovers the Poisson pmf; the exact first-order gap is
    # alpha * (a - lam)^2 / 2-ish, about 1.1e-5 at alpha=1e-8, a=50
    assert nb_log_pmf(2, 2.0, 1e-8) == pytest.approx(math.log(2.0) - 2.0, abs=1e-6)
    a = np.arange(0, 51)
    sup8 = np.max(np.abs(nb_log_pmf(a, 3.0, 1e-8) - poisson_log_pmf(a, 3.0)))
    sup6 = np.max(np.abs(nb_log_pmf(a, 3.0, 1e-6) - poisson_log_pmf(a, 3.0)))
    assert sup8 < 2e-5
    assert sup8 < sup6 / 10  # gap shrinks linearly in alpha


def test_poisson_known_values():
    assert poisson_log_pmf(0, 1.0) == pytest.approx(-1.0, abs=1e-12)
    assert poisson_log_pmf(1, 1.0) == pytest.approx(-1.0, abs=1e-12)
    assert poisson_log_pmf(10, 3.0) == pytest.approx(POISSON_10_3, abs=1e-12)


def test_domain_errors():
    with pytest.raises(ParamDomainError):
        nb_log_pmf(0, -1.0, 1.0)
    with pytest.raises(ParamDomainError):
        nb_log_pmf(0, 1.0, 0.0)
    with pytest.raises(ParamDomainError):
        nb_log_pmf(-1, 1.0, 1.0)
    with pytest.raises(ParamDomainError):
        nb_log_pmf(1.5, 1.0, 1.0)
    with pytest.raises(ParamDomainError):
        poisson_log_pmf(2, 0.0)


def test_zero_mass():
    assert zero_mass(0) == 1.0
    assert zero_mass(3) == 0.0
    assert sum(zero_mass(a) for a in range(101)) == 1.0


def test_rate():
    assert rate(np.zeros(3), np.array([1.0, 2.0, 3.0])) == 1.0
    assert rate([1.0, 0.0], [1.0, 5.0]) == pytest.approx(math.e, rel=1e-15)
    with pytest.raises(SchemaError):
        rate([1.0, 2.0], [1.0, 2.0, 3.0])


def test_rate_matches_extended_precision():
    import mpmath as mp

    mp.mp.dps = 50
    rng = np.random.default_rng(4)
    for _ in range(20):
        beta = rng.normal(size=6)
        x = rng.normal(size=6)
        ref = float(mp.e ** mp.fsum([mp.mpf(b) * mp.mpf(v) for b, v in zip(beta, x)]))
        assert rate(beta, x) == pytest.approx(ref, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(lam=st.floats(0.05, 40.0), alpha=st.floats(0.01, 3.0))
def test_nb_pmf_sums_to_one(lam, alpha):
    # A_max large enough that the NB tail bound is < 1e-9
    a_max = 200 + int(40 * lam * (1 + alpha * lam))
    a = np.arange(0, a_max + 1)
    total = np.exp(nb_log_pmf(a, lam, alpha)).sum()
    assert 1.0 - 1e-8 <= total <= 1.0 + 1e-12


@settings(max_examples=25, deadline=None)
@given(lam=st.floats(0.05, 30.0), alpha=st.floats(0.01, 2.0))
def test_nb_moments_from_pmf(lam, alpha):
    a_max = 400 + int(60 * lam * (1 + alpha * lam))
    a = np.arange(0, a_max + 1, dtype=float)
    pmf = np.exp(nb_log_pmf(a, lam, alpha))
    mean = float(pmf @ a)
    var = float(pmf @ (a - mean) ** 2)
    assert mean == pytest.approx(lam, rel=1e-6)
    assert var == pytest.approx(lam * (1 + alpha * lam), rel=1e-6)
