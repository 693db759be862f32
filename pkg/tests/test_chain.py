import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import segment_loglik_enumerated
from switchcount.chain import (
    TransitionPair,
    count_transitions,
    segment_forward_loglik,
    state_path_log_prior,
    stationary,
)
from switchcount.dists import nb_log_pmf
from switchcount.errors import ParamDomainError


def test_stationary_closed_form():
    st_pair = stationary(TransitionPair(0.3, 0.6))
    assert st_pair.pbar0 == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert st_pair.pbar1 == pytest.approx(1.0 / 3.0, abs=1e-15)
    sym = stationary(TransitionPair(0.5, 0.5))
    assert sym.pbar0 == 0.5 and sym.pbar1 == 0.5


def test_more_frequent_state():
    st_pair = stationary(TransitionPair(0.7, 0.2))
    assert st_pair.pbar1 > st_pair.pbar0


def test_transition_pair_domain():
    for bad in [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (-0.1, 0.5), (0.5, np.nan)]:
        with pytest.raises(ParamDomainError):
            TransitionPair(*bad)


@settings(max_examples=200, deadline=None)
@given(p01=st.floats(1e-6, 1 - 1e-6), p10=st.floats(1e-6, 1 - 1e-6))
def test_stationary_fixed_point(p01, p10):
    st_pair = stationary(TransitionPair(p01, p10))
    pbar0, pbar1 = st_pair.pbar0, st_pair.pbar1
    assert abs(pbar0 + pbar1 - 1.0) < 1e-14
    assert abs((1 - p01) * pbar0 + p10 * pbar1 - pbar0) < 1e-14
    assert abs(p01 * pbar0 + (1 - p10) * pbar1 - pbar1) < 1e-14


def test_forward_one_period_zero_count():
    # T=1, A=0: likelihood is pbar0 * 1 + pbar1 * NB(0)
    tp = TransitionPair(0.4, 0.3)
    st_pair = stationary(tp)
    lam, alpha = 1.7, 0.5
    expected = np.log(st_pair.pbar0 + st_pair.pbar1 * np.exp(nb_log_pmf(0, lam, alpha)))
    got = segment_forward_loglik([0], [lam], alpha, tp)
    assert got == pytest.approx(expected, abs=1e-12)


def test_forward_all_positive_counts():
    # only the all-ones path survives: pbar1 * (1-p10)^(T-1) * prod NB(A_t)
    tp = TransitionPair(0.4, 0.3)
    st_pair = stationary(tp)
    counts = [2, 1, 3, 1]
    lam = [1.5, 2.0, 2.5, 1.0]
    alpha = 0.4
    expected = (np.log(st_pair.pbar1) + 3 * np.log(1 - tp.p10)
                + sum(nb_log_pmf(a, l, alpha) for a, l in zip(counts, lam)))
    got = segment_forward_loglik(counts, lam, alpha, tp)
    assert got == pytest.approx(expected, abs=1e-12)


def test_forward_matches_enumeration():
    rng = np.random.default_rng(3)
    for trial in range(10):
        counts = rng.poisson(1.2, size=5)
        lam = rng.uniform(0.5, 4.0, size=5)
        alpha = float(rng.uniform(0.1, 1.0))
        p01, p10 = rng.uniform(0.05, 0.95, size=2)
        ref = segment_loglik_enumerated(counts, lam, alpha, p01, p10)
        got = segment_forward_loglik(counts, lam, alpha, TransitionPair(p01, p10))
        assert got == pytest.approx(ref, rel=1e-10)


def test_forward_poisson_marker():
    counts = [1, 0, 2]
    lam = [1.0, 2.0, 0.5]
    tp = TransitionPair(0.3, 0.3)
    ref = segment_loglik_enumerated(counts, lam, None, tp.p01, tp.p10)
    assert segment_forward_loglik(counts, lam, None, tp) == pytest.approx(ref, rel=1e-10)


def test_forward_degenerate_limit_is_pure_nb():
    # p01 -> 1, p10 -> 0: chain sits in state 1, first-period weight pbar1 -> 1
    counts = [0, 2, 1]
    lam = [1.0, 1.5, 2.0]
    alpha = 0.3
    tp = TransitionPair(1 - 1e-9, 1e-9)
    pure = sum(nb_log_pmf(a, l, alpha) for a, l in zip(counts, lam))
    got = segment_forward_loglik(counts, lam, alpha, tp)
    assert got == pytest.approx(pure, abs=1e-6)


def test_appending_positive_count_bounded_factor():
    # appending a period multiplies the likelihood by at most the best emission
    tp = TransitionPair(0.4, 0.3)
    lam, alpha = 2.0, 0.4
    base = segment_forward_loglik([1, 2], [lam, lam], alpha, tp)
    longer = segment_forward_loglik([1, 2, 3], [lam, lam, lam], alpha, tp)
    bound = float(nb_log_pmf(3, lam, alpha))  # transition factors are <= 1
    assert longer <= base + bound + 1e-12


def test_forward_validation():
    tp = TransitionPair(0.3, 0.3)
    with pytest.raises(ParamDomainError):
        segment_forward_loglik([1, 2], [1.0], 0.3, tp)
    with pytest.raises(ParamDomainError):
        segment_forward_loglik([1], [-1.0], 0.3, tp)
    with pytest.raises(ParamDomainError):
        segment_forward_loglik([1], [1.0], -0.5, tp)


def test_state_path_log_prior_and_counts():
    states = np.array([[0, 1, 1, 0], [1, 1, 0, 0]])
    p01 = np.array([0.3, 0.2])
    p10 = np.array([0.4, 0.5])
    lp = state_path_log_prior(states, p01, p10)
    first = np.log(0.4 / 0.7)  # pbar0 for segment 0
    expected0 = first + np.log(0.3) + np.log(1 - 0.4) + np.log(0.4)
    assert lp[0] == pytest.approx(expected0, abs=1e-12)
    n00, n01, n10, n11 = count_transitions(states)
    assert n00.tolist() == [0, 1]
    assert n01.tolist() == [1, 0]
    assert n10.tolist() == [1, 1]
    assert n11.tolist() == [1, 1]
