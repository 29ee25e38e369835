import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpekit.errors import DomainError
from qpekit.shots import (
    GENERATOR_NAME,
    ShotRecord,
    circular_spread,
    empirical_estimator,
    failure_tolerance,
    hoeffding_trial,
    sample_shots,
    trial_failed,
    window_count,
    z_statistic,
)
from qpekit.spectral import PhaseTable, phase_distribution


def dist(thetas, weights, n):
    return phase_distribution(PhaseTable(thetas=np.array(thetas, float), weights=np.array(weights, float), t=1.0, N=n))


def record(counts):
    counts = np.array(counts)
    return ShotRecord(seed=0, m=int(counts.sum()), counts=counts, empirical_top=int(np.argmax(counts)))


def test_indicator_distribution_concentrates():
    rec = sample_shots(dist([3 / 8], [1.0], 3), 500, seed=4)
    assert rec.counts[3] == 500
    assert rec.counts.sum() == 500
    assert rec.empirical_top == 3
    assert empirical_estimator(rec, 3) == 1.0
    assert empirical_estimator(rec, 0) == 0.0
    assert z_statistic(rec, 3, 1) == 500
    assert rec.generator == GENERATOR_NAME


def test_two_outcome_frequencies_within_binomial_3sigma():
    pd = dist([0.0, 0.5], [0.7, 0.3], 1)
    m = 10**5
    rec = sample_shots(pd, m, seed=11)
    sigma = math.sqrt(0.7 * 0.3 / m)
    assert abs(empirical_estimator(rec, 0) - 0.7) <= 3 * sigma
    assert abs(empirical_estimator(rec, 1) - 0.3) <= 3 * sigma


def test_same_seed_same_counts():
    pd = dist([0.13, 0.61], [0.6, 0.4], 5)
    a, b = sample_shots(pd, 1000, 77), sample_shots(pd, 1000, 77)
    np.testing.assert_array_equal(a.counts, b.counts)
    assert (a.seed, a.m, a.empirical_top) == (b.seed, b.m, b.empirical_top)
    assert not np.array_equal(a.counts, sample_shots(pd, 1000, 78).counts)


@settings(max_examples=30)
@given(st.integers(0, 2**63), st.integers(1, 2000))
def test_record_invariants(seed, m):
    pd = dist([0.2, 0.45, 0.9], [0.5, 0.3, 0.2], 4)
    rec = sample_shots(pd, m, seed)
    assert rec.counts.sum() == m
    assert rec.empirical_top == int(np.flatnonzero(rec.counts == rec.counts.max())[0])


def test_estimator_concentration_sweep():
    pd = dist([0.2, 0.7], [0.55, 0.45], 4)
    m = 4000
    hits = sum(abs(empirical_estimator(sample_shots(pd, m, s), pd.l_star) - pd.probs[pd.l_star]) <= 4 / math.sqrt(m) for s in range(100))
    assert hits >= 95


def test_z_statistic():
    rec = record([7, 3, 0])
    assert z_statistic(rec, 0, 1) == 4
    assert z_statistic(rec, 1, 0) == -4
    with pytest.raises(DomainError):
        z_statistic(rec, 2, 2)


def test_z_statistic_expectation():
    pd = dist([0.0, 0.5], [0.6, 0.4], 1)
    m = 2000
    z = [z_statistic(sample_shots(pd, m, s), 0, 1) for s in range(200)]
    # mean of m(P0 - P1) with standard error sqrt(m)/sqrt(200)
    assert abs(np.mean(z) - m * 0.2) <= 4 * math.sqrt(m * (1 - 0.04)) / math.sqrt(200)


def test_sample_shots_rejects_nonpositive_m():
    with pytest.raises(DomainError):
        sample_shots(dist([0.1], [1.0], 3), 0, 0)


def test_tie_counts_as_failure():
    assert trial_failed(np.array([5, 5, 0]), 0)
    assert trial_failed(np.array([4, 6, 0]), 0)
    assert not trial_failed(np.array([6, 5, 0]), 0)


def test_indicator_trial_never_fails():
    rep = hoeffding_trial(dist([5 / 16], [1.0], 4), 0.1, 50, seed=0)
    assert rep.failures == 0
    assert rep.m_eps == 5
    assert rep.to_dict()["generator"] == GENERATOR_NAME


def test_trial_requires_gap():
    with pytest.raises(DomainError):
        hoeffding_trial(dist([0.25, 0.75], [0.5, 0.5], 2), 0.1, 10, 0)
    with pytest.raises(DomainError):
        hoeffding_trial(dist([0.25], [1.0], 2), 0.1, 0, 0)


def test_trial_is_conservative_on_mixture():
    pd = dist([0.1, 0.4, 0.8], [0.6, 0.25, 0.15], 5)
    for eps in (0.1, 0.01):
        rep = hoeffding_trial(pd, eps, 300, seed=5)
        assert rep.failure_rate <= failure_tolerance(eps, 300)


def test_trial_determinism():
    pd = dist([0.1, 0.4], [0.6, 0.4], 4)
    assert hoeffding_trial(pd, 0.1, 100, 3) == hoeffding_trial(pd, 0.1, 100, 3)


def test_failure_tolerance():
    assert failure_tolerance(0.1, 2000) == pytest.approx(0.1 + 3 * math.sqrt(0.09 / 2000))


def test_circular_spread_and_window_count():
    counts = np.array([4, 1, 0, 0, 0, 0, 0, 3])
    assert circular_spread(counts, 0) == pytest.approx((1 + 3) / 8)
    assert window_count(counts, 0, 1) == 8
    assert window_count(counts, 0, 0) == 4
    assert window_count(counts, 1, 10) == 8
    assert circular_spread(np.zeros(4, int), 0) == 0.0
