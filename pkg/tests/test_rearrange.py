import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dimsob.rearrange import (
    InvalidProfileError,
    InvalidSampleError,
    StepProfile,
    WeightedSample,
    decreasing_rearrangement,
    maximal_average,
    median_value,
    oscillation_profile,
    restrict,
)

from conftest import profiles, samples


def test_three_point_sample():
    prof = decreasing_rearrangement(WeightedSample([3.0, 1.0, 2.0], [0.25, 0.5, 0.25]))
    np.testing.assert_allclose(prof.breaks, [0.25, 0.5, 1.0])
    np.testing.assert_allclose(prof.values, [3.0, 2.0, 1.0])


def test_single_value_is_constant():
    prof = decreasing_rearrangement(WeightedSample([2.5], [1.0]))
    assert prof.size == 1 and prof.values[0] == 2.5


def test_indicator_sample():
    prof = decreasing_rearrangement(WeightedSample([1.0, 0.0], [0.3, 0.7]))
    assert prof == StepProfile.indicator(0.3)


def test_ties_merge():
    prof = decreasing_rearrangement(WeightedSample([1.0, 2.0, 1.0, 2.0], [0.25] * 4))
    assert prof.size == 2
    np.testing.assert_allclose(prof.breaks, [0.5, 1.0])


def test_sample_validation():
    with pytest.raises(InvalidSampleError):
        WeightedSample([], [])
    with pytest.raises(InvalidSampleError):
        WeightedSample([1.0, 2.0], [0.5, 0.6])
    with pytest.raises(InvalidSampleError):
        WeightedSample([1.0, 2.0], [1.0, 0.0])
    # tiny float drift is renormalized
    s = WeightedSample([1.0, 2.0], [0.5, 0.5 + 1e-14])
    assert abs(s.weights.sum() - 1.0) < 1e-15


def test_profile_validation():
    with pytest.raises(InvalidProfileError):
        StepProfile([0.5, 1.0], [1.0, 2.0])
    with pytest.raises(InvalidProfileError):
        StepProfile([0.5, 0.9], [2.0, 1.0])
    with pytest.raises(InvalidProfileError):
        StepProfile([0.5, 0.5, 1.0], [3.0, 2.0, 1.0])


def test_maximal_average_examples():
    ind = StepProfile.indicator(0.4)
    assert maximal_average(ind, 0.2) == pytest.approx(1.0)
    assert maximal_average(ind, 0.8) == pytest.approx(0.5)
    assert maximal_average(StepProfile.constant(3.0), 0.37) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        maximal_average(ind, 0.0)
    with pytest.raises(ValueError):
        maximal_average(ind, 1.5)


def test_oscillation_examples():
    osc = oscillation_profile(StepProfile.indicator(0.25))
    assert osc(0.2) == pytest.approx(0.0)
    assert osc(0.5) == pytest.approx(0.5)
    assert np.all(oscillation_profile(StepProfile.constant(2.0))(np.linspace(0.01, 1, 30)) == 0.0)


def test_median_examples(linear_profile):
    assert median_value(StepProfile.indicator(0.25)) == 0.0
    assert median_value(StepProfile.indicator(0.75)) == 1.0
    assert median_value(linear_profile) == pytest.approx(0.5, abs=1e-3)


def test_restrict_examples():
    got = restrict(StepProfile.indicator(0.5), 0.25, "truncate")
    assert got == StepProfile.indicator(0.25)
    assert restrict(StepProfile.constant(4.0), 0.3, "subtract_tail").is_zero()
    lin = StepProfile.canonical(np.arange(1, 11) / 10, 1.0 - np.arange(10) / 10)
    cut = restrict(lin, 0.5, "subtract_tail")
    np.testing.assert_allclose(cut(np.array([0.05, 0.25, 0.45, 0.6])), [0.5, 0.3, 0.1, 0.0])
    with pytest.raises(ValueError):
        restrict(lin, 1.0, "truncate")


@given(samples(), st.lists(st.floats(-6, 6) | st.integers(-24, 24).map(lambda k: k / 4), min_size=1, max_size=20))
def test_equimeasurable(sample, thresholds):
    prof = decreasing_rearrangement(sample)
    t = np.array(thresholds)
    lhs = sample.distribution(t)
    rhs = np.array([prof.lengths[prof.values > x].sum() for x in t])
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@given(samples())
def test_values_sorted_and_unique(sample):
    prof = decreasing_rearrangement(sample)
    assert np.all(np.diff(prof.values) < 0)
    assert prof.breaks[-1] == 1.0


@given(profiles(nonneg=False))
def test_star_below_double_star(prof):
    t = prof.breaks
    assert np.all(prof(np.minimum(t, np.nextafter(1.0, 0.0))) <= maximal_average(prof, t) + 1e-12)


@given(st.integers(1, 40), st.integers(0, 2 ** 31))
def test_subadditivity(m, seed):
    g = np.random.default_rng(seed)
    w = g.uniform(0.1, 1.0, size=m)
    w /= w.sum()
    u, v = g.normal(size=m), g.normal(size=m)
    pu = decreasing_rearrangement(WeightedSample(u, w))
    pv = decreasing_rearrangement(WeightedSample(v, w))
    puv = decreasing_rearrangement(WeightedSample(u + v, w))
    t = np.unique(np.concatenate([pu.breaks, pv.breaks, puv.breaks]))
    assert np.all(maximal_average(puv, t) <= maximal_average(pu, t) + maximal_average(pv, t) + 1e-10)


@given(samples(), st.integers(-16, 16).map(lambda k: k / 4))
def test_shift_covariance(sample, a):
    shifted = decreasing_rearrangement(WeightedSample(sample.values - a, sample.weights))
    prof = decreasing_rearrangement(sample).shift(a)
    np.testing.assert_allclose(shifted.breaks, prof.breaks, atol=1e-12)
    np.testing.assert_allclose(shifted.values, prof.values, atol=1e-12)


@given(profiles(), st.floats(0.01, 0.99))
def test_median_property(prof, _):
    med = median_value(prof)
    above = prof.lengths[prof.values >= med].sum()
    below = prof.lengths[prof.values <= med].sum()
    assert above >= 0.5 - 1e-12 and below >= 0.5 - 1e-12


@given(profiles(), st.floats(0.01, 0.99))
def test_restrict_modes_nonnegative_tail(prof, t):
    tr = restrict(prof, t, "truncate")
    st_ = restrict(prof, t, "subtract_tail")
    assert tr(np.array([min(t + 1e-9, 0.999999)]))[0] == 0.0 or t + 1e-9 >= 1
    assert st_.is_nonnegative()
    assert np.all(st_.values >= -1e-15)


@given(profiles(), st.integers(2, 20))
def test_coarsen_keeps_integral(prof, steps):
    c = prof.coarsen(steps)
    grid = np.linspace(0.0, 1.0, steps + 1)[1:]
    if prof.size > steps:
        np.testing.assert_allclose(c.integral(grid), prof.integral(grid), atol=1e-12)
    assert np.all(np.diff(c.values) < 0) or c.size == 1
