from math import exp, gamma, lgamma, log, pi, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from dimsob.isoprofile import (
    BallEstimator,
    CustomWeight,
    GaussianEstimator,
    InconclusiveIntegralError,
    LogHalf,
    ManifoldEstimator,
    PowerRn,
    ProfileDomainError,
    SphereEstimator,
    Tabulated,
    gaussian_type_check,
    geometry_constant,
    geometry_limit,
    iso_hardy_QJ,
    log_ball_volume,
    log_sphere_area,
    profile_eval,
    ratio_is_monotone,
    transference_integral,
)
from dimsob.rearrange import StepProfile
from dimsob.rispace import hardy_transform

from conftest import profiles


def gamma_n(n):
    return pi ** (n / 2) / gamma(1 + n / 2)


def test_volumes_direct():
    for n in (1, 2, 3, 7):
        assert exp(log_ball_volume(n)) == pytest.approx(gamma_n(n), rel=1e-13)
        assert exp(log_sphere_area(n)) == pytest.approx(2 * pi ** ((n + 1) / 2) / gamma((n + 1) / 2), rel=1e-13)
    # no overflow far past the range of the direct formula
    assert np.isfinite(log_ball_volume(10 ** 4))


def test_profile_examples():
    assert profile_eval(PowerRn(1), 0.25) == pytest.approx(2.0)
    for n in (2, 5):
        spec = BallEstimator(n)
        assert profile_eval(spec, 0.2) == pytest.approx(profile_eval(spec, 0.8))
    assert profile_eval(GaussianEstimator(1.0), 0.25) == pytest.approx(0.25 * sqrt(log(4)), rel=1e-12)


def test_power_profile_formula():
    for n in (2, 3, 10):
        t = 0.3
        expected = n * gamma_n(n) ** (1 / n) * t ** (1 - 1 / n)
        assert profile_eval(PowerRn(n), t) == pytest.approx(expected, rel=1e-12)


def test_domain_errors():
    with pytest.raises(ProfileDomainError):
        profile_eval(PowerRn(2), 1.5)
    with pytest.raises(ProfileDomainError):
        profile_eval(GaussianEstimator(1.0), 0.7)


@pytest.mark.parametrize(
    "spec",
    [PowerRn(3), BallEstimator(4), SphereEstimator(3), ManifoldEstimator(5, 2.0), GaussianEstimator(1.0)],
    ids=lambda s: type(s).__name__,
)
def test_ratio_monotone(spec):
    assert ratio_is_monotone(spec)


def test_tabulated_matches_source():
    t = np.geomspace(1e-4, 0.5, 60)
    tab = Tabulated(t, profile_eval(BallEstimator(3), t))
    probe = np.geomspace(2e-4, 0.45, 17)
    np.testing.assert_allclose(profile_eval(tab, probe), profile_eval(BallEstimator(3), probe), rtol=1e-12)


def test_transference_examples():
    G = LogHalf()
    assert transference_integral(PowerRn(2), G) == pytest.approx(1 / sqrt(2), rel=1e-9)
    assert transference_integral(PowerRn(1), G) == pytest.approx(sqrt(pi) / 2, rel=1e-9)
    assert transference_integral(GaussianEstimator(1.0), G, 0.5) == np.inf


def test_transference_custom_weight_matches_loghalf():
    G = CustomWeight(lambda t: 1 / (t * np.sqrt(np.log(1 / t))), singular_at_one=True)
    got = transference_integral(PowerRn(3), G)
    assert got == pytest.approx(geometry_constant("rn", 3), rel=1e-7)


def test_custom_weight_declaration_checked():
    with pytest.raises(ValueError):
        CustomWeight(lambda t: 1 / (1 - t), singular_at_one=False)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 10, 25, 50])
def test_rn_constant_vs_independent_quadrature(n):
    # independent oracle: t = s^n turns (t / I_n) G dt into sqrt(n) / (c sqrt(ln 1/s)) ds,
    # whose only singularity, (1 - s)^{-1/2}, goes to the algebraic-weight rule
    c = n * gamma_n(n) ** (1 / n)

    def smooth(s):
        if s >= 1:
            return 1.0
        return sqrt((1 - s) / log(1 / s)) if s > 0 else 0.0

    ref = sqrt(n) / c * integrate.quad(smooth, 0, 1, weight="alg", wvar=(0, -0.5), epsabs=0, epsrel=1e-12)[0]
    assert geometry_constant("rn", n) == pytest.approx(ref, rel=1e-7)


def test_constant_examples():
    assert geometry_constant("rn", 4) == pytest.approx(2 ** 0.25 / 2, rel=1e-12)
    assert geometry_limit("ball") == pytest.approx(pi * sqrt(2) / 2)
    assert geometry_limit("manifold", 1.0) == pytest.approx(pi)
    assert geometry_limit("manifold", 4.0) == pytest.approx(pi / 2)
    with pytest.raises(ValueError):
        geometry_constant("sphere", 1)
    with pytest.raises(ValueError):
        geometry_constant("torus", 3)


@pytest.mark.parametrize("n", [2, 3, 8])
def test_ball_constant_is_transference_bound(n):
    # sqrt(pi n)/c bounds the integral over (0, 1/2)
    got = transference_integral(BallEstimator(n), LogHalf(), 0.5)
    assert got <= geometry_constant("ball", n) * (1 + 1e-9)


def test_sphere_variants():
    n = 5
    computed = geometry_constant("sphere", n)
    assert geometry_constant("sphere", n, variant="printed") == pytest.approx(2 * computed)
    ratio = exp(log_sphere_area(n) - log_sphere_area(n - 1))
    assert geometry_constant("sphere", n, variant="theorem") == pytest.approx(sqrt(pi * n) / ratio)
    assert transference_integral(SphereEstimator(n), LogHalf(), 0.5) <= computed * (1 + 1e-9)


@pytest.mark.parametrize("kind,variant", [("ball", "stated"), ("sphere", "computed"), ("manifold", "stated")])
def test_limits_at_large_n(kind, variant):
    n = 10 ** 4
    assert geometry_constant(kind, n) == pytest.approx(geometry_limit(kind, variant=variant), rel=0.01)


def test_sphere_printed_limit():
    n = 10 ** 4
    assert geometry_constant("sphere", n, variant="printed") == pytest.approx(geometry_limit("sphere"), rel=0.01)


def test_rn_supremum_dimension_free():
    vals = np.array([geometry_constant("rn", n) for n in range(1, 101)])
    assert np.all(np.diff(vals) < 0)
    assert vals.max() == pytest.approx(sqrt(pi) / 2, abs=1e-12)
    assert geometry_limit("rn") == pytest.approx(sqrt(pi) / 2)


def test_gaussian_type_examples():
    # sup is approached as t -> 0 here, so the reported location may underflow to 0
    sup, arg = gaussian_type_check(GaussianEstimator(1.0), LogHalf(), 0.5)
    assert 1.99 < sup <= 2.0 and 0 <= arg < 0.5
    sups = [gaussian_type_check(PowerRn(n), LogHalf(), 1.0)[0] for n in (1, 5, 20, 100)]
    assert np.all(np.isfinite(sups)) and max(sups) < 2.0
    # the value at t = r is zero, so the supremum is attained strictly inside
    _, arg = gaussian_type_check(PowerRn(3), LogHalf(), 0.9)
    assert 0 < arg < 0.9


def test_ball_has_gaussian_type_near_zero():
    t = np.geomspace(1e-200, 0.25, 400)
    for n in (2, 10, 50):
        ratio = t * np.sqrt(np.log(1 / t)) / profile_eval(BallEstimator(n), t)
        assert np.all(np.isfinite(ratio)) and ratio.max() < 10


def test_interval_consistency_bounded():
    # on the interval (I = 1): t * int_t^{1/2} G stays bounded
    t = np.geomspace(1e-300, 0.5, 1000)
    vals = t * LogHalf().tail(t, 0.5)
    assert vals.max() < 1.0


def test_qj_power_reduces_to_q():
    n = 3
    f = StepProfile.canonical([0.1, 0.3, 0.5, 1.0], [3.0, 2.0, 1.0, 0.5])
    qj = iso_hardy_QJ(PowerRn(n), f)
    t = np.array([0.01, 0.1, 0.2, 0.45])
    ref = [t_ ** (-1 / n) * integrate.quad(lambda z: f(z) * z ** (1 / n - 1), t_, 0.5, points=[0.1, 0.3])[0] for t_ in t]
    np.testing.assert_allclose(qj(t), ref, rtol=1e-10)
    assert np.all(iso_hardy_QJ(PowerRn(n), StepProfile.constant(0.0))(t) == 0)
    with pytest.raises(ValueError):
        qj(0.5)


def test_qj_generic_path_matches_quadrature():
    spec = SphereEstimator(4)
    f = StepProfile.canonical([0.2, 0.4, 1.0], [2.0, 1.0, 0.0])
    qj = iso_hardy_QJ(spec, f)
    t = 0.05
    inner = integrate.quad(lambda z: f(z) / profile_eval(spec, z), t, 0.5, points=[0.2, 0.4])[0]
    assert qj(t) == pytest.approx(profile_eval(spec, t) / t * inner, rel=1e-9)


@given(prof=profiles(max_steps=6), t=st.floats(0.01, 0.49))
def test_qj_dominates_q0(prof, t):
    # Q_J f >= Q_0 (f chi_(0,1/2)) because t / J(t) increases
    half = StepProfile.canonical(np.append(np.minimum(prof.breaks, 0.5)[prof.breaks < 0.5], [0.5, 1.0]),
                                 np.append(prof.values[prof.breaks < 0.5], [prof(0.4999999), 0.0]))
    for spec in (PowerRn(2), BallEstimator(3), GaussianEstimator(1.0)):
        qj = float(iso_hardy_QJ(spec, prof)(t))
        q0 = float(hardy_transform(half, "Q")(t))
        assert qj >= q0 * (1 - 1e-9) - 1e-12


def test_inconclusive_error_type():
    assert issubclass(InconclusiveIntegralError, RuntimeError)
