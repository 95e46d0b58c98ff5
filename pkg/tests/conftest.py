import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dimsob.rearrange import StepProfile, WeightedSample

settings.register_profile(
    "dimsob", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("dimsob")


@st.composite
def samples(draw, max_size=30):
    """Weighted samples with a few repeated values so ties get exercised."""
    size = draw(st.integers(1, max_size))
    # quarter-integers keep shifts and differences exact
    vals = draw(st.lists(st.integers(-20, 20).map(lambda k: k / 4), min_size=size, max_size=size))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=size, max_size=size))
    w = np.array(raw) / np.sum(raw)
    return WeightedSample(np.array(vals), w)


@st.composite
def profiles(draw, max_steps=12, nonneg=True):
    steps = draw(st.integers(1, max_steps))
    cuts = sorted(set(draw(st.lists(st.floats(0.001, 0.999), min_size=steps - 1, max_size=steps - 1))))
    breaks = np.append(cuts, 1.0)
    lo = 0.0 if nonneg else -3.0
    # values far below 1 underflow when raised to powers; keep them clear of that
    value = st.floats(lo, 3.0).map(lambda x: 0.0 if abs(x) < 1e-6 else x)
    vals = sorted(draw(st.lists(value, min_size=breaks.size, max_size=breaks.size)), reverse=True)
    return StepProfile.canonical(breaks, np.array(vals))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def linear_profile():
    """Fine step version of ``f*(s) = 1 - s``."""
    return StepProfile.from_function(lambda s: 1.0 - s, np.linspace(0.0, 1.0, 2001)[1:])
