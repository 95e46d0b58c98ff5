"""Distribution functions, decreasing rearrangements and maximal averages.

Everything here works on exact step data.  A :class:`WeightedSample` is a
function on a probability space seen only through its distribution; a
:class:`StepProfile` is a right-continuous non-increasing step function on
``[0, 1)``, which is where ``f*`` and ``f**`` live.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

WEIGHT_SUM_TOL = 1e-12


class InvalidSampleError(ValueError):
    pass


class InvalidProfileError(ValueError):
    pass


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WeightedSample:
    """Values ``u(x_i)`` with probability weights ``mu({x_i})``."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if values.size == 0:
            raise InvalidSampleError("empty sample")
        if values.shape != weights.shape or values.ndim != 1:
            raise InvalidSampleError("values and weights must be 1-D arrays of equal length")
        if not np.all(np.isfinite(values)):
            raise InvalidSampleError("non-finite values")
        if not np.all(weights > 0):
            raise InvalidSampleError("weights must be strictly positive")
        total = weights.sum()
        if abs(total - 1.0) >= WEIGHT_SUM_TOL:
            raise InvalidSampleError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "weights", _frozen(weights / total))

    @classmethod
    def from_pairs(cls, pairs) -> "WeightedSample":
        pairs = list(pairs)
        if not pairs:
            raise InvalidSampleError("empty sample")
        v, w = zip(*pairs)
        return cls(np.array(v), np.array(w))

    @classmethod
    def uniform(cls, values) -> "WeightedSample":
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            raise InvalidSampleError("empty sample")
        return cls(values, np.full(values.size, 1.0 / values.size))

    def distribution(self, t) -> np.ndarray:
        """``mu{u > t}`` for each threshold in ``t``."""
        t = np.asarray(t, dtype=float)
        order = np.argsort(self.values)
        v = self.values[order]
        tail = np.concatenate([np.cumsum(self.weights[order][::-1])[::-1], [0.0]])
        return tail[np.searchsorted(v, t, side="right")]


@dataclass(frozen=True, eq=False)
class StepProfile:
    """Non-increasing step function on [0, 1).

    ``values[i]`` is taken on ``[breaks[i-1], breaks[i])`` with ``breaks[-1] == 1``
    and an implicit left end at 0.
    """

    breaks: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.breaks, dtype=float))
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if b.size == 0 or b.shape != v.shape or b.ndim != 1:
            raise InvalidProfileError("breaks and values must be non-empty 1-D arrays of equal length")
        if b[-1] != 1.0:
            raise InvalidProfileError("last breakpoint must equal 1")
        if b[0] <= 0.0 or np.any(np.diff(b) <= 0):
            raise InvalidProfileError("breakpoints must be strictly increasing in (0, 1]")
        if not np.all(np.isfinite(v)):
            raise InvalidProfileError("non-finite values")
        if np.any(np.diff(v) > 0):
            raise InvalidProfileError("values must be non-increasing")
        object.__setattr__(self, "breaks", _frozen(b))
        object.__setattr__(self, "values", _frozen(v))

    def __eq__(self, other) -> bool:
        # exact comparison; canonical profiles of the same function compare equal
        if not isinstance(other, StepProfile):
            return NotImplemented
        return bool(np.array_equal(self.breaks, other.breaks) and np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.breaks.tobytes(), self.values.tobytes()))

    # construction helpers -------------------------------------------------

    @classmethod
    def canonical(cls, breaks, values) -> "StepProfile":
        """Build a profile, merging consecutive steps that carry equal values."""
        b = np.asarray(breaks, dtype=float)
        v = np.asarray(values, dtype=float)
        if v.size > 1:
            keep = np.append(v[1:] != v[:-1], True)
            b, v = b[keep], v[keep]
        return cls(b, v)

    @classmethod
    def constant(cls, c: float) -> "StepProfile":
        return cls(np.array([1.0]), np.array([float(c)]))

    @classmethod
    def indicator(cls, a: float, height: float = 1.0) -> "StepProfile":
        """``height * chi_[0, a)``."""
        if not 0.0 < a <= 1.0:
            raise ValueError("indicator length must lie in (0, 1]")
        if a == 1.0:
            return cls.constant(height)
        return cls(np.array([a, 1.0]), np.array([height, 0.0]))

    @classmethod
    def from_function(cls, func: Callable, breaks, nodes: int = 5) -> "StepProfile":
        """Step approximation of a non-increasing function by its cell averages.

        Cell averages use Gauss-Legendre nodes, so ``integral`` is exact up to the
        rule's accuracy and monotonicity is preserved.
        """
        b = np.asarray(breaks, dtype=float)
        a = np.concatenate([[0.0], b[:-1]])
        x, w = np.polynomial.legendre.leggauss(nodes)
        mid, half = (a + b) / 2, (b - a) / 2
        pts = mid[:, None] + half[:, None] * x[None, :]
        vals = (np.asarray(func(pts), dtype=float) * w[None, :]).sum(axis=1) / 2
        # rounding in the averages can create 1-ulp increases
        vals = np.minimum.accumulate(vals)
        return cls.canonical(b, vals)

    # basic geometry ---------------------------------------------------------

    @property
    def lefts(self) -> np.ndarray:
        return np.concatenate([[0.0], self.breaks[:-1]])

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.breaks]))

    @property
    def size(self) -> int:
        return self.breaks.size

    def step_index(self, s) -> np.ndarray:
        """Index of the step containing ``s`` (``s >= 1`` maps to the last step)."""
        idx = np.searchsorted(self.breaks, np.asarray(s, dtype=float), side="right")
        return np.minimum(idx, self.size - 1)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = self.values[self.step_index(s)]
        return out if out.ndim else float(out)

    def integral(self, t):
        """``int_0^t f*(s) ds`` for ``t`` in [0, 1], exact."""
        t = np.asarray(t, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(self.values * self.lengths)])
        idx = self.step_index(t)
        out = cum[idx] + self.values[idx] * (np.minimum(t, 1.0) - self.lefts[idx])
        return out if out.ndim else float(out)

    def power_integral(self, t, p: float):
        """``int_0^t |f*(s)|^p ds``, exact."""
        t = np.asarray(t, dtype=float)
        vp = np.abs(self.values) ** p
        cum = np.concatenate([[0.0], np.cumsum(vp * self.lengths)])
        idx = self.step_index(t)
        out = cum[idx] + vp[idx] * (np.minimum(t, 1.0) - self.lefts[idx])
        return out if out.ndim else float(out)

    # arithmetic --------------------------------------------------------------

    def shift(self, a: float) -> "StepProfile":
        """``f* - a``, which is ``(f - a)*``."""
        return StepProfile(self.breaks, self.values - a)

    def scale(self, c: float) -> "StepProfile":
        if c < 0:
            raise ValueError("negative scaling reverses monotonicity")
        return StepProfile.canonical(self.breaks, self.values * c)

    def is_nonnegative(self) -> bool:
        return bool(self.values[-1] >= 0.0)

    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    def coarsen(self, max_steps: int) -> "StepProfile":
        """Average into at most ``max_steps`` cells of equal measure.

        Monotonicity and ``integral`` at the new breakpoints are preserved.
        """
        if self.size <= max_steps:
            return self
        grid = np.linspace(0.0, 1.0, max_steps + 1)
        cum = self.integral(grid)
        vals = np.diff(cum) / np.diff(grid)
        vals = np.minimum.accumulate(vals)
        return StepProfile.canonical(grid[1:], vals)

    def to_sample(self) -> WeightedSample:
        return WeightedSample(self.values.copy(), self.lengths)

    def to_rows(self) -> list[tuple[float, float]]:
        return list(zip(self.breaks.tolist(), self.values.tolist()))


def decreasing_rearrangement(sample: WeightedSample) -> StepProfile:
    """Exact ``u*`` of a weighted sample: values sorted descending, ties merged."""
    order = np.argsort(-sample.values, kind="stable")
    v = sample.values[order]
    w = sample.weights[order]
    uniq_mask = np.append(v[1:] != v[:-1], True)
    ends = np.flatnonzero(uniq_mask)
    cum = np.minimum(np.cumsum(w)[ends], 1.0)
    cum[-1] = 1.0
    # accumulated rounding may leave two breaks equal; keep the later value
    keep = np.append(cum[:-1] < cum[1:], True)
    return StepProfile(cum[keep], v[ends][keep])


def maximal_average(profile: StepProfile, t):
    """``f**(t) = (1/t) int_0^t f*``; ``t`` must lie in (0, 1]."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0) or np.any(t_arr > 1):
        raise ValueError("t must lie in (0, 1]")
    out = profile.integral(t_arr) / t_arr
    return out if np.ndim(out) else float(out)


def oscillation_profile(profile: StepProfile) -> Callable:
    """Evaluator ``t -> f**(t) - f*(t)``."""

    def evaluate(t):
        t_arr = np.asarray(t, dtype=float)
        diff = maximal_average(profile, t_arr) - profile(t_arr)
        out = np.maximum(diff, 0.0)
        return out if np.ndim(out) else float(out)

    return evaluate


def median_value(profile: StepProfile) -> float:
    """``f*(1/2)``, a median of the underlying function."""
    return float(profile(0.5))


def restrict(profile: StepProfile, t: float, mode: str = "truncate") -> StepProfile:
    """``f* chi_[0,t)`` (``truncate``) or ``(f* - f*(t)) chi_[0,t)`` (``subtract_tail``)."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    if mode == "truncate":
        shift = 0.0
    elif mode == "subtract_tail":
        shift = float(profile(t))
    else:
        raise ValueError(f"unknown restrict mode {mode!r}")
    idx = int(np.searchsorted(profile.breaks, t, side="left"))
    b = np.append(profile.breaks[:idx], t)
    v = profile.values[: idx + 1] - shift
    if v[-1] < 0:
        raise ValueError("truncation of a profile that is negative on [0, t)")
    b = np.append(b, 1.0)
    v = np.append(v, 0.0)
    return StepProfile.canonical(b, v)
