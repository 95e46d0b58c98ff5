"""Brute-force checks on discretized model spaces.

Nothing in here shares code paths with the quadrature of :mod:`dimsob.rispace`:
norms are recomputed with plain Riemann (or Riemann-Stieltjes) sums, and the
rearrangement inequalities are checked on explicit grid functions of the unit
interval and the unit square.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
import shapely
from shapely.geometry import box

from .isoprofile import GaussianEstimator, ProfileSpec, profile_eval
from .rearrange import StepProfile, WeightedSample, decreasing_rearrangement
from .rispace import (
    LogRefined,
    LorentzLambda,
    LorentzPQ,
    Lp,
    Marcinkiewicz,
    Orlicz,
    SpaceSpec,
)


class DegenerateMaskError(ValueError):
    pass


@dataclass
class VerificationReport:
    """Outcome of one inequality check ``lhs <= rhs + budget``."""

    name: str
    lhs: float
    rhs: float
    budget: float = 0.0
    mc_halfwidth: float = 0.0
    passed: bool | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed is None:
            self.passed = bool(self.lhs <= self.rhs + self.budget + self.mc_halfwidth)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "budget": self.budget,
            "mc_halfwidth": self.mc_halfwidth,
            "passed": self.passed,
            "metadata": self.metadata,
        }


# ---------------------------------------------------------------------------
# grid functions


@dataclass(frozen=True, eq=False)
class GridFunction1D:
    """Values at the ``m + 1`` uniform nodes of [0, 1]; the interpolant is piecewise linear."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 3:
            raise ValueError("need at least m = 2 segments")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite grid values")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, func, m: int) -> "GridFunction1D":
        return cls(func(np.linspace(0.0, 1.0, m + 1)))

    @property
    def m(self) -> int:
        return self.values.size - 1

    @property
    def value_range(self) -> float:
        return float(np.ptp(self.values))


@dataclass(frozen=True, eq=False)
class GridFunction2D:
    """Values on the ``m x m`` cells of the unit square (row index = y)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 4:
            raise ValueError("need a square grid with m >= 4")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite grid values")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, func, m: int) -> "GridFunction2D":
        c = (np.arange(m) + 0.5) / m
        x, y = np.meshgrid(c, c)
        return cls(func(x, y))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def value_range(self) -> float:
        return float(np.ptp(self.values))


# ---------------------------------------------------------------------------
# exact rearrangement of a piecewise-linear function


@dataclass(frozen=True, eq=False)
class PLProfile:
    """Non-increasing piecewise-linear function through ``(s[i], y[i])`` on [0, 1]."""

    s: np.ndarray
    y: np.ndarray

    def __call__(self, t):
        return np.interp(t, self.s, self.y)

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(np.diff(self.s) * (self.y[1:] + self.y[:-1]) / 2)])
        idx = np.clip(np.searchsorted(self.s, t, side="right") - 1, 0, self.s.size - 2)
        frac = t - self.s[idx]
        yt = self(t)
        return cum[idx] + frac * (self.y[idx] + yt) / 2

    def slopes(self) -> tuple[np.ndarray, np.ndarray]:
        """``(-f*)'`` on each non-degenerate piece, with piece lengths."""
        ds = np.diff(self.s)
        keep = ds > 0
        return -np.diff(self.y)[keep] / ds[keep], ds[keep]


def _distribution_pl(f: GridFunction1D, levels: np.ndarray, strict: bool) -> np.ndarray:
    """``|{f > y}|`` (or ``|{f >= y}|``) of the linear interpolant, exact."""
    a, b = f.values[:-1], f.values[1:]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    h = 1.0 / f.m
    y = levels[:, None]
    span = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.clip((hi[None, :] - y) / span[None, :], 0.0, 1.0)
    flat = span == 0
    if strict:
        flat_part = (lo[None, :] > y).astype(float)
    else:
        flat_part = (lo[None, :] >= y).astype(float)
    frac = np.where(flat[None, :], flat_part, frac)
    return h * frac.sum(axis=1)


def pl_rearrangement(f: GridFunction1D) -> PLProfile:
    """Exact ``f*`` of the piecewise-linear interpolant of ``f``.

    Between consecutive node values the distribution function is linear in the
    level, so ``f*`` is piecewise linear with knots at ``|{f > y_k}|`` and
    ``|{f >= y_k}|`` for the node values ``y_k``.
    """
    levels = np.unique(f.values)[::-1]
    above = _distribution_pl(f, levels, strict=True)
    at_least = _distribution_pl(f, levels, strict=False)
    s = np.empty(2 * levels.size)
    s[0::2], s[1::2] = above, at_least
    y = np.repeat(levels, 2)
    s[0], s[-1] = 0.0, 1.0
    s = np.maximum.accumulate(s)
    return PLProfile(s, y)


def exact_rearrangement_pl(f: GridFunction1D, refine: int = 4) -> StepProfile:
    """Step encoding of the exact rearrangement: cell averages of ``f*`` on the
    union of its knots and a uniform grid of ``refine * m`` cells.

    ``integral`` of the result is exact at every breakpoint; pointwise the
    encoding differs from ``f*`` by at most ``range(f) / refine``.
    """
    pl = pl_rearrangement(f)
    grid = np.union1d(pl.s[(pl.s > 0) & (pl.s < 1)], np.linspace(0.0, 1.0, refine * f.m + 1)[1:])
    # knots from the level sets can land a rounding error away from grid points;
    # slivers that thin give cell averages dominated by cancellation
    grid = grid[(np.diff(grid, append=np.inf) > 1e-12) & (grid > 1e-12)]
    edges = np.concatenate([[0.0], grid])
    cum = pl.integral(edges)
    vals = np.diff(cum) / np.diff(edges)
    return StepProfile.canonical(grid, np.minimum.accumulate(vals))


def _gradient_rearrangement_1d(f: GridFunction1D) -> StepProfile:
    slopes = np.abs(np.diff(f.values)) * f.m
    return decreasing_rearrangement(WeightedSample.uniform(slopes))


def _slack(f) -> float:
    return 10.0 * f.value_range / f.m


def _default_tgrid(count: int = 20, top: float = 0.999) -> np.ndarray:
    return np.linspace(top / count, top, count)


def check_oscillation(f, spec: ProfileSpec | None = None, tgrid=None) -> VerificationReport:
    """``(f** - f*)(t) I(t)/t <= (1/t) int_0^t |grad f|*`` on ``tgrid``.

    1-D: the interval [0, 1] with ``I = 1`` and the exact rearrangement.
    2-D: the unit square with the Gaussian estimator; gradients by central differences.
    """
    if isinstance(f, GridFunction1D):
        pl = pl_rearrangement(f)
        grad = _gradient_rearrangement_1d(f)
        t = np.asarray(tgrid if tgrid is not None else _default_tgrid(), dtype=float)
        fss = pl.integral(t) / t
        lhs = (fss - pl(t)) * 1.0 / t
        rhs = grad.integral(t) / t
        label, spec_name = "oscillation_1d", "constant 1"
    elif isinstance(f, GridFunction2D):
        spec = spec if spec is not None else GaussianEstimator(1.0)
        prof = decreasing_rearrangement(WeightedSample.uniform(f.values))
        h = 1.0 / f.m
        gy, gx = np.gradient(f.values, h)
        grad = decreasing_rearrangement(WeightedSample.uniform(np.hypot(gx, gy)))
        t = np.asarray(tgrid if tgrid is not None else _default_tgrid(20, 0.5), dtype=float)
        fss = prof.integral(t) / t
        lhs = (fss - prof(t)) * profile_eval(spec, t) / t
        rhs = grad.integral(t) / t
        label, spec_name = "oscillation_2d", type(spec).__name__
    else:
        raise TypeError("expected a GridFunction1D or GridFunction2D")
    slack = _slack(f)
    margins = rhs + slack - lhs
    worst = int(np.argmin(margins))
    passed = bool(np.all(margins >= 0))
    meta = {"t": float(t[worst]), "profile": spec_name, "m": f.m, "violations": int(np.sum(margins < 0))}
    if not passed and isinstance(f, GridFunction2D):
        meta["note"] = f"estimator violated at resolution m={f.m}"
    return VerificationReport(label, float(lhs[worst]), float(rhs[worst]), slack, 0.0, passed, meta)


def check_polya_szego(f: GridFunction1D, tgrid=None) -> VerificationReport:
    """``int_0^t ((-f*)' I)*(s) ds <= int_0^t |grad f|*(s) ds`` with ``I = 1``."""
    pl = pl_rearrangement(f)
    slopes, lengths = pl.slopes()
    if slopes.size == 0:
        deriv = StepProfile.constant(0.0)
    else:
        deriv = decreasing_rearrangement(WeightedSample(np.maximum(slopes, 0.0), lengths / lengths.sum()))
    grad = _gradient_rearrangement_1d(f)
    t = np.asarray(tgrid if tgrid is not None else _default_tgrid(), dtype=float)
    lhs, rhs = deriv.integral(t), grad.integral(t)
    slack = _slack(f)
    margins = rhs + slack - lhs
    worst = int(np.argmin(margins))
    gaps = rhs - lhs
    meta = {
        "t": float(t[worst]),
        "m": f.m,
        "violations": int(np.sum(margins < 0)),
        "max_abs_gap": float(np.max(np.abs(gaps))),
    }
    return VerificationReport("polya_szego_1d", float(lhs[worst]), float(rhs[worst]), slack, 0.0, None, meta)


# ---------------------------------------------------------------------------
# Riemann-sum norms


def _midpoints(resolution: int, profile: StepProfile) -> tuple[np.ndarray, np.ndarray]:
    # the profile's jumps are grid edges, so every cell sees a constant value
    edges = np.union1d(np.linspace(0.0, 1.0, resolution + 1), profile.breaks)
    return edges, (edges[:-1] + edges[1:]) / 2


def _u_grid(profile: StepProfile, u_lo: float, resolution: int) -> np.ndarray:
    """Uniform grid in ``u = sqrt(ln 1/t)`` plus the images of the jumps."""
    u = np.linspace(u_lo, u_lo + 12.0, resolution + 1)
    jumps = np.sqrt(-np.log(profile.breaks[:-1]))
    return np.union1d(u, jumps[(jumps > u_lo) & (jumps < u[-1])])


def _psi_on_edges(space: SpaceSpec, profile: StepProfile, edges: np.ndarray) -> np.ndarray:
    """Brute-force ``||f* chi_[0,e)||`` at each edge of an increasing grid."""
    mids = (edges[:-1] + edges[1:]) / 2
    v = profile(mids)
    first = edges[0]
    v0 = profile(first / 2) if first > 0 else 0.0
    if isinstance(space, Lp):
        cells = v ** space.p * np.diff(edges)
        cum = np.concatenate([[0.0], np.cumsum(cells)]) + first * v0 ** space.p
        return cum ** (1.0 / space.p)
    if isinstance(space, LorentzPQ) and space.q != np.inf:
        w = edges ** (space.q / space.p)
        cells = v ** space.q * np.diff(w)
        cum = np.concatenate([[0.0], np.cumsum(cells)]) + w[0] * v0 ** space.q
        return cum ** (1.0 / space.q)
    if isinstance(space, LorentzLambda):
        w = space.phi(edges)
        cum = np.concatenate([[0.0], np.cumsum(v * np.diff(w))]) + w[0] * v0
        return cum
    if isinstance(space, (Marcinkiewicz, LorentzPQ)):
        phi = space.phi if isinstance(space, Marcinkiewicz) else (lambda s: s ** (1.0 / space.p))
        left = profile(np.maximum(edges - 1e-15, 0.0))
        return np.maximum.accumulate(left * phi(edges))
    raise ValueError(f"no brute-force route for {type(space).__name__} inside a log-refined space")


def riemann_norm_oracle(space: SpaceSpec, profile: StepProfile, resolution: int = 10 ** 6) -> float:
    """Brute-force norm by Riemann or Riemann-Stieltjes sums on ``resolution`` cells."""
    if resolution < 1000:
        raise ValueError("resolution must be at least 1000")
    if isinstance(space, LogRefined):
        return _riemann_log_refined(space, profile, resolution)
    edges, mids = _midpoints(resolution, profile)
    if isinstance(space, Orlicz):
        v, widths = profile(mids), np.diff(edges)
        if np.all(v == 0):
            return 0.0
        lo, hi = 1e-12 * v.max(), 1e6 * v.max()
        for _ in range(200):
            mid = np.sqrt(lo * hi)
            with np.errstate(over="ignore"):
                mod = np.sum(space.young(v / mid) * widths)
            lo, hi = (mid, hi) if mod > 1.0 else (lo, mid)
        return float(hi)
    return float(_psi_on_edges(space, profile, edges)[-1])


def _riemann_log_refined(space: LogRefined, profile: StepProfile, resolution: int) -> float:
    # outer: trapezoid in u = sqrt(ln 1/t); inner: cumulative sums over the induced t-grid
    if isinstance(space.base, LogRefined):
        raise ValueError("brute-force route covers one level of log refinement")
    u = _u_grid(profile, 0.0, resolution)
    t_edges = np.exp(-u * u)[::-1]
    psi = _psi_on_edges(space.base, profile, t_edges)[::-1]
    k = space.k
    if space.variant == "ln":
        kern = 2.0 * u ** (k - 1)
    else:
        kern = 2.0 * u * (1.0 + u * u) ** (k / 2.0 - 1.0)
    return float(np.trapezoid(psi * kern, u))


def riemann_lhs_oracle(profile: StepProfile, p: float, mode: str, upper: float = 1.0,
                       resolution: int = 10 ** 6) -> float:
    """Brute-force ``int_0^upper ||g_t||_{L^p} dt / (t (ln 1/t)^{1/2})`` where ``g_t`` is
    ``f* chi_[0,t)`` (plain), ``(f** - f*) chi_[0,t)`` (oscillation),
    ``(f* - f*(1/2)) chi_[0,t)`` (median) or ``(f* - f*(t)) chi_[0,t)`` (subtract_tail,
    integer ``p`` only, through the binomial expansion)."""
    u_lo = np.sqrt(np.log(1.0 / upper))
    u = _u_grid(profile, u_lo, resolution)
    t = np.exp(-u * u)[::-1]
    mids = (t[:-1] + t[1:]) / 2
    dt = np.diff(t)
    v = profile(mids)

    def cum(cells):
        return np.concatenate([[0.0], np.cumsum(cells)])

    if mode == "plain":
        psi_p = cum(v ** p * dt)
    elif mode == "median":
        psi_p = cum(np.abs(v - profile(0.5)) ** p * dt)
    elif mode == "oscillation":
        fss = (cum(v * dt)[:-1] + cum(v * dt)[1:]) / 2 / mids
        psi_p = cum(np.maximum(fss - v, 0.0) ** p * dt)
    elif mode == "subtract_tail":
        if int(p) != p:
            raise ValueError("subtract_tail brute force needs an integer exponent")
        p = int(p)
        ft = profile(t)
        moments = [cum(v ** j * dt) for j in range(p + 1)]
        psi_p = sum(comb(p, j) * (-ft) ** (p - j) * moments[j] for j in range(p + 1))
        psi_p = np.maximum(psi_p, 0.0)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    psi = psi_p[::-1] ** (1.0 / p)
    return float(np.trapezoid(psi * 2.0, u))


# ---------------------------------------------------------------------------
# Minkowski content of pixel sets


def perimeter_grid(mask, h_list=None) -> float:
    """Interior perimeter of a pixel set in the unit square from ``|A_h| - |A|``.

    The set is the union of its pixels; ``A_h`` is its ``h``-neighbourhood
    clipped to the square.  ``|A_h| - |A| = a + P h + c h^2`` is fitted by least
    squares over ``h_list`` and ``P`` returned.  For rectangles the fit is exact.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
        raise ValueError("mask must be square")
    if not mask.any() or mask.all():
        raise DegenerateMaskError("mask is empty or fills the square")
    m = mask.shape[0]
    if h_list is None:
        # many pixels wide but well inside the square
        h_list = np.array([4.0, 3.0, 2.0, 1.0]) * min(0.05, 20.0 / m)
    h_list = np.asarray(h_list, dtype=float)
    if h_list.size < 3:
        raise ValueError("need at least three neighbourhood radii")
    boxes = []
    for i in range(m):
        row = np.concatenate([[False], mask[i], [False]]).astype(np.int8)
        starts = np.flatnonzero(np.diff(row) == 1)
        stops = np.flatnonzero(np.diff(row) == -1)
        boxes.extend(box(a / m, i / m, b / m, (i + 1) / m) for a, b in zip(starts, stops))
    shape = shapely.unary_union(boxes)
    square = box(0.0, 0.0, 1.0, 1.0)
    base = shape.area
    growth = np.array([shape.buffer(h, quad_segs=64).intersection(square).area - base for h in h_list])
    design = np.column_stack([np.ones_like(h_list), h_list, h_list ** 2])
    coef = np.linalg.lstsq(design, growth, rcond=None)[0]
    return float(coef[1])


# ---------------------------------------------------------------------------
# random inputs for the suites


def random_grid_function_1d(rng: np.random.Generator, m: int | None = None) -> GridFunction1D:
    """A random walk, a random trigonometric sum or a random step-ramp, on ``m`` segments."""
    m = int(m if m is not None else rng.integers(8, 400))
    x = np.linspace(0.0, 1.0, m + 1)
    kind = rng.integers(3)
    if kind == 0:
        vals = np.concatenate([[0.0], np.cumsum(rng.normal(size=m))])
    elif kind == 1:
        freqs = rng.integers(1, 12, size=4)
        vals = sum(rng.normal() * np.sin(np.pi * k * x + rng.uniform(0, 2 * np.pi)) for k in freqs)
    else:
        vals = np.repeat(rng.normal(size=m // 4 + 1), 4)[: m + 1] + rng.uniform(-2, 2) * x
    return GridFunction1D(vals)


def random_grid_function_2d(rng: np.random.Generator, m: int = 64) -> GridFunction2D:
    """A smooth random bump field on ``m x m`` cells."""
    c = (np.arange(m) + 0.5) / m
    x, y = np.meshgrid(c, c)
    vals = np.zeros((m, m))
    for _ in range(rng.integers(1, 5)):
        cx, cy = rng.uniform(0.1, 0.9, size=2)
        width = rng.uniform(0.1, 0.4)
        vals += rng.normal() * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * width * width))
    return GridFunction2D(vals)


def random_profile(rng: np.random.Generator, steps: int | None = None, scale: float = 1.0) -> StepProfile:
    """Non-negative non-increasing step profile with random breaks and values."""
    steps = int(steps if steps is not None else rng.integers(1, 40))
    inner = np.sort(rng.uniform(0.0, 1.0, size=steps - 1))
    breaks = np.unique(np.append(inner[inner > 0], 1.0))
    values = np.sort(rng.exponential(scale, size=breaks.size))[::-1]
    return StepProfile.canonical(breaks, values)
