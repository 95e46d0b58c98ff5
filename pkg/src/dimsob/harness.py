"""Analytic test functions on balls, spheres and cubes, and the two sides of the
dimension-free Sobolev inequalities evaluated on them.

Radial and cap families are rearranged through their exact measure-of-sublevel
maps; cube families go through Monte Carlo.  :func:`verify` assembles the left
side with :func:`lhs_functional` and the right side with :func:`rhs_bound`, then
repeats the computation at half resolution to size the discretization slack.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import floor, inf, isfinite, log, pi, sqrt
from typing import Callable

import numpy as np
from scipy import integrate, special

from .isoprofile import (
    CustomWeight,
    LogHalf,
    PowerRn,
    ProfileSpec,
    WeightFunction,
    geometry_constant,
    geometry_limit,
    geometry_spec,
    log_ball_volume,
    power_exponent,
    transference_integral,
)
from .oracle import VerificationReport
from .quadrature import log_weight_integral
from .rearrange import StepProfile, WeightedSample, decreasing_rearrangement
from .rispace import (
    LogRefined,
    Lp,
    SpaceSpec,
    boyd_indices,
    describe,
    p_norm_bound,
    qa_norm_bound,
    ri_norm,
    truncated_norm,
    xklog_norm,
)

THEOREMS = ("main1", "main2", "teo01", "ordenk", "inclusion", "esfera")
MODES = ("subtract_tail", "oscillation", "plain", "median")
VERIFY_GEOMETRIES = ("rn", "ball", "sphere")
SWEEP_GEOMETRIES = VERIFY_GEOMETRIES + ("cube",)
STANDARD_SHAPES = ("linear", "quadratic", "cosine", "plateau", "square")
DKW_DELTA = 1e-3
MC_CHUNK = 1 << 17
MC_MAX_STEPS = 4096
GL_NODES = 8


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# one-dimensional shapes


@dataclass(frozen=True)
class Shape:
    """``g`` on [0, 1] with its first two derivatives.

    ``d2g`` is ``None`` when ``g'`` does not vanish at 1, i.e. when the radial
    function has no second-order extension by zero.
    """

    name: str
    g: Callable
    dg: Callable
    d2g: Callable | None
    decreasing: bool = True
    breakpoints: tuple = ()

    def lipschitz(self) -> float:
        r = np.linspace(0.0, 1.0, 4097)
        return float(np.max(np.abs(self.dg(r))))


def _bump(r):
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(r < 1.0, np.exp(1.0 - 1.0 / np.maximum(1.0 - r * r, 1e-300)), 0.0)


def _bump_d1(r):
    r = np.asarray(r, dtype=float)
    q = np.maximum(1.0 - r * r, 1e-300)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return np.where(r < 1.0, -2.0 * r / q ** 2 * _bump(r), 0.0)


def _bump_d2(r):
    r = np.asarray(r, dtype=float)
    q = np.maximum(1.0 - r * r, 1e-300)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        inner = 4.0 * r * r / q ** 4 - (2.0 * q + 8.0 * r * r) / q ** 3
        return np.where(r < 1.0, inner * _bump(r), 0.0)


SHAPES: dict[str, Shape] = {
    "linear": Shape("linear", lambda r: 1.0 - r, lambda r: -np.ones_like(r), None),
    "quadratic": Shape("quadratic", lambda r: 1.0 - r * r, lambda r: -2.0 * r, None),
    "cosine": Shape(
        "cosine", lambda r: np.cos(0.5 * pi * r), lambda r: -0.5 * pi * np.sin(0.5 * pi * r), None
    ),
    "plateau": Shape(
        "plateau",
        lambda r: np.minimum(1.0, 2.0 * (1.0 - r)),
        lambda r: np.where(r < 0.5, 0.0, -2.0),
        None,
        breakpoints=(0.5,),
    ),
    "square": Shape(
        "square",
        lambda r: (1.0 - r * r) ** 2,
        lambda r: -4.0 * r * (1.0 - r * r),
        lambda r: 12.0 * r * r - 4.0,
    ),
    "bump": Shape("bump", _bump, _bump_d1, _bump_d2),
    "constant": Shape(
        "constant", lambda r: np.ones_like(r), lambda r: np.zeros_like(r), lambda r: np.zeros_like(r)
    ),
    "identity": Shape("identity", lambda r: r, lambda r: np.ones_like(r), lambda r: np.zeros_like(r), False),
}


def _shape(name: str) -> Shape:
    try:
        return SHAPES[name]
    except KeyError:
        raise ConfigError(f"unknown shape {name!r}; expected one of {sorted(SHAPES)}") from None


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class RadialBall:
    """``f(x) = g(|x| / radius)`` on the ball of that radius with normalized measure."""

    shape: str
    n: int
    radius: float = 1.0


@dataclass(frozen=True)
class CapSphere:
    """``f(x) = g(theta / pi)`` on ``S^n``, ``theta`` the geodesic distance to a pole."""

    shape: str
    n: int


@dataclass(frozen=True)
class TensorCube:
    """``f(x) = phi(x_1)`` (``first``), ``prod phi(x_i)``, ``max phi(x_i)`` or ``min phi(x_i)`` on ``[0,1]^n``."""

    shape: str
    n: int
    combine: str = "first"


TestFunctionFamily = RadialBall | CapSphere | TensorCube


def unit_measure_radius(n: int) -> float:
    """Radius of the ball of volume 1 in ``R^n``."""
    return float(np.exp(-log_ball_volume(n) / n))


def make_family(geometry: str, n: int, family: str) -> TestFunctionFamily:
    """Parse ``radial:NAME``, ``cap:NAME`` or ``tensor:NAME[:COMBINE]`` for a geometry."""
    kind, _, rest = family.partition(":")
    if not rest:
        raise ConfigError(f"family must look like KIND:SHAPE, got {family!r}")
    if kind == "tensor":
        name, _, combine = rest.partition(":")
        if geometry != "cube":
            raise ConfigError("tensor families live on the cube")
        _shape(name)
        if combine and combine not in ("first", "product", "max", "min"):
            raise ConfigError(f"unknown combination {combine!r}")
        return TensorCube(name, n, combine or "first")
    if kind not in ("radial", "cap"):
        raise ConfigError(f"unknown family kind {kind!r}")
    _shape(rest)
    if geometry == "rn":
        return RadialBall(rest, n, unit_measure_radius(n))
    if geometry == "ball":
        return RadialBall(rest, n, 1.0)
    if geometry == "sphere":
        if n < 2:
            raise ConfigError("sphere families need n >= 2")
        return CapSphere(rest, n)
    raise ConfigError(f"radial families are not defined on geometry {geometry!r}")


# ---------------------------------------------------------------------------
# exact rearrangements of radial and cap families


def _s_of_rho(family, rho):
    rho = np.asarray(rho, dtype=float)
    if isinstance(family, RadialBall):
        return rho ** family.n
    h = 0.5 * family.n
    return special.betainc(h, h, np.sin(0.5 * pi * rho) ** 2)


def _rho_of_s(family, s):
    s = np.asarray(s, dtype=float)
    if isinstance(family, RadialBall):
        return s ** (1.0 / family.n)
    h = 0.5 * family.n
    return (2.0 / pi) * np.arcsin(np.sqrt(special.betaincinv(h, h, s)))


def _log_density(family, rho):
    with np.errstate(divide="ignore"):
        if isinstance(family, RadialBall):
            return (family.n - 1) * np.log(rho)
        return (family.n - 1) * np.log(np.sin(pi * rho))


def _shell_grid(family, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Radius-parameter edges and their measures: uniform in both ``rho`` and ``s``."""
    half = max(resolution // 2, 4)
    grid = np.linspace(0.0, 1.0, half + 1)
    brk = np.asarray(_shape(family.shape).breakpoints, dtype=float)
    rho = np.union1d(np.union1d(grid, _rho_of_s(family, grid)), brk)
    rho = np.clip(rho, 0.0, 1.0)
    s = _s_of_rho(family, rho)
    s[0], s[-1] = 0.0, 1.0
    keep = np.concatenate([[True], np.diff(s) > 0])
    rho, s = rho[keep], s[keep]
    s[-1] = 1.0
    return rho, s


def _cell_averages(family, rho: np.ndarray, func: Callable) -> np.ndarray:
    """Measure-weighted averages of ``func(rho)`` over each radial cell."""
    x, w = np.polynomial.legendre.leggauss(GL_NODES)
    a, b = rho[:-1], rho[1:]
    pts = (a + b)[:, None] / 2 + (b - a)[:, None] / 2 * x[None, :]
    logd = _log_density(family, pts)
    logd = logd - np.max(logd, axis=1, keepdims=True)
    dens = np.exp(logd) * w[None, :]
    vals = np.asarray(func(pts), dtype=float)
    return (vals * dens).sum(axis=1) / dens.sum(axis=1)


def _check_family(family) -> Shape:
    if isinstance(family, TensorCube):
        raise TypeError("cube families are rearranged by Monte Carlo")
    sh = _shape(family.shape)
    probe = sh.g(np.linspace(0.0, 1.0, 1001))
    if not sh.decreasing or np.any(np.diff(probe) > 1e-14):
        raise ValueError(f"shape {sh.name!r} is not non-increasing")
    return sh


def radial_rearrangement(family, resolution: int = 512) -> StepProfile:
    """``f*`` of a radial or cap family: ``g`` composed with the inverse cap-measure map."""
    sh = _check_family(family)
    rho, s = _shell_grid(family, resolution)
    vals = np.minimum.accumulate(_cell_averages(family, rho, sh.g))
    return StepProfile.canonical(s[1:], vals)


def _scale(family) -> float:
    return family.radius if isinstance(family, RadialBall) else pi


def derivative_rearrangement(family, order: int = 1, resolution: int = 512) -> StepProfile:
    """``|grad f|*`` (``order=1``) or ``|D^2 f|*`` in operator norm (``order=2``, balls only)."""
    sh = _check_family(family)
    rho, s = _shell_grid(family, resolution)
    scale = _scale(family)
    if order == 1:
        func = lambda r: np.abs(sh.dg(r)) / scale  # noqa: E731
    elif order == 2:
        if not isinstance(family, RadialBall):
            raise ConfigError("second derivatives are implemented for radial ball families")
        if sh.d2g is None:
            raise ConfigError(f"shape {sh.name!r} has no second-order extension by zero")

        def func(r):
            return np.maximum(np.abs(sh.d2g(r)), np.abs(sh.dg(r)) / r) / scale ** 2
    else:
        raise ConfigError("derivative order must be 1 or 2")
    vals = _cell_averages(family, rho, func)
    return decreasing_rearrangement(WeightedSample(vals, np.diff(s)))


# ---------------------------------------------------------------------------
# Monte Carlo on the cube


def mc_generator(seed: int, n: int) -> np.random.Generator:
    """Substream for dimension ``n``: ``SeedSequence(seed, spawn_key=(n,))``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n,)))


def _cube_values(family: TensorCube, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sh = _shape(family.shape)
    if family.combine == "first":
        return sh.g(x[:, 0]), np.abs(sh.dg(x[:, 0]))
    gx, dx = sh.g(x), sh.dg(x)
    if family.combine == "product":
        left = np.cumprod(np.concatenate([np.ones((x.shape[0], 1)), gx[:, :-1]], axis=1), axis=1)
        right = np.cumprod(np.concatenate([np.ones((x.shape[0], 1)), gx[:, :0:-1]], axis=1), axis=1)[:, ::-1]
        partial = dx * left * right
        return np.prod(gx, axis=1), np.sqrt(np.sum(partial * partial, axis=1))
    pick = np.argmax(gx, axis=1) if family.combine == "max" else np.argmin(gx, axis=1)
    rows = np.arange(x.shape[0])
    return gx[rows, pick], np.abs(dx[rows, pick])


def mc_profiles(family: TensorCube, samples: int, seed: int, max_steps: int = MC_MAX_STEPS):
    """Empirical ``f*`` and ``|grad f|*`` from one set of uniform draws, plus the DKW half-width."""
    if samples < 10 ** 4:
        raise ConfigError("Monte Carlo paths need at least 10^4 samples")
    rng = mc_generator(seed, family.n)
    vals, grads = [], []
    done = 0
    while done < samples:
        m = min(MC_CHUNK, samples - done)
        x = rng.random((m, family.n))
        v, g = _cube_values(family, x)
        vals.append(v)
        grads.append(g)
        done += m
    vals = np.concatenate(vals)
    grads = np.concatenate(grads)
    prof = decreasing_rearrangement(WeightedSample.uniform(vals)).coarsen(max_steps)
    grad = decreasing_rearrangement(WeightedSample.uniform(grads)).coarsen(max_steps)
    width = 0.0 if np.ptp(vals) == 0 else sqrt(log(2.0 / DKW_DELTA) / (2.0 * samples))
    return prof, grad, width


def mc_rearrangement(family: TensorCube, samples: int, seed: int) -> tuple[StepProfile, float]:
    """Empirical quantile profile of a cube family with its uniform DKW band at ``delta = 1e-3``."""
    prof, _, width = mc_profiles(family, samples, seed)
    return prof, width


# ---------------------------------------------------------------------------
# left-hand sides


def _upper(interval) -> float:
    if np.isscalar(interval):
        upper = float(interval)
    else:
        lo, upper = interval
        if lo != 0:
            raise ValueError("integration intervals start at 0")
    if not 0.0 < upper <= 1.0:
        raise ValueError("upper end must lie in (0, 1]")
    return float(upper)


def _weighted_integral(psi: Callable, G: WeightFunction, upper: float, knots, rtol: float) -> float:
    if isinstance(G, LogHalf):
        return log_weight_integral(psi, 1, "ln", upper, knots, rtol)

    def ratio(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(psi(t)) * G(t) * t * np.sqrt(np.log(1.0 / t))
        return np.where(t < 1.0, out, 0.0)

    return log_weight_integral(ratio, 1, "ln", upper, knots, rtol)


def _step_weights(G: WeightFunction, lefts, rights) -> np.ndarray:
    """``int_a^b G`` for each cell (``inf`` for cells starting at 0 under ``LogHalf``)."""
    if isinstance(G, LogHalf):
        with np.errstate(divide="ignore"):
            return np.asarray(G.tail(lefts)) - np.asarray(G.tail(rights))
    out = []
    for a, b in zip(lefts, rights):
        out.append(integrate.quad(G, a, b, limit=200, epsrel=1e-11)[0] if a > 0 else inf)
    return np.array(out)


def _tail_gaps(space: SpaceSpec, profile: StepProfile) -> np.ndarray:
    """``||(f* - v_i) chi_[0, a_i)||`` for each step ``i``: the subtract-tail norm on that step."""
    v, lengths, lefts = profile.values, profile.lengths, profile.lefts
    out = np.zeros(v.size)
    if isinstance(space, Lp):
        p = space.p
        for start in range(0, v.size, 256):
            rows = v[start : start + 256]
            diff = np.clip(v[None, :] - rows[:, None], 0.0, None)
            out[start : start + 256] = ((diff ** p) @ lengths) ** (1.0 / p)
        return out
    for i in range(1, v.size):
        shifted = StepProfile.canonical(profile.breaks, np.maximum(v - v[i], 0.0))
        out[i] = truncated_norm(space, shifted, lefts[i])
    return out


def _oscillation_coefficients(profile: StepProfile) -> tuple[np.ndarray, np.ndarray]:
    """On step ``i``, ``f** - f* = D_i / s``; returns ``(D, f**(a_i) - v_i)``."""
    a, v = profile.lefts, profile.values
    cum = np.concatenate([[0.0], np.cumsum(v * profile.lengths)])[:-1]
    D = np.maximum(cum - v * a, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        jump = np.where(a > 0, D / np.where(a > 0, a, 1.0), 0.0)
    return D, jump


def _lp_oscillation_psi(profile: StepProfile, p: float) -> Callable:
    a, b = profile.lefts, profile.breaks
    D, jump = _oscillation_coefficients(profile)

    def piece(idx, t):
        # int_{a_i}^{t} (D_i / s)^p ds
        ai = a[idx]
        safe = np.where(ai > 0, ai, 1.0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if p == 1.0:
                val = D[idx] * np.log(t / safe)
            else:
                val = jump[idx] ** p * ai * (-np.expm1((p - 1.0) * np.log(safe / t))) / (p - 1.0)
        return np.where((ai > 0) & (D[idx] > 0), val, 0.0)

    full = np.concatenate([[0.0], np.cumsum(piece(np.arange(a.size), b))])

    def psi(t):
        t = np.asarray(t, dtype=float)
        idx = profile.step_index(t)
        return np.maximum(full[idx] + piece(idx, np.maximum(t, a[idx])), 0.0) ** (1.0 / p)

    return psi


def _oscillation_cells(profile: StepProfile, per_step: int = 8, factor: Callable | None = None):
    """Sub-cells of every step with averages of ``(f** - f*)(s) factor(s)``."""
    a, b = profile.lefts, profile.breaks
    D, _ = _oscillation_coefficients(profile)
    edges, vals = [], []
    x, w = np.polynomial.legendre.leggauss(5)
    for i in range(a.size):
        if a[i] == 0 or D[i] == 0:
            edges.append(np.array([a[i], b[i]]))
            vals.append(np.zeros(1))
            continue
        e = np.geomspace(a[i], b[i], per_step + 1)
        e[0], e[-1] = a[i], b[i]
        lo, hi = e[:-1], e[1:]
        if factor is None:
            avg = D[i] * np.log(hi / lo) / (hi - lo)
        else:
            pts = (lo + hi)[:, None] / 2 + (hi - lo)[:, None] / 2 * x[None, :]
            avg = (D[i] / pts * factor(pts) * w).sum(axis=1) / 2
        edges.append(e)
        vals.append(avg)
    lefts = np.concatenate([e[:-1] for e in edges])
    rights = np.concatenate([e[1:] for e in edges])
    return lefts, rights, np.concatenate(vals)


def _general_oscillation_psi(space: SpaceSpec, profile: StepProfile) -> Callable:
    lefts, rights, vals = _oscillation_cells(profile)
    D, _ = _oscillation_coefficients(profile)

    def one(t):
        keep = lefts < t
        lo, hi, v = lefts[keep], np.minimum(rights[keep], t), vals[keep].copy()
        last = hi.size - 1
        if rights[keep][last] > t and hi[last] > lo[last] and lo[last] > 0:
            step = profile.step_index(lo[last])
            v[last] = D[step] * np.log(hi[last] / lo[last]) / (hi[last] - lo[last])
        weights = hi - lo
        ok = weights > 0
        v, weights = v[ok], weights[ok]
        if t < 1.0:
            v, weights = np.append(v, 0.0), np.append(weights, 1.0 - weights.sum())
        prof = decreasing_rearrangement(WeightedSample(v, weights / weights.sum()))
        return ri_norm(space, prof)

    def psi(t):
        t = np.asarray(t, dtype=float)
        out = np.array([one(float(s)) if s > 0 else 0.0 for s in t.ravel()])
        return out.reshape(t.shape)

    return psi


def lhs_functional(
    profile: StepProfile,
    space: SpaceSpec,
    G: WeightFunction | None = None,
    mode: str = "plain",
    interval=(0.0, 1.0),
    rtol: float = 1e-10,
) -> float:
    """``int_0^upper ||inner_t||_X G(t) dt`` with the inner profile chosen by ``mode``.

    * ``subtract_tail``: ``(f*(.) - f*(t)) chi_[0,t)``
    * ``oscillation``:   ``(f** - f*) chi_[0,t)``
    * ``plain``:         ``f* chi_[0,t)``
    * ``median``:        ``(f* - f*(1/2)) chi_[0,t)``, for ``upper <= 1/2``
    """
    G = G if G is not None else LogHalf()
    upper = _upper(interval)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    knots = profile.breaks[:-1]
    if mode == "subtract_tail":
        gaps = _tail_gaps(space, profile)
        lefts = profile.lefts
        inside = lefts < upper
        rights = np.minimum(profile.breaks, upper)
        weights = _step_weights(G, lefts[inside], rights[inside])
        with np.errstate(invalid="ignore"):
            contrib = np.where(gaps[inside] > 0, gaps[inside] * weights, 0.0)
        return float(np.sum(contrib))
    if mode == "oscillation":
        if isinstance(space, Lp):
            psi = _lp_oscillation_psi(profile, space.p)
        else:
            psi = _general_oscillation_psi(space, profile)
        return _weighted_integral(psi, G, upper, knots, rtol)
    if mode == "median":
        if upper > 0.5:
            raise ValueError("median mode is defined on (0, t] with t <= 1/2")
        med = float(profile(0.5))
        profile = StepProfile.canonical(profile.breaks, np.maximum(profile.values - med, 0.0))
    if profile.is_zero():
        return 0.0
    psi = lambda t: truncated_norm(space, profile, t)  # noqa: E731
    return _weighted_integral(psi, G, upper, knots, rtol)


# ---------------------------------------------------------------------------
# right-hand sides


@lru_cache(maxsize=None)
def operator_bound(space: SpaceSpec, budget: str, qj_exponent: float | None = None) -> float:
    """Upper bound of ``||P||``, ``||Q||`` or ``||Q|| + ||Q_a||`` with ``a = qj_exponent``."""
    if budget == "P":
        return p_norm_bound(space)
    q = qa_norm_bound(space, 0.0)
    if budget == "Q":
        return q
    if budget == "Q+QJ":
        if qj_exponent is None:
            raise ConfigError("Q+QJ needs the power of the isoperimetric Hardy operator")
        if qj_exponent >= 1.0:
            return inf
        return q + qa_norm_bound(space, qj_exponent)
    raise ConfigError(f"unknown operator budget {budget!r}")


@lru_cache(maxsize=None)
def _transference_loghalf(spec: ProfileSpec, upper: float) -> float:
    return transference_integral(spec, LogHalf(), upper)


def transference(spec: ProfileSpec, G: WeightFunction | None, upper: float) -> float:
    if G is None or isinstance(G, LogHalf):
        return _transference_loghalf(spec, upper)
    return transference_integral(spec, G, upper)


def rhs_bound(
    gradient_profile: StepProfile,
    space: SpaceSpec,
    spec: ProfileSpec,
    G: WeightFunction | None = None,
    operator_budget: str = "Q",
    upper: float | None = None,
    qj_exponent: float | None = None,
    transference_value: float | None = None,
) -> float:
    """``(operator bound) * ||grad f*||_X * int_0^upper (t/J) G``; ``inf`` when unbounded.

    ``upper`` defaults to 1 for ``PowerRn`` and 1/2 otherwise; ``qj_exponent``
    defaults to the power ``a`` with ``J(t)/t ~ t^{-a}``.
    """
    if not gradient_profile.is_nonnegative():
        raise ValueError("gradient profile must be non-negative")
    grad = ri_norm(space, gradient_profile)
    if grad == 0.0:
        return 0.0
    if upper is None:
        upper = 1.0 if isinstance(spec, PowerRn) else 0.5
    if operator_budget == "Q+QJ" and qj_exponent is None:
        qj_exponent = power_exponent(spec)
    op = operator_bound(space, operator_budget, qj_exponent)
    if not isfinite(op):
        return inf
    t = transference_value if transference_value is not None else transference(spec, G, upper)
    return op * grad * t


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class ExperimentConfig:
    theorem: str
    space: SpaceSpec
    geometry: str
    n: int
    family: str = "radial:linear"
    seed: int = 0
    samples: int = 10 ** 5
    rtol: float = 1e-10
    resolution: int = 512
    k: int = 1

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ConfigError(f"unknown theorem {self.theorem!r}; expected one of {THEOREMS}")
        if self.geometry not in SWEEP_GEOMETRIES:
            raise ConfigError(f"unknown geometry {self.geometry!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError("n must be a positive integer")
        if self.samples < 10 ** 4:
            raise ConfigError("sample count must be at least 10^4")
        if not self.rtol >= 1e-10:
            raise ConfigError("quadrature tolerance must be at least 1e-10")
        if self.resolution < 16:
            raise ConfigError("resolution must be at least 16")

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "space": describe(self.space),
            "geometry": self.geometry,
            "n": self.n,
            "family": self.family,
            "seed": self.seed,
            "samples": self.samples,
            "rtol": self.rtol,
            "resolution": self.resolution,
            "k": self.k,
        }


@lru_cache(maxsize=512)
def _ingredients(geometry: str, n: int, family: str, resolution: int, order: int):
    fam = make_family(geometry, n, family)
    prof = radial_rearrangement(fam, resolution)
    grad = derivative_rearrangement(fam, order, resolution)
    return prof, grad


def index_threshold(space: SpaceSpec) -> int:
    """Smallest natural ``M`` with ``lower Boyd index > 1/M``."""
    lower = boyd_indices(space).lower
    if lower <= 0:
        raise ConfigError("the lower Boyd index must be positive")
    return int(floor(1.0 / lower)) + 1


@dataclass
class _Item:
    label: str
    lhs: float
    rhs: float
    grad_norm: float
    constants: dict = field(default_factory=dict)
    note: str = ""
    endpoint: dict | None = None

    @property
    def vacuous(self) -> bool:
        return not isfinite(self.rhs)


_MAIN = {
    "main1": ("subtract_tail", "Q", "tail-difference inequality"),
    "main2": ("oscillation", "P", "oscillation inequality"),
}


def _item(label, prof, grad, space, mode, upper, op, T, rtol, note=""):
    lhs = lhs_functional(prof, space, LogHalf(), mode, upper, rtol)
    g = ri_norm(space, grad)
    rhs = 0.0 if g == 0.0 else (inf if not isfinite(op) else op * g * T)
    consts = {"operator_bound": op, "transference": T, "upper": upper}
    return _Item(label, lhs, rhs, g, consts, note)


ENDPOINT_DELTAS = (1e-4, 1e-8)


def _endpoint_check(item: _Item, prof, space, mode, rtol) -> _Item:
    """Record how much of the left side sits in ``(1 - delta, 1)``.

    ``G`` behaves like ``(1 - t)^{-1/2}`` there and the inner norm is
    non-decreasing in ``t``, so ``tail / int_{1-delta}^1 G`` is a weighted mean
    of the inner norm: it must stay bounded as ``delta -> 0`` while the tail
    itself shrinks like ``delta^{1/2}``.
    """
    G = LogHalf()
    tails, means = [], []
    for delta in ENDPOINT_DELTAS:
        tail = item.lhs - lhs_functional(prof, space, G, mode, 1.0 - delta, rtol)
        tails.append(tail)
        means.append(tail / float(G.tail(1.0 - delta)))
    shrinks = abs(tails[-1]) <= abs(tails[0]) or tails[0] == 0.0
    item.endpoint = {
        "delta": list(ENDPOINT_DELTAS),
        "tail": tails,
        "tail_over_weight_mass": means,
        "integrable": bool(all(isfinite(x) for x in tails) and shrinks),
    }
    return item


def _evaluate(cfg: ExperimentConfig, resolution: int) -> list[_Item]:
    geo, n, X = cfg.geometry, cfg.n, cfg.space
    if geo not in VERIFY_GEOMETRIES:
        raise ConfigError(f"verify supports geometries {VERIFY_GEOMETRIES}; use a sweep for {geo!r}")
    spec = geometry_spec(geo, n)
    rtol = cfg.rtol
    if cfg.theorem == "ordenk":
        return [_ordenk(cfg, resolution)]
    prof, grad = _ingredients(geo, n, cfg.family, resolution, 1)
    if cfg.theorem in _MAIN:
        mode, budget, note = _MAIN[cfg.theorem]
        upper = 1.0 if geo == "rn" else 0.5
        op = operator_bound(X, budget)
        return [_item(cfg.theorem, prof, grad, X, mode, upper, op, transference(spec, None, upper), rtol, note)]
    if cfg.theorem == "teo01":
        upper = 1.0 if geo == "rn" else 0.5
        T = geometry_constant(geo, n)
        items = []
        for label, mode, budget in (("teo01_tail", "subtract_tail", "Q"), ("teo01_oscillation", "oscillation", "P")):
            it = _item(label, prof, grad, X, mode, upper, operator_bound(X, budget), T, rtol)
            if upper == 1.0:
                # the weight is singular at t = 1 on this geometry
                it = _endpoint_check(it, prof, X, mode, rtol)
            items.append(it)
        return items
    if cfg.theorem == "inclusion":
        a = power_exponent(spec)
        op = operator_bound(X, "Q+QJ", a)
        note = "" if isfinite(op) else f"Q_J ~ Q_{a:g} unbounded on {describe(X)}"
        return [_item("inclusion", prof, grad, X, "median", 0.5, op, transference(spec, None, 0.5), rtol, note)]
    # esfera
    if geo != "sphere":
        raise ConfigError("the sphere statements need geometry 'sphere'")
    T = geometry_constant("sphere", n, variant="computed")
    M = index_threshold(X)
    op3 = operator_bound(X, "Q+QJ", 1.0 / M) if n >= M else inf
    note3 = "" if n >= M else f"needs n >= M = {M}"
    items = [
        _item("esfera_tail", prof, grad, X, "subtract_tail", 0.5, operator_bound(X, "Q"), T, rtol),
        _item("esfera_oscillation", prof, grad, X, "oscillation", 0.5, operator_bound(X, "P"), T, rtol,
              "log weight taken as ln(1/t)"),
        _item("esfera_median", prof, grad, X, "median", 0.5, op3, T, rtol, note3),
    ]
    for it in items:
        it.constants["printed_constant"] = geometry_constant("sphere", n, variant="printed")
        it.constants["stated_constant"] = geometry_constant("sphere", n, variant="theorem")
    return items


def _ordenk(cfg: ExperimentConfig, resolution: int) -> _Item:
    if cfg.geometry != "rn":
        raise ConfigError("the higher-order inequality is stated for domains of R^n (geometry 'rn')")
    k, X, n = cfg.k, cfg.space, cfg.n
    if k == 3:
        raise ConfigError("k = 3 is covered only through the iteration identity")
    if k not in (1, 2):
        raise ConfigError("k must be 1 or 2")
    prof, deriv = _ingredients(cfg.geometry, n, cfg.family, resolution, k)
    lhs = xklog_norm(X, k, prof, "ln")
    M = index_threshold(X)
    C = geometry_constant("rn", n)
    norm = ri_norm(X, deriv)
    consts = {"M": M, "rn_constant": C}
    if n < M:
        return _Item("ordenk", lhs, inf, norm, consts, f"needs n >= M = {M}")
    cX = C * operator_bound(X, "Q+QJ", 1.0 / M)
    consts["c1_X"] = cX
    if k == 1:
        c = cX
    else:
        Y = LogRefined(X, 1, "ln")
        cY = C * operator_bound(Y, "Q+QJ", 1.0 / M)
        consts["c1_Y"] = cY
        c = 0.25 * cY * cX
    rhs = 0.0 if norm == 0.0 else c * norm
    return _Item("ordenk", lhs, rhs, norm, consts)


def _slack(a: float, b: float) -> float:
    if isfinite(a) and isfinite(b):
        return abs(a - b)
    return 0.0


def verify(config: ExperimentConfig) -> VerificationReport:
    """Check one fully-constanted inequality; pass iff ``lhs <= rhs + budget``.

    ``budget`` adds the quadrature tolerance and the change between resolution
    ``N`` and ``N/2``.  An infinite right side passes and is flagged vacuous.
    """
    fine = _evaluate(config, config.resolution)
    coarse = _evaluate(config, max(config.resolution // 2, 8))
    items, worst, worst_gap = [], None, inf
    for f, c in zip(fine, coarse):
        slack = _slack(f.lhs, c.lhs) + _slack(f.rhs, c.rhs)
        quad = config.rtol * (abs(f.lhs) + (abs(f.rhs) if isfinite(f.rhs) else 0.0))
        budget = slack + quad
        ok = f.vacuous or f.lhs <= f.rhs + budget
        entry = {
            "label": f.label,
            "lhs": f.lhs,
            "rhs": f.rhs,
            "budget": budget,
            "passed": bool(ok),
            "vacuous": f.vacuous,
            "gradient_norm": f.grad_norm,
            "constants": f.constants,
        }
        if f.note:
            entry["note"] = f.note
        if f.endpoint is not None:
            entry["endpoint"] = f.endpoint
        items.append(entry)
        gap = inf if f.vacuous else f.rhs + budget - f.lhs
        if worst is None or gap < worst_gap:
            worst, worst_gap = (f, budget), gap
    f, budget = worst
    ratio = f.lhs / f.grad_norm if f.grad_norm > 0 else 0.0
    meta = {
        "config": config.to_dict(),
        "items": items,
        "vacuous": all(it["vacuous"] for it in items),
        "ratio": ratio,
        "label": f.label,
    }
    passed = all(it["passed"] for it in items)
    return VerificationReport(config.theorem, f.lhs, f.rhs, budget, 0.0, passed, meta)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepRow:
    n: int
    ratio: float
    constant: float
    max_so_far: float
    mc_halfwidth: float
    passed: bool
    error: str | None = None


_SWEEP_MODES = {"main1": "subtract_tail", "main2": "oscillation", "teo01": "oscillation"}


def _sweep_one(config: ExperimentConfig):
    try:
        if config.geometry == "cube":
            fam = make_family("cube", config.n, config.family)
            prof, grad, width = mc_profiles(fam, config.samples, config.seed)
            mode = _SWEEP_MODES.get(config.theorem, "oscillation")
            lhs = lhs_functional(prof, config.space, LogHalf(), mode, 1.0, config.rtol)
            g = ri_norm(config.space, grad)
            ratio = lhs / g if g > 0 else 0.0
            constant = geometry_limit("rn")
            return ratio, constant, width, bool(ratio <= constant + width), None
        rep = verify(config)
        constant = geometry_constant(config.geometry, config.n)
        return rep.metadata["ratio"], constant, rep.mc_halfwidth, bool(rep.passed), None
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        return float("nan"), float("nan"), 0.0, False, f"{type(exc).__name__}: {exc}"


def dimension_sweep(configs, jobs: int = 1) -> list[SweepRow]:
    """Evaluate each config (one per ``n``); failures become rows with ``error`` set."""
    configs = list(configs)
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, configs))
    else:
        results = [_sweep_one(c) for c in configs]
    rows, running = [], -inf
    for cfg, (ratio, constant, width, passed, err) in zip(configs, results):
        if np.isfinite(ratio):
            running = max(running, ratio)
        rows.append(SweepRow(cfg.n, ratio, constant, running, width, passed, err))
    return rows


# ---------------------------------------------------------------------------
# the triangle-inequality chain


def _lp_log_weighted_oscillation(profile: StepProfile, p: float) -> float:
    """``||(f** - f*) (ln 1/s)^{1/2}||_{L^p}`` by Gauss-Legendre panels in ``v = (ln 1/s)^{1/2}``.

    With ``s = exp(-v^2)`` the integrand ``2 D^p v^{p+1} exp((p-1) v^2)`` is smooth,
    including at ``s = 1``.
    """
    a, b = profile.lefts, profile.breaks
    D, _ = _oscillation_coefficients(profile)
    x, w = np.polynomial.legendre.leggauss(20)
    total = 0.0
    for i in np.flatnonzero((a > 0) & (D > 0)):
        v_lo, v_hi = sqrt(-log(b[i])), sqrt(-log(a[i]))
        e = np.linspace(v_lo, v_hi, int(np.ceil((v_hi - v_lo) / 0.25)) + 1)
        lo, hi = e[:-1], e[1:]
        v = (lo + hi)[:, None] / 2 + (hi - lo)[:, None] / 2 * x[None, :]
        logf = p * log(D[i]) + (p - 1.0) * v * v + (p + 1.0) * np.log(v) + log(2.0)
        total += float(np.sum(np.exp(logf) * w[None, :] * (hi - lo)[:, None] / 2))
    return total ** (1.0 / p)


def laursa_chain_check(profile: StepProfile, space: SpaceSpec, rtol: float = 1e-10) -> VerificationReport:
    """``2 ||(f** - f*)(ln 1/.)^{1/2}||_X <= int_0^1 ||(f** - f*) chi_[0,t)||_X dt/(t (ln 1/t)^{1/2})``.

    The factor 2 is ``int_s^1 dt/(t (ln 1/t)^{1/2}) = 2 (ln 1/s)^{1/2}``; the
    inequality is Minkowski's integral inequality in ``X``.
    """
    integral = lhs_functional(profile, space, LogHalf(), "oscillation", 1.0, rtol)
    if isinstance(space, Lp):
        weighted = _lp_log_weighted_oscillation(profile, space.p)
    else:
        lefts, rights, vals = _oscillation_cells(profile, factor=lambda s: np.sqrt(np.log(1.0 / s)))
        ok = rights > lefts
        prof = decreasing_rearrangement(WeightedSample(vals[ok], (rights - lefts)[ok]))
        weighted = ri_norm(space, prof)
    lhs = 2.0 * weighted
    budget = 1e-8 * max(abs(integral), abs(lhs))
    ratio = integral / weighted if weighted > 0 else inf
    meta = {"space": describe(space), "integral_over_weighted_norm": ratio}
    return VerificationReport("laursa_chain", lhs, integral, budget, 0.0, None, meta)
