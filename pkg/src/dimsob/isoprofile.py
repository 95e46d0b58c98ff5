"""Isoperimetric profiles and estimators, transference integrals and the
dimension-dependent constants they produce.

All Gamma-function ratios go through ``math.lgamma``; the unit-ball volume
``gamma_n`` underflows long before ``n = 10^4`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, inf, lgamma, log, pi, sqrt
from typing import Callable, Union

import numpy as np
from scipy import integrate, optimize

from .rearrange import StepProfile


class ProfileDomainError(ValueError):
    pass


class InconclusiveIntegralError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# volumes


def log_ball_volume(n: float) -> float:
    """``ln gamma_n`` with ``gamma_n = pi^{n/2} / Gamma(1 + n/2)``."""
    return 0.5 * n * log(pi) - lgamma(1.0 + 0.5 * n)


def log_sphere_area(n: float) -> float:
    """``ln omega_n`` with ``omega_n = 2 pi^{(n+1)/2} / Gamma((n+1)/2)``."""
    return log(2.0) + 0.5 * (n + 1) * log(pi) - lgamma(0.5 * (n + 1))


# ---------------------------------------------------------------------------
# profile descriptors


def _check_dim(n, minimum=1):
    if int(n) != n or n < minimum:
        raise ValueError(f"dimension must be an integer >= {minimum}")


@dataclass(frozen=True)
class PowerRn:
    """``I_n(t) = n gamma_n^{1/n} t^{1 - 1/n}`` on (0, 1)."""

    n: int

    def __post_init__(self):
        _check_dim(self.n)


@dataclass(frozen=True)
class BallEstimator:
    """``(gamma_{n-1}/gamma_n) 2^{1-1/n} min(t, 1-t)^{1-1/n}``."""

    n: int

    def __post_init__(self):
        _check_dim(self.n)


@dataclass(frozen=True)
class SphereEstimator:
    """``(2 omega_{n-1}/omega_n) min(t, 1-t)^{1-1/n}``."""

    n: int

    def __post_init__(self):
        _check_dim(self.n, 2)


@dataclass(frozen=True)
class ManifoldEstimator:
    """``sqrt(2k/pi) Gamma((n+1)/2)/Gamma(n/2) min(t, 1-t)^{1-1/n}`` for Ricci >= (n-1)k."""

    n: int
    curvature: float = 1.0

    def __post_init__(self):
        _check_dim(self.n, 2)
        if not self.curvature > 0:
            raise ValueError("curvature must be positive")


@dataclass(frozen=True)
class GaussianEstimator:
    """``c t (ln 1/t)^{1/2}`` on (0, 1/2]."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Profile given on a grid of (0, 1/2]; ``ln J`` is interpolated linearly in ``ln t``.

    Outside the grid the end segments are extended as power laws.
    """

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("tabulated profile needs matching 1-D grids of length >= 2")
        if np.any(np.diff(t) <= 0) or t[0] <= 0 or t[-1] > 0.5:
            raise ValueError("grid must be strictly increasing inside (0, 1/2]")
        if np.any(v <= 0):
            raise ValueError("profile values must be positive")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)


ProfileSpec = Union[PowerRn, BallEstimator, SphereEstimator, ManifoldEstimator, GaussianEstimator, Tabulated]


def log_coefficient(spec: ProfileSpec) -> float:
    """``ln c`` for the power-type specs ``J(t) = c * m(t)^{1-1/n}``."""
    if isinstance(spec, PowerRn):
        n = spec.n
        return log(n) + log_ball_volume(n) / n
    if isinstance(spec, BallEstimator):
        n = spec.n
        return log_ball_volume(n - 1) - log_ball_volume(n) + (1.0 - 1.0 / n) * log(2.0)
    if isinstance(spec, SphereEstimator):
        n = spec.n
        return log(2.0) + log_sphere_area(n - 1) - log_sphere_area(n)
    if isinstance(spec, ManifoldEstimator):
        n = spec.n
        return 0.5 * log(2.0 * spec.curvature / pi) + lgamma(0.5 * (n + 1)) - lgamma(0.5 * n)
    raise TypeError(f"{type(spec).__name__} is not of power type")


def power_exponent(spec: ProfileSpec) -> float | None:
    """``1/n`` when ``t / J(t)`` is a multiple of ``t^{1/n}`` near 0, else None."""
    if isinstance(spec, (PowerRn, BallEstimator, SphereEstimator, ManifoldEstimator)):
        return 1.0 / spec.n
    return None


def domain(spec: ProfileSpec) -> tuple[float, float]:
    """Closed right end of the interval where the profile is evaluated."""
    if isinstance(spec, PowerRn):
        return 0.0, 1.0
    if isinstance(spec, (GaussianEstimator, Tabulated)):
        return 0.0, 0.5
    return 0.0, 1.0


def profile_eval(spec: ProfileSpec, t):
    t_arr = np.asarray(t, dtype=float)
    lo, hi = domain(spec)
    if np.any(t_arr <= lo) or np.any(t_arr > hi) or (hi == 1.0 and np.any(t_arr >= 1.0)):
        raise ProfileDomainError(f"t outside the domain of {type(spec).__name__}")
    if isinstance(spec, PowerRn):
        out = np.exp(log_coefficient(spec)) * t_arr ** (1.0 - 1.0 / spec.n)
    elif isinstance(spec, (BallEstimator, SphereEstimator, ManifoldEstimator)):
        m = np.minimum(t_arr, 1.0 - t_arr)
        out = np.exp(log_coefficient(spec)) * m ** (1.0 - 1.0 / spec.n)
    elif isinstance(spec, GaussianEstimator):
        out = spec.c * t_arr * np.sqrt(np.log(1.0 / t_arr))
    else:
        out = np.exp(_tab_log_j(spec, np.log(t_arr)))
    return out if out.ndim else float(out)


def _tab_log_j(spec: Tabulated, log_t):
    lt, lj = np.log(spec.t), np.log(spec.values)
    slope_lo = (lj[1] - lj[0]) / (lt[1] - lt[0])
    slope_hi = (lj[-1] - lj[-2]) / (lt[-1] - lt[-2])
    log_t = np.asarray(log_t, dtype=float)
    out = np.interp(log_t, lt, lj)
    out = np.where(log_t < lt[0], lj[0] + slope_lo * (log_t - lt[0]), out)
    return np.where(log_t > lt[-1], lj[-1] + slope_hi * (log_t - lt[-1]), out)


def ratio_in_z(spec: ProfileSpec, z):
    """``t / J(t)`` as a function of ``z = ln(1/t)``, stable for very large ``z``."""
    z = np.asarray(z, dtype=float)
    alpha = power_exponent(spec)
    if alpha is not None:
        logm = -z
        if not isinstance(spec, PowerRn):
            # min(t, 1 - t) switches to 1 - t beyond t = 1/2
            t = np.exp(-z)
            with np.errstate(divide="ignore"):
                logm = np.where(t > 0.5, np.log1p(-np.minimum(t, 1.0)), -z)
        with np.errstate(over="ignore"):
            return np.exp(-z - log_coefficient(spec) - (1.0 - alpha) * logm)
    if isinstance(spec, GaussianEstimator):
        with np.errstate(divide="ignore"):
            return 1.0 / (spec.c * np.sqrt(z))
    return np.exp(-z - _tab_log_j(spec, -z))


def ratio_is_monotone(spec: ProfileSpec, points: int = 2000) -> bool:
    """Grid check that ``t / J(t)`` is non-decreasing on (0, 1/2)."""
    z = np.geomspace(50.0, log(2.0), points)
    r = ratio_in_z(spec, z)
    return bool(np.all(np.diff(r) >= -1e-12 * np.abs(r[1:])))


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class LogHalf:
    """``G(t) = 1 / (t (ln 1/t)^{1/2})``; ``int_t^r G = 2[(ln 1/t)^{1/2} - (ln 1/r)^{1/2}]``."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return 1.0 / (t * np.sqrt(np.log(1.0 / t)))

    def tail(self, t, r: float = 1.0):
        """``int_t^r G(s) ds``."""
        return 2.0 * (np.sqrt(np.log(1.0 / np.asarray(t, dtype=float))) - sqrt(log(1.0 / r)))

    def u_density(self, u):
        # G(t) dt = z^{-1/2} dz = 2 du with t = exp(-u^2)
        return np.full(np.shape(u), 2.0)


@dataclass(frozen=True, eq=False)
class CustomWeight:
    """User weight with declared integrable singularities at 0 and at 1."""

    evaluator: Callable
    singular_at_zero: bool = True
    singular_at_one: bool = False
    name: str = field(default="custom")

    def __post_init__(self):
        probe = 1.0 - np.geomspace(1e-2, 1e-8, 7)
        vals = np.asarray(self.evaluator(probe), dtype=float)
        if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("weight must be positive and finite inside (0, 1)")
        grows = vals[-1] > 100.0 * vals[0]
        if grows and not self.singular_at_one:
            raise ValueError("weight blows up at t = 1 but was declared regular there")

    def __call__(self, t):
        return self.evaluator(np.asarray(t, dtype=float))

    def tail(self, t, r: float = 1.0):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = [integrate.quad(self.evaluator, s, r, limit=200, epsrel=1e-10)[0] for s in t]
        return np.array(out)

    def u_density(self, u):
        u = np.asarray(u, dtype=float)
        t = np.exp(-u * u)
        return np.asarray(self.evaluator(t), dtype=float) * t * 2.0 * u


WeightFunction = Union[LogHalf, CustomWeight]


# ---------------------------------------------------------------------------
# transference integral

SHELL_LIMIT = 1020
DIVERGENCE_WINDOW = 10
DIVERGENCE_EXPONENT = 1.05
# divergence is only judged where exponential decay of power-type ratios has set in
DIVERGENCE_START = 2.0 ** 14


def _shell_integral(spec, G, za: float, zb: float) -> float:
    # u = sqrt(z) removes the z^{-1/2} singularity of LogHalf at z = 0
    f = lambda u: float(ratio_in_z(spec, u * u) * G.u_density(u))  # noqa: E731
    val, _ = integrate.quad(f, sqrt(za), sqrt(zb), epsabs=0.0, epsrel=1e-13, limit=400)
    return val


def transference_integral(spec: ProfileSpec, G: WeightFunction, r: float = 1.0, rtol: float = 1e-10) -> float:
    """``int_0^r (t / J(t)) G(t) dt``; ``inf`` when a dyadic-shell test shows divergence.

    With ``z = ln(1/t)`` the integral runs over ``[ln(1/r), inf)``.  It is cut
    into shells ``[2^m, 2^{m+1}]``.  An integrand behaving like ``z^{-beta}``
    has shell ratios ``2^{1 - beta}``; the integral is declared divergent when
    the local exponent stays at or below 1.05 over ten consecutive shells.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError("r must lie in (0, 1]")
    lo, hi = domain(spec)
    if r > hi and hi < 1.0:
        raise ProfileDomainError(f"{type(spec).__name__} is only defined up to t = {hi}")
    z0 = log(1.0 / r)
    edge = max(1.0, 2.0 ** np.ceil(np.log2(max(z0, 1e-300)))) if z0 > 0 else 1.0
    if edge <= z0:
        edge *= 2.0
    total = _shell_integral(spec, G, z0, edge)
    prev = None
    low_run = 0
    za = edge
    for _ in range(SHELL_LIMIT):
        zb = 2.0 * za
        s = _shell_integral(spec, G, za, zb)
        total += s
        if prev is not None and prev > 0:
            if s == 0.0:
                return float(total)
            ratio = s / prev
            beta = 1.0 - log(ratio) / log(2.0)
            if za >= DIVERGENCE_START and beta <= DIVERGENCE_EXPONENT:
                low_run += 1
                if low_run >= DIVERGENCE_WINDOW:
                    return inf
            else:
                low_run = 0
            if ratio < 0.5:
                tail = s * ratio / (1.0 - ratio)
                if tail <= rtol * total:
                    return float(total + tail)
        elif prev == 0.0 and s == 0.0:
            return float(total)
        prev = s
        za = zb
    raise InconclusiveIntegralError("transference integral: neither convergence nor divergence established")


# ---------------------------------------------------------------------------
# constants


GEOMETRIES = ("rn", "ball", "sphere", "manifold")


def geometry_constant(kind: str, n: int, curvature: float = 1.0, variant: str = "computed") -> float:
    """Closed-form value (or upper bound) of the transference integral with ``LogHalf``.

    ``rn`` is exact over (0, 1).  ``ball``, ``sphere`` and ``manifold`` bound the
    integral over (0, 1/2) by ``sqrt(pi n) / c`` with ``c`` the estimator
    coefficient.  For the sphere, ``variant="printed"`` returns the larger
    ``(omega_n / omega_{n-1}) sqrt(pi n)``, and ``variant="theorem"`` the
    constant ``sqrt(pi n) omega_{n-1} / omega_n``.
    """
    if kind not in GEOMETRIES:
        raise ValueError(f"unknown geometry {kind!r}")
    _check_dim(n, 1 if kind in ("rn", "ball") else 2)
    root = 0.5 * log(pi * n)
    if kind == "rn":
        return exp(lgamma(1.0 + 0.5 * n) / n - 0.5 * log(n))
    if kind == "ball":
        return exp(root - log_coefficient(BallEstimator(n)))
    if kind == "sphere":
        ratio = log_sphere_area(n) - log_sphere_area(n - 1)
        if variant == "computed":
            return exp(root + ratio - log(2.0))
        if variant == "printed":
            return exp(root + ratio)
        if variant == "theorem":
            return exp(root - ratio)
        raise ValueError(f"unknown sphere variant {variant!r}")
    return exp(root - log_coefficient(ManifoldEstimator(n, curvature)))


def geometry_limit(kind: str, curvature: float = 1.0, variant: str = "stated") -> float:
    """``n -> inf`` limits: ``pi sqrt(2)/2`` (ball), ``sqrt(2) pi`` (sphere), ``pi/sqrt(k)`` (manifold).

    For ``rn`` the constants decrease to ``1/sqrt(2e)``; the dimension-free
    quantity there is their supremum ``sqrt(pi)/2`` (attained at n = 1), returned instead.
    ``variant="computed"`` gives ``pi/sqrt(2)`` for the sphere, the limit of the
    ``computed`` constant.
    """
    if kind == "rn":
        return sqrt(pi) / 2.0
    if kind == "ball":
        return pi * sqrt(2.0) / 2.0
    if kind == "sphere":
        return pi / sqrt(2.0) if variant == "computed" else sqrt(2.0) * pi
    if kind == "manifold":
        return pi / sqrt(curvature)
    raise ValueError(f"unknown geometry {kind!r}")


def geometry_spec(kind: str, n: int, curvature: float = 1.0) -> ProfileSpec:
    return {
        "rn": lambda: PowerRn(n),
        "ball": lambda: BallEstimator(n),
        "sphere": lambda: SphereEstimator(n),
        "manifold": lambda: ManifoldEstimator(n, curvature),
    }[kind]()


# ---------------------------------------------------------------------------
# converse check and the isoperimetric Hardy operator


def gaussian_type_check(spec: ProfileSpec, G: WeightFunction, r: float = 1.0, points: int = 4000):
    """``sup_{0<t<r} (t / J(t)) int_t^r G`` and the ``t`` where it is attained.

    When the supremum is only approached as ``t -> 0`` the reported location is
    the smallest grid point, which may underflow to 0.0.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError("r must lie in (0, 1]")
    zr = log(1.0 / r)
    hi = min(r, domain(spec)[1])
    z_lo = max(zr, log(1.0 / hi)) + 1e-9
    z = z_lo + np.geomspace(1e-9, 1e6, points)

    def value(zz):
        zz = np.atleast_1d(zz)
        if isinstance(G, LogHalf):
            inner = 2.0 * (np.sqrt(zz) - sqrt(zr))
        else:
            inner = G.tail(np.exp(-zz), r)
        return ratio_in_z(spec, zz) * inner

    vals = value(z)
    j = int(np.argmax(vals))
    a, b = z[max(j - 1, 0)], z[min(j + 1, z.size - 1)]
    if b > a:
        res = optimize.minimize_scalar(lambda x: -float(value(exp(x))[0]), bounds=(log(a), log(b)), method="bounded",
                                       options={"xatol": 1e-12})
        if -res.fun > vals[j]:
            return float(-res.fun), float(exp(-exp(res.x)))
    return float(vals[j]), float(exp(-z[j]))


def iso_hardy_QJ(spec: ProfileSpec, profile: StepProfile) -> Callable:
    """Evaluator of ``Q_J f(t) = (J(t)/t) int_t^{1/2} f(z) dz / J(z)`` for ``t < 1/2``."""
    if not profile.is_nonnegative():
        raise ValueError("Q_J acts on non-negative profiles")
    b = np.minimum(profile.breaks, 0.5)
    lefts = np.minimum(profile.lefts, 0.5)
    v = profile.values
    alpha = power_exponent(spec)

    if alpha is not None:
        # J(z)/z is a constant times z^{-1/n} on (0, 1/2]
        antider = lambda x: np.asarray(x, dtype=float) ** alpha / alpha  # noqa: E731
    elif isinstance(spec, GaussianEstimator):
        # int dz / (c z sqrt(ln 1/z)) = -(2/c) sqrt(ln 1/z)
        antider = lambda x: -(2.0 / spec.c) * np.sqrt(np.log(1.0 / np.asarray(x, dtype=float)))  # noqa: E731
    else:
        antider = None

    if antider is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            pieces = np.where(b > lefts, v * (antider(b) - antider(np.maximum(lefts, 1e-300))), 0.0)
        suffix = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])

    def evaluate(t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr <= 0) or np.any(t_arr >= 0.5):
            raise ValueError("Q_J is evaluated on (0, 1/2)")
        idx = profile.step_index(t_arr)
        if antider is not None:
            inner = v[idx] * (antider(b[idx]) - antider(t_arr)) + suffix[idx + 1]
            if alpha is not None:
                out = inner * t_arr ** (-alpha)
            else:
                out = inner * profile_eval(spec, t_arr) / t_arr
        else:
            flat = np.atleast_1d(t_arr)
            vals = []
            for s in flat:
                pts = [p for p in profile.breaks if s < p < 0.5]
                integral = integrate.quad(lambda z: profile(z) / profile_eval(spec, z), s, 0.5,
                                          points=pts or None, limit=400, epsrel=1e-11)[0]
                vals.append(profile_eval(spec, s) / s * integral)
            out = np.array(vals).reshape(t_arr.shape)
        out = np.asarray(out, dtype=float)
        return out if out.ndim else float(out)

    return evaluate
