"""Rearrangement-invariant norms, Hardy operators, dilations and Boyd indices.

Every norm is evaluated on a :class:`~dimsob.rearrange.StepProfile` holding
``|f|*``.  The workhorse is :func:`truncated_norm`, which returns
``psi(t) = ||f* chi_[0,t)||_X`` for a whole array of ``t`` at once; the
plain norm is ``psi(1)`` and the log-refined norms are integrals of ``psi``
against the weights of :mod:`dimsob.quadrature`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import exp, gamma, inf, log, sqrt
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy import integrate, optimize

from .quadrature import (
    VARIANTS,
    cumulative_log_weight_integral,
    log_weight_integral,
    weight_tail,
)
from .rearrange import StepProfile

LUXEMBURG_ITERATIONS = 200
MAX_LOG_DEPTH = 3


class SpaceError(ValueError):
    pass


class NormEvaluationError(RuntimeError):
    pass


class BoydEstimateError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class Phi:
    """Concave fundamental function ``phi(t) = t**alpha`` with ``0 < alpha <= 1``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise SpaceError("phi(t) = t^alpha is concave and increasing only for 0 < alpha <= 1")
        grid = np.linspace(0.0, 1.0, 257)
        vals = self(grid)
        if vals[0] != 0.0 or np.any(np.diff(vals) < 0) or np.any(np.diff(vals, 2) > 1e-12):
            raise SpaceError("phi fails the concavity check")

    @classmethod
    def power(cls, alpha: float) -> "Phi":
        return cls(float(alpha))

    def __call__(self, t):
        return np.asarray(t, dtype=float) ** self.alpha

    def describe(self) -> str:
        return f"t^{self.alpha:g}"


@dataclass(frozen=True)
class Young:
    """Young function: ``power`` (x^p), ``exp2`` (e^{x^2} - 1) or ``xlog`` (x ln(1+x))."""

    name: str
    p: float = 2.0

    def __post_init__(self):
        if self.name not in ("power", "exp2", "xlog"):
            raise SpaceError(f"unknown Young function {self.name!r}")
        if self.name == "power" and self.p < 1:
            raise SpaceError("power Young function needs p >= 1")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            if self.name == "power":
                return x ** self.p
            if self.name == "exp2":
                return np.expm1(x * x)
            return x * np.log1p(x)

    def inverse(self, y: float) -> float:
        if y <= 0:
            return 0.0
        if self.name == "power":
            return y ** (1.0 / self.p)
        if self.name == "exp2":
            return float(np.sqrt(np.log1p(y)))
        hi = max(2.0, y)
        return float(optimize.brentq(lambda x: float(self(x)) - y, 0.0, hi, xtol=1e-15, rtol=1e-15))

    def describe(self) -> str:
        return f"power:{self.p:g}" if self.name == "power" else self.name


@dataclass(frozen=True)
class Lp:
    p: float

    def __post_init__(self):
        if not (1.0 <= self.p < inf):
            raise SpaceError("Lp needs 1 <= p < inf")


@dataclass(frozen=True)
class LorentzPQ:
    """Lorentz space normalized so that its fundamental function is ``t^{1/p}``."""

    p: float
    q: float

    def __post_init__(self):
        if not (1.0 <= self.p < inf) or not (self.q >= 1.0):
            raise SpaceError("Lorentz L^{p,q} needs 1 <= p < inf and q >= 1")
        if self.p == 1.0 and self.q > 1.0:
            raise SpaceError("L^{1,q} with q > 1 is not normable")


@dataclass(frozen=True)
class LorentzLambda:
    phi: Phi


@dataclass(frozen=True)
class Marcinkiewicz:
    phi: Phi


@dataclass(frozen=True)
class Orlicz:
    young: Young


@dataclass(frozen=True)
class LogRefined:
    """``X_{k,log}``: norm ``int_0^1 ||f* chi_[0,t)||_X dt / (t L(t)^{1-k/2})``."""

    base: "SpaceSpec"
    k: int
    variant: str = "one_plus_ln"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise SpaceError("k must be a positive integer")
        if self.variant not in VARIANTS:
            raise SpaceError(f"variant must be one of {VARIANTS}")
        if log_depth(self) > MAX_LOG_DEPTH:
            raise SpaceError(f"log-refined nesting deeper than {MAX_LOG_DEPTH}")


SpaceSpec = Union[Lp, LorentzPQ, LorentzLambda, Marcinkiewicz, Orlicz, LogRefined]


def log_depth(space) -> int:
    return 1 + log_depth(space.base) if isinstance(space, LogRefined) else 0


def describe(space: SpaceSpec) -> str:
    """Inverse of :func:`parse_space`."""
    if isinstance(space, Lp):
        return f"lp:{space.p:g}"
    if isinstance(space, LorentzPQ):
        return f"lorentz:{space.p:g},{space.q:g}"
    if isinstance(space, LorentzLambda):
        return f"lambda:{space.phi.describe()}"
    if isinstance(space, Marcinkiewicz):
        return f"marcinkiewicz:{space.phi.describe()}"
    if isinstance(space, Orlicz):
        return f"orlicz:{space.young.describe()}"
    if isinstance(space, LogRefined):
        return f"xklog:{describe(space.base)},{space.k},{space.variant}"
    raise SpaceError(f"not a space: {space!r}")


def _parse_phi(expr: str) -> Phi:
    expr = expr.strip().replace(" ", "")
    if not expr.startswith("t^"):
        raise SpaceError(f"fundamental function must look like t^A, got {expr!r}")
    try:
        return Phi.power(float(expr[2:]))
    except ValueError as exc:
        raise SpaceError(f"bad exponent in {expr!r}") from exc


def parse_space(text: str) -> SpaceSpec:
    """Parse ``lp:P``, ``lorentz:P,Q``, ``marcinkiewicz:t^A``, ``lambda:t^A``,
    ``orlicz:NAME`` (``exp2``, ``xlog``, ``power:P``) and ``xklog:BASE,K[,VARIANT]``."""
    kind, sep, rest = text.strip().partition(":")
    if not sep:
        raise SpaceError(f"space spec {text!r} lacks a ':'")
    kind = kind.lower()
    try:
        if kind == "lp":
            return Lp(float(rest))
        if kind == "lorentz":
            p, q = rest.split(",")
            return LorentzPQ(float(p), float(q))
        if kind == "marcinkiewicz":
            return Marcinkiewicz(_parse_phi(rest))
        if kind == "lambda":
            return LorentzLambda(_parse_phi(rest))
        if kind == "orlicz":
            name, _, p = rest.partition(":")
            return Orlicz(Young(name, float(p)) if p else Young(name))
        if kind == "xklog":
            variant = "one_plus_ln"
            head, _, last = rest.rpartition(",")
            if last.strip() in VARIANTS:
                variant, rest = last.strip(), head
            base, _, k = rest.rpartition(",")
            return LogRefined(parse_space(base), int(k), variant)
    except (ValueError, IndexError) as exc:
        raise SpaceError(f"cannot parse space spec {text!r}: {exc}") from exc
    raise SpaceError(f"unknown space kind {kind!r}")


# ---------------------------------------------------------------------------
# norms


def _check_profile(profile: StepProfile) -> None:
    if not profile.is_nonnegative():
        raise ValueError("norms are defined on non-negative profiles |f|*")


def _step_data(profile: StepProfile, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("truncation points must lie in [0, 1]")
    idx = profile.step_index(t)
    return t, idx, profile.lefts[idx], profile.values[idx]


def _prefix(x: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(x)])


def _prefix_max(x: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.maximum.accumulate(x)])


def truncated_norm(space: SpaceSpec, profile: StepProfile, t):
    """``||f* chi_[0,t)||_X`` for each ``t`` (exact except for Orlicz and log-refined)."""
    _check_profile(profile)
    t_arr, idx, a, v = _step_data(profile, t)
    b, lv = profile.breaks, profile.values
    lefts = profile.lefts
    if isinstance(space, Lp):
        p = space.p
        c = _prefix(lv ** p * profile.lengths)
        out = (c[idx] + v ** p * (t_arr - a)) ** (1.0 / p)
    elif isinstance(space, LorentzPQ):
        p, q = space.p, space.q
        if q == inf:
            m = _prefix_max(lv * b ** (1.0 / p))
            out = np.maximum(m[idx], v * t_arr ** (1.0 / p))
        else:
            c = _prefix(lv ** q * (b ** (q / p) - lefts ** (q / p)))
            out = (c[idx] + v ** q * (t_arr ** (q / p) - a ** (q / p))) ** (1.0 / q)
    elif isinstance(space, LorentzLambda):
        phi = space.phi
        c = _prefix(lv * (phi(b) - phi(lefts)))
        out = c[idx] + v * (phi(t_arr) - phi(a))
    elif isinstance(space, Marcinkiewicz):
        phi = space.phi
        m = _prefix_max(lv * phi(b))
        out = np.maximum(m[idx], v * phi(t_arr))
    elif isinstance(space, Orlicz):
        out = _luxemburg(space.young, profile, t_arr, idx, a, v)
    elif isinstance(space, LogRefined):
        out = _log_refined_truncated(space, profile, t_arr)
    else:
        raise SpaceError(f"not a space: {space!r}")
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


def _luxemburg(young: Young, profile: StepProfile, t, idx, a, v):
    """Luxemburg norm of each truncation by vectorized bisection on ``log lambda``."""
    t = np.atleast_1d(t)
    idx, a, v = np.atleast_1d(idx), np.atleast_1d(a), np.atleast_1d(v)
    ln = profile.lengths
    # the norm is homogeneous: bisect on f / f*(0) so tiny values cannot underflow the bracket
    scale = float(profile.values[0])
    if scale <= 0.0:
        return np.zeros(np.shape(t))
    lv, v = profile.values / scale, v / scale
    mask = np.arange(lv.size)[None, :] < idx[:, None]

    def modular(lam):
        full = (young(lv[None, :] / lam[:, None]) * ln[None, :] * mask).sum(axis=1)
        return full + young(v / lam) * (t - a)

    hi = np.full(t.shape, 1.0 / young.inverse(1.0))
    lo = np.full(t.shape, 1e-30)
    nonzero = (idx > 0) | ((t > a) & (v > 0))
    with np.errstate(over="ignore", invalid="ignore"):
        if np.any(modular(lo)[nonzero] <= 1.0):
            raise NormEvaluationError("Luxemburg bracket: lower end already feasible")
    llo, lhi = np.log(lo), np.log(hi)
    for _ in range(LUXEMBURG_ITERATIONS):
        mid = 0.5 * (llo + lhi)
        with np.errstate(over="ignore", invalid="ignore"):
            feasible = modular(np.exp(mid)) <= 1.0
        lhi = np.where(feasible, mid, lhi)
        llo = np.where(feasible, llo, mid)
    if np.max(lhi - llo) > 1e-12:
        raise NormEvaluationError("Luxemburg bisection did not converge in 200 iterations")
    out = scale * np.exp(lhi)
    out[~nonzero] = 0.0
    return out.reshape(np.shape(t))


def _log_refined_truncated(space: LogRefined, profile: StepProfile, t):
    # ||g chi_[0,t)||_Y = int_0^t psi_X w_k + psi_X(t) W_k(t)
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    base = space.base
    psi = lambda s: truncated_norm(base, profile, s)  # noqa: E731
    out = np.zeros_like(flat)
    pos = flat > 0
    if np.any(pos):
        head = cumulative_log_weight_integral(
            psi, flat[pos], space.k, space.variant, knots_t=profile.breaks[:-1]
        )
        out[pos] = head + np.asarray(psi(flat[pos])) * weight_tail(flat[pos], space.k, space.variant)
    return out.reshape(t.shape)


def xklog_norm(base: SpaceSpec, k: int, profile: StepProfile, weight_variant: str = "one_plus_ln") -> float:
    """``int_0^1 ||f* chi_[0,t)||_base dt / (t L(t)^{1-k/2})``."""
    _check_profile(profile)
    if int(k) != k or k < 1:
        raise SpaceError("k must be a positive integer")
    if profile.is_zero():
        return 0.0
    psi = lambda t: truncated_norm(base, profile, t)  # noqa: E731
    return log_weight_integral(psi, int(k), weight_variant, knots_t=profile.breaks[:-1])


def iteration_factor(base: SpaceSpec, k: int, profile: StepProfile) -> float:
    """``||f||_{(X_{k-1,log})_{1,log}} / ||f||_{X_{k,log}}`` with the ``ln`` weights.

    Fubini splits the nested norm into ``2 ||f||_{X_k}`` plus ``(2/(k-1)) ||f||_{X_k}``,
    so the ratio is ``2k/(k-1)`` for every profile; this evaluates both sides.
    """
    if int(k) != k or k < 2:
        raise SpaceError("the iteration identity needs k >= 2")
    nested = xklog_norm(LogRefined(base, int(k) - 1, "ln"), 1, profile, "ln")
    return nested / xklog_norm(base, int(k), profile, "ln")


def small_lebesgue_norm(q: float, profile: StepProfile) -> float:
    """``int_0^1 (int_0^t f*^q)^{1/q} dt / (t (ln 1/t)^{1/2})``.

    Evaluated step by step from the closed form ``(M_i + v_i^q (t - a_i))^{1/q}``
    of the inner norm, with ``t = exp(-u^2)`` (so ``dt / (t (ln 1/t)^{1/2}) = 2 du``)
    and adaptive quadrature in ``u``.  This route shares nothing with
    :func:`xklog_norm`, which the two are checked against.
    """
    if q <= 1:
        raise SpaceError("small Lebesgue exponent must exceed 1")
    _check_profile(profile)
    if profile.is_zero():
        return 0.0
    v, a, b = np.abs(profile.values), profile.lefts, profile.breaks
    mass = np.concatenate([[0.0], np.cumsum(v ** q * (b - a))])
    total = 0.0
    for i in range(v.size):
        u_lo = sqrt(log(1.0 / b[i])) if b[i] < 1.0 else 0.0
        u_hi = sqrt(log(1.0 / a[i])) if a[i] > 0 else inf
        if u_hi <= u_lo:
            continue

        def psi(u, i=i):
            t = exp(-u * u)
            return max(mass[i] + v[i] ** q * (t - a[i]), 0.0) ** (1.0 / q)

        val, _ = integrate.quad(psi, u_lo, u_hi, epsabs=0.0, epsrel=1e-13, limit=200)
        total += 2.0 * val
    return total


def ri_norm(space: SpaceSpec, profile: StepProfile) -> float:
    """Norm of ``|f|*`` in ``space``; zero exactly for the zero profile."""
    _check_profile(profile)
    if profile.is_zero():
        return 0.0
    if isinstance(space, LogRefined):
        return xklog_norm(space.base, space.k, profile, space.variant)
    return float(np.asarray(truncated_norm(space, profile, 1.0)).reshape(-1)[0])


def fundamental_function(space: SpaceSpec, t):
    """``phi_X(t) = ||chi_[0,t)||_X`` for ``t`` in (0, 1]."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0) or np.any(t_arr > 1):
        raise ValueError("t must lie in (0, 1]")
    if isinstance(space, (Lp, LorentzPQ)):
        out = t_arr ** (1.0 / space.p)
    elif isinstance(space, (LorentzLambda, Marcinkiewicz)):
        out = space.phi(t_arr)
    elif isinstance(space, Orlicz):
        inv = np.vectorize(lambda s: 1.0 / space.young.inverse(1.0 / s))
        out = inv(t_arr)
    else:
        out = truncated_norm(space, StepProfile.constant(1.0), t_arr)
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# operators


def hardy_transform(profile: StepProfile, mode: str = "P", a: float = 0.0) -> Callable:
    """Evaluator of ``P f(t) = (1/t) int_0^t f`` or ``Q_a f(t) = t^{-a} int_t^1 s^{a-1} f(s) ds``."""
    _check_profile(profile)
    if mode == "P":

        def evaluate_p(t):
            t = np.asarray(t, dtype=float)
            if np.any(t <= 0):
                raise ValueError("P f is evaluated on (0, 1]")
            out = profile.integral(t) / t
            return out if np.ndim(out) else float(out)

        return evaluate_p
    if mode != "Q":
        raise ValueError(f"unknown Hardy mode {mode!r}")
    if not 0.0 <= a < 1.0:
        raise ValueError("Q_a needs a in [0, 1)")
    b, lefts, v = profile.breaks, profile.lefts, profile.values

    def segment(lo, hi):
        # int_lo^hi s^{a-1} ds, written with expm1 so that small a keeps its digits
        lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        # for a near the smallest float the integral exceeds the float range: inf
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ratio = np.log(hi / lo)
            if a == 0.0:
                return ratio
            inner = lo ** a * np.expm1(a * ratio) / a
            return np.where(lo > 0, inner, hi ** a / a)

    with np.errstate(invalid="ignore", over="ignore"):
        pieces = v * segment(lefts, b)
    pieces = np.where(v == 0, 0.0, pieces)
    suffix = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])

    def evaluate_q(t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0) or np.any(t > 1):
            raise ValueError("Q_a f is evaluated on (0, 1]")
        idx = profile.step_index(t)
        partial = v[idx] * segment(t, b[idx]) + suffix[idx + 1]
        out = t ** (-a) * partial
        return out if np.ndim(out) else float(out)

    return evaluate_q


def dilation(profile: StepProfile, r: float) -> StepProfile:
    """``E_r f(t) = f*(t/r)`` on ``(0, min(r, 1))`` and 0 afterwards."""
    if not r > 0:
        raise ValueError("dilation parameter must be positive")
    b = profile.breaks * r
    if r >= 1.0:
        keep = b < 1.0
        breaks = np.append(b[keep], 1.0)
        values = profile.values[: np.count_nonzero(keep) + 1]
    else:
        breaks = np.append(b, 1.0)
        values = np.append(profile.values, 0.0)
    return StepProfile.canonical(breaks, values)


class DilationNorm(NamedTuple):
    value: float
    estimated: bool


class OperatorNormEstimate(NamedTuple):
    lower: float
    upper: float
    witness: StepProfile


def _power_exponent(space) -> float | None:
    """``alpha`` with ``h_X(r) = r^alpha`` exactly, when known."""
    if isinstance(space, (Lp, LorentzPQ)):
        return 1.0 / space.p
    if isinstance(space, (LorentzLambda, Marcinkiewicz)):
        return space.phi.alpha
    if isinstance(space, Orlicz) and space.young.name == "power":
        return 1.0 / space.young.p
    return None


# indicator lengths reach far below 1/r so that sup_c phi(rc)/phi(c) is resolved
INDICATOR_GRID = np.geomspace(1e-280, 1.0, 200)


@lru_cache(maxsize=64)
def _test_profiles(count: int = 200) -> tuple[StepProfile, ...]:
    half = count // 2
    cs = INDICATOR_GRID[:: max(1, INDICATOR_GRID.size // half)][:half]
    profiles = [StepProfile.indicator(float(c)) for c in cs]
    grid = np.geomspace(1e-12, 1.0, 48)
    for j, beta in enumerate(np.linspace(0.02, 0.98, count - half)):
        cut = [1.0, 2.0 ** -10, 2.0 ** -20][j % 3]
        f = lambda s, beta=beta, cut=cut: np.where(s < cut, s ** -beta, 0.0)  # noqa: E731
        profiles.append(StepProfile.from_function(f, grid))
    return tuple(profiles)


def dilation_norm(space: SpaceSpec, r: float) -> DilationNorm:
    """``h_X(r) = ||E_r||_{X -> X}``; exact for power-type fundamental behaviour,
    otherwise a lower estimate over a fixed family of test profiles."""
    if not r > 0:
        raise ValueError("r must be positive")
    alpha = _power_exponent(space)
    if alpha is not None:
        return DilationNorm(min(r ** alpha, max(1.0, r)), False)
    best = 0.0
    for f in _test_profiles():
        nf = ri_norm(space, f)
        if nf > 0:
            best = max(best, ri_norm(space, dilation(f, r)) / nf)
    return DilationNorm(min(best, max(1.0, r)), True)


def log_ratio_supremum(k: int, r: float, points: int = 20001) -> float:
    """``sup_{0<u<=1} ((1 + ln 1/u) / (1 + ln 1/(ur)))^{1 - k/2}`` for ``0 < r <= 1``.

    The ratio is monotone in ``z = ln(1/u)``, so the supremum sits at ``u = 1``
    or is approached as ``u -> 0``.  A geometric grid in ``z`` reaching 1e15
    captures the second case to well below 1e-6, then a bounded scalar
    search polishes the best grid cell.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError("r must lie in (0, 1]")
    c, e = log(1.0 / r), 1.0 - k / 2.0

    def ratio(z):
        return ((1.0 + z) / (1.0 + z + c)) ** e

    z = np.concatenate([[0.0], np.geomspace(1e-8, 1e15, points)])
    vals = ratio(z)
    i = int(np.argmax(vals))
    lo, hi = z[max(i - 1, 0)], z[min(i + 1, z.size - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda x: -ratio(x), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12 * max(1.0, hi)})
        return float(max(vals[i], -res.fun))
    return float(vals[i])


def log_ratio_supremum_closed(k: int, r: float) -> float:
    """Closed form of :func:`log_ratio_supremum`: 1 for ``k <= 2``, ``(1 + ln 1/r)^{k/2 - 1}`` above."""
    if not 0.0 < r <= 1.0:
        raise ValueError("r must lie in (0, 1]")
    return 1.0 if k <= 2 else (1.0 + log(1.0 / r)) ** (k / 2.0 - 1.0)


def _kappa(space: LogRefined) -> float:
    """Lower bound of ``||f||_{X_k} / ||f||_X`` from ``psi(t) >= psi(1) / h_X(1/t)``."""
    base, k, var = space.base, space.k, space.variant
    alpha = _power_exponent(base)
    if alpha is not None and var == "ln":
        return gamma(k / 2.0) / alpha ** (k / 2.0)
    def psi(t):
        t = np.maximum(np.atleast_1d(t), 1e-300)
        return 1.0 / np.array([dilation_upper(base, 1.0 / s) for s in t])

    return log_weight_integral(psi, k, var, rtol=1e-8)


def dilation_upper(space: SpaceSpec, r: float) -> float:
    """A guaranteed upper bound for ``h_X(r)``."""
    if not r > 0:
        raise ValueError("r must be positive")
    alpha = _power_exponent(space)
    if alpha is not None:
        return r ** alpha
    trivial = max(1.0, r)
    if not isinstance(space, LogRefined):
        return trivial
    k, var = space.k, space.variant
    hx = dilation_upper(space.base, r)
    if r <= 1.0:
        z = log(1.0 / r)
        if k <= 2:
            s = 1.0
        elif var == "one_plus_ln":
            s = (1.0 + z) ** (k / 2.0 - 1.0)
        else:
            return trivial
        tail = float(weight_tail(r, k, var))
        return min(trivial, hx * (s + tail / _kappa_cached(space)))
    if var == "one_plus_ln":
        return min(trivial, hx * (1.0 + log(r)) ** max(0.0, 1.0 - k / 2.0))
    if k >= 2:
        return min(trivial, hx)
    return trivial


@lru_cache(maxsize=64)
def _kappa_cached(space: LogRefined) -> float:
    return _kappa(space)


def _index_bounds(space: SpaceSpec) -> tuple[float, float]:
    """Boyd indices known exactly from the structure of the space."""
    alpha = _power_exponent(space)
    if alpha is not None:
        return alpha, alpha
    if isinstance(space, LogRefined):
        return _index_bounds(space.base)
    return 0.0, 1.0


GROWTH_PROBE = 200.0


def _bound_exponent(space: SpaceSpec, log_r: float) -> float:
    """``ln h_up(r) / ln r`` far out; the dilation integrals converge only when
    this exceeds ``a`` (for ``r -> 0``) or stays below 1 (for ``r -> inf``)."""
    return log(dilation_upper(space, float(np.exp(log_r)))) / log_r


def qa_norm_bound(space: SpaceSpec, a: float) -> float:
    """``int_1^inf h_X(1/s) s^{a-1} ds``, an upper bound of ``||Q_a||``; ``inf`` when divergent."""
    if not 0.0 <= a < 1.0:
        raise ValueError("a must lie in [0, 1)")
    alpha = _power_exponent(space)
    if alpha is not None:
        return 1.0 / (alpha - a) if alpha > a else inf
    lower, _ = _index_bounds(space)
    if lower <= a or _bound_exponent(space, -GROWTH_PROBE) <= a:
        return inf
    # s = e^x turns the integral into int_0^inf h(e^{-x}) e^{a x} dx
    def f(x):
        r = float(np.exp(-x))
        return dilation_upper(space, r) * np.exp(a * x) if r > 0 else 0.0

    val, _ = integrate.quad(f, 0.0, np.inf, epsrel=1e-10, limit=400)
    return float(val)


def p_norm_bound(space: SpaceSpec) -> float:
    """``int_0^1 h_X(1/s) ds``, an upper bound of ``||P||``; ``inf`` when divergent."""
    alpha = _power_exponent(space)
    if alpha is not None:
        return 1.0 / (1.0 - alpha) if alpha < 1.0 else inf
    _, upper = _index_bounds(space)
    if upper >= 1.0 or _bound_exponent(space, GROWTH_PROBE) >= 1.0:
        return inf
    def f(x):
        if x > 700:
            return 0.0
        r = float(np.exp(x))
        return dilation_upper(space, r) * np.exp(-x) if np.isfinite(r) else 0.0

    val, _ = integrate.quad(f, 0.0, np.inf, epsrel=1e-10, limit=400)
    return float(val)


def operator_norm(space: SpaceSpec, operator: str = "Q", a: float = 0.0) -> OperatorNormEstimate:
    """Bracket ``||T||_{X -> X}`` for ``T`` in {P, Q_a}.

    ``lower`` is the best ratio ``||T f|| / ||f||`` over power and indicator
    witnesses, with ``T f`` replaced by a pointwise smaller step function so the
    ratio never overstates; ``upper`` is the dilation-integral bound.
    """
    if operator == "P":
        upper = p_norm_bound(space)
    elif operator == "Q":
        upper = qa_norm_bound(space, a)
    else:
        raise ValueError("operator must be 'P' or 'Q'")
    best, witness = 0.0, None
    for f in _test_profiles():
        ratio = _witness_ratio(space, f, operator, a)
        if ratio > best:
            best, witness = ratio, f
    return OperatorNormEstimate(best, upper, witness)


_IMAGE_GRID = np.concatenate([np.geomspace(1e-14, 1e-2, 300), np.linspace(1e-2, 1.0, 200)[1:]])


def _witness_ratio(space: SpaceSpec, f: StepProfile, operator: str, a: float) -> float:
    nf = ri_norm(space, f)
    if nf == 0:
        return 0.0
    tf = hardy_transform(f, operator, a)
    grid = np.unique(np.concatenate([_IMAGE_GRID, f.breaks]))
    # T f is non-increasing, so its value at the right end of each cell is a minorant
    vals = np.minimum.accumulate(np.maximum(tf(grid), 0.0))
    return ri_norm(space, StepProfile.canonical(grid, vals)) / nf


def witness_ratio(space: SpaceSpec, witness: StepProfile, operator: str = "Q", a: float = 0.0) -> float:
    """Recompute the ratio recorded as an operator-norm lower estimate."""
    return _witness_ratio(space, witness, operator, a)


# ---------------------------------------------------------------------------
# Boyd indices


class BoydIndices(NamedTuple):
    lower: float
    upper: float
    method: str


BOYD_SPREAD = 0.05


def _extrapolate(js: np.ndarray, ratios: np.ndarray) -> tuple[float, float]:
    """Limit of ``ratios`` as ``j -> inf`` under ``alpha + A ln(j)/j + B/j + C/j^2``.

    Returns the estimate from the full tail and the spread against a fit that
    drops the quadratic term on the last half of the points.
    """
    design = np.column_stack([np.ones_like(js), np.log(js) / js, 1.0 / js, 1.0 / js ** 2])
    full = np.linalg.lstsq(design, ratios, rcond=None)[0][0]
    half = js >= js[len(js) // 2]
    short = np.linalg.lstsq(design[half, :3], ratios[half], rcond=None)[0][0]
    return float(full), float(abs(full - short))


def boyd_indices(space: SpaceSpec, method: str = "auto") -> BoydIndices:
    """Lower and upper Boyd indices.

    ``method="auto"`` uses closed forms for Lp and Lorentz spaces; otherwise
    ``ln h(r) / ln r`` is sampled at ``r = 2^{-j}`` and ``2^{j}``, ``j = 1..20``,
    and extrapolated to ``j = inf``.
    """
    alpha = _power_exponent(space)
    if method == "auto" and isinstance(space, (Lp, LorentzPQ)):
        return BoydIndices(alpha, alpha, "closed_form")
    if method not in ("auto", "numeric"):
        raise ValueError("method must be 'auto' or 'numeric'")
    js = np.arange(1, 21, dtype=float)
    small = np.array([log(_h_numeric(space, 2.0 ** -j)) / log(2.0 ** -j) for j in js])
    large = np.array([log(_h_numeric(space, 2.0 ** j)) / log(2.0 ** j) for j in js])
    tail = js >= 5
    lo, lo_spread = _extrapolate(js[tail], small[tail])
    hi, hi_spread = _extrapolate(js[tail], large[tail])
    spread = max(lo_spread, hi_spread)
    if spread > BOYD_SPREAD:
        raise BoydEstimateError(f"Boyd index extrapolation unstable (spread {spread:.3g})")
    if lo > hi:
        lo, hi = hi, lo
    return BoydIndices(float(np.clip(lo, 0, 1)), float(np.clip(hi, 0, 1)), "numeric")


def _h_numeric(space: SpaceSpec, r: float) -> float:
    """Test-profile estimate of ``h_X(r)`` regardless of closed forms."""
    if isinstance(space, (Lp, LorentzPQ, LorentzLambda, Marcinkiewicz)):
        # indicators attain the supremum here; fundamental functions are exact
        cs = INDICATOR_GRID
        num = fundamental_function(space, np.minimum(cs * r, 1.0))
        return float(np.max(num / fundamental_function(space, cs)))
    return _indicator_family_h(space, r)


def _indicator_family_h(space: SpaceSpec, r: float) -> float:
    cs = INDICATOR_GRID
    phi_c = np.asarray(fundamental_function(space, cs))
    phi_rc = np.asarray(fundamental_function(space, np.minimum(cs * r, 1.0)))
    return float(np.max(phi_rc / phi_c))
