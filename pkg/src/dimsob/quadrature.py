"""Quadrature against the logarithmic weights ``w_k(t) = 1 / (t L(t)^{1 - k/2})``.

``L(t)`` is ``ln(1/t)`` (variant ``"ln"``) or ``1 + ln(1/t)`` (variant
``"one_plus_ln"``).  With ``t = exp(-u^2)`` we get ``dt/t = 2u du`` and

* ``ln``:          ``w_k(t) dt = 2 u^{k-1} du``
* ``one_plus_ln``: ``w_k(t) dt = 2 u (1 + u^2)^{k/2 - 1} du``

so both the endpoint at ``t = 0`` (now ``u = inf``, reached through a
Gaussian-type decay of the integrand) and the ``(ln 1/t)^{-1/2}`` blow-up
at ``t = 1`` (now ``u = 0``) disappear.  The transformed integrand is
integrated with composite Gauss-Legendre panels whose edges sit on the
images of the profile breakpoints, where the integrand has kinks.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

VARIANTS = ("ln", "one_plus_ln")

GL_ORDER = 20
MAX_PANEL = 0.25
U_MAX = 60.0
ALIGN_LIMIT = 4096
NEGLIGIBLE = 1e-17

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


class QuadratureError(RuntimeError):
    pass


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown weight variant {variant!r}; expected one of {VARIANTS}")


def u_of_t(t):
    """``sqrt(ln(1/t))``; maps (0, 1] onto [0, inf)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return np.sqrt(np.maximum(-np.log(t), 0.0))


def t_of_u(u):
    u = np.asarray(u, dtype=float)
    return np.exp(-u * u)


def weight(t, k: int, variant: str = "ln"):
    """``w_k(t)`` itself, for point evaluations and tests."""
    _check_variant(variant)
    t = np.asarray(t, dtype=float)
    z = -np.log(t)
    if variant == "one_plus_ln":
        z = 1.0 + z
    return 1.0 / (t * z ** (1.0 - k / 2.0))


def u_kernel(u, k: int, variant: str = "ln"):
    """Jacobian-transformed weight: ``w_k(t(u)) |dt/du|``."""
    _check_variant(variant)
    u = np.asarray(u, dtype=float)
    if variant == "ln":
        return 2.0 * u ** (k - 1)
    return 2.0 * u * (1.0 + u * u) ** (k / 2.0 - 1.0)


def weight_tail(t, k: int, variant: str = "ln"):
    """``W_k(t) = int_t^1 w_k(s) ds`` in closed form (``+inf`` at ``t = 0``)."""
    _check_variant(variant)
    z = u_of_t(t) ** 2
    if variant == "ln":
        return (2.0 / k) * z ** (k / 2.0)
    # int_0^z (1 + y)^{k/2 - 1} dy after y = ln(1/s)
    return (2.0 / k) * ((1.0 + z) ** (k / 2.0) - 1.0)


def step_weight_integrals(lefts, rights, k: int, variant: str = "ln"):
    """``int_a^b w_k`` for each step ``[a, b)``; ``+inf`` where ``a == 0``."""
    lefts = np.asarray(lefts, dtype=float)
    rights = np.asarray(rights, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.asarray(weight_tail(lefts, k, variant)) - np.asarray(weight_tail(rights, k, variant))


def _gauss_panels(func: Callable, edges: np.ndarray) -> np.ndarray:
    """Per-panel Gauss-Legendre integrals of ``func`` over consecutive edges."""
    return _gauss_panels_ab(func, edges[:-1], edges[1:])


def _subdivide(edges: np.ndarray, max_width: float) -> np.ndarray:
    widths = np.diff(edges)
    pieces = np.maximum(1, np.ceil(widths / max_width).astype(int))
    if np.all(pieces == 1):
        return edges
    out = [np.linspace(edges[i], edges[i + 1], pieces[i] + 1)[:-1] for i in range(widths.size)]
    return np.concatenate(out + [edges[-1:]])


def _halve(edges: np.ndarray) -> np.ndarray:
    mids = (edges[:-1] + edges[1:]) / 2
    out = np.empty(edges.size + mids.size)
    out[0::2] = edges
    out[1::2] = mids
    return out


def _transformed(psi: Callable, k: int, variant: str) -> Callable:
    def g(u):
        vals = np.asarray(psi(t_of_u(u)), dtype=float)
        return vals * u_kernel(u, k, variant)

    return g


def _cutoff(g: Callable, u_lo: float) -> float:
    """Smallest grid point beyond which the transformed integrand is negligible."""
    grid = np.arange(u_lo, U_MAX + MAX_PANEL, MAX_PANEL)
    vals = np.abs(g(grid))
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand is not finite on the probe grid")
    peak = vals.max()
    if peak == 0.0:
        return u_lo
    big = np.flatnonzero(vals > NEGLIGIBLE * peak)
    last = big[-1]
    if last >= grid.size - 2:
        raise QuadratureError("integrand does not decay before the cutoff; the integral is likely infinite")
    return float(grid[last + 1])


def _knot_edges(knots_t, u_lo: float, u_hi: float) -> np.ndarray:
    if knots_t is None:
        return np.array([u_lo, u_hi])
    ku = u_of_t(np.asarray(knots_t, dtype=float))
    ku = ku[(ku > u_lo) & (ku < u_hi)]
    if ku.size > ALIGN_LIMIT:
        return np.linspace(u_lo, u_hi, ALIGN_LIMIT + 1)
    return np.unique(np.concatenate([[u_lo, u_hi], ku]))


def log_weight_integral(
    psi: Callable,
    k: int = 1,
    variant: str = "ln",
    upper: float = 1.0,
    knots_t=None,
    rtol: float = 1e-10,
    max_refine: int = 6,
) -> float:
    """``int_0^upper psi(t) w_k(t) dt`` for a vectorized ``psi``.

    ``knots_t`` lists the points of (0, upper) where ``psi`` fails to be smooth.
    Panels are halved until two successive estimates agree to ``rtol``.
    """
    _check_variant(variant)
    if not 0.0 < upper <= 1.0:
        raise ValueError("upper limit must lie in (0, 1]")
    u_lo = float(u_of_t(upper))
    g = _transformed(psi, k, variant)
    u_hi = _cutoff(g, u_lo)
    if u_hi == u_lo:
        return 0.0
    edges = _subdivide(_knot_edges(knots_t, u_lo, u_hi), MAX_PANEL)
    return _adaptive(g, edges, rtol, max_refine)


def _adaptive(g: Callable, edges: np.ndarray, rtol: float, max_refine: int) -> float:
    """Split only the panels whose halves disagree with the parent estimate.

    Panels are settled once their two-level error is small against the running
    total; ``max_refine`` counts rounds without global progress beyond the first
    halving and is scaled up because each round now touches few panels.
    """
    a, b = edges[:-1], edges[1:]
    coarse = _gauss_panels(g, edges)
    settled = settled_err = 0.0
    change = np.inf
    for _ in range(4 * max_refine + 8):
        mid = (a + b) / 2
        left = _gauss_panels_ab(g, a, mid)
        right = _gauss_panels_ab(g, mid, b)
        fine = left + right
        if not np.all(np.isfinite(fine)):
            raise QuadratureError("non-finite quadrature estimate")
        err = np.abs(fine - coarse)
        total = settled + fine.sum()
        change = err.sum() + settled_err
        if change <= rtol * abs(total) or total == 0.0 and change == 0.0:
            return float(total)
        # panels whose share of the error is negligible are frozen
        share = rtol * abs(total) / (4.0 * err.size)
        done = err <= share
        settled += fine[done].sum()
        settled_err += err[done].sum()
        keep = ~done
        a = np.concatenate([a[keep], mid[keep]])
        b = np.concatenate([mid[keep], b[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
    raise QuadratureError(f"no convergence to rtol={rtol:g} (last change {change:.3e})")


def _gauss_panels_ab(func: Callable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size == 0:
        return np.zeros(0)
    mid, half = (a + b) / 2, (b - a) / 2
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    vals = np.asarray(func(nodes), dtype=float).reshape(a.size, GL_ORDER)
    return half * (vals @ _GL_W)


def cumulative_log_weight_integral(
    psi: Callable,
    t_query,
    k: int = 1,
    variant: str = "ln",
    knots_t=None,
    rtol: float = 1e-10,
    max_refine: int = 6,
) -> np.ndarray:
    """``int_0^{t_q} psi(t) w_k(t) dt`` for every ``t_q`` in ``t_query``."""
    _check_variant(variant)
    tq = np.asarray(t_query, dtype=float)
    flat = tq.ravel()
    if np.any(flat <= 0) or np.any(flat > 1):
        raise ValueError("query points must lie in (0, 1]")
    uq = u_of_t(flat)
    g = _transformed(psi, k, variant)
    u_lo = float(uq.min())
    u_hi = max(_cutoff(g, u_lo), float(uq.max()) + MAX_PANEL)
    base = _knot_edges(knots_t, u_lo, u_hi)
    base = np.unique(np.concatenate([base, uq]))
    edges = _subdivide(base, MAX_PANEL)

    def evaluate(edges):
        panels = _gauss_panels(g, edges)
        suffix = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]])
        return suffix[np.searchsorted(edges, uq)]

    prev = evaluate(edges)
    for _ in range(max_refine):
        edges = _halve(edges)
        cur = evaluate(edges)
        scale = np.max(np.abs(cur))
        if np.max(np.abs(cur - prev)) <= rtol * scale or scale == 0.0:
            return cur.reshape(tq.shape)
        prev = cur
    raise QuadratureError(f"cumulative quadrature did not reach rtol={rtol:g}")
