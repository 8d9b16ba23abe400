"""Deterministic adaptive Gauss-Kronrod quadrature.

Every integral in the package goes through this module.  The engine is a
globally adaptive 21-point Gauss-Kronrod scheme that bisects the intervals
carrying the largest error until the summed estimate meets
``max(abs_tol, rel_tol * |I|)``.  Integrands must be vectorised: they receive
a 1-D array of abscissae and return either an array of the same length or a
2-D array ``(p, m)`` for ``p`` simultaneous integrands.

Semi-infinite and whole-line integrals are folded onto a finite parameter
interval ``[0, 2]`` so that one global error budget covers the whole range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Literal

import numpy as np

from .errors import (
    NonFiniteIntegrand,
    PoleTooCloseToBoundary,
    ToleranceNotReached,
)

# Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21).
_XK = np.array([
    -0.995657163025808080735527280689003, -0.973906528517171720077964012084452,
    -0.930157491355708226001207180059508, -0.865063366688984510732096688423493,
    -0.780817726586416897063717578345042, -0.679409568299024406234327365114874,
    -0.562757134668604683339000099272694, -0.433395394129247190799265943165784,
    -0.294392862701460198131126603103866, -0.148874338981631210884826001129720,
    0.0,
    0.148874338981631210884826001129720, 0.294392862701460198131126603103866,
    0.433395394129247190799265943165784, 0.562757134668604683339000099272694,
    0.679409568299024406234327365114874, 0.780817726586416897063717578345042,
    0.865063366688984510732096688423493, 0.930157491355708226001207180059508,
    0.973906528517171720077964012084452, 0.995657163025808080735527280689003,
])
_WK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
    0.147739104901338491374841515972068, 0.142775938577060080797094273138717,
    0.134709217311473325928054001771707, 0.123491976262065851077958109831074,
    0.109387158802297641899210590325805, 0.093125454583697605535065465083366,
    0.075039674810919952767043140916190, 0.054755896574351996031381300244580,
    0.032558162307964727478818972459390, 0.011694638867371874278064396062192,
])
_WG = np.zeros(21)
_WG[1::2] = [
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338, 0.295524224714752870173892994651338,
    0.269266719309996355091226921569469, 0.219086362515982043995534934228163,
    0.149451349150580593145776339657697, 0.066671344308688137593568809893332,
]
_EPS = np.finfo(float).eps

TailPolicy = Literal["mapped", "fixed"]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits shared by every integral.

    ``tail_policy="mapped"`` sends ``[a+1, inf)`` to a finite interval via
    ``t = a + 1/s``; ``"fixed"`` truncates the range at ``tail_cutoff``.
    ``pv_window`` is the half-width of the symmetric subtraction window used
    for Cauchy principal values.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_subdivisions: int = 5000
    tail_policy: TailPolicy = "mapped"
    tail_cutoff: float = 9.0
    pv_window: float = 0.5

    def __post_init__(self) -> None:
        for name in ("abs_tol", "rel_tol"):
            v = getattr(self, name)
            if not (0.0 < v <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {v!r}")
        if self.max_subdivisions < 8:
            raise ValueError("max_subdivisions must be >= 8")
        if self.tail_policy not in ("mapped", "fixed"):
            raise ValueError(f"unknown tail policy {self.tail_policy!r}")
        if not self.pv_window > 0.0:
            raise ValueError("pv_window must be positive")
        if not self.tail_cutoff > 0.0:
            raise ValueError("tail_cutoff must be positive")

    def refined(self, factor: float = 2.0) -> "QuadratureSpec":
        """Same spec with both tolerances divided by ``factor``."""
        return replace(self, abs_tol=self.abs_tol / factor,
                       rel_tol=self.rel_tol / factor)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray | float
    error: np.ndarray | float
    edges: np.ndarray  # final partition of the parameter interval


def _gk21(f: Callable, lo: np.ndarray, hi: np.ndarray):
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * _XK[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float)
    if not np.all(np.isfinite(fx)):
        bad = x.ravel()[~np.isfinite(fx).reshape(-1, x.size).all(axis=0)]
        raise NonFiniteIntegrand(f"integrand not finite at t = {bad[:4]!r}")
    fx = fx.reshape(fx.shape[:-1] + x.shape)
    kron = h * (fx @ _WK)
    gauss = h * (fx @ _WG)
    mean = kron / np.where(h == 0.0, 1.0, 2.0 * h)
    resasc = h * (np.abs(fx - mean[..., None]) @ _WK)
    resabs = h * (np.abs(fx) @ _WK)
    diff = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0.0,
                          resasc * np.minimum(1.0, (200.0 * diff / resasc) ** 1.5),
                          diff)
    err = np.maximum(scaled, 50.0 * _EPS * resabs)
    return kron, err


def _adapt(f: Callable, a: float, b: float, spec: QuadratureSpec,
           points: Iterable[float] = ()) -> QuadResult:
    inner = sorted({float(p) for p in points if a < p < b})
    edges = np.array([a, *inner, b], dtype=float)
    lo, hi = edges[:-1], edges[1:]
    vals, errs = _gk21(f, lo, hi)
    while True:
        total = vals.sum(axis=-1)
        err = errs.sum(axis=-1)
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
        if np.all(err <= tol):
            break
        bad = errs / np.atleast_1d(tol)[..., None] if errs.ndim > 1 else errs / tol
        if bad.ndim > 1:
            bad = bad.max(axis=0)
        splittable = (hi - lo) > 64.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        bad = np.where(splittable, bad, 0.0)
        order = np.argsort(-bad, kind="stable")
        remaining = np.sum(bad) - np.cumsum(bad[order])
        n_split = int(np.searchsorted(-remaining, -0.5, side="right")) + 1
        n_split = min(n_split, int(np.count_nonzero(bad)))
        room = spec.max_subdivisions - lo.size
        if n_split == 0 or room <= 0:
            raise ToleranceNotReached(
                f"error estimate {np.max(err):.3e} above tolerance "
                f"{np.min(tol):.3e} after {lo.size} subintervals")
        sel = np.sort(order[:min(n_split, room)])
        mid = 0.5 * (lo[sel] + hi[sel])
        new_lo = np.concatenate([lo[sel], mid])
        new_hi = np.concatenate([mid, hi[sel]])
        nv, ne = _gk21(f, new_lo, new_hi)
        keep = np.ones(lo.size, dtype=bool)
        keep[sel] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[..., keep], nv], axis=-1)
        errs = np.concatenate([errs[..., keep], ne], axis=-1)
        srt = np.argsort(lo, kind="stable")
        lo, hi, vals, errs = lo[srt], hi[srt], vals[..., srt], errs[..., srt]
    value = vals.sum(axis=-1)
    error = errs.sum(axis=-1)
    if np.ndim(value) == 0:
        value, error = float(value), float(error)
    return QuadResult(value, error, np.append(lo, hi[-1]))


def integrate_finite(f: Callable, a: float, b: float,
                     spec: QuadratureSpec = DEFAULT_SPEC,
                     points: Iterable[float] = ()):
    """Integrate ``f`` over ``[a, b]``; integrable endpoint singularities allowed."""
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"need finite a < b, got [{a}, {b}]")
    return _adapt(f, a, b, spec, points).value


class _HalfLineMap:
    """Map u in [0, 2] onto t in [a, inf) (or [a, cutoff] for fixed tails)."""

    def __init__(self, a: float, spec: QuadratureSpec, soften_origin: bool):
        self.a = a
        self.soft = soften_origin
        self.fixed = spec.tail_policy == "fixed"
        self.stop = max(spec.tail_cutoff, a + 1.0)

    def t_and_jac(self, u: np.ndarray):
        head = u <= 1.0
        t = np.empty_like(u)
        jac = np.empty_like(u)
        uh = u[head]
        if self.soft:
            t[head] = self.a + uh * uh
            jac[head] = 2.0 * uh
        else:
            t[head] = self.a + uh
            jac[head] = 1.0
        ut = u[~head] - 1.0
        if self.fixed:
            span = self.stop - self.a - 1.0
            t[~head] = self.a + 1.0 + ut * span
            jac[~head] = span
        else:
            s = 1.0 - ut
            t[~head] = self.a + 1.0 / s
            jac[~head] = 1.0 / (s * s)
        return t, jac

    def u_of_t(self, t: float) -> float:
        d = t - self.a
        if d <= 1.0:
            return math.sqrt(d) if self.soft else d
        if self.fixed:
            return 1.0 + (d - 1.0) / (self.stop - self.a - 1.0)
        return 2.0 - 1.0 / d


def _half_line(f: Callable, a: float, spec: QuadratureSpec,
               soften_origin: bool, points: Iterable[float]) -> QuadResult:
    m = _HalfLineMap(a, spec, soften_origin)

    def g(u):
        t, jac = m.t_and_jac(u)
        return np.asarray(f(t), dtype=float) * jac

    upper = 2.0
    if m.fixed and m.stop <= a + 1.0:
        upper = 1.0
    pts = [1.0] + [m.u_of_t(p) for p in points if p > a and (not m.fixed or p < m.stop)]
    return _adapt(g, 0.0, upper, spec, pts)


def integrate_semi_infinite(f: Callable, spec: QuadratureSpec = DEFAULT_SPEC,
                            a: float = 0.0, soften_origin: bool = False,
                            points: Iterable[float] = ()):
    """Integrate ``f`` over ``[a, inf)``.

    The range is split at ``a + 1``.  With ``soften_origin`` the head
    ``[a, a+1]`` is integrated in ``s`` with ``t = a + s**2``, which turns a
    logarithmic endpoint singularity into a bounded integrand.
    """
    return _half_line(f, float(a), spec, soften_origin, points).value


def integrate_whole_line(f: Callable, spec: QuadratureSpec = DEFAULT_SPEC,
                         soften_origin: bool = False,
                         points: Iterable[float] = ()):
    """Integrate ``f`` over the real line by folding onto ``[0, inf)``."""
    return integrate_semi_infinite(
        lambda t: np.asarray(f(t), dtype=float) + np.asarray(f(-t), dtype=float),
        spec, 0.0, soften_origin, [abs(p) for p in points])


def adaptive_rule(f: Callable, a: float, b: float,
                  spec: QuadratureSpec = DEFAULT_SPEC,
                  points: Iterable[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Adapt on ``f`` and return the Kronrod nodes/weights of the final partition.

    The frozen rule integrates anything with the same features as ``f``
    (typically a family of integrands) by a plain weighted sum.
    """
    edges = _adapt(f, a, b, spec, points).edges
    lo, hi = edges[:-1], edges[1:]
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    nodes = (c[:, None] + h[:, None] * _XK[None, :]).ravel()
    weights = (h[:, None] * _WK[None, :]).ravel()
    return nodes, weights


def principal_value(f: Callable, tau: float, spec: QuadratureSpec = DEFAULT_SPEC,
                    a: float = -math.inf, b: float = math.inf,
                    points: Iterable[float] = ()) -> float:
    """Cauchy principal value of the integral of ``f(t) / (t - tau)`` over ``[a, b]``.

    Symmetric subtraction: on ``[tau - w, tau + w]`` the integrand
    ``(f(t) - f(tau)) / (t - tau)`` is regular (the ``f(tau)`` part integrates
    to zero); outside the window the integral is ordinary.  ``points`` lists
    integrable singularities of ``f`` to split at.
    """
    tau = float(tau)
    w = spec.pv_window
    if not math.isfinite(tau):
        raise ValueError("pole location must be finite")
    if tau - w < a or tau + w > b:
        raise PoleTooCloseToBoundary(
            f"window [{tau - w}, {tau + w}] is clipped by the range [{a}, {b}]")
    points = [float(p) for p in points]
    f_tau = float(np.asarray(f(np.array([tau]))).ravel()[0])
    # keep the difference stencil clear of any singular point of f
    gap = min([abs(p - tau) for p in points if p != tau] + [math.inf])
    fd_step = min(1e-5 * max(1.0, abs(tau)), 1e-3 * gap)
    near_tol = min(1e-6, 0.1 * fd_step)
    fd = np.asarray(f(np.array([tau - fd_step, tau + fd_step])), dtype=float)
    slope = (fd[1] - fd[0]) / (2.0 * fd_step)

    def inner(t):
        d = t - tau
        near = np.abs(d) < near_tol
        safe = np.where(near, 1.0, d)
        out = (np.asarray(f(t), dtype=float) - f_tau) / safe
        return np.where(near, slope, out)

    win_pts = [tau] + [p for p in points if abs(p - tau) < w]
    total = _adapt(inner, tau - w, tau + w, spec, win_pts).value

    if math.isinf(a) and math.isinf(b):
        def outer(s):
            return (np.asarray(f(tau + s), dtype=float)
                    - np.asarray(f(tau - s), dtype=float)) / s
        out_pts = [abs(p - tau) for p in points if abs(p - tau) > w]
        total += _half_line(outer, w, spec, False, out_pts).value
        return float(total)

    for lo_, hi_ in ((tau + w, b), (a, tau - w)):
        if hi_ <= lo_:
            continue
        pts = [p for p in points if lo_ < p < hi_]
        if math.isinf(hi_):
            total += _half_line(lambda t: np.asarray(f(t)) / (t - tau),
                                lo_, spec, False, pts).value
        elif math.isinf(lo_):
            total += _half_line(lambda s: np.asarray(f(-s)) / (-s - tau),
                                -hi_, spec, False, [-p for p in pts]).value
        else:
            total += _adapt(lambda t: np.asarray(f(t)) / (t - tau),
                            lo_, hi_, spec, pts).value
    return float(total)


def semi_infinite_rule(f: Callable, spec: QuadratureSpec = DEFAULT_SPEC,
                       a: float = 0.0, soften_origin: bool = False,
                       points: Iterable[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Frozen rule on ``[a, inf)`` adapted to (a family of) integrands ``f``.

    Returns abscissae ``t`` and weights ``w`` such that ``sum(w * g(t))``
    approximates the integral of any ``g`` with the same features as ``f``.
    """
    m = _HalfLineMap(float(a), spec, soften_origin)

    def g(u):
        t, jac = m.t_and_jac(u)
        return np.asarray(f(t), dtype=float) * jac

    upper = 1.0 if (m.fixed and m.stop <= a + 1.0) else 2.0
    pts = [1.0] + [m.u_of_t(p) for p in points if p > a and (not m.fixed or p < m.stop)]
    u, wu = adaptive_rule(g, 0.0, upper, spec, pts)
    t, jac = m.t_and_jac(u)
    return t, wu * jac
