"""k-space building blocks of the characteristic system.

    T_n(k)     = 2 int_0^inf K_B(t) t^n / (1 + k^2 t^2) dt
    L(k)       = 1 - int K_B(t) / (1 + k^2 t^2) dt = k^2 T_2(k)
    J(k, k1)   = 2 int_0^inf K_B(t) t   / ((1 + k^2 t^2)(1 + k1^2 t^2)) dt
    J5(k, k1)  = same with t^5
    S(k, k1)   = k1^2 [J5(k, k1) - T_3(k) T_3(k1) / T_1(0)]
    phi0(k)    = [T_2(0) T_3(k) - T_1(0) T_4(k)] / T_1(0)
    E0(k)      = phi0(k) / T_2(k)

All functions depend on ``k`` only through ``k**2``; negative arguments are
folded with ``abs``.  The t-integrals use one frozen quadrature rule adapted
to the whole Lorentzian family up to ``k_max``, so grid tensors are plain
matrix products.  Arguments beyond ``k_max`` fall back to adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import OscillatoryTolerance, QuadratureFailure
from .kernel import KernelContext, kernel_eval, log_one_minus_exp
from .quadrature import (
    QuadratureSpec,
    integrate_finite,
    integrate_semi_infinite,
    semi_infinite_rule,
)

FOURIER_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=50000)

__all__ = ["SpectralGrid", "SpectralFunctions", "SpectralTable", "far_rule"]

FAR_K = 1e4  # exact samples of the densities run out to here


@dataclass(frozen=True)
class SpectralGrid:
    """Composite Gauss-Legendre nodes on ``[0, k_max]``.

    One panel covers ``[0, k_min]``; the rest are geometric up to ``k_max``,
    so nodes are dense near the origin.
    """

    nodes: np.ndarray
    weights: np.ndarray
    k_min: float
    k_max: float

    @classmethod
    def geometric(cls, n_nodes: int = 200, k_min: float = 1e-3,
                  k_max: float = 200.0, per_panel: int = 10) -> "SpectralGrid":
        if n_nodes % per_panel:
            raise ValueError("n_nodes must be a multiple of per_panel")
        n_panels = n_nodes // per_panel
        if n_panels < 2 or not 0.0 < k_min < k_max:
            raise ValueError("need at least two panels and 0 < k_min < k_max")
        edges = np.concatenate([[0.0], np.geomspace(k_min, k_max, n_panels)])
        x, w = leggauss(per_panel)
        lo, hi = edges[:-1, None], edges[1:, None]
        nodes = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
        weights = (0.5 * (hi - lo) * w).ravel()
        nodes.flags.writeable = False
        weights.flags.writeable = False
        return cls(nodes, weights, k_min, k_max)

    def refined(self) -> "SpectralGrid":
        """Twice the nodes and twice ``k_max``."""
        per_panel = 10
        return SpectralGrid.geometric(2 * self.nodes.size, self.k_min,
                                      2.0 * self.k_max, per_panel)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values) @ self.weights

    def __len__(self) -> int:
        return self.nodes.size


class SpectralFunctions:
    """T_n, L, J, J5, S, phi0 and E0 for one kernel context."""

    def __init__(self, ctx: KernelContext, k_max: float = 200.0,
                 quad: QuadratureSpec | None = None):
        self.ctx = ctx
        self.quad = quad or ctx.quad
        self.k_max = float(k_max)
        self._soft = ctx.alpha > -1.0
        probes = np.concatenate([[0.0], np.geomspace(1e-2, self.k_max, 24)])
        powers = np.arange(6)
        K0 = 2.0 * abs(ctx.l0)

        def family(t):
            ker = log_one_minus_exp(ctx.alpha - t * t) / -K0 * 2.0
            lor = 1.0 / (1.0 + np.outer(probes * probes, t * t))
            tp = t[None, :] ** powers[:, None]
            return (tp[:, None, :] * lor[None, :, :]).reshape(-1, t.size) * ker

        # rule tolerance is decoupled from the caller's: the frozen rule feeds
        # identities checked to 1e-8 and must sit well below that
        rule_spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12,
                                   max_subdivisions=20000)
        t, w = semi_infinite_rule(family, rule_spec, soften_origin=self._soft)
        self.t = t
        self.wK = 2.0 * w * kernel_eval(t, ctx)  # 2 K_B(t) dt
        self.T10 = float(self.wK @ t)
        self.T20 = float(self.wK @ (t * t))

    # -- elementary transforms -------------------------------------------
    def _lor(self, k):
        k = np.abs(np.asarray(k, dtype=float))
        return 1.0 / (1.0 + np.multiply.outer(k * k, self.t * self.t))

    def _in_rule(self, k) -> bool:
        return bool(np.all(np.abs(np.asarray(k)) <= self.k_max * (1 + 1e-12)))

    def T(self, n: int, k):
        """T_n(k), vectorised over ``k``."""
        if n not in range(6):
            raise ValueError(f"T_n defined here for n in 0..5, got {n}")
        k = np.asarray(k, dtype=float)
        if not self._in_rule(k):
            out = np.vectorize(lambda kk: self.T_direct(n, kk))(k)
            return out if out.ndim else float(out)
        out = self._lor(k) @ (self.wK * self.t ** n)
        return out if out.ndim else float(out)

    def T_direct(self, n: int, k: float) -> float:
        """T_n(k) by adaptive quadrature of the defining integral."""
        k = abs(float(k))
        ctx = self.ctx
        pts = [1.0 / k] if k > 1.0 else []
        return 2.0 * integrate_semi_infinite(
            lambda t: kernel_eval(t, ctx) * t ** n / (1.0 + (k * t) ** 2),
            self.quad, soften_origin=self._soft, points=pts)

    def L(self, k):
        """L(k) in its pole-explicit form k^2 T_2(k)."""
        k = np.asarray(k, dtype=float)
        return k * k * self.T(2, k)

    def L_direct(self, k: float) -> float:
        """L(k) = 1 - int K_B(t) / (1 + k^2 t^2) dt over the real line."""
        return 1.0 - self.T_direct(0, k)

    def _pair(self, k, k1, weight):
        k, k1 = np.asarray(k, dtype=float), np.asarray(k1, dtype=float)
        if not (self._in_rule(k) and self._in_rule(k1)):
            raise ValueError(f"J tensors are tabulated only for |k| <= {self.k_max}")
        out = (self._lor(k) * weight) @ self._lor(k1).T
        return out if out.ndim else float(out)

    def J(self, k, k1):
        """J(k, k1) on the outer product of ``k`` and ``k1``."""
        return self._pair(k, k1, self.wK * self.t)

    def J5(self, k, k1):
        return self._pair(k, k1, self.wK * self.t ** 5)

    def J_direct(self, k: float, k1: float, power: int = 1) -> float:
        k, k1 = abs(float(k)), abs(float(k1))
        ctx = self.ctx
        pts = [1.0 / x for x in (k, k1) if x > 1.0]
        return 2.0 * integrate_semi_infinite(
            lambda t: kernel_eval(t, ctx) * t ** power
            / ((1.0 + (k * t) ** 2) * (1.0 + (k1 * t) ** 2)),
            self.quad, soften_origin=self._soft, points=pts)

    def S(self, k, k1):
        """Regularised coupling S(k, k1) on the outer product."""
        k, k1 = np.asarray(k, dtype=float), np.asarray(k1, dtype=float)
        outer_T3 = np.multiply.outer(self.T(3, k), self.T(3, k1)) / self.T10
        return k1 * k1 * (self.J5(k, k1) - outer_T3)

    # -- zeroth order ------------------------------------------------------
    @property
    def U0(self) -> float:
        return self.T20 / self.T10

    def phi0(self, k):
        # cancelled form; never (T2 - U0 T1)/L near k = 0
        return (self.T20 * self.T(3, k) - self.T10 * self.T(4, k)) / self.T10

    def E0(self, k):
        return self.phi0(k) / self.T(2, k)

    def E0_raw(self, k):
        """(T_2(k) - U_0 T_1(k)) / L(k); loses digits as k -> 0."""
        return (self.T(2, k) - self.U0 * self.T(1, k)) / self.L(k)


# -- dense tables with an analytic large-k tail ---------------------------

# (power of ln k, power of 1/k) for each tail term
_TAIL_TERMS = ((2, 2), (1, 2), (0, 2), (3, 3), (2, 3), (1, 3), (0, 3))


def _tail_basis(k):
    k = np.asarray(k, dtype=float)
    lk = np.log(k)
    return np.stack([lk**m / k**p for m, p in _TAIL_TERMS])


def _tail_integrals(K: float) -> np.ndarray:
    """Integrals of the tail basis over [K, inf).

    I(m, p) = ln^m K / ((p-1) K^(p-1)) + m/(p-1) I(m-1, p).
    """
    lK = math.log(K)

    def I(m, p):
        head = lK**m / ((p - 1) * K ** (p - 1))
        return head if m == 0 else head + m / (p - 1) * I(m - 1, p)
    return np.array([I(m, p) for m, p in _TAIL_TERMS])


def far_rule(k_from: float, k_to: float, n_panels: int = 12, per_panel: int = 10):
    """Gauss-Legendre nodes and weights on geometric panels over [k_from, k_to]."""
    edges = np.geomspace(k_from, k_to, n_panels + 1)
    x, w = leggauss(per_panel)
    lo, hi = edges[:-1, None], edges[1:, None]
    return ((0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel(),
            (0.5 * (hi - lo) * w).ravel())


class SpectralTable:
    """A k-space density sampled densely on ``[0, k_max]`` plus a tail.

    Below ``k_max`` values come from a cubic spline through exact samples.
    Optionally exact samples on a Gauss rule over ``[k_max, k_far]`` carry the
    non-oscillatory integrals further out.  Beyond the data, a polynomial in
    ln k over k^2 (degree 2) and over k^3 (degree 3) is fitted by least
    squares to the far samples, or to the last decade of the table.
    The density is even in ``k``.
    """

    def __init__(self, k: np.ndarray, values: np.ndarray, far=None):
        # far: (nodes, weights, values, upper edge) of the exact far samples
        from scipy.interpolate import CubicSpline

        k = np.asarray(k, dtype=float)
        values = np.asarray(values, dtype=float)
        if k[0] != 0.0 or np.any(np.diff(k) <= 0.0):
            raise ValueError("table abscissae must start at 0 and increase")
        self.k = k
        self.values = values
        self.k_max = float(k[-1])
        self._spline = CubicSpline(k, values, bc_type=((1, 0.0), "not-a-knot"))
        if far is None:
            self.far = None
            self.k_far = self.k_max
            sel = k >= 0.1 * self.k_max
            fit_k, fit_v = k[sel], values[sel]
        else:
            fk, fw, fv = (np.asarray(a, dtype=float) for a in far[:3])
            self.far = (fk, fw, fv)
            self.k_far = float(far[3])
            fit_k, fit_v = fk, fv
        A = _tail_basis(fit_k).T
        scale = np.abs(A).max(axis=0)
        coeff, *_ = np.linalg.lstsq(A / scale, fit_v, rcond=None)
        self.tail_coeff = coeff / scale

    def __call__(self, k):
        k = np.abs(np.asarray(k, dtype=float))
        inside = k <= self.k_max
        out = np.empty_like(k)
        out[inside] = self._spline(k[inside])
        if np.any(~inside):
            out[~inside] = self.tail_coeff @ _tail_basis(k[~inside])
        return out if out.ndim else float(out)

    def tail_lorentz(self, mu=0.0):
        """int_{k_max}^inf E(k) / (1 + k^2 mu^2) dk, vectorised over ``mu``."""
        mu = np.atleast_1d(np.abs(np.asarray(mu, dtype=float)))
        c = self.tail_coeff
        start = self.k_max
        total = np.zeros_like(mu)
        if self.far is not None:
            fk, fw, fv = self.far
            total += (fw * fv) @ (1.0 / (1.0 + np.multiply.outer(fk * fk, mu * mu)))
            start = self.k_far
        if np.all(mu == 0.0):
            return total + float(c @ _tail_integrals(start))

        def f(kk):
            return (c @ _tail_basis(kk))[None, :] / (1.0 + np.multiply.outer(mu * mu, kk * kk))
        return total + integrate_semi_infinite(f, FOURIER_SPEC, a=start)

    def tail_integral(self) -> float:
        return float(self.tail_lorentz(0.0)[0])

    def tail_cosine(self, x: float) -> float:
        """Integral of cos(kx) times the tail over [k_max, inf)."""
        if x == 0.0:
            return self.tail_integral()
        from scipy.integrate import quad

        def model(k):
            return float(self.tail_coeff @ _tail_basis(np.array([k]))[:, 0])

        # QUADPACK QAWF: Fourier integral over a semi-infinite range
        val, _ = quad(model, self.k_max, np.inf, weight="cos", wvar=x, limlst=200)
        return float(val)

    def cosine_zeros(self, x: float) -> np.ndarray:
        """Zeros of cos(kx) inside (0, k_max)."""
        if x <= 0.0:
            return np.empty(0)
        j = np.arange(int(self.k_max * x / math.pi + 0.5) + 1)
        z = (j + 0.5) * math.pi / x
        return z[z < self.k_max]

    def cosine_transform(self, x: float, spec: QuadratureSpec = FOURIER_SPEC) -> float:
        """int_0^inf cos(kx) E(k) dk: panels between zeros of cos(kx) up to
        k_max, fitted tail beyond."""
        x = abs(float(x))
        if x == 0.0:
            head = float(self._spline.integrate(0.0, self.k_max))
        else:
            pts = np.union1d(self.k[1:-1], self.cosine_zeros(x))
            try:
                head = integrate_finite(lambda k: self._spline(k) * np.cos(k * x),
                                        0.0, self.k_max, spec, points=pts)
            except QuadratureFailure as exc:
                raise OscillatoryTolerance(f"cosine transform at x={x}: {exc}") from exc
        return head + self.tail_cosine(x)

    @staticmethod
    def combine(tables, coeffs) -> "SpectralTable":
        """Linear combination sum_n c_n E_n on a shared abscissa."""
        tables = list(tables)
        k = tables[0].k
        if any(t.k.shape != k.shape or np.any(t.k != k) for t in tables):
            raise ValueError("tables must share abscissae")
        vals = sum(c * t.values for c, t in zip(coeffs, tables))
        far = None
        if tables[0].far is not None:
            fk, fw, _ = tables[0].far
            far = (fk, fw, sum(c * t.far[2] for c, t in zip(coeffs, tables)),
                   tables[0].k_far)
        return SpectralTable(k, vals, far)
