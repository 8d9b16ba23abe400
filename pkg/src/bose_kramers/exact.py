"""Closed-form benchmark for the fully diffuse wall.

    lambda(tau) = 1 + tau PV int K_B(t) / (t - tau) dt
    theta(tau)  = arccot(lambda / (pi tau K_B(tau)))   in (0, pi)
    V_1         = -(1/pi) int_0^inf (theta - pi) dtau

plus the exact wall speed sqrt(l_2 / l_0).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .errors import BranchDiscontinuity
from .kernel import KernelContext, kernel_eval
from .quadrature import integrate_semi_infinite, principal_value

__all__ = [
    "dispersion_lambda",
    "theta",
    "PhaseCurve",
    "phase_curve",
    "V1",
    "exact_wall_speed",
]

TAU_MAX = 12.0


def dispersion_lambda(tau: float, ctx: KernelContext) -> float:
    tau = float(tau)
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    pv = principal_value(lambda t: kernel_eval(t, ctx), tau, ctx.quad, points=(0.0,))
    return 1.0 + tau * pv


def theta(tau: float, ctx: KernelContext) -> float:
    """Boundary phase; atan2 picks the (0, pi) branch of arccot directly."""
    lam = dispersion_lambda(tau, ctx)
    return math.atan2(math.pi * tau * kernel_eval(tau, ctx), lam)


def _lambda_root(ctx: KernelContext) -> float:
    lo, hi = 0.05, 1.0
    while dispersion_lambda(hi, ctx) > 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > TAU_MAX:
            raise BranchDiscontinuity("dispersion function has no sign change")
    return brentq(lambda s: dispersion_lambda(s, ctx), lo, hi, xtol=1e-12)


def _tau_rule(root: float, n_nodes: int, per_panel: int = 10):
    """GL panels, geometric towards 0 and towards the root from both sides."""
    n_panels = n_nodes // per_panel
    if n_panels < 8 or n_nodes % per_panel:
        raise ValueError(f"need a multiple of {per_panel} and at least 8 panels")
    n_left = n_panels // 2
    n_right = n_panels - n_left
    a = n_left // 2
    b = n_left - a
    # [0, 0.5 root]: geometric towards 0; [0.5 root, root] and [root, TAU_MAX]:
    # geometric towards the root
    left0 = np.geomspace(1e-6 * root, 0.5 * root, a)
    left1 = root - np.geomspace(0.5 * root, 1e-3 * root, b)[1:]
    right = root + np.geomspace(1e-3 * root, TAU_MAX - root, n_right)
    edges = np.concatenate([[0.0], left0, left1, [root], right])
    x, w = leggauss(per_panel)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * w).ravel()
    return nodes, weights


@dataclass(frozen=True)
class PhaseCurve:
    alpha: float
    taus: np.ndarray
    weights: np.ndarray
    theta: np.ndarray
    root: float
    tail: float

    @property
    def zeta(self) -> np.ndarray:
        return self.theta - math.pi

    def V1(self) -> float:
        return float(-(self.weights @ self.zeta) / math.pi + self.tail)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "theta", "zeta"])
        for t, th in zip(self.taus, self.theta):
            w.writerow([repr(float(t)), repr(float(th)), repr(float(th - math.pi))])
        return buf.getvalue()


def phase_curve(ctx: KernelContext, n_nodes: int = 400) -> PhaseCurve:
    root = _lambda_root(ctx)
    for attempt in range(2):
        taus, weights = _tau_rule(root, n_nodes * 2**attempt)
        th = np.array([theta(t, ctx) for t in taus])
        if np.all(np.abs(np.diff(th)) <= 0.5 * math.pi):
            break
    else:
        raise BranchDiscontinuity("phase jumps by more than pi/2 between nodes")
    # beyond TAU_MAX: lambda ~ -T_2(0)/tau^2, so -zeta/pi ~ tau^3 K_B / T_2(0)
    T20 = ctx.l2 / ctx.l0
    tail = integrate_semi_infinite(lambda t: t**3 * kernel_eval(t, ctx), ctx.quad,
                                   a=TAU_MAX) / T20
    return PhaseCurve(ctx.alpha, taus, weights, th, root, tail)


def V1(ctx: KernelContext, n_nodes: int = 400) -> float:
    """Exact slip per unit gradient for q = 1."""
    return phase_curve(ctx, n_nodes).V1()


def exact_wall_speed(ctx: KernelContext) -> float:
    return math.sqrt(ctx.l2 / ctx.l0)
