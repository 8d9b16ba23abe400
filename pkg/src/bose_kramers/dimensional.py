"""SI quantities for a Bose gas from the dimensionless slip results."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .kernel import KernelContext
from .neumann import NeumannExpansion, _check_q

K_BOLTZMANN = 1.380649e-23  # J/K
HBAR = 1.054571817e-34  # J s

__all__ = [
    "GasParameters",
    "number_density",
    "viscosity",
    "mean_free_path",
    "slip_constant",
    "slip_coefficient_Kv",
    "slip_velocity_SI",
    "report",
]


@dataclass(frozen=True)
class GasParameters:
    mass: float  # kg
    temperature: float  # K
    nu: float  # collision frequency, 1/s
    spin: float = 0.0
    alpha: float = -30.0
    g_v: float = 1.0  # far-field shear rate, 1/s

    def __post_init__(self):
        for name in ("mass", "temperature", "nu"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if self.spin < 0.0 or (2.0 * self.spin) % 1.0:
            raise ValueError(f"spin must be a non-negative half-integer, got {self.spin}")
        if self.alpha > 0.0:
            raise ValueError("alpha must be <= 0")

    @property
    def beta(self) -> float:
        return self.mass / (2.0 * K_BOLTZMANN * self.temperature)

    @property
    def G_v(self) -> float:
        return self.g_v / self.nu


def _check_ctx(p: GasParameters, ctx: KernelContext) -> None:
    if ctx.alpha != p.alpha:
        raise ValueError(f"context alpha {ctx.alpha} differs from gas alpha {p.alpha}")


def number_density(p: GasParameters, ctx: KernelContext) -> float:
    """N = -2 pi (2s+1) m^3 l_0 / ((2 pi hbar)^3 beta^(3/2)), in 1/m^3."""
    _check_ctx(p, ctx)
    g = 2.0 * p.spin + 1.0
    return -2.0 * math.pi * g * p.mass**3 * ctx.l0 / ((2.0 * math.pi * HBAR) ** 3 * p.beta**1.5)


def viscosity(p: GasParameters, ctx: KernelContext, density: float | None = None) -> float:
    """eta = rho/(nu beta) * l_2/l_0, in Pa s."""
    _check_ctx(p, ctx)
    n = number_density(p, ctx) if density is None else density
    rho = n * p.mass
    return rho / (p.nu * p.beta) * (ctx.l2 / ctx.l0)


def mean_free_path(p: GasParameters, ctx: KernelContext) -> float:
    """l = eta sqrt(pi beta)/rho; the density cancels."""
    _check_ctx(p, ctx)
    return math.sqrt(math.pi * p.beta) / (p.nu * p.beta) * (ctx.l2 / ctx.l0)


def slip_constant(exp: NeumannExpansion, q: float) -> float:
    """C(q, alpha) = (2 - q)/q * sum_n U_n q^n."""
    q = _check_q(q)
    return (2.0 - q) / q * math.fsum(u * q**n for n, u in enumerate(exp.U))


def slip_coefficient_Kv(ctx: KernelContext, q: float, exp: NeumannExpansion) -> float:
    """K_v = C l_0 / (sqrt(pi) l_2), so that u_sl = K_v l g_v."""
    return slip_constant(exp, q) * ctx.l0 / (math.sqrt(math.pi) * ctx.l2)


def slip_velocity_SI(p: GasParameters, ctx: KernelContext, q: float,
                     exp: NeumannExpansion) -> float:
    return slip_coefficient_Kv(ctx, q, exp) * mean_free_path(p, ctx) * p.g_v


def report(p: GasParameters, ctx: KernelContext, q: float, exp: NeumannExpansion) -> dict:
    C = slip_constant(exp, q)
    Kv = slip_coefficient_Kv(ctx, q, exp)
    l = mean_free_path(p, ctx)
    return {
        "alpha": p.alpha,
        "q": q,
        "C": C,
        "K_v": Kv,
        "eta_SI": viscosity(p, ctx),
        "l_SI": l,
        "u_sl_SI": Kv * l * p.g_v,
    }


def report_json(p: GasParameters, ctx: KernelContext, q: float, exp: NeumannExpansion) -> str:
    return json.dumps(report(p, ctx, q, exp), sort_keys=True)
