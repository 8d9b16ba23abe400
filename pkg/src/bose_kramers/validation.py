"""Invariant checks runnable from the command line (``--validate``)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import knudsen_correction, mass_velocity
from .kernel import KernelContext, kernel_eval, maxwellian, moment_l, moment_l_series
from .neumann import build_expansion
from .quadrature import integrate_whole_line
from .spectral import SpectralFunctions, SpectralGrid


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _check(name, value, tol) -> Check:
    return Check(name, bool(value < tol), f"{value:.3e} (tol {tol:.0e})")


def check_normalization(alphas=(0.0, -0.5, -1.0, -2.0, -5.0, -10.0, -30.0)) -> Check:
    worst = 0.0
    for a in alphas:
        ctx = KernelContext(a)
        f = lambda t, ctx=ctx: kernel_eval(t, ctx)  # noqa: E731
        worst = max(worst, abs(integrate_whole_line(f, ctx.quad, soften_origin=True) - 1.0))
    return _check("kernel normalisation", worst, 1e-8)


def check_moments(alphas=(0.0, -1.0, -5.0, -30.0)) -> Check:
    worst = 0.0
    for a in alphas:
        ctx = KernelContext(a)
        for n in range(5):
            ref = moment_l_series(n, a)
            worst = max(worst, abs(moment_l(n, ctx) / ref - 1.0))
    return _check("moments vs polylog series", worst, 1e-10)


def check_identities(ctx: KernelContext, f: SpectralFunctions) -> list[Check]:
    lw = max(abs(f.L(k) - f.L_direct(k)) for k in (0.1, 1.0, 10.0))
    dw = max(abs(f.T(n, k) - (f.T(n - 2, 0.0) - f.T(n - 2, k)) / k**2)
             for n in (3, 4) for k in (0.5, 1.0, 2.0))
    sw = max(abs(k * k * f.S(k, k1) - (f.J(k, k1) - f.T(1, k) * f.T(1, k1) / f.T10))
             for k, k1 in ((0.5, 0.5), (1.0, 2.0), (3.0, 0.2)))
    return [_check(f"L = k^2 T_2 at alpha={ctx.alpha}", lw, 1e-8),
            _check(f"descent identities at alpha={ctx.alpha}", dw, 1e-8),
            _check(f"k^2 S identity at alpha={ctx.alpha}", sw, 1e-8)]


def check_pole_removal(exp) -> Check:
    worst = 0.0
    for n in range(exp.order + 1):
        a, b = exp.E_raw(n, 1e-3), exp.E(n, 1e-2)
        worst = max(worst, abs(a - b) / abs(b))
    return _check(f"E_n smooth through k = 0 at alpha={exp.alpha}", worst, 0.1)


def check_classical() -> Check:
    ctx = KernelContext.classical()
    mu = np.linspace(0.0, 3.0, 301)
    return _check("classical kernel vs Maxwellian",
                  float(np.max(np.abs(kernel_eval(mu, ctx) - maxwellian(mu)))), 1e-9)


def check_closure(exp, xs=(0.0, 2.0)) -> Check:
    worst = max(abs(mass_velocity(exp, 1.0, x) - knudsen_correction(exp, 1.0, x)) for x in xs)
    return _check(f"mass-velocity closure at alpha={exp.alpha}", worst, 1e-4)


def check_refinement(ctx: KernelContext, exp) -> Check:
    fine = build_expansion(ctx, exp.grid.refined(), exp.order)
    worst = max(abs(a - b) for a, b in zip(exp.U[1:3], fine.U[1:3]))
    return _check(f"U_1, U_2 under grid doubling at alpha={ctx.alpha}", worst, 1e-4)


def run_validation(alphas=(-30.0, 0.0), order: int = 2,
                   grid: SpectralGrid | None = None) -> list[Check]:
    checks = [check_normalization(), check_moments(), check_classical()]
    for a in alphas:
        ctx = KernelContext(a)
        exp = build_expansion(ctx, grid, order)
        checks += check_identities(ctx, exp.funcs)
        checks.append(check_pole_removal(exp))
        checks.append(check_closure(exp))
        checks.append(check_refinement(ctx, exp))
    return checks


def summary(checks) -> str:
    ok = sum(c.passed for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"{ok}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"


def all_passed(checks) -> bool:
    return all(c.passed for c in checks)
