"""Order-by-order expansion of the slip problem in the diffuseness q.

With G_v = 1 and the common factor 2(2 - q) divided out, the spectral
density and slip coefficient are expanded as

    E(k) = sum_n E_n(k) q^n,      U_sl = (2 - q)/q * sum_n U_n q^n

    U_0 = T_2(0) / T_1(0),        E_0 = phi0 / T_2
    U_n = -1/(pi T_1(0)) int_0^inf T_1(k) E_{n-1}(k) dk
    E_n = -1/(pi T_2(k)) int_0^inf S(k, k1) E_{n-1}(k1) dk1

Each U_n is the value that cancels the double pole of E_n at k = 0.  The
k-integrals run over a ``SpectralGrid`` extended by a coarse Gauss rule out
to ``FAR_K``: U_n converges long before ``k_max``, but E_n(k) at large k
couples to E_{n-1}(k1) for k1 up to about k.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarse, SpecularLimit
from .kernel import KernelContext
from .spectral import FAR_K, SpectralFunctions, SpectralGrid, SpectralTable, far_rule

__all__ = [
    "NeumannExpansion",
    "SlipResult",
    "build_expansion",
    "recursion_step",
    "slip_velocity",
    "relative_error",
    "solve_fredholm",
    "fredholm_residual",
]

MAX_ORDER = 6


def _table_knots(k_max: float, n: int = 400) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-4, k_max, n)])


@dataclass(frozen=True)
class NeumannExpansion:
    """Coefficients U_0..U_N and densities E_0..E_N for one alpha."""

    alpha: float
    order: int
    U: tuple[float, ...]
    E_tables: tuple[SpectralTable, ...]
    grid: SpectralGrid
    funcs: SpectralFunctions = field(repr=False)
    E_nodes: tuple[np.ndarray, ...] = field(repr=False)  # on the extended rule
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def E(self, n: int, k):
        """E_n(k) by Nystrom interpolation, for |k| up to the far edge."""
        self._check_order(n)
        f = self.funcs
        k = np.asarray(k, dtype=float)
        if n == 0:
            return f.E0(k)
        out = -(f.S(k, self.nodes) @ (self.weights * self.E_nodes[n - 1])) / (math.pi * f.T(2, k))
        return out if out.ndim else float(out)

    def phi(self, n: int, k):
        """phi_n(k) = E_n(k) T_2(k)."""
        return self.E(n, k) * self.funcs.T(2, k)

    def E_raw(self, n: int, k):
        """Pole form: E_n L = -U_n T_1 - (1/pi) int J E_{n-1}  (n >= 1).

        Divides by L(k) ~ k^2, so it is a cross-check, not an evaluator.
        """
        self._check_order(n)
        f = self.funcs
        if n == 0:
            return f.E0_raw(k)
        conv = f.J(k, self.nodes) @ (self.weights * self.E_nodes[n - 1]) / math.pi
        return (-self.U[n] * f.T(1, k) - conv) / f.L(k)

    def _check_order(self, n: int) -> None:
        if not 0 <= n <= self.order:
            raise ValueError(f"order {n} not in 0..{self.order}")

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.U)

    def coefficients_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "U_n"])
        for n, u in enumerate(self.U):
            w.writerow([n, repr(float(u))])
        return buf.getvalue()

    def tables_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k"] + [f"E_{n}" for n in range(self.order + 1)])
        cols = [t.values for t in self.E_tables]
        for i, k in enumerate(self.E_tables[0].k):
            w.writerow([repr(float(k))] + [repr(float(c[i])) for c in cols])
        return buf.getvalue()


def recursion_step(E_prev, w, T1, T2, S, T10):
    """(U_n, E_n on the nodes) from E_{n-1}; linear in ``E_prev``."""
    prev = w * np.asarray(E_prev)
    return float(-(T1 @ prev) / (math.pi * T10)), -(S @ prev) / (math.pi * T2)


def build_expansion(ctx: KernelContext, grid: SpectralGrid | None = None,
                    N: int = 3, funcs: SpectralFunctions | None = None) -> NeumannExpansion:
    if not 0 <= N <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {N}")
    grid = grid or SpectralGrid.geometric()
    k_far = max(FAR_K, 10.0 * grid.k_max)
    if funcs is None or funcs.k_max < k_far:
        funcs = SpectralFunctions(ctx, k_max=k_far)
    knots = _table_knots(grid.k_max)
    fk, fw = far_rule(grid.k_max, k_far)
    k = np.concatenate([grid.nodes, fk])
    w = np.concatenate([grid.weights, fw])
    T1 = funcs.T(1, k)
    T2 = funcs.T(2, k)
    S = funcs.S(k, k)

    U = [funcs.U0]
    E_nodes = [funcs.E0(k)]
    for _ in range(N):
        u, e = recursion_step(E_nodes[-1], w, T1, T2, S, funcs.T10)
        U.append(u)
        E_nodes.append(e)

    def nystrom(n, kk):
        if n == 0:
            return funcs.E0(kk)
        return -(funcs.S(kk, k) @ (w * E_nodes[n - 1])) / (math.pi * funcs.T(2, kk))

    n_far = fk.size
    tables = tuple(SpectralTable(knots, nystrom(n, knots),
                                 (fk, fw, E_nodes[n][-n_far:], k_far))
                   for n in range(N + 1))
    exp = NeumannExpansion(ctx.alpha, N, tuple(U), tables, grid, funcs,
                           tuple(E_nodes), k, w)
    for n in range(N + 1):
        small = exp.E_raw(n, 1e-3)
        if not np.isfinite(small) or abs(small) > 1e3 * abs(exp.E(n, 1.0)):
            raise GridTooCoarse(
                f"E_{n} not bounded through k = 0 (E_{n}(1e-3) = {small:.3e}); "
                "refine the spectral grid")
    return exp


@dataclass(frozen=True)
class SlipResult:
    alpha: float
    q: float
    order: int
    u_sl_over_Gv: float
    per_order: tuple[float, ...]
    exact_V1: float | None = None
    rel_error: float | None = None


def _check_q(q: float) -> float:
    q = float(q)
    if q == 0.0:
        raise SpecularLimit("slip diverges for purely specular reflection (q = 0)")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"diffuseness must lie in (0, 1], got {q}")
    return q


def slip_velocity(exp: NeumannExpansion, q: float = 1.0,
                  exact_V1: float | None = None) -> SlipResult:
    """Slip per unit gradient, ((2 - q)/q) sum_n U_n q^n."""
    q = _check_q(q)
    pref = (2.0 - q) / q
    per = tuple(pref * u * q**n for n, u in enumerate(exp.U))
    total = math.fsum(per)
    err = None
    if exact_V1 is not None and q == 1.0:
        err = 100.0 * (exact_V1 - total) / exact_V1
    return SlipResult(exp.alpha, q, exp.order, total, per, exact_V1, err)


def relative_error(exp: NeumannExpansion, exact_V1: float) -> list[float]:
    """O_n in percent for the q = 1 partial sums U_0 + ... + U_n."""
    return [100.0 * (exact_V1 - s) / exact_V1 for s in exp.partial_sums()]


# -- direct solve of the full equation, used as an oracle -----------------

def solve_fredholm(funcs: SpectralFunctions, rule, q: float) -> tuple[float, np.ndarray]:
    """Solve for E(k) and U = sum U_n q^n at once by Nystrom collocation.

    E = E_0 - q/(pi T_2) int S E,   U = U_0 - q/(pi T_1(0)) int T_1 E.
    ``rule`` is anything with ``nodes`` and ``weights`` (a grid or an
    expansion, whose rule reaches further out).
    """
    q = _check_q(q)
    k, w = rule.nodes, rule.weights
    A = funcs.S(k, k) * w[None, :] / (math.pi * funcs.T(2, k))[:, None]
    E = np.linalg.solve(np.eye(k.size) + q * A, funcs.E0(k))
    U = funcs.U0 - q * float(funcs.T(1, k) @ (w * E)) / (math.pi * funcs.T10)
    return U, E


def fredholm_residual(funcs: SpectralFunctions, rule, q: float,
                      U: float, E: np.ndarray) -> np.ndarray:
    """E L + U T_1 - T_2 + (q/pi) int J E on the rule's nodes."""
    k, w = rule.nodes, rule.weights
    conv = funcs.J(k, k) @ (w * E) / math.pi
    return E * funcs.L(k) + U * funcs.T(1, k) - funcs.T(2, k) + q * conv
