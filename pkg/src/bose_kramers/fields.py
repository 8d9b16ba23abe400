"""Physical-space fields rebuilt from the spectral densities.

Velocity in the Knudsen layer (per unit gradient):

    U_c(x) = (2 - q)/pi * sum_n q^n int_0^inf cos(kx) E_n(k) dk
    U(x)   = U_sl + x + U_c(x)

Distribution-function amplitudes Phi_n(k, mu) have a real numerator

    N_0 = E_0(k) + mu^2 - U_0 |mu|
    N_n = E_n(k) - U_n |mu| - (|mu|/pi) int_0^inf E_{n-1}(k1) / (1 + k1^2 mu^2) dk1

over 1 + i k mu.  Inverting in x splits each amplitude into a smooth k-integral
and the free-streaming wave c_n(mu) exp(-x/mu)/mu (mu > 0) of the
k-independent part c_n of the numerator.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import quad

from .errors import NonFiniteInput
from .kernel import kernel_eval
from .neumann import NeumannExpansion, _check_q, slip_velocity
from .quadrature import QuadratureSpec, integrate_finite, integrate_semi_infinite
from .spectral import FOURIER_SPEC, SpectralTable, _tail_basis

__all__ = [
    "knudsen_correction",
    "knudsen_terms",
    "VelocityProfile",
    "profile",
    "wall_speeds",
    "phi_n",
    "lorentz_moment",
    "h_correction",
    "mass_velocity",
]

H_DEFAULT_ORDER = 2


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteInput("position must be finite")
    if x < 0.0:
        raise ValueError(f"position must be >= 0, got {x}")
    return x


def knudsen_terms(exp: NeumannExpansion, q: float, x: float) -> list[float]:
    """Per-order pieces q^n (2 - q)/pi int cos(kx) E_n dk."""
    q = _check_q(q)
    x = _check_x(x)
    pref = (2.0 - q) / math.pi
    return [pref * q**n * t.cosine_transform(x) for n, t in enumerate(exp.E_tables)]


def knudsen_correction(exp: NeumannExpansion, q: float, x: float) -> float:
    return math.fsum(knudsen_terms(exp, q, x))


@dataclass(frozen=True)
class VelocityProfile:
    xs: np.ndarray
    u_total: np.ndarray
    u_asymptotic: np.ndarray
    u_knudsen: np.ndarray
    alpha: float
    q: float
    order: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "u_total", "u_asymptotic", "u_knudsen"])
        for row in zip(self.xs, self.u_total, self.u_asymptotic, self.u_knudsen):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        d = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
             for k, v in asdict(self).items()}
        return json.dumps(d, sort_keys=True)


def profile(exp: NeumannExpansion, q: float, xs) -> VelocityProfile:
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size == 0:
        raise ValueError("no positions given")
    u_sl = slip_velocity(exp, q).u_sl_over_Gv
    u_kn = np.array([knudsen_correction(exp, q, x) for x in xs])
    u_as = u_sl + xs
    return VelocityProfile(xs, u_as + u_kn, u_as, u_kn, exp.alpha, float(q), exp.order)


def wall_speeds(exp: NeumannExpansion, q: float = 1.0,
                order_matched: bool = False) -> list[float]:
    """Approximations U^(n)(0), n = 0..order.

    The default pairs the slip from all available orders with the partial
    sums of the wall corrections; ``order_matched`` truncates both at n.
    """
    terms = knudsen_terms(exp, q, 0.0)
    slip = slip_velocity(exp, q).per_order
    out = []
    for n in range(exp.order + 1):
        s = math.fsum(slip[: n + 1]) if order_matched else math.fsum(slip)
        out.append(s + math.fsum(terms[: n + 1]))
    return out


# -- distribution function ----------------------------------------------

def lorentz_moment(exp: NeumannExpansion, n: int, mu) -> np.ndarray:
    """int_0^inf E_n(k) / (1 + k^2 mu^2) dk, vectorised over ``mu``."""
    exp._check_order(n)
    mu = np.abs(np.atleast_1d(np.asarray(mu, dtype=float)))
    g = exp.grid
    m = g.nodes.size
    head = (g.weights * exp.E_nodes[n][:m]) @ (1.0 / (1.0 + np.multiply.outer(g.nodes**2, mu**2)))
    return head + exp.E_tables[n].tail_lorentz(mu)


def _free_part(exp: NeumannExpansion, n: int, mu: np.ndarray) -> np.ndarray:
    """k-independent part c_n(mu) of the numerator of Phi_n."""
    a = np.abs(mu)
    if n == 0:
        return mu * mu - exp.U[0] * a
    return -exp.U[n] * a - a * lorentz_moment(exp, n - 1, mu) / math.pi


def phi_n(exp: NeumannExpansion, n: int, k, mu):
    """Phi_n(k, mu), complex; broadcast over ``k`` and ``mu``."""
    k = np.asarray(k, dtype=float)
    mu = np.asarray(mu, dtype=float)
    kb, mb = np.broadcast_arrays(k, mu)
    free = _free_part(exp, n, mb.ravel()).reshape(mb.shape)
    num = exp.E(n, np.abs(kb).ravel()).reshape(kb.shape) + free
    out = num / (1.0 + 1j * kb * mb)
    return out if out.ndim else complex(out)


def _smooth_part(table: SpectralTable, x: float, mu: np.ndarray) -> np.ndarray:
    """(1/pi) int_0^inf E(k) (cos kx + k mu sin kx) / (1 + k^2 mu^2) dk."""
    m2 = mu * mu

    def f(k):
        kx = k * x
        w = (np.cos(kx)[None, :] + np.multiply.outer(mu, k * np.sin(kx)))
        return table._spline(k)[None, :] * w / (1.0 + np.multiply.outer(m2, k * k))

    pts = np.union1d(table.k[1:-1], table.cosine_zeros(x))
    head = integrate_finite(f, 0.0, table.k_max, FOURIER_SPEC, points=pts)
    if x == 0.0:
        tail = table.tail_lorentz(mu)
    else:
        c = table.tail_coeff
        tail = np.empty_like(mu)
        for i, m in enumerate(mu):
            def g(k, m=m):
                return float(c @ _tail_basis(np.array([k]))[:, 0]) / (1.0 + (k * m) ** 2)
            cos_part, _ = quad(g, table.k_max, np.inf, weight="cos", wvar=x, limlst=200)
            sin_part, _ = quad(lambda k: k * m * g(k), table.k_max, np.inf,
                               weight="sin", wvar=x, limlst=200)
            tail[i] = cos_part + sin_part
    return (head + tail) / math.pi


def h_correction(exp: NeumannExpansion, q: float, x: float, mu,
                 max_order: int = H_DEFAULT_ORDER) -> np.ndarray:
    """Knudsen-layer part of the distribution function at ``x`` (0 means 0+).

    Sums orders n <= min(max_order, exp.order) and restores the factor
    2(2 - q).  Vectorised over ``mu``.
    """
    q = _check_q(q)
    x = _check_x(x)
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    N = min(max_order, exp.order)
    weights = [q**n for n in range(N + 1)]
    table = SpectralTable.combine(exp.E_tables[: N + 1], weights)
    smooth = _smooth_part(table, x, mu)
    free = sum(wn * _free_part(exp, n, mu) for n, wn in enumerate(weights))
    pos = mu > 0.0
    wave = np.zeros_like(mu)
    wave[pos] = free[pos] * np.exp(-x / mu[pos]) / mu[pos]
    return 2.0 * (2.0 - q) * (smooth + wave)


def mass_velocity(exp: NeumannExpansion, q: float, x: float,
                  max_order: int = H_DEFAULT_ORDER,
                  spec: QuadratureSpec | None = None) -> float:
    """(1/2) int K_B(mu) h(x, mu) dmu by brute-force quadrature in mu."""
    ctx = exp.funcs.ctx
    spec = spec or QuadratureSpec(abs_tol=1e-9, rel_tol=1e-8)
    soft = ctx.alpha > -1.0

    def side(sign):
        def f(m):
            mu = sign * m
            return kernel_eval(m, ctx) * h_correction(exp, q, x, mu, max_order)
        return integrate_semi_infinite(f, spec, soften_origin=soft)

    return 0.5 * (side(1.0) + side(-1.0))
