"""Bose kernel K_B(mu, alpha) and its moments.

    K_B(mu, alpha) = ln(1 - exp(alpha - mu^2)) / (2 l_0(alpha))
    l_n(alpha)     = int_0^inf x^n ln(1 - exp(alpha - x^2)) dx

``alpha`` is the reduced chemical potential, ``alpha <= 0``.  As
``alpha -> -inf`` the kernel tends to the Maxwellian ``exp(-mu^2)/sqrt(pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteInput, SingularPoint, ToleranceNotReached
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_semi_infinite

CLASSICAL_ALPHA = -30.0  # numerical stand-in for alpha = -inf

_ZETA_TERMS = 1_000_000


def log_one_minus_exp(y):
    """ln(1 - e^y) for y <= 0, accurate at both ends of the range."""
    y = np.asarray(y, dtype=float)
    e = np.exp(y)
    small = e < 0.5
    with np.errstate(divide="ignore"):
        return np.where(small, np.log1p(-np.where(small, e, 0.0)),
                        np.log(-np.expm1(np.where(small, -1.0, y))))


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise NonFiniteInput(f"alpha must be finite, got {alpha!r}")
    if alpha > 0.0:
        raise ValueError(f"alpha must be <= 0 for a Bose gas, got {alpha}")
    return alpha


def moment_integrand(n: int, alpha: float):
    def f(x):
        return x ** n * log_one_minus_exp(alpha - x * x)
    return f


def _moment_quad(n: int, alpha: float, quad: QuadratureSpec) -> float:
    # scale by |ln(1 - e^alpha)| ~ e^alpha so abs_tol stays meaningful deep in
    # the classical regime; at alpha = 0 the integrand is ln(x^2)-singular
    scale = 1.0 if alpha == 0.0 else -float(log_one_minus_exp(alpha))
    f = moment_integrand(n, alpha)
    return scale * integrate_semi_infinite(lambda x: f(x) / scale, quad,
                                           soften_origin=(alpha > -1.0))


@dataclass(frozen=True)
class KernelContext:
    """Chemical potential plus the cached moments l_0, l_1, l_2."""

    alpha: float
    quad: QuadratureSpec = DEFAULT_SPEC
    l0: float = field(init=False)
    l1: float = field(init=False)
    l2: float = field(init=False)

    def __post_init__(self) -> None:
        alpha = _check_alpha(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        for n in range(3):
            object.__setattr__(self, f"l{n}", _moment_quad(n, alpha, self.quad))

    @classmethod
    def classical(cls, quad: QuadratureSpec = DEFAULT_SPEC) -> "KernelContext":
        return cls(CLASSICAL_ALPHA, quad)

    def __call__(self, mu):
        return kernel_eval(mu, self)

    @property
    def kernel_at_zero(self) -> float:
        """K_B(0, alpha); infinite at alpha = 0."""
        if self.alpha == 0.0:
            return math.inf
        return float(log_one_minus_exp(self.alpha) / (2.0 * self.l0))


def kernel_eval(mu, ctx: KernelContext):
    """K_B(mu, alpha).  Vectorised over ``mu``.

    Raises SingularPoint at ``mu == 0`` when ``alpha == 0``; the singularity
    is logarithmic and callers integrate around it.
    """
    mu = np.asarray(mu, dtype=float)
    if not np.all(np.isfinite(mu)):
        raise NonFiniteInput("kernel argument must be finite")
    if ctx.alpha == 0.0 and np.any(mu == 0.0):
        raise SingularPoint("K_B(0, 0) is logarithmically infinite")
    out = log_one_minus_exp(ctx.alpha - mu * mu) / (2.0 * ctx.l0)
    return out if out.ndim else float(out)


def maxwellian(mu):
    mu = np.asarray(mu, dtype=float)
    return np.exp(-mu * mu) / math.sqrt(math.pi)


def moment_l(n: int, ctx: KernelContext) -> float:
    """l_n(alpha) by adaptive quadrature (n = 0..4); always negative."""
    if n not in range(5):
        raise ValueError(f"moment order must be in 0..4, got {n}")
    cached = {0: ctx.l0, 1: ctx.l1, 2: ctx.l2}
    if n in cached:
        return cached[n]
    return _moment_quad(n, ctx.alpha, ctx.quad)


def _zeta_partial(s: float, terms: int) -> float:
    """Riemann zeta(s), s > 1: partial sum plus Euler-Maclaurin tail."""
    m = np.arange(1, terms + 1, dtype=float)
    head = float(np.sum(m[::-1] ** -s))
    M = float(terms)
    tail = M ** (1.0 - s) / (s - 1.0) - 0.5 * M ** -s + s * M ** (-s - 1.0) / 12.0
    return head + tail


def polylog(s: float, alpha: float, tol: float = 1e-15, terms: int = _ZETA_TERMS) -> float:
    """Li_s(e^alpha) for real s > 1 and alpha <= 0 by its power series."""
    alpha = _check_alpha(alpha)
    if alpha == 0.0:
        return _zeta_partial(s, terms)
    z = math.exp(alpha)
    total = 0.0
    for m in range(1, terms + 1):
        term = math.exp(m * alpha) * m ** -s
        total += term
        # remaining terms are bounded by a geometric series in z
        bound = math.exp((m + 1) * alpha) * (m + 1) ** -s / (1.0 - z)
        if bound <= tol * abs(total):
            return total
    raise ToleranceNotReached(
        f"polylog series for alpha={alpha} not converged in {terms} terms")


def moment_l_series(n: int, alpha: float, terms: int = _ZETA_TERMS,
                    tol: float = 1e-15) -> float:
    """l_n(alpha) from termwise integration of the logarithm's series.

    ln(1 - e^(alpha - x^2)) = -sum_m e^(m alpha - m x^2)/m integrates to
    l_n = -Gamma((n+1)/2)/2 * Li_{(n+3)/2}(e^alpha).  Independent of the
    quadrature path; used as an oracle.
    """
    if n < 0:
        raise ValueError("moment order must be non-negative")
    s = 0.5 * (n + 3)
    return -0.5 * math.gamma(0.5 * (n + 1)) * polylog(s, alpha, tol, terms)
