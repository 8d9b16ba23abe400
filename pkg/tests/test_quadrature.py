from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import dawsn, zeta

from bose_kramers.errors import NonFiniteIntegrand, PoleTooCloseToBoundary, ToleranceNotReached
from bose_kramers.kernel import log_one_minus_exp
from bose_kramers.quadrature import (
    DEFAULT_SPEC,
    QuadratureSpec,
    adaptive_rule,
    integrate_finite,
    integrate_semi_infinite,
    integrate_whole_line,
    principal_value,
    semi_infinite_rule,
)


def test_finite_examples():
    assert integrate_finite(lambda x: x, 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert abs(integrate_finite(np.log, 0.0, 1.0) + 1.0) < 1e-12
    assert abs(integrate_finite(np.sin, 0.0, math.pi) - 2.0) < 1e-13


def test_semi_infinite_examples():
    assert abs(integrate_semi_infinite(lambda t: np.exp(-t * t)) - math.sqrt(math.pi) / 2) < 1e-13
    bose = integrate_semi_infinite(lambda t: log_one_minus_exp(-t * t), soften_origin=True)
    assert bose == pytest.approx(-math.sqrt(math.pi) / 2 * zeta(1.5), rel=1e-12)
    assert abs(integrate_semi_infinite(lambda k: 1.0 / (1.0 + k * k) ** 2) - math.pi / 4) < 1e-13


@pytest.mark.parametrize("policy", ["mapped", "fixed"])
def test_tail_policies_agree(policy):
    spec = QuadratureSpec(tail_policy=policy)
    val = integrate_semi_infinite(lambda t: np.exp(-t * t), spec)
    assert abs(val - math.sqrt(math.pi) / 2) < 1e-12


def test_vector_integrand():
    val = integrate_semi_infinite(lambda t: np.stack([np.exp(-t), t * np.exp(-t)]))
    np.testing.assert_allclose(val, [1.0, 1.0], atol=1e-13)


def test_whole_line_gaussian():
    assert abs(integrate_whole_line(lambda t: np.exp(-t * t)) - math.sqrt(math.pi)) < 1e-13


def test_pv_odd_integrand_vanishes():
    assert abs(principal_value(lambda t: np.exp(-t * t), 0.0)) < 1e-13


@pytest.mark.parametrize("tau", [0.3, 1.0, 2.5])
def test_pv_against_dawson(tau):
    # PV int e^{-t^2}/(t - tau) dt = -2 sqrt(pi) F(tau)
    pv = principal_value(lambda t: np.exp(-t * t), tau)
    assert pv == pytest.approx(-2.0 * math.sqrt(math.pi) * dawsn(tau), abs=1e-11)


def test_pv_refinement_oracle():
    f = lambda t: np.exp(-t * t)  # noqa: E731
    coarse = principal_value(f, 1.0)
    fine = principal_value(f, 1.0, DEFAULT_SPEC.refined(10.0))
    assert abs(coarse - fine) < 1e-11


def test_pv_finite_range():
    # PV int_0^2 1/(t - 1) dt = 0
    assert abs(principal_value(lambda t: np.ones_like(t), 1.0, a=0.0, b=2.0)) < 1e-13
    with pytest.raises(PoleTooCloseToBoundary):
        principal_value(lambda t: np.ones_like(t), 0.1, a=0.0, b=2.0)


def test_budget_exhaustion_raises():
    spec = QuadratureSpec(max_subdivisions=8)
    with pytest.raises(ToleranceNotReached):
        integrate_finite(lambda x: np.sin(1.0 / x), 1e-6, 1.0, spec)


def test_nonfinite_integrand_raises():
    with pytest.raises(NonFiniteIntegrand):
        integrate_finite(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


@pytest.mark.parametrize("bad", [dict(abs_tol=0.0), dict(rel_tol=0.5), dict(max_subdivisions=2)])
def test_spec_validation(bad):
    with pytest.raises(ValueError):
        QuadratureSpec(**bad)


def test_rules_reproduce_integrals():
    t, w = semi_infinite_rule(lambda t: np.exp(-t))
    assert abs(w @ np.exp(-t) - 1.0) < 1e-13
    x, v = adaptive_rule(np.cos, 0.0, 1.0)
    assert abs(v @ np.cos(x) - math.sin(1.0)) < 1e-14


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 6), st.floats(0.2, 3.0))
def test_polynomial_gaussian_moments(n, scale):
    val = integrate_semi_infinite(lambda t: t**n * np.exp(-scale * t * t))
    ref = 0.5 * math.gamma((n + 1) / 2) / scale ** ((n + 1) / 2)
    assert val == pytest.approx(ref, rel=1e-11)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3.0, 3.0))
def test_pv_dawson_property(tau):
    if abs(tau) < 1e-3:
        tau = 1e-3
    pv = principal_value(lambda t: np.exp(-t * t), tau)
    assert pv == pytest.approx(-2.0 * math.sqrt(math.pi) * dawsn(tau), abs=1e-10)
