from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bose_kramers.spectral import SpectralFunctions, SpectralGrid, SpectralTable

from conftest import context


@pytest.fixture(scope="module", params=[-30.0, -1.0, 0.0])
def funcs(request):
    return SpectralFunctions(context(request.param))


@pytest.fixture(scope="module")
def classical_funcs():
    return SpectralFunctions(context(-30.0))


def test_T_examples(classical_funcs):
    f = classical_funcs
    assert f.T(0, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert f.T(2, 0.0) == pytest.approx(0.5, abs=1e-12)
    assert f.T(1, 0.0) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-12)
    assert abs(f.U0 - 0.8862) < 5e-5
    assert abs(SpectralFunctions(context(0.0)).U0 - 0.7227) < 5e-5


def test_T_order_range(classical_funcs):
    with pytest.raises(ValueError):
        classical_funcs.T(6, 1.0)


def test_L_identity(funcs):
    assert funcs.L(0.0) == 0.0
    for k in (0.1, 1.0, 10.0):
        assert funcs.L(k) / funcs.L_direct(k) == pytest.approx(1.0, abs=1e-8)
    assert abs(funcs.L(1e3) - 1.0) < 0.02


def test_frozen_rule_matches_direct(funcs):
    for n in range(6):
        for k in (0.0, 0.3, 7.0, 150.0):
            assert funcs.T(n, k) == pytest.approx(funcs.T_direct(n, k), rel=1e-10, abs=1e-14)


def test_J_examples(funcs):
    for k in (0.0, 0.5, 2.0):
        assert abs(funcs.J(k, 0.0) - funcs.T(1, k)) < 1e-8
    assert funcs.J(0.7, 3.0) == pytest.approx(funcs.J(3.0, 0.7), rel=1e-14)
    assert funcs.J(0.0, 0.0) == pytest.approx(funcs.T(1, 0.0), rel=1e-14)
    assert funcs.J(0.7, 3.0) == pytest.approx(funcs.J_direct(0.7, 3.0), rel=1e-10)
    assert funcs.J5(0.7, 3.0) == pytest.approx(funcs.J_direct(0.7, 3.0, power=5), rel=1e-10)


def test_S_examples(funcs):
    for k in (0.1, 1.0, 5.0):
        assert funcs.S(k, 0.0) == 0.0
    for k, k1 in ((0.5, 0.5), (1.0, 2.0), (3.0, 0.2)):
        rhs = funcs.J_direct(k, k1) - funcs.T_direct(1, k) * funcs.T_direct(1, k1) / funcs.T_direct(1, 0.0)
        assert abs(k * k * funcs.S(k, k1) - rhs) < 1e-8
        assert k * k * funcs.S(k, k1) == pytest.approx(k1 * k1 * funcs.S(k1, k), abs=1e-14)


def test_S_outer_product_shape(funcs):
    k = np.array([0.1, 1.0, 4.0])
    assert funcs.S(k, k[:2]).shape == (3, 2)


def test_E0_examples(funcs):
    for k in (0.25, 1.0, 4.0):
        assert abs(funcs.E0(k) * funcs.L(k) - (funcs.T(2, k) - funcs.U0 * funcs.T(1, k))) < 1e-7
        assert funcs.E0(k) == pytest.approx(funcs.E0_raw(k), rel=1e-8)
    assert math.isfinite(funcs.E0(0.0))
    assert abs(funcs.E0(1e-3) - funcs.E0(0.0)) < 1e-4


def test_E0_large_k_bound(classical_funcs):
    f = classical_funcs
    K0 = context(-30.0).kernel_at_zero
    for k in (1e2, 1e3):
        assert abs(k * k * f.E0(k)) <= 1 + f.U0 * 2 * K0 * math.log(k)


def test_descent_identities(funcs):
    for n in (3, 4):
        for k in (0.5, 1.0, 2.0):
            lhs = funcs.T(n, k)
            rhs = (funcs.T(n - 2, 0.0) - funcs.T(n - 2, k)) / k**2
            assert abs(lhs - rhs) < 1e-8


def test_evenness(funcs):
    for n in range(6):
        assert funcs.T(n, -1.3) == funcs.T(n, 1.3)
        assert funcs.T_direct(n, -1.3) == funcs.T_direct(n, 1.3)
    assert funcs.E0(-0.4) == funcs.E0(0.4)


def test_monotone_decreasing(funcs):
    k = np.geomspace(1e-3, 150.0, 80)
    for n in range(6):
        assert np.all(np.diff(funcs.T(n, k)) < 0.0)


def test_order_zero_equation_residual(funcs):
    # E_0 L + U_0 T_1 - T_2 = 0 on the grid (the q = 0 equation)
    k = SpectralGrid.geometric().nodes
    res = funcs.E0(k) * funcs.L(k) + funcs.U0 * funcs.T(1, k) - funcs.T(2, k)
    assert np.max(np.abs(res)) < 1e-6


def test_grid_invariant():
    g = SpectralGrid.geometric()
    assert len(g) == 200 and np.all(np.diff(g.nodes) > 0) and g.nodes[-1] < 200.0
    assert abs(g.integrate(1 / (1 + g.nodes**2)) - math.atan(200.0)) < 1e-8
    r = g.refined()
    assert len(r) == 400 and r.k_max == 400.0
    with pytest.raises(ValueError):
        SpectralGrid.geometric(205)


def _lorentz_table():
    k = np.concatenate([[0.0], np.geomspace(1e-4, 200.0, 400)])
    return SpectralTable(k, 1.0 / (1.0 + k * k))


def test_table_integral_and_tail():
    # 1/(1+k^2) lies outside the tail family, so only the head is tight
    t = _lorentz_table()
    assert float(t._spline.integrate(0.0, 200.0)) == pytest.approx(math.atan(200.0), abs=1e-7)
    assert t.cosine_transform(0.0) == pytest.approx(math.pi / 2, abs=5e-6)
    assert t(500.0) == pytest.approx(1 / (1 + 500.0**2), rel=1e-3)


@settings(max_examples=8, deadline=None)
@given(st.floats(0.1, 6.0))
def test_table_cosine_transform(x):
    t = _lorentz_table()
    assert t.cosine_transform(x) == pytest.approx(0.5 * math.pi * math.exp(-x), abs=1e-6)


def test_table_combine_is_linear():
    t = _lorentz_table()
    c = SpectralTable.combine([t, t], [2.0, -0.5])
    np.testing.assert_allclose(c.values, 1.5 * t.values)
    np.testing.assert_allclose(c.tail_coeff, 1.5 * t.tail_coeff, rtol=1e-8)
