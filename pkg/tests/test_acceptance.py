"""Headline acceptance checks, one PASS/FAIL line per criterion.

The lines are printed as each test runs (visible with ``-s``) and repeated
in the terminal summary.  Run this file directly for the report alone.
"""

from __future__ import annotations

import hashlib
import math

import pytest

from bose_kramers.exact import exact_wall_speed, phase_curve
from bose_kramers.fields import knudsen_correction, mass_velocity, wall_speeds
from bose_kramers.io.cli import main
from bose_kramers.neumann import build_expansion, relative_error
from bose_kramers.validation import (
    check_classical,
    check_identities,
    check_moments,
    check_normalization,
    check_pole_removal,
)

from conftest import context, exact_v1, expansion

RESULTS: dict[int, str] = {}

TABLE_ALPHAS = (0.0, -1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0)
U0_REF = (0.7227, 0.8580, 0.8769, 0.8829, 0.8850, 0.8858, 0.8861, 0.8862, 0.8862)
O0_REF = (18.01, 13.33, 12.96, 12.85, 12.81, 12.80, 12.79, 12.79, 12.79)
COEF_TOL, PP_TOL = 5e-4, 0.05

U1_REF = {0.0: 0.1775, -8.0: 0.1405}
U2_REF = {0.0: -0.0214, -8.0: -0.0116}
O1_REF = (-2.12, -1.12, -1.06, -1.05, -1.04, -1.04, -1.04, -1.04, -1.04)
O2_REF = (0.30, 0.11, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10)

U3_REF = {-30.0: 0.0008, 0.0: 0.0018}
U3_TOL = 2e-4

V1_CLASSICAL, V1_TOL = 1.0162, 1e-3
WALL_EXACT, WALL_TOL = 0.70711, 1e-4
WALLS_REF = (0.6747, 0.7103, 0.7068)
WALLS_ERR_REF = (4.6, -0.45, 0.044)
WALLS_TOL, WALLS_PP = 1.5e-3, 0.1

CLOSURE_XS = (0.0, 0.5, 1.0, 2.0, 4.0)
CLOSURE_TOL = 1e-4


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)


def worst(pairs) -> float:
    return max(abs(a - b) for a, b in pairs)


def test_criterion_1_table1():
    u0, o0 = [], []
    for a in TABLE_ALPHAS:
        exp = expansion(a)
        u0.append(exp.U[0])
        o0.append(relative_error(exp, exact_v1(a))[0])
    du = worst(zip(u0, U0_REF))
    do = worst(zip(o0, O0_REF))
    ok = du <= COEF_TOL and do <= PP_TOL
    record(1, ok, f"max |dU_0| = {du:.1e} (tol {COEF_TOL:.0e}), max |dO_0| = {do:.3f} pp (tol {PP_TOL})")
    assert ok


def test_criterion_2_tables_2_3():
    dev_u, dev_o = 0.0, 0.0
    for a in U1_REF:
        exp = expansion(a)
        dev_u = max(dev_u, abs(exp.U[1] - U1_REF[a]), abs(exp.U[2] - U2_REF[a]))
    for a, o1, o2 in zip(TABLE_ALPHAS, O1_REF, O2_REF):
        err = relative_error(expansion(a), exact_v1(a))
        dev_o = max(dev_o, abs(err[1] - o1), abs(err[2] - o2))
    ok = dev_u <= COEF_TOL and dev_o <= PP_TOL
    record(2, ok, f"max |dU_1|,|dU_2| = {dev_u:.1e}, max |dO| = {dev_o:.3f} pp")
    assert ok


def test_criterion_3_third_order():
    got = {a: expansion(a).U[3] for a in U3_REF}
    dev = {a: abs(got[a] - U3_REF[a]) for a in U3_REF}
    ok = all(d <= U3_TOL for d in dev.values())
    detail = ", ".join(f"U_3({a:g}) = {got[a]:.5f} vs {U3_REF[a]}" for a in U3_REF)
    record(3, ok, f"{detail} (tol {U3_TOL:.0e})")
    assert ok


def test_criterion_4_exact():
    v1 = exact_v1(-30.0)
    wall = exact_wall_speed(context(-30.0))
    ok = abs(v1 - V1_CLASSICAL) <= V1_TOL and abs(wall - WALL_EXACT) <= WALL_TOL
    record(4, ok, f"V_1(-30) = {v1:.6f}, exact wall speed = {wall:.6f}")
    assert ok


def test_criterion_5_wall_speeds():
    exp = expansion(-30.0)
    ref = exact_wall_speed(context(-30.0))
    readings = {"full slip series": wall_speeds(exp, 1.0),
                "order-matched slip": wall_speeds(exp, 1.0, order_matched=True)}
    passing, details = [], []
    for name, w in readings.items():
        w = w[:3]
        err = [100.0 * (ref - v) / ref for v in w]
        ok = (worst(zip(w, WALLS_REF)) <= WALLS_TOL
              and worst(zip(err, WALLS_ERR_REF)) <= WALLS_PP)
        details.append(f"{name}: " + ", ".join(f"{v:.4f} ({e:+.3f}%)" for v, e in zip(w, err))
                       + (" ok" if ok else " off"))
        if ok:
            passing.append(name)
    record(5, bool(passing), "; ".join(details))
    assert passing


def test_criterion_6_properties():
    checks = [check_normalization(), check_moments(), check_classical()]
    for a in (-30.0, 0.0):
        exp = expansion(a)
        checks += check_identities(context(a), exp.funcs)
        checks.append(check_pole_removal(exp))
        gap = max(abs(mass_velocity(exp, 1.0, x, max_order=exp.order)
                      - knudsen_correction(exp, 1.0, x)) for x in CLOSURE_XS)
        checks.append(type(checks[0])(f"closure at 5 positions, alpha={a:g}",
                                      gap < CLOSURE_TOL, f"{gap:.1e}"))
    # refinement: headline numbers move by less than a fifth of their tolerance
    moves = []
    for a in (0.0, -30.0):
        exp = expansion(a)
        fine = build_expansion(context(a), exp.grid.refined(), exp.order)
        moves.append(max(abs(u - v) for u, v in zip(exp.U, fine.U)) / (COEF_TOL / 5))
        v_fine = phase_curve(context(a), n_nodes=800).V1()
        moves.append(abs(v_fine - exact_v1(a)) / (V1_TOL / 5))
        if a == -30.0:
            moves.append(worst(zip(wall_speeds(exp), wall_speeds(fine))) / (WALLS_TOL / 5))
    checks.append(type(checks[0])("refinement stability", max(moves) < 1.0,
                                  f"largest move {max(moves):.2e} of tol/5"))
    failed = [c.name for c in checks if not c.passed]
    record(6, not failed, f"{len(checks) - len(failed)}/{len(checks)} properties"
           + (f", failed: {failed}" if failed else ""))
    assert not failed


def test_criterion_7_determinism(tmp_path):
    runs = [["tables", "--alpha-list=-1,-5", "--format", "json"],
            ["compare", "--alpha", "-2"],
            ["profile", "--alpha", "-30", "--order", "2", "--xs", "0:2:0.5", "--format", "json"],
            ["kv", "--alpha", "-1", "--q", "0.5"]]
    same = True
    for i, argv in enumerate(runs):
        digests = set()
        for j in range(2):
            path = tmp_path / f"{i}-{j}"
            assert main([*argv, "--output", str(path)]) == 0
            digests.add(hashlib.sha256(path.read_bytes()).hexdigest())
        same &= len(digests) == 1
    record(7, same, f"{len(runs)} commands, repeated output byte-identical")
    assert same


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
