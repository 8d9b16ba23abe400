"""Command-line front end.

    bose-kramers tables                         # U_n(alpha) and O_n(alpha), n = 0..2
    bose-kramers compare --alpha 0 --format json
    bose-kramers profile --alpha -30 --q 1 --order 2 --xs 0:10:0.1
    bose-kramers kv --alpha -1 --q 0.5 --mass 6.6e-27 --temperature 4 --nu 1e9
    bose-kramers --validate

Exit status: 0 on success, 2 for bad input, 3 when a numerical tolerance
is not met.  Errors are reported on stderr as a one-line JSON record.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from ..dimensional import GasParameters, report
from ..errors import KramersError, SpecularLimit
from ..exact import exact_wall_speed, phase_curve
from ..fields import profile, wall_speeds
from ..kernel import KernelContext, moment_l
from ..neumann import build_expansion, relative_error, slip_velocity
from ..quadrature import QuadratureSpec
from ..spectral import SpectralGrid
from ..validation import all_passed, run_validation, summary

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

COMMANDS = ("moments", "coeffs", "tables", "slip", "exact", "profile", "compare", "kv")
TABLE_ALPHAS = (0.0, -1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0)


class UsageError(ValueError):
    pass


# -- parsing ---------------------------------------------------------------

def parse_float_list(text: str) -> list[float]:
    """'0,-1,-2' or 'start:stop:step' (stop inclusive)."""
    text = text.strip()
    if not text:
        raise UsageError("empty list")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be start:stop:step, got {text!r}")
        a, b, h = (float(p) for p in parts)
        if h <= 0.0 or b < a:
            raise UsageError(f"bad range {text!r}")
        n = int(round((b - a) / h))
        return [round(a + i * h, 12) for i in range(n + 1)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bose-kramers",
                                description="Isothermal slip of a Bose gas.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--validate", action="store_true", help="run the invariant suite")
    p.add_argument("--alpha", type=float, default=-30.0)
    p.add_argument("--alpha-list", default=None, help="e.g. '0,-1,-2' or '0:-8:1'")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--nk", type=int, default=200, help="spectral grid nodes")
    p.add_argument("--kmax", type=float, default=200.0)
    p.add_argument("--abs-tol", type=float, default=1e-13)
    p.add_argument("--rel-tol", type=float, default=1e-11)
    p.add_argument("--xs", default="0:10:0.1")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None, help="file path (default: stdout)")
    p.add_argument("--exact", type=float, default=None,
                   help="override the exact slip value (compare)")
    p.add_argument("--phase", action="store_true", help="exact: emit theta(tau)")
    p.add_argument("--dump-spectral", default=None, metavar="PATH",
                   help="coeffs: also write the E_n tables as CSV")
    g = p.add_argument_group("gas (kv)")
    g.add_argument("--mass", type=float, default=6.646477e-27)
    g.add_argument("--temperature", type=float, default=4.2)
    g.add_argument("--nu", type=float, default=1e9)
    g.add_argument("--spin", type=float, default=0.0)
    g.add_argument("--gv", type=float, default=1.0)
    return p


def _alpha_list(args) -> list[float]:
    if args.alpha_list is None:
        return [args.alpha]
    return parse_float_list(args.alpha_list)


def _alpha_range(text: str) -> list[float]:
    # ranges like 0:-8:1 count downwards
    if ":" in text:
        a, b, h = (float(p) for p in text.split(":"))
        if b < a:
            return [-v for v in parse_float_list(f"{-a}:{-b}:{h}")]
    return parse_float_list(text)


def _context(args, alpha: float) -> KernelContext:
    return KernelContext(alpha, QuadratureSpec(abs_tol=args.abs_tol, rel_tol=args.rel_tol))


def _grid(args) -> SpectralGrid:
    return SpectralGrid.geometric(args.nk, k_max=args.kmax)


# -- output ----------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_atomic(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _records(header, rows, fmt) -> str:
    if fmt == "csv":
        return _csv(header, rows)
    return _json([dict(zip(header, (_num(v) for v in r))) for r in rows])


def _num(v):
    return float(v) if isinstance(v, np.floating) else v


# -- commands --------------------------------------------------------------

def cmd_moments(args) -> str:
    rows = []
    for a in _alpha_list(args):
        ctx = _context(args, a)
        ls = [moment_l(n, ctx) for n in range(5)]
        rows.append([a, *ls, ctx.l2 / ctx.l1, exact_wall_speed(ctx)])
    header = ["alpha", "l0", "l1", "l2", "l3", "l4", "U0", "wall_speed"]
    return _records(header, rows, args.format)


def cmd_coeffs(args) -> str:
    rows = []
    for a in _alpha_list(args):
        exp = build_expansion(_context(args, a), _grid(args), args.order)
        rows += [[a, n, u] for n, u in enumerate(exp.U)]
        if args.dump_spectral:
            write_atomic(exp.tables_csv(), args.dump_spectral)
    return _records(["alpha", "n", "U_n"], rows, args.format)


def tables_data(args) -> dict:
    alphas = TABLE_ALPHAS if args.alpha_list is None else _alpha_range(args.alpha_list)
    order = max(2, args.order)
    out = {f"table{n + 1}": {"coefficient": f"U_{n}", "rows": []} for n in range(3)}
    for a in alphas:
        ctx = _context(args, a)
        exp = build_expansion(ctx, _grid(args), order)
        v1 = phase_curve(ctx).V1()
        errs = relative_error(exp, v1)
        for n in range(3):
            out[f"table{n + 1}"]["rows"].append(
                {"alpha": a, "U": round(exp.U[n], 4), "O_percent": round(errs[n], 2),
                 "V1": v1})
    return out


def cmd_tables(args) -> str:
    data = tables_data(args)
    if args.format == "json":
        return _json(data)
    rows = []
    for key in sorted(data):
        t = data[key]
        for r in t["rows"]:
            rows.append([key, t["coefficient"], r["alpha"], f"{r['U']:.4f}",
                         f"{r['O_percent']:.2f}"])
    return _csv(["table", "coefficient", "alpha", "value", "error_percent"], rows)


def cmd_slip(args) -> str:
    rows = []
    for a in _alpha_list(args):
        exp = build_expansion(_context(args, a), _grid(args), args.order)
        res = slip_velocity(exp, args.q)
        rows.append([a, args.q, args.order, res.u_sl_over_Gv])
    return _records(["alpha", "q", "order", "u_sl_over_Gv"], rows, args.format)


def cmd_exact(args) -> str:
    if args.phase:
        return phase_curve(_context(args, args.alpha)).to_csv()
    rows = []
    for a in _alpha_list(args):
        ctx = _context(args, a)
        pc = phase_curve(ctx)
        rows.append([a, pc.V1(), exact_wall_speed(ctx), pc.root])
    return _records(["alpha", "V1", "wall_speed", "lambda_root"], rows, args.format)


def cmd_profile(args) -> str:
    xs = parse_float_list(args.xs)
    if any(x < 0 for x in xs):
        raise UsageError("positions must be >= 0")
    exp = build_expansion(_context(args, args.alpha), _grid(args), args.order)
    prof = profile(exp, args.q, xs)
    return prof.to_csv() if args.format == "csv" else prof.to_json() + "\n"


def compare_data(args) -> dict:
    ctx = _context(args, args.alpha)
    exp = build_expansion(ctx, _grid(args), args.order)
    v1 = args.exact if args.exact is not None else phase_curve(ctx).V1()
    sums = exp.partial_sums()
    errs = relative_error(exp, v1)
    orders = {str(n): {"partial_sum": float(s), "error_percent": float(e)}
              for n, (s, e) in enumerate(zip(sums, errs))}
    walls = wall_speeds(exp, 1.0)
    return {"alpha": args.alpha, "exact_V1": v1, "orders": orders,
            "wall_speed_exact": exact_wall_speed(ctx),
            "wall_speed": {str(n): w for n, w in enumerate(walls)}}


def cmd_compare(args) -> str:
    data = compare_data(args)
    if args.format == "json":
        return _json(data)
    rows = [[int(n), d["partial_sum"], data["exact_V1"], d["error_percent"]]
            for n, d in sorted(data["orders"].items(), key=lambda kv: int(kv[0]))]
    return _csv(["order", "partial_sum", "exact", "error_percent"], rows)


def cmd_kv(args) -> str:
    gas = GasParameters(args.mass, args.temperature, args.nu, args.spin, args.alpha, args.gv)
    ctx = _context(args, args.alpha)
    exp = build_expansion(ctx, _grid(args), args.order)
    rep = report(gas, ctx, args.q, exp)
    if args.format == "json":
        return _json(rep)
    keys = sorted(rep)
    return _csv(keys, [[rep[k] for k in keys]])


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def _fail(code: int, exc: BaseException) -> int:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.validate:
        checks = run_validation()
        write_atomic(summary(checks), args.output)
        return EXIT_OK if all_passed(checks) else EXIT_NUMERIC
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        text = HANDLERS[args.command](args)
        write_atomic(text, args.output)
    except (UsageError, SpecularLimit) as exc:
        return _fail(EXIT_USAGE, exc)
    except KramersError as exc:
        return _fail(EXIT_NUMERIC, exc)
    except ValueError as exc:
        return _fail(EXIT_USAGE, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
