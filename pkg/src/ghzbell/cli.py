"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 budget exceeded, 3 verification
failure.  Exact rationals are written as ``<name>_num`` / ``<name>_den``
columns next to a float convenience column.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .core import ScenarioError, as_fraction, validate_scenario
from .envelope import (
    NoViolation,
    UnboundedRegion,
    envelope_rows,
    lines_csv,
    optimize_for_visibility,
    scenario_envelope,
    visibility_sweep,
)
from .quantum import reference_visibility_bounds
from .strategies import DEFAULT_BUDGET, BudgetExceeded
from .verify import DEFAULT_SUITES, SUITES, run_suites

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3

SWEEP_SCHEMA = "# ghzbell-sweep v1"
SWEEP_COLUMNS = [
    "n", "m", "v_num", "v_den", "v", "x_num", "x_den", "x", "y_num", "y_den", "y",
    "eta_num", "eta_den", "eta_star", "violation_possible", "v_separable", "v_two_setting",
    "mode",
]
BREAKPOINT_SCHEMA = "# ghzbell-breakpoints v1"
BREAKPOINT_COLUMNS = [
    "n", "m", "v_lo_num", "v_lo_den", "v_lo", "v_hi_num", "v_hi_den", "v_hi",
    "x_num", "x_den", "x", "y_num", "y_den", "y", "eta_num", "eta_den", "eta_star", "mode",
]
VERTEX_SCHEMA = "# ghzbell-vertices v1"
VERTEX_COLUMNS = ["x_num", "x_den", "y_num", "y_den", "x", "y"]

CONCLUSION_TARGET, CONCLUSION_TOL = 0.60, 0.03


def _frac(row: dict, name: str, value: Fraction | None, float_name: str | None = None):
    row[f"{name}_num"] = "" if value is None else value.numerator
    row[f"{name}_den"] = "" if value is None else value.denominator
    row[float_name or name] = "" if value is None else float(value)


def parse_grid(text: str) -> list[Fraction]:
    """``lo:hi:step`` (inclusive, exact) or a comma list."""
    if ":" in text:
        lo, hi, step = (as_fraction(part) for part in text.split(":"))
        if step <= 0:
            raise ScenarioError("grid step must be positive")
        out, v = [], lo
        while v <= hi:
            out.append(v)
            v += step
        return out
    return [as_fraction(part) for part in text.split(",") if part.strip()]


def _envelope(args, n: int, m: int):
    return scenario_envelope(
        n, m, mode=args.mode, budget=args.budget, balanced_only=not args.full_regular
    )


def threshold_report(n: int, m: int, v, mode: str = "auto", budget: int = DEFAULT_BUDGET,
                     balanced_only: bool = True, envelope=None) -> dict:
    sc = validate_scenario(n, m, v)
    if envelope is None:
        e, _, used = scenario_envelope(n, m, mode=mode, budget=budget, balanced_only=balanced_only)
    else:
        e, used = envelope
    v_sep, v_two = reference_visibility_bounds(n)
    row = {"n": n, "m": m}
    _frac(row, "v", sc.v)
    try:
        best = optimize_for_visibility(e, sc)
    except NoViolation:
        best = None
    if best is None:
        _frac(row, "x", None)
        _frac(row, "y", None)
        _frac(row, "eta", None, "eta_star")
        row["violation_possible"] = 0
    else:
        _frac(row, "x", best.params.x)
        _frac(row, "y", best.params.y)
        _frac(row, "eta", best.eta_star, "eta_star")
        row["violation_possible"] = int(best.violation_possible)
    row["v_separable"] = float(v_sep)
    row["v_two_setting"] = v_two
    row["mode"] = used
    return row


def _emit(rows: list[dict], columns: list[str], schema: str, fmt: str, out) -> None:
    if fmt == "json":
        text = json.dumps([{c: r[c] for c in columns} for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        buf.write(schema + "\n")
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({c: (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in columns})
        text = buf.getvalue()
    _write(text, out)


def _write(text: str, out) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_threshold(args) -> int:
    n, m = args.n[0], args.m[0]
    row = threshold_report(n, m, args.v[0], args.mode, args.budget, not args.full_regular)
    row["conjecture_conditional"] = int(row["mode"] == "regular")
    columns = SWEEP_COLUMNS + ["conjecture_conditional"]
    if args.format == "text":
        eta = row["eta_star"]
        lines = [
            f"n={n} m={m} v={Fraction(row['v_num'], row['v_den'])} mode={row['mode']}"
            + (" (conditional on regular-arrangement sufficiency)" if row["conjecture_conditional"] else ""),
        ]
        if eta == "":
            lines.append("no quantum violation at this visibility")
        else:
            x = Fraction(row["x_num"], row["x_den"])
            y = Fraction(row["y_num"], row["y_den"])
            lines.append(f"x = {x} ({float(x):.6g})  y = {y} ({float(y):.6g})")
            lines.append(f"eta* = {row['eta_num']}/{row['eta_den']} = {eta:.6f}")
        lines.append(f"violation_possible = {bool(row['violation_possible'])}")
        _write("\n".join(lines) + "\n", args.out)
    else:
        _emit([row], columns, SWEEP_SCHEMA, args.format, args.out)
    return EXIT_OK


def _pairs(args):
    if args.square:
        return [(n, n) for n in args.n]
    return [(n, m) for n in args.n for m in args.m]


def cmd_sweep(args) -> int:
    rows = []
    if args.breakpoints:
        for n, m in _pairs(args):
            e, _, used = _envelope(args, n, m)
            sweep = visibility_sweep(e, validate_scenario(n, m, 1))
            for lo, hi, (x, y) in sweep.intervals:
                row = {"n": n, "m": m}
                _frac(row, "v_lo", lo)
                _frac(row, "v_hi", hi)
                _frac(row, "x", x)
                _frac(row, "y", y)
                D = m * y - (1 - hi) * x
                _frac(row, "eta", Fraction(2 * n) / D if D > 0 else None, "eta_star")
                row["mode"] = used
                rows.append(row)
        _emit(rows, BREAKPOINT_COLUMNS, BREAKPOINT_SCHEMA, args.format, args.out)
        return EXIT_OK
    grid = parse_grid(args.v_grid) if args.v_grid else [as_fraction(v) for v in args.v]
    for n, m in _pairs(args):
        e, _, used = _envelope(args, n, m)
        for v in grid:
            rows.append(threshold_report(n, m, v, envelope=(e, used)))
    _emit(rows, SWEEP_COLUMNS, SWEEP_SCHEMA, args.format, args.out)
    return EXIT_OK


def cmd_lines(args) -> int:
    n, m = args.n[0], args.m[0]
    e, lines, used = _envelope(args, n, m)
    text = lines_csv(lines, e)
    buf = io.StringIO()
    buf.write(VERTEX_SCHEMA + "\n")
    writer = csv.DictWriter(buf, fieldnames=VERTEX_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in envelope_rows(e):
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    if args.out:
        _write(text, args.out)
        _write(buf.getvalue(), args.out + ".vertices.csv")
    else:
        _write(text + "\n" + buf.getvalue(), None)
    print(f"# {len(lines)} distinct lines, {len(e.lines)} relevant, mode={used}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suite or list(DEFAULT_SUITES)
    results = run_suites(names, seed=args.seed, nmax=args.nmax, mmax=args.mmax,
                         inject_fault=args.inject_fault)
    ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name} ({res.checked} checks)" + (f": {res.detail}" if res.detail else ""))
        for note in res.notes:
            print(f"     note: {note}")
        ok &= res.passed
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_conclusion_check(args) -> int:
    n, v = args.n[0], args.v[0]
    ms = args.m if args.m != [None] else [3, 5, 7, 11]
    rows = []
    for m in ms:
        row = threshold_report(n, m, v, args.mode, args.budget, not args.full_regular)
        rows.append(row)
    feasible = [r for r in rows if r["eta_star"] != ""]
    best = min(feasible, key=lambda r: Fraction(r["eta_num"], r["eta_den"])) if feasible else None
    report = {
        "n": n,
        "v": float(as_fraction(v)),
        "per_m": {r["m"]: r["eta_star"] for r in rows},
        "best_m": best["m"] if best else None,
        "eta_star": best["eta_star"] if best else None,
        "eta_exact": f"{best['eta_num']}/{best['eta_den']}" if best else None,
        "violation_possible": bool(best and best["violation_possible"]),
        "target": CONCLUSION_TARGET,
        "tolerance": CONCLUSION_TOL,
        "agrees": bool(best) and abs(best["eta_star"] - CONCLUSION_TARGET) <= CONCLUSION_TOL,
        "note": "fidelity treated as visibility: F = v + (1 - v)/2^n",
    }
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzbell", description="Detection-efficiency thresholds for GHZ Bell tests."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, multi=False, fmt_default="csv", formats=("csv", "json")):
        nargs = "+" if multi else 1
        p.add_argument("--n", type=int, nargs=nargs, required=True)
        p.add_argument("--m", type=int, nargs=nargs, default=[None])
        p.add_argument("--mode", choices=["exhaustive", "regular", "auto"], default="auto")
        p.add_argument("--full-regular", action="store_true",
                       help="regular mode: all count patterns instead of balanced ones")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=formats, default=fmt_default)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("threshold", help="optimal inequality and eta* for one scenario")
    common(p, fmt_default="text", formats=("text", "csv", "json"))
    p.add_argument("--v", nargs=1, default=["1"])
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sweep", help="eta* over a visibility grid or exact breakpoints")
    common(p, multi=True)
    p.add_argument("--v", nargs="+", default=["1"])
    p.add_argument("--v-grid", default=None, help="lo:hi:step")
    p.add_argument("--square", action="store_true", help="use m = n for each --n")
    p.add_argument("--breakpoints", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lines", help="constraint lines with relevance flags, plus vertices")
    common(p)
    p.set_defaults(func=cmd_lines)

    p = sub.add_parser("verify", help="run desk-scale invariant suites")
    p.add_argument("--suite", action="append", choices=SUITES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nmax", type=int, default=30)
    p.add_argument("--mmax", type=int, default=13)
    p.add_argument("--inject-fault", action="store_true",
                   help="raise y above each vertex; the local-bound suite must fail")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("conclusion-check", help="best eta* over m at a given n and v")
    common(p, multi=True, fmt_default="json", formats=("json",))
    p.add_argument("--v", nargs=1, default=["0.70"])
    p.set_defaults(func=cmd_conclusion_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("threshold", "lines") and args.m == [None]:
        parser.error("--m is required")
    if args.command == "sweep" and args.m == [None] and not args.square:
        parser.error("--m is required unless --square is given")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}\nhint: raise --budget or pass --mode regular", file=sys.stderr)
        return EXIT_BUDGET
    except (ScenarioError, UnboundedRegion, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
