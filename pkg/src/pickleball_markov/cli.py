"""Command-line front end.

Every exact value is emitted twice: as a ``numerator/denominator`` string
and as a correctly rounded decimal.  Output is a pure function of the
arguments, so repeated runs are byte-identical.

Exit codes: 0 success, 1 domain error (JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .analytics import (
    DEFAULT_SCAN_STEP,
    DEFAULT_ZERO_TOL,
    SearchRegion,
    comparison_row,
    cross_section_table,
    find_diagonal_zeros,
    find_extremum,
    first_server_advantage,
    resolve_system,
)
from .exceptions import DomainError
from .oracle import FormId, closed_form, evaluate_closed_form
from .rational import format_decimal, format_fraction, format_scientific, parse_rational
from .simulator import SimConfig, simulate, simulate_advantage
from .solver import chain_summary
from .states import ScoringSystem, System, Team, initial_state
from .transitions import build_model, dump_model

PROG = "pickleball-markov"
SYSTEM_CHOICES = [s.value for s in System]

FIGURE_6_PB = [Fraction(m, 10) for m in range(1, 10)]
FIGURE_78_PB = [Fraction(36 + 2 * k, 100) for k in range(10)]
FIGURE_SERIES = {
    "3": (System.SIDE_OUT, 11),
    "4": (System.SIDE_OUT, 15),
}
DIAGONAL_SERIES = (
    (System.SIDE_OUT, 11),
    (System.SIDE_OUT, 15),
    (System.MODIFIED_RALLY, 21),
    (System.HYBRID_RALLY, 21),
)
COMPARED = ((System.SIDE_OUT, 11), (System.MODIFIED_RALLY, 21))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(2)


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _exact(value: Fraction, digits: int) -> dict:
    return {"exact": format_fraction(value), "decimal": format_decimal(value, digits)}


def _grid(lo: Fraction, hi: Fraction, points: int) -> list[Fraction]:
    if points < 2:
        raise DomainError("grid needs at least 2 points")
    return [lo + (hi - lo) * k / (points - 1) for k in range(points)]


def _header(args, command: str) -> dict:
    record = {"command": command, "version": __version__}
    if getattr(args, "system", None):
        record["system"] = args.system
        record["n"] = args.n
    return record


def _params_record(args) -> dict:
    return {"p_A": _exact(args.pa, args.digits), "p_B": _exact(args.pb, args.digits)}


def _csv(rows: list[list], header: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit_json(record: dict) -> str:
    return json.dumps(record, indent=2) + "\n"


# -- subcommands ----------------------------------------------------------


def cmd_summary(args) -> str:
    system = resolve_system(args.system, args.n)
    record = _header(args, "summary")
    record["params"] = _params_record(args)
    record["first_server"] = args.first
    d = args.digits
    if args.first == "coin":
        row = comparison_row(system, None, (args.pa, args.pb), sd_digits=d)
        record["win_prob_A"] = _exact(row.win_prob_A, d)
        record["mean_duration"] = _exact(row.mean_duration, d)
        record["duration_variance"] = _exact(row.duration_variance, d)
        record["sd_duration"] = row.sd_duration
    else:
        model = build_model(system, (args.pa, args.pb))
        start = initial_state(system, Team(args.first))
        s = chain_summary(model, start)
        record["start"] = f"{start.i}-{start.j}-{start.k}"
        record["absorb_prob_A"] = _exact(s.absorb_prob_A, d)
        record["absorb_prob_B"] = _exact(s.absorb_prob_B, d)
        record["mean_duration"] = _exact(s.mean_duration, d)
        record["duration_variance"] = _exact(s.duration_variance, d)
    if args.format == "csv":
        flat = {k: (v["decimal"] if isinstance(v, dict) and "decimal" in v else v)
                for k, v in record.items() if k != "params"}
        flat["p_A"], flat["p_B"] = format_fraction(args.pa), format_fraction(args.pb)
        return _csv([list(flat.values())], list(flat))
    return _emit_json(record)


def cmd_advantage(args) -> str:
    result = first_server_advantage(args.system, args.n, (args.pa, args.pb))
    record = _header(args, "advantage")
    d = args.digits if args.digits is not None else 12
    record["params"] = _params_record(argparse.Namespace(pa=args.pa, pb=args.pb, digits=d))
    value = result.value
    record["value"] = {
        "exact": format_fraction(value),
        "decimal": format_decimal(value, args.digits) if args.digits is not None else format_scientific(value, 6),
        "scientific": format_scientific(value, 6),
    }
    record["sign"] = result.sign
    record["win_prob_A_first"] = _exact(result.win_if_A_first, d)
    record["win_prob_B_first"] = _exact(result.win_if_B_first, d)
    if args.format == "csv":
        return _csv(
            [[args.system, args.n, format_fraction(args.pa), format_fraction(args.pb),
              record["value"]["decimal"], record["value"]["scientific"], result.sign]],
            ["system", "n", "p_A", "p_B", "value", "scientific", "sign"],
        )
    return _emit_json(record)


def cmd_zeros(args) -> str:
    zs = find_diagonal_zeros(args.system, args.n, args.tol, args.step, workers=args.workers)
    d = args.digits
    if args.format == "csv":
        rows = [
            [k, format_decimal(r.midpoint, d), format_fraction(r.lo), format_fraction(r.hi),
             r.sign_left, r.sign_right]
            for k, r in enumerate(zs.roots, 1)
        ]
        return _csv(rows, ["index", "root", "lo", "hi", "sign_left", "sign_right"])
    record = _header(args, "zeros")
    record["tolerance"] = format_fraction(zs.tolerance)
    record["scan_step"] = format_fraction(zs.scan_step)
    record["count"] = len(zs.roots)
    record["roots"] = [
        {
            "root": format_decimal(r.midpoint, d),
            "lo": format_fraction(r.lo),
            "hi": format_fraction(r.hi),
            "sign_left": r.sign_left,
            "sign_right": r.sign_right,
        }
        for r in zs.roots
    ]
    return _emit_json(record)


def cmd_extremum(args) -> str:
    region = SearchRegion.parse(args.region)
    ext = find_extremum(
        args.system, args.n, region, args.mode,
        value_tol=args.value_tol, point_tol=args.point_tol,
        grid_step=args.grid_step, workers=args.workers,
    )
    x, y = ext.point
    d = args.digits
    if args.format == "csv":
        return _csv(
            [[args.system, args.n, args.mode, format_decimal(x, d), format_decimal(y, d),
              format_scientific(ext.value, 6)]],
            ["system", "n", "mode", "x", "y", "value"],
        )
    record = _header(args, "extremum")
    record["mode"] = args.mode
    record["region"] = args.region
    record["point"] = {"x": _exact(x, d), "y": _exact(y, d)}
    record["value"] = {"exact": format_fraction(ext.value), "scientific": format_scientific(ext.value, 6)}
    record["evaluations"] = ext.evaluations
    return _emit_json(record)


def _log10_abs(value: Fraction) -> str:
    if value == 0:
        return "-inf"
    v = abs(value)
    return f"{math.log10(v.numerator) - math.log10(v.denominator):.6f}"


def _figure_rows(args):
    fid = args.id
    if fid in FIGURE_SERIES:
        kind, n = FIGURE_SERIES[fid]
        system = ScoringSystem(kind, n)
        axis = _grid(Fraction(0), Fraction(1), args.grid + 1)[1:-1]
        cache = {}
        rows = []
        for pa in axis:
            for pb in axis:
                key = (min(pa, pb), max(pa, pb))
                if key not in cache:
                    cache[key] = first_server_advantage(system, None, key).value
                v = cache[key]
                rows.append([str(system), format_decimal(pa, 6), format_decimal(pb, 6),
                             (v > 0) - (v < 0), format_scientific(v, 6)])
        return ["system", "p_A", "p_B", "sign", "advantage"], rows
    if fid == "5":
        xs = _grid(Fraction(0), Fraction(1), args.points)[1:]
        rows = []
        for kind, n in DIAGONAL_SERIES:
            system = ScoringSystem(kind, n)
            for x in xs:
                v = first_server_advantage(system, None, (x, x)).value
                rows.append([str(system), format_decimal(x, 6), (v > 0) - (v < 0),
                             format_scientific(v, 6), _log10_abs(v)])
        return ["system", "x", "sign", "advantage", "log10_abs_advantage"], rows
    if fid == "6":
        p_B, p_A = FIGURE_6_PB, _grid(Fraction(0), Fraction(1), args.points)
    else:
        p_B, p_A = FIGURE_78_PB, _grid(Fraction(35, 100), Fraction(55, 100), args.points)
    systems = [ScoringSystem(k, n) for k, n in COMPARED]
    table = cross_section_table(systems, None, p_B, p_A, exact=not args.fast,
                                sd_digits=args.digits, workers=args.workers)
    rows = []
    for r in table:
        if r.exact:
            win, mean = format_decimal(r.win_prob_A, args.digits), format_decimal(r.mean_duration, args.digits)
        else:
            win, mean = f"{r.win_prob_A:.{args.digits}f}", f"{r.mean_duration:.{args.digits}f}"
        rows.append([str(r.system), format_decimal(r.p_B, 6), format_decimal(r.p_A, 6),
                     win, mean, r.sd_duration])
    return ["system", "p_B", "p_A", "win_prob_A", "mean_duration", "sd_duration"], rows


def cmd_figure(args) -> str:
    header, rows = _figure_rows(args)
    if args.format == "json":
        record = {"command": "figure", "version": __version__, "id": args.id,
                  "columns": header, "rows": rows}
        return _emit_json(record)
    return _csv(rows, header)


def cmd_simulate(args) -> str:
    system = resolve_system(args.system, args.n)
    pa, pb = float(args.pa), float(args.pb)
    record = _header(args, "simulate")
    record["params"] = {"p_A": format_fraction(args.pa), "p_B": format_fraction(args.pb)}
    record["games"] = args.games
    record["seed"] = args.seed
    if args.advantage:
        diff, se, a, b = simulate_advantage(system, pa, pb, args.games, args.seed, args.workers)
        record["advantage_estimate"] = diff
        record["standard_error"] = se
        record["A_first"] = a.as_dict()
        record["B_first"] = b.as_dict()
    else:
        first = "coin" if args.first == "coin" else Team(args.first)
        est = simulate(SimConfig(system, pa, pb, first, args.games, args.seed), args.workers)
        record["first_server"] = args.first
        record.update(est.as_dict())
    if args.format == "csv":
        flat = {k: v for k, v in record.items() if not isinstance(v, dict)}
        return _csv([list(flat.values())], list(flat))
    return _emit_json(record)


def _random_unit(rng: random.Random, max_den: int) -> Fraction:
    den = rng.randint(2, max_den)
    return Fraction(rng.randint(1, den - 1), den)


def cmd_oracle_check(args) -> tuple[str, int]:
    form = closed_form(args.form)
    rng = random.Random(args.seed)
    if form.id is FormId.F11_FULL:
        system = ScoringSystem(System.SIDE_OUT, 11)
    elif form.id is FormId.F15_FULL:
        system = ScoringSystem(System.SIDE_OUT, 15)
    elif form.id is FormId.F21STAR_DIAG:
        system = ScoringSystem(System.MODIFIED_RALLY, 21)
    else:
        system = ScoringSystem(System.HYBRID_RALLY, 21)
    checks = []
    for _ in range(args.points):
        x = _random_unit(rng, args.max_den)
        y = x if form.diagonal_only else _random_unit(rng, args.max_den)
        chain = first_server_advantage(system, None, (x, y)).value
        closed = evaluate_closed_form(form, x) if form.diagonal_only else evaluate_closed_form(form, x, y)
        checks.append({"x": format_fraction(x), "y": format_fraction(y), "pass": chain == closed,
                       "value": format_scientific(chain, 6)})
    failures = sum(not c["pass"] for c in checks)
    if args.format == "csv":
        out = _csv([[c["x"], c["y"], c["value"], "pass" if c["pass"] else "FAIL"] for c in checks],
                   ["x", "y", "value", "result"])
    else:
        out = _emit_json({
            "command": "oracle-check", "version": __version__, "form": form.id.value,
            "system": str(system), "seed": args.seed, "points": args.points,
            "max_denominator": args.max_den, "passed": args.points - failures,
            "failed": failures, "checks": checks,
        })
    return out, 0 if failures == 0 else 1


def cmd_dump(args) -> str:
    return dump_model(build_model(resolve_system(args.system, args.n), (args.pa, args.pb)))


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Exact analysis of pickleball doubles scoring chains.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, system=True, params=True, digits=12):
        if system:
            p.add_argument("--system", required=True, choices=SYSTEM_CHOICES)
            p.add_argument("--n", required=True, type=int)
        if params:
            p.add_argument("--pa", required=True, type=_rational_arg, help="decimal or p/q")
            p.add_argument("--pb", required=True, type=_rational_arg, help="decimal or p/q")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--digits", type=int, default=digits)

    p = sub.add_parser("summary", help="absorption probabilities and duration moments")
    common(p)
    p.add_argument("--first", choices=("A", "B", "coin"), default="A")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("advantage", help="exact first-server advantage")
    common(p, digits=None)
    p.set_defaults(func=cmd_advantage)

    p = sub.add_parser("zeros", help="zeros of the diagonal advantage on (0, 1)")
    common(p, params=False, digits=6)
    p.add_argument("--tol", type=_rational_arg, default=DEFAULT_ZERO_TOL)
    p.add_argument("--step", type=_rational_arg, default=DEFAULT_SCAN_STEP)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("extremum", help="minimize or maximize the advantage over a region")
    common(p, params=False, digits=6)
    p.add_argument("--region", required=True, help="xlo,xhi,ylo,yhi,slo,shi")
    p.add_argument("--mode", choices=("min", "max"), required=True)
    p.add_argument("--point-tol", type=_rational_arg, default=Fraction(1, 10**7))
    p.add_argument("--value-tol", type=_rational_arg, default=None)
    p.add_argument("--grid-step", type=_rational_arg, default=Fraction(1, 64))
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_extremum)

    p = sub.add_parser("figure", help="data table for one of the standard plots (ids 3-8)")
    p.add_argument("--id", required=True, choices=("3", "4", "5", "6", "7", "8"))
    p.add_argument("--points", type=int, default=201, help="p_A (or x) grid points")
    p.add_argument("--grid", type=int, default=50, help="sign-grid subdivisions for figures 3-4")
    p.add_argument("--fast", action="store_true", help="double precision for figures 6-8")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--digits", type=int, default=12)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("simulate", help="Monte Carlo playout")
    common(p)
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--first", choices=("A", "B", "coin"), default="A")
    p.add_argument("--advantage", action="store_true", help="estimate the first-server advantage")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle-check", help="compare closed forms with chain solves")
    p.add_argument("--form", required=True, choices=[f.value for f in FormId])
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-den", type=int, default=1000)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("dump", help="list the nonzero entries of [Q | S]")
    common(p)
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except DomainError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    code = 0
    if isinstance(result, tuple):
        result, code = result
    sys.stdout.write(result)
    return code


run = main

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
