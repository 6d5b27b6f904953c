"""Command line front end: ``ellipstat energy|tables|convergence|mesh``."""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import os
import sys

from . import analytic, bem, spectral
from .errors import ConfigurationError, NumericalError
from .geometry import Ellipse
from .mesh import dumps, generate
from .report import (
    METHODS, ROUNDING, Calculator, DensitySpec, build_tables, fmt_float, render_tables,
    reports_to_csv, reports_to_jsonl, reports_to_text, tables_to_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _triple(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not numbers: {text!r}")


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _sweep(text):
    try:
        start, stop = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected START:STOP (inclusive integers)")
    return start, stop


def _add_geometry(p, multi=True):
    nargs = "+" if multi else None
    p.add_argument("-a", type=_positive_float, nargs=nargs, required=True, help="semi-major axis")
    p.add_argument("-b", type=_positive_float, nargs=nargs, required=True, help="semi-minor axis (b <= a)")


def _add_density(p, multi=True):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=_triple, metavar="A0,A1,A2",
                   help="normalized coefficients: a0 + a1*x1/a + a2*x2/b")
    g.add_argument("--sigma", metavar="EXPR", help='monomial expression, e.g. "3 + x1 + 2*x2"')
    g.add_argument("--density", choices=("one", "x1", "x2"), nargs="+" if multi else None,
                   help="named monomial densities")


def _add_numerics(p):
    p.add_argument("-N", type=_nonneg_int, default=None, help="spectral truncation degree (default 30)")
    p.add_argument("--level", type=_nonneg_int, default=None, help="mesh refinement level (default 4)")
    p.add_argument("--q", type=int, default=None, help="regular Gauss points per direction (default 4)")
    p.add_argument("--q-sing", type=int, default=None, help="singular Gauss points per direction (default 6)")
    p.add_argument("--workers", type=int, default=None, help="threads for BEM assembly")


def _add_output(p, formats=("csv", "jsonl", "text"), default="jsonl"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--rounded", action="store_true", help="print values with 4 decimals")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ellipstat", description="Electrostatic energy of charged elliptical discs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("energy", help="energy of one or more (method, ellipse, density) cells")
    _add_geometry(p)
    _add_density(p)
    p.add_argument("--method", choices=METHODS, nargs="+", default=["analytic"])
    _add_numerics(p)
    _add_output(p)

    p = sub.add_parser("tables", help="regenerate the comparison tables")
    p.add_argument("--level", type=_nonneg_int, default=5, help="BEM refinement level (default 5)")
    p.add_argument("--q", type=int, default=bem.DEFAULT_Q)
    p.add_argument("--q-sing", type=int, default=bem.DEFAULT_Q_SING)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--exact-only", action="store_true", help="skip the BEM columns")
    p.add_argument("--step", type=_positive_float, default=0.05, help="grid step for the error table")
    p.add_argument("--rounding", choices=sorted(ROUNDING), default="truncate",
                   help="how the 4-decimal text table is rounded")
    p.add_argument("--out", metavar="DIR", help="directory for tables.csv and tables.txt (default: text to stdout)")

    p = sub.add_parser("convergence", help="sweep N (spectral) or the refinement level (bem)")
    _add_geometry(p, multi=False)
    _add_density(p, multi=False)
    p.add_argument("--method", choices=("spectral", "bem"), required=True)
    p.add_argument("--sweep", type=_sweep, required=True, metavar="START:STOP")
    p.add_argument("--q", type=int, default=bem.DEFAULT_Q)
    p.add_argument("--q-sing", type=int, default=bem.DEFAULT_Q_SING)
    p.add_argument("--workers", type=int, default=None)
    _add_output(p, formats=("csv", "jsonl"), default="csv")

    p = sub.add_parser("mesh", help="write the refined mesh of an ellipse")
    _add_geometry(p, multi=False)
    p.add_argument("--level", type=_nonneg_int, default=3)
    p.add_argument("--out", metavar="PATH")
    return parser


def _ellipse(a, b):
    try:
        return Ellipse(a, b)
    except ValueError as exc:
        raise UsageError(str(exc))


def _densities(args):
    if args.alpha is not None:
        return [DensitySpec.from_alpha(args.alpha)]
    if args.sigma is not None:
        try:
            return [DensitySpec.from_expression(args.sigma)]
        except ValueError as exc:
            raise UsageError(str(exc))
    names = args.density if isinstance(args.density, list) else [args.density]
    return [DensitySpec.named(n) for n in dict.fromkeys(names)]


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_energy(args):
    methods = list(dict.fromkeys(args.method))
    if "bem" not in methods and any(v is not None for v in (args.level, args.q, args.q_sing)):
        raise UsageError("--level/--q/--q-sing only apply to --method bem")
    if "spectral" not in methods and args.N is not None:
        raise UsageError("-N only applies to --method spectral")
    ellipses = [_ellipse(a, b) for a, b in itertools.product(args.a, args.b)]
    if "oracle" in methods and any(e.a != e.b for e in ellipses):
        raise UsageError("--method oracle requires a circle (a == b)")
    calc = Calculator(
        N=spectral.DEFAULT_N if args.N is None else args.N,
        level=4 if args.level is None else args.level,
        q=bem.DEFAULT_Q if args.q is None else args.q,
        q_sing=bem.DEFAULT_Q_SING if args.q_sing is None else args.q_sing,
        workers=args.workers,
    )
    densities = _densities(args)
    reports = [calc.report(m, e, d) for e in ellipses for m in methods for d in densities]
    if args.format == "csv":
        text = reports_to_csv(reports, args.rounded)
    elif args.format == "text":
        text = reports_to_text(reports, args.rounded)
    else:
        text = reports_to_jsonl(reports)
    _emit(text, args.out)


def cmd_tables(args):
    calc = Calculator(level=args.level, q=args.q, q_sing=args.q_sing, workers=args.workers)
    t1, t2, t3 = build_tables(calc, exact_only=args.exact_only, step=args.step)
    text = render_tables(t1, t2, t3, args.rounding)
    if args.out is None:
        sys.stdout.write(text)
        return
    os.makedirs(args.out, exist_ok=True)
    _emit(tables_to_csv(t1, t2, t3), os.path.join(args.out, "tables.csv"))
    _emit(text, os.path.join(args.out, "tables.txt"))


def convergence_rows(e, spec, method, start, stop, q=bem.DEFAULT_Q, q_sing=bem.DEFAULT_Q_SING, workers=None):
    """(parameter, value, reference, relative_error) for each sweep point."""
    d = spec.affine(e)
    reference = analytic.theorem1_energy(e, d).total
    if method == "spectral":
        # one expansion at the largest degree; lower truncations are its partial sums
        g = spectral.expand_density(e, d, stop)
        values = spectral.partial_sums(e, g)[start:stop + 1]
    else:
        calc = Calculator(q=q, q_sing=q_sing, workers=workers)
        values = [calc.value("bem", e, spec, level=lv) for lv in range(start, stop + 1)]
    return [(p, v, reference, abs(v - reference) / abs(reference)) for p, v in zip(range(start, stop + 1), values)]


def cmd_convergence(args):
    start, stop = args.sweep
    if stop < start:
        raise UsageError(f"empty sweep range {start}:{stop}")
    if start < 0:
        raise UsageError("sweep values must be non-negative")
    e = _ellipse(args.a, args.b)
    spec = _densities(args)[0]
    rows = convergence_rows(e, spec, args.method, start, stop, args.q, args.q_sing, args.workers)
    name = "N" if args.method == "spectral" else "level"
    if args.format == "jsonl":
        import json
        text = "".join(json.dumps({"method": args.method, name: p, "value": v, "reference": r,
                                   "relative_error": err}) + "\n" for p, v, r, err in rows)
    else:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow([name, "value", "reference", "relative_error"])
        for p, v, r, err in rows:
            w.writerow([p, fmt_float(v, args.rounded), fmt_float(r, args.rounded), fmt_float(err)])
        text = out.getvalue()
    _emit(text, args.out)


def cmd_mesh(args):
    _emit(dumps(generate(_ellipse(args.a, args.b), args.level)), args.out)


COMMANDS = {"energy": cmd_energy, "tables": cmd_tables, "convergence": cmd_convergence, "mesh": cmd_mesh}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (UsageError, ConfigurationError) as exc:
        parser.print_usage(sys.stderr)
        print(f"ellipstat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"ellipstat: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
