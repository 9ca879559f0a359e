"""Command-line front end: ``stabsim <subcommand> [flags]``.

All physical inputs are the dimensionless x = I2/I1, delta = Delta/I1 and
theta = tau*I1 (atomic units, I = eps0^2), except for ``scale-check`` which
takes absolute atomic-unit values.  Results go to stdout or ``--out`` as CSV
with ``#`` provenance lines.

Exit status: 0 success, 1 dataset validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atoms import BUILTIN_NAMES, builtin_dataset, load_dataset, resolve_dataset, validate
from .dressed import DrivePoint, quasienergies, width_curve
from .dynamics import (DEFAULT_TOL, AbsoluteParams, Outcome, propagate, propagate_absolute,
                       propagate_ode, propagate_rectangular, scaling_transform)
from .errors import DatasetParseError, DatasetValidationError, StabsimError, UnknownDatasetError
from .optimal import (LinearLaw, asymptotic_width, delta_opt_law, fit_delta_opt_empirical, g_opt,
                      zero_detuning_point)
from .pulses import EnvelopeSpec
from .sweep import (population_ratio, resonance_scan, smoothing_study, spectral_profile,
                    stabilization_window)
from .table import SweepResult

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


# --------------------------------------------------------------------------
# value grammar

def grid(text):
    """``v``, ``a:b:n`` (n points inclusive) or ``v1,v2,...``."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            return [float(v) for v in np.linspace(a, b, n)] if n > 1 else [a]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, a:b:n or a comma list, got {text!r}")


def number(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")


def envelope(text):
    try:
        return EnvelopeSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def law(text):
    if text == "closed":
        return text
    try:
        a, b = text.split(",")
        return LinearLaw(float(a), float(b))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'closed' or INTERCEPT,SLOPE, got {text!r}")


def interval(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    return lo, hi


# --------------------------------------------------------------------------
# parser

def _common(p, *, tol=False, out=True):
    p.add_argument("--atom", required=True, metavar="ID|PATH",
                   help="builtin dataset (He2, H2, H3) or JSON dataset file")
    if tol:
        p.add_argument("--tol", type=number, default=DEFAULT_TOL,
                       help=f"ODE relative tolerance in [1e-13, 1e-6] (default {DEFAULT_TOL:g})")
    if out:
        p.add_argument("--out", default="-", metavar="PATH|-", help="output file, '-' for stdout")


def _workers(p):
    p.add_argument("--workers", type=int, default=1, help="parallel processes for grid cells")


def _gnuplot(p):
    p.add_argument("--gnuplot", metavar="PATH", help="also write a gnuplot script plotting the CSV")


X_HELP = "intensity ratio x = I2/I1 (dimensionless); {}"
D_HELP = "detuning delta = Delta/I1 (dimensionless); {}"
T_HELP = "interaction time theta = tau*I1 (dimensionless)"
E_HELP = "pulse envelope: rect, sin2 or smooth:a=<float> (default rect)"
L_HELP = "number of bound levels, 2 or 3 (default 2)"
GRID = "float, a:b:n or comma list"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stabsim", description="Two-color interference stabilization of atoms.")
    parser.add_argument("--version", action="version", version=f"stabsim {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("validate", help="check a dataset's physical consistency")
    _common(p)

    p = sub.add_parser("quasienergies", help="complex quasienergies and widths")
    _common(p)
    p.add_argument("--x", type=grid, required=True, help=X_HELP.format(GRID))
    p.add_argument("--delta", type=grid, required=True, help=D_HELP.format(GRID))

    p = sub.add_parser("widths", help="width curves g(x) at fixed delta, branches by continuity")
    _common(p)
    _gnuplot(p)
    p.add_argument("--delta", type=number, required=True, help=D_HELP.format("float"))
    p.add_argument("--x", type=grid, required=True, help=X_HELP.format("a:b:n, strictly increasing"))

    p = sub.add_parser("delta-opt", help="closed-form optimal detuning law")
    _common(p)
    p.add_argument("--x", type=grid, help=X_HELP.format(GRID + "; tabulate the law"))

    p = sub.add_parser("g-opt", help="optimized widths along the optimal-detuning line")
    _common(p)
    p.add_argument("--x", type=grid, required=True, help=X_HELP.format(GRID))

    p = sub.add_parser("zero-point", help="(x0, delta0) where the dressed detuning vanishes")
    _common(p)

    p = sub.add_parser("propagate", help="residual and ionization probabilities after the pulse")
    _common(p, tol=True)
    p.add_argument("--x", type=grid, required=True, help=X_HELP.format(GRID))
    p.add_argument("--delta", type=grid, required=True, help=D_HELP.format(GRID))
    p.add_argument("--theta", type=number, required=True, help=T_HELP)
    p.add_argument("--envelope", type=envelope, default=EnvelopeSpec.rectangular(), help=E_HELP)
    p.add_argument("--levels", type=int, choices=(2, 3), default=2, help=L_HELP)
    p.add_argument("--method", choices=("auto", "analytic", "ode"), default="auto",
                   help="auto: analytic for 2-level rectangular pulses, ODE otherwise")

    p = sub.add_parser("scan", help="w_res(x) at fixed detunings (resonance curves)")
    _common(p, tol=True)
    _workers(p)
    _gnuplot(p)
    p.add_argument("--delta", type=grid, required=True, help=D_HELP.format("one curve per value; " + GRID))
    p.add_argument("--x", type=grid, required=True, help=X_HELP.format(GRID))
    p.add_argument("--theta", type=number, required=True, help=T_HELP)
    p.add_argument("--envelope", type=envelope, default=EnvelopeSpec.rectangular(), help=E_HELP)
    p.add_argument("--levels", type=int, choices=(2, 3), default=2, help=L_HELP)
    p.add_argument("--law", type=law, help="add the peak-envelope curve along delta = law(x): "
                   "'closed' or INTERCEPT,SLOPE (dimensionless)")

    p = sub.add_parser("window", help="w_i versus I1/I0 at fixed absolute detuning and duration")
    _common(p, tol=True)
    _workers(p)
    _gnuplot(p)
    p.add_argument("--x", type=number, required=True, help=X_HELP.format("float"))
    p.add_argument("--delta-ref", type=number, required=True,
                   help="Delta/I0 (dimensionless); delta = delta_ref / (I1/I0)")
    p.add_argument("--theta-ref", type=number, required=True,
                   help="tau*I0 (dimensionless); theta = theta_ref * (I1/I0)")
    p.add_argument("--i1", type=grid, required=True, help="I1/I0 values (dimensionless); " + GRID)
    p.add_argument("--envelope", type=envelope, default=EnvelopeSpec.rectangular(), help=E_HELP)
    p.add_argument("--levels", type=int, choices=(2, 3), default=2, help=L_HELP)

    p = sub.add_parser("profile", help="w_res(delta) at fixed x and theta")
    _common(p, tol=True)
    _workers(p)
    _gnuplot(p)
    p.add_argument("--x", type=number, required=True, help=X_HELP.format("float"))
    p.add_argument("--i1", type=number, default=1.0, help="I1/I0 of the operating point (recorded only)")
    p.add_argument("--theta", type=number, required=True, help=T_HELP)
    p.add_argument("--delta", type=grid, required=True, help=D_HELP.format(GRID))
    p.add_argument("--envelope", type=envelope, default=EnvelopeSpec.rectangular(), help=E_HELP)
    p.add_argument("--levels", type=int, choices=(2, 3), default=2, help=L_HELP)

    p = sub.add_parser("ratio", help="w2/w1 and w1/w2 along a detuning law")
    _common(p, tol=True)
    _workers(p)
    _gnuplot(p)
    p.add_argument("--law", type=law, default="closed",
                   help="'closed' (default) or INTERCEPT,SLOPE (dimensionless)")
    p.add_argument("--x", type=grid, required=True, help=X_HELP.format(GRID))
    p.add_argument("--theta", type=number, required=True, help=T_HELP)
    p.add_argument("--envelope", type=envelope, default=EnvelopeSpec.rectangular(), help=E_HELP)
    p.add_argument("--levels", type=int, choices=(2, 3), default=2, help=L_HELP)

    p = sub.add_parser("smoothing", help="w_res(x) for several smoothing factors a")
    _common(p, tol=True)
    _workers(p)
    _gnuplot(p)
    p.add_argument("--delta", type=number, required=True, help=D_HELP.format("float"))
    p.add_argument("--theta", type=number, required=True, help=T_HELP)
    p.add_argument("--a", type=grid, required=True, help="smoothing factors a > 0 (dimensionless); " + GRID)
    p.add_argument("--x", type=grid, required=True, help=X_HELP.format(GRID))
    p.add_argument("--levels", type=int, choices=(2, 3), default=2, help=L_HELP)

    p = sub.add_parser("fit-deltaopt", help="empirical linear law of the w_res-maximizing detuning")
    _common(p, tol=True)
    _workers(p)
    p.add_argument("--envelope", type=envelope, default=EnvelopeSpec.pure_sin2(),
                   help="pulse envelope: rect, sin2 or smooth:a=<float> (default sin2)")
    p.add_argument("--theta", type=number, required=True, help=T_HELP)
    p.add_argument("--x", type=grid, required=True, help=X_HELP.format("at least 3 points; " + GRID))
    p.add_argument("--bracket", type=interval,
                   help="fixed delta search interval LO:HI (dimensionless); "
                        "default: closed-form optimum +- (40 + 40 x)")
    p.add_argument("--scan-points", type=int, default=41, help="coarse scan points per bracket")
    p.add_argument("--levels", type=int, choices=(2, 3), default=2, help=L_HELP)

    p = sub.add_parser("scale-check", help="show invariance under Delta, eps^2 -> lam*, tau -> tau/lam")
    _common(p, tol=True)
    p.add_argument("--delta-abs", type=number, required=True, help="Delta in atomic units")
    p.add_argument("--eps1-sq", type=number, required=True, help="eps1^2 (= I1) in atomic units")
    p.add_argument("--eps2-sq", type=number, required=True, help="eps2^2 (= I2) in atomic units")
    p.add_argument("--tau", type=number, required=True, help="pulse duration in atomic units")
    p.add_argument("--lambda", dest="lam", type=number, required=True, help="scaling factor > 0")
    p.add_argument("--envelope", type=envelope, default=EnvelopeSpec.rectangular(), help=E_HELP)
    p.add_argument("--levels", type=int, choices=(2, 3), default=2, help=L_HELP)
    return parser


_VALUE_FLAGS = {"--x", "--delta", "--theta", "--delta-ref", "--theta-ref", "--i1", "--a",
                "--law", "--bracket", "--delta-abs", "--eps1-sq", "--eps2-sq", "--tau",
                "--lambda", "--tol", "--envelope"}


def _glue_negative_values(argv):
    # argparse refuses values like "-600:100:141" that look like options
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


# --------------------------------------------------------------------------
# commands

def _emit(text, out):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _gnuplot_script(result: SweepResult, csv_path, xcol, ycol):
    cols = list(result.columns)
    return (f"set datafile separator ','\nset key autotitle columnhead\n"
            f"set xlabel '{xcol}'\nset ylabel '{ycol}'\n"
            f"plot '{csv_path}' using {cols.index(xcol) + 1}:{cols.index(ycol) + 1} with linespoints\n")


def _finish(args, result: SweepResult, xcol=None, ycol=None):
    result.provenance["command"] = "stabsim " + " ".join(shlex.quote(a) for a in args._argv)
    _emit(result.to_csv(), args.out)
    if getattr(args, "gnuplot", None) and xcol:
        target = args.out if args.out != "-" else "stabsim.csv"
        with open(args.gnuplot, "w", encoding="utf-8") as fh:
            fh.write(_gnuplot_script(result, target, xcol, ycol))
    return EXIT_OK


def _table(kind, columns, rows, ds, **prov):
    base = {"dataset": ds.name, "dataset_sha256": ds.checksum()}
    base.update(prov)
    return SweepResult(kind=kind, columns=tuple(columns), rows=rows, provenance=base)


def _law(args, ds):
    return delta_opt_law(ds) if args.law == "closed" else args.law


def cmd_validate(args):
    if args.atom in BUILTIN_NAMES:
        ds = builtin_dataset(args.atom)
    else:
        ds = load_dataset(Path(args.atom), check=False)
    report = validate(ds)
    _emit(report.format() + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_quasienergies(args, ds):
    rows = []
    for x in args.x:
        for d in args.delta:
            q = quasienergies(ds, DrivePoint(x, d))
            rows.append((x, d, q.y_plus.real, q.y_plus.imag, q.y_minus.real, q.y_minus.imag,
                         q.g_plus, q.g_minus))
    cols = ("x", "delta", "y_plus_re", "y_plus_im", "y_minus_re", "y_minus_im", "g_plus", "g_minus")
    return _finish(args, _table("quasienergies", cols, rows, ds, branch_rule="width-ordered"))


def cmd_widths(args, ds):
    return _finish(args, width_curve(ds, args.delta, args.x), "x", "g_1")


def cmd_delta_opt(args, ds):
    law_ = delta_opt_law(ds)
    if args.x:
        res = _table("delta_opt", ("x", "delta_opt"), [(x, law_(x)) for x in args.x], ds,
                     intercept=law_.intercept, slope=law_.slope)
    else:
        res = _table("delta_opt", LinearLaw.CSV_FIELDS, [law_.csv_row()], ds)
    return _finish(args, res)


def cmd_g_opt(args, ds):
    law_ = delta_opt_law(ds)
    rows = []
    for x in args.x:
        gp, gm = g_opt(ds, x)
        rows.append((x, law_(x), gp, gm, asymptotic_width(ds, x) if x > 0 else float("inf")))
    return _finish(args, _table("g_opt", ("x", "delta_opt", "g_plus", "g_minus", "asymptotic"),
                                rows, ds))


def cmd_zero_point(args, ds):
    x0, d0 = zero_detuning_point(ds)
    return _finish(args, _table("zero_point", ("x0", "delta0"), [(x0, d0)], ds))


def cmd_propagate(args, ds):
    rows = []
    for x in args.x:
        for d in args.delta:
            p = DrivePoint(x, d, args.theta)
            if args.method == "analytic":
                if args.levels != 2 or args.envelope.shape != "rectangular":
                    raise _Usage("--method analytic needs --levels 2 and --envelope rect")
                o = propagate_rectangular(ds, p)
            elif args.method == "ode":
                o = propagate_ode(ds, p, args.envelope, args.levels, args.tol)
            else:
                o = propagate(ds, p, args.envelope, args.levels, args.tol)
            rows.append(o.csv_row() + (o.method,))
    return _finish(args, _table("propagate", Outcome.CSV_COLUMNS + ("method",), rows, ds,
                                envelope=str(args.envelope), levels=args.levels,
                                tolerance=args.tol))


def cmd_scan(args, ds):
    law_ = None if args.law is None else _law(args, ds)
    res = resonance_scan(ds, args.delta, args.x, args.theta, args.envelope, args.levels,
                         law=law_, tol=args.tol, workers=args.workers)
    return _finish(args, res, "x", "w_res")


def cmd_window(args, ds):
    res = stabilization_window(ds, args.x, args.delta_ref, args.theta_ref, args.i1,
                               args.envelope, args.levels, tol=args.tol, workers=args.workers)
    return _finish(args, res, "i1_ratio", "w_i")


def cmd_profile(args, ds):
    res = spectral_profile(ds, args.x, args.i1, args.theta, args.delta, args.envelope,
                           args.levels, tol=args.tol, workers=args.workers)
    return _finish(args, res, "delta", "w_res")


def cmd_ratio(args, ds):
    res = population_ratio(ds, _law(args, ds), args.x, args.theta, args.envelope, args.levels,
                           tol=args.tol, workers=args.workers)
    return _finish(args, res, "x", "w2_over_w1")


def cmd_smoothing(args, ds):
    res = smoothing_study(ds, args.delta, args.theta, args.a, args.x, args.levels,
                          tol=args.tol, workers=args.workers)
    return _finish(args, res, "x", "w_res")


def cmd_fit_deltaopt(args, ds):
    fit = fit_delta_opt_empirical(ds, args.envelope, args.theta, args.x, args.bracket,
                                  levels=args.levels, tol=args.tol,
                                  scan_points=args.scan_points, workers=args.workers)
    return _finish(args, _table("fit_deltaopt", LinearLaw.CSV_FIELDS, [fit.csv_row()], ds,
                                envelope=str(args.envelope), theta=args.theta,
                                tolerance=args.tol))


def cmd_scale_check(args, ds):
    before = AbsoluteParams(args.delta_abs, args.eps1_sq, args.eps2_sq, args.tau)
    after = scaling_transform(before, args.lam)
    rows = []
    for label, params in (("original", before), ("scaled", after)):
        p = params.drive_point()
        o = propagate_absolute(ds, params, args.envelope, args.levels, args.tol)
        rows.append((label, params.delta_abs, params.eps1_sq, params.eps2_sq, params.tau,
                     p.x, p.delta, p.theta, o.w_res, o.w_i))
    cols = ("params", "delta_abs", "eps1_sq", "eps2_sq", "tau", "x", "delta", "theta",
            "w_res", "w_i")
    res = _table("scale_check", cols, rows, ds, envelope=str(args.envelope), levels=args.levels,
                 tolerance=args.tol, lam=args.lam)
    res.summary["w_res_difference"] = abs(rows[0][8] - rows[1][8])
    return _finish(args, res)


COMMANDS = {
    "quasienergies": cmd_quasienergies, "widths": cmd_widths, "delta-opt": cmd_delta_opt,
    "g-opt": cmd_g_opt, "zero-point": cmd_zero_point, "propagate": cmd_propagate,
    "scan": cmd_scan, "window": cmd_window, "profile": cmd_profile, "ratio": cmd_ratio,
    "smoothing": cmd_smoothing, "fit-deltaopt": cmd_fit_deltaopt, "scale-check": cmd_scale_check,
}


class _Usage(Exception):
    pass


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    args._argv = argv
    try:
        if args.command == "validate":
            return cmd_validate(args)
        ds = resolve_dataset(args.atom)
        return COMMANDS[args.command](args, ds)
    except (DatasetParseError, DatasetValidationError) as exc:
        print(f"stabsim: invalid dataset: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except UnknownDatasetError as exc:
        parser.print_usage(sys.stderr)
        print(f"stabsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StabsimError as exc:
        print(f"stabsim: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (_Usage, ValueError, FileNotFoundError) as exc:
        parser.print_usage(sys.stderr)
        print(f"stabsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
