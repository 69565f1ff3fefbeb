"""Command-line front end: ``painleve-tz {trace,series,blowup,crossings,verify}``.

Exit codes: 0 success, 1 integration failure or failed verification,
2 invalid arguments.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__, io
from .blowup import estimate_blowup
from .checks import REGISTRY, VerifyConfig, run_checks
from .integrator import STEP_UNDERFLOW, IntegrationError, IntegratorConfig, integrate
from .oscillation import CROSSING_EPS, crossings, envelope_stats
from .series import MAX_ORDER, EquationForm, taylor_coefficients

ENVELOPE_WINDOWS = ((1e-9, 200.0), (10.0, 100.0), (100.0, 500.0))


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != value or abs(value) == float("inf"):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def _form(text: str) -> EquationForm:
    try:
        return EquationForm.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _order(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= MAX_ORDER:
        raise argparse.ArgumentTypeError(f"order must be in [0, {MAX_ORDER}]")
    return value


def _common(p: argparse.ArgumentParser, formats=("csv", "json"), default="csv") -> None:
    p.add_argument("--rel-tol", type=_positive, default=1e-10, help="relative tolerance (default 1e-10)")
    p.add_argument("--abs-tol", type=_positive, default=1e-10, help="absolute tolerance (default 1e-10)")
    g = p.add_mutually_exclusive_group()
    for fmt in formats:
        g.add_argument(f"--{fmt}", dest="fmt", action="store_const", const=fmt,
                       help=f"write {fmt.upper()}" + (" (default)" if fmt == default else ""))
    p.set_defaults(fmt=default)
    p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="painleve-tz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="integrate one form from the triple zero")
    p.add_argument("--form", type=_form, required=True, help="pi, pi-plus or pi-minus")
    p.add_argument("--t-max", type=_finite, default=None,
                   help="end time, may be negative (default 10 for pi-plus, else 100)")
    p.add_argument("--s-max", type=_positive, default=1e8, help="stop once |s| reaches this (default 1e8)")
    p.add_argument("--max-step", type=_positive, default=0.1)
    p.add_argument("--spacing", type=_positive, default=None,
                   help="CSV sample spacing (default: accepted steps)")
    _common(p)

    p = sub.add_parser("series", help="exact Taylor coefficients at the origin")
    p.add_argument("--form", type=_form, default=EquationForm.PIMINUS)
    p.add_argument("--order", type=_order, default=28)
    _common(p, formats=("json", "csv", "text"), default="text")

    p = sub.add_parser("blowup", help="bracket the pi-plus blow-up time")
    p.add_argument("--width-tol", type=_positive, default=1e-2)
    _common(p, formats=("json",), default="json")

    p = sub.add_parser("crossings", help="crossings of s and sqrt(t) for pi-minus")
    p.add_argument("--t-max", type=_positive, default=100.0)
    p.add_argument("--envelope", action="store_true",
                   help="emit envelope statistics JSON instead of the crossing table")
    _common(p)

    p = sub.add_parser("verify", help="run the verification registry")
    p.add_argument("--t-max", type=_positive, default=500.0,
                   help="pi-minus horizon (default 500; checks needing more are skipped)")
    p.add_argument("--list", action="store_true", help="list checks and exit")
    p.add_argument("--check", action="append", default=None, metavar="ID",
                   help="run only this check (repeatable)")
    p.add_argument("--corrupt-rhs", action="store_true", help=argparse.SUPPRESS)
    _common(p, formats=("json",), default="json")
    return parser


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _config(args, **extra) -> IntegratorConfig:
    return IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol, **extra)


def _trace(args, parser) -> int:
    t_max = args.t_max
    if t_max is None:
        t_max = 10.0 if args.form is EquationForm.PIPLUS else 100.0
    if t_max == 0:
        parser.error("--t-max must be nonzero")
    cfg = _config(args, t_max=t_max, s_max=args.s_max, max_step=args.max_step)
    traj = integrate(args.form, cfg)
    text = io.trajectory_json(traj) if args.fmt == "json" else io.trajectory_csv(traj, args.spacing)
    _emit(text, args.out)
    if traj.termination == STEP_UNDERFLOW:
        print(f"step size underflow at t={traj.t_end!r}", file=sys.stderr)
        return 1
    return 0


def _series(args, parser) -> int:
    ser = taylor_coefficients(args.form, args.order)
    if args.fmt == "json":
        text = io.series_json(ser)
    elif args.fmt == "csv":
        text = "n,numerator,denominator\n" + "".join(
            f"{n},{a.numerator},{a.denominator}\n" for n, a in ser.nonzero())
    else:
        text = "".join(f"a_{n} = {a}\n" for n, a in ser.nonzero())
    _emit(text, args.out)
    return 0


def _blowup(args, parser) -> int:
    est = estimate_blowup(_config(args), width_tol=args.width_tol)
    _emit(io.blowup_json(est), args.out)
    if not est.converged:
        print(f"width {est.width!r} did not reach {args.width_tol!r}", file=sys.stderr)
    return 0


def _crossings(args, parser) -> int:
    if args.envelope:
        traj = integrate(EquationForm.PIMINUS, _config(args, t_max=max(args.t_max, 1.0)))
        stats = [envelope_stats(traj, (lo, min(hi, args.t_max)))
                 for lo, hi in ENVELOPE_WINDOWS if lo < args.t_max]
        _emit(io.envelope_json(stats), args.out)
        return 0
    if args.t_max <= CROSSING_EPS:
        events = []
    else:
        traj = integrate(EquationForm.PIMINUS, _config(args, t_max=args.t_max))
        if traj.coverage[1] < args.t_max:
            print(f"integration stopped at t={traj.t_end!r} ({traj.termination})", file=sys.stderr)
            return 1
        events = crossings(traj, args.t_max)
    if args.fmt == "json":
        _emit(io.dumps(events), args.out)
    else:
        _emit(io.crossing_csv(events), args.out)
    return 0


def _verify(args, parser) -> int:
    if args.list:
        lines = [f"{c.check_id}\t{c.anchor}\t{c.claim}" for c in sorted(REGISTRY.values(),
                                                                       key=lambda c: c.check_id)]
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    if args.check:
        unknown = sorted(set(args.check) - set(REGISTRY))
        if unknown:
            parser.error(f"unknown check id(s): {', '.join(unknown)}")
    cfg = VerifyConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol, t_max=args.t_max,
                       corrupt_rhs=args.corrupt_rhs)
    report = run_checks(cfg, only=args.check)
    _emit(io.dumps(report.to_dict()), args.out)
    counts = report.counts()
    print(f"{counts['pass']} passed, {counts['fail']} failed, {counts['skipped']} skipped",
          file=sys.stderr)
    return 0 if report.ok else 1


COMMANDS = {"trace": _trace, "series": _series, "blowup": _blowup,
            "crossings": _crossings, "verify": _verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, parser)
    except (IntegrationError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # configuration rejected by the library: treat as bad flags
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
