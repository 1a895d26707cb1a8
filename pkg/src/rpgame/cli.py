"""Command-line front end.

Exit codes: 0 success (``decide``: true), 1 ``decide`` answered false,
2 input error, 3 oracle check failed, 4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import sys
from fractions import Fraction

from .costfn import CostFunctionError, Interval, evaluate
from .game import GameError
from .gamefile import (
    GameFileError,
    dumps,
    format_decimal,
    load_game,
    parse_rational,
    solution_to_dict,
)
from .oracle import GridMisaligned, compare, default_tolerance, oracle_solve
from .solver import InternalInvariantBroken, PreconditionError, decide, solve_game

EXIT_INPUT = 2
EXIT_CHECK_FAILED = 3
EXIT_INTERNAL = 4


class InputError(Exception):
    pass


def _rational(flag: str):
    def parse(text: str) -> Fraction:
        try:
            return parse_rational(text, flag)
        except GameFileError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpgame",
        description="Exact reachability-price games on simple single-clock priced timed automata.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute the optimal cost function of every location")
    p.add_argument("file")
    p.add_argument("--interval", nargs=2, metavar=("B", "E"), type=_rational("--interval"))
    p.add_argument("--trace", action="store_true", help="include a recursion summary")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--samples", type=int, default=256, help="CSV rows per location")

    p = sub.add_parser("decide", help="is OptCost(location, clock) <= threshold?")
    p.add_argument("file")
    p.add_argument("--location", required=True)
    p.add_argument("--clock", required=True, type=_rational("--clock"))
    p.add_argument("--threshold", required=True, type=_rational("--threshold"))

    p = sub.add_parser("eval", help="print OptCost(location, clock) exactly")
    p.add_argument("file")
    p.add_argument("--location", required=True)
    p.add_argument("--clock", required=True, type=_rational("--clock"))

    p = sub.add_parser("check", help="compare the exact solution with a grid oracle")
    p.add_argument("file")
    p.add_argument("--step", required=True, type=_rational("--step"))
    p.add_argument("--tol", type=_rational("--tol"),
                   help="default: (max rate + max |goal slope|) * step")
    return parser


def _samples(iv: Interval, n: int) -> list[Fraction]:
    if n < 2:
        return [iv.lo]
    step = (iv.hi - iv.lo) / (n - 1)
    return [iv.lo + k * step for k in range(n)]


def _value_text(v) -> str:
    return format_decimal(v) if isinstance(v, Fraction) else "inf"


def cmd_solve(args, out) -> int:
    g = load_game(args.file)
    oc, trace = solve_game(g, args.interval and Interval(*args.interval))
    if args.format == "json":
        out.write(dumps(solution_to_dict(oc, trace if args.trace else None)))
        return 0
    if args.samples < 1:
        raise InputError("--samples: must be positive")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["location", "x", "value"])
    xs = _samples(oc.interval, args.samples)
    for name, f in oc.items():
        for x in xs:
            writer.writerow([name, format_decimal(x), _value_text(evaluate(f, x))])
    out.write(buf.getvalue())
    return 0


def _lookup(g, name: str):
    if name not in g:
        raise InputError(f"--location: unknown location {name!r}")
    return name


def _clock(g, x: Fraction) -> Fraction:
    if x not in g.clock_interval:
        raise InputError(f"--clock: {x} is outside {g.clock_interval}")
    return x


def cmd_decide(args, out) -> int:
    g = load_game(args.file)
    ok = decide(g, _lookup(g, args.location), _clock(g, args.clock), args.threshold)
    out.write("true\n" if ok else "false\n")
    return 0 if ok else 1


def cmd_eval(args, out) -> int:
    g = load_game(args.file)
    name, x = _lookup(g, args.location), _clock(g, args.clock)
    oc, _ = solve_game(g)
    out.write(_value_text(oc.value(name, x)) + "\n")
    return 0


def cmd_check(args, out) -> int:
    g = load_game(args.file)
    if args.step <= 0:
        raise InputError("--step: must be positive")
    oc, _ = solve_game(g)
    gv = oracle_solve(g, None, args.step)
    tol = default_tolerance(g, args.step) if args.tol is None else args.tol
    report = compare(oc, gv, tol)
    out.write("\n".join(report.lines()) + "\n")
    return 0 if report.passed else EXIT_CHECK_FAILED


COMMANDS = {"solve": cmd_solve, "decide": cmd_decide, "eval": cmd_eval, "check": cmd_check}


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code = COMMANDS[args.command](args, out)
    except InternalInvariantBroken as exc:
        err.write(f"internal error: {exc}\n")
        code = EXIT_INTERNAL
    except (InputError, GameFileError, GameError, CostFunctionError, PreconditionError,
            GridMisaligned, OSError) as exc:
        err.write(f"error: {exc}\n")
        code = EXIT_INPUT
    out.flush()
    err.flush()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
