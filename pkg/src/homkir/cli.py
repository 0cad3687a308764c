"""Command-line front end.

Every subcommand is compiled to a session and run through the same
interpreter, so reports and exit codes are uniform: 0 when every check
passes, 1 when some check fails, 2 on parse, elaboration or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dsl.elaborate import Report, RunConfig, parse_error_report, run_text
from .dsl.lexer import ParseError
from .dsl.parser import parse_expr, parse_session
from .dsl.printer import _quote, ast_text, format_expr, format_session

CHART_KINDS = {"kirillov": (1, 2), "poisson": (1, 2), "ce": (1, 1), "algebroid": (2, 2),
               "jet": (1, 2)}
LIE_SUBS = ("jacobi", "killing", "ce", "cocycle3", "jacobi4", "algebroid")


class UsageError(Exception):
    pass


def _chart_stmt(spec: str, name: str = "K") -> str:
    kind, _, rest = spec.partition(":")
    if kind not in CHART_KINDS:
        raise UsageError(f"unknown chart kind {kind!r}; use one of {sorted(CHART_KINDS)}")
    try:
        nums = [int(x) for x in rest.split(",")] if rest else []
    except ValueError:
        raise UsageError(f"bad chart spec {spec!r}") from None
    lo, hi = CHART_KINDS[kind]
    if not lo <= len(nums) <= hi or any(n < 0 for n in nums):
        raise UsageError(f"chart {kind} takes {lo}..{hi} non-negative sizes")
    return f"chart {name} = {kind}({', '.join(map(str, nums))});"


def _expr(text: str) -> str:
    """Re-print a command-line expression canonically (and reject stray syntax)."""
    return format_expr(parse_expr(text))


def _list(items) -> str:
    return "[" + ", ".join(_expr(a) for a in items or []) + "]"


def _common(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                   help="emit the JSON report")
    p.add_argument("--arity", type=int, default=argparse.SUPPRESS, metavar="N",
                   help="maximal bracket arity accepted (default 4)")
    p.add_argument("--degree", type=int, default=argparse.SUPPRESS, metavar="D",
                   help="spanning-degree cap for closure checks (default 3)")
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS, metavar="N",
                   help="parallelism hint (statements run sequentially)")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="seed for randomized checks (default 0)")
    p.add_argument("--timings", action="store_true", default=argparse.SUPPRESS,
                   help="include durations (makes output non-deterministic)")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="homkir", description=__doc__.split("\n\n")[0])
    _common(top)
    sub = top.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run a session file ('-' for stdin)")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("parse", help="parse a session and print it canonically")
    p.add_argument("file")
    p.add_argument("--ast", action="store_true", help="print the syntax tree as JSON")

    p = sub.add_parser("check", help="validate a structure")
    p.add_argument("kind", choices=("kirillov", "master", "algebroid"))
    p.add_argument("expr")
    p.add_argument("--chart", default="kirillov:2", help="e.g. kirillov:2, kirillov:1,1, ce:3")
    _common(p)

    p = sub.add_parser("bracket", help="evaluate a bracket")
    p.add_argument("expr", help="the generating function")
    p.add_argument("--arg", action="append", default=[], help="an argument (repeatable)")
    p.add_argument("--kind", choices=("kirillov", "derived", "skew", "schouten"),
                   default="kirillov")
    p.add_argument("--chart", default="kirillov:2")
    _common(p)

    p = sub.add_parser("jacobiator", help="evaluate a Jacobiator (both routes)")
    p.add_argument("expr")
    p.add_argument("--arg", action="append", default=[])
    p.add_argument("--chart", default="kirillov:2")
    p.add_argument("--check", action="store_true", help="also require it to vanish")
    _common(p)

    p = sub.add_parser("bv", help="antibrackets of the Koszul-Brylinski operator")
    p.add_argument("expr", help="a Kirillov structure")
    p.add_argument("--arg", action="append", default=[],
                   help="a form on the antitangent chart (repeatable)")
    p.add_argument("--chart", default="kirillov:2")
    p.add_argument("--closure", type=int, metavar="R", help="check weight-0 closure at arity R")
    _common(p)

    p = sub.add_parser("lie", help="Lie-algebra factory")
    p.add_argument("sub", choices=LIE_SUBS)
    p.add_argument("--algebra", help="structure-constants JSON (default: so(3))")
    _common(p)
    return top


def _session_for(args) -> tuple[str, Path | None]:
    cmd = args.cmd
    if cmd == "run":
        if args.file == "-":
            return sys.stdin.read(), Path.cwd()
        path = Path(args.file)
        return path.read_text(encoding="utf-8"), path.parent
    if cmd == "check":
        return f"{_chart_stmt(args.chart)}\ncheck {args.kind} {_expr(args.expr)};\n", None
    if cmd == "bracket":
        head = f"{_chart_stmt(args.chart)}\nlet F = {_expr(args.expr)};\n"
        if args.kind == "schouten":
            if len(args.arg) != 1:
                raise UsageError("the Schouten bracket takes exactly one --arg")
            return head + f"schouten F, {_expr(args.arg[0])};\n", None
        return head + f"{args.kind if args.kind != 'kirillov' else 'bracket'} F, " \
                      f"{_list(args.arg)};\n", None
    if cmd == "jacobiator":
        body = f"{_chart_stmt(args.chart)}\nlet D = {_expr(args.expr)};\n" \
               f"jacobiator D, {_list(args.arg)};\n"
        if args.check:
            body += f"check jacobi D, {_list(args.arg)};\n"
        return body, None
    if cmd == "bv":
        body = f"{_chart_stmt(args.chart)}\nlet L = bv operator {_expr(args.expr)};\n" \
               "check nilpotent L;\n"
        if args.arg:
            body += f"bv bracket L, {_list(args.arg)};\n"
        if args.closure is not None:
            body += f"check closure L, arity = {args.closure};\n"
        return body, None
    if cmd == "lie":
        load = f"lie load {_quote(str(Path(args.algebra).resolve()))};" if args.algebra \
            else "lie so3;"
        body = f"{load}\nlie {args.sub};\n"
        if args.sub == "jacobi4":
            body += "check kirillov P;\n"
        return body, None
    raise UsageError(f"unknown command {cmd}")


def _emit(report: Report, as_json: bool, timings: bool, out) -> int:
    out.write(report.to_json(timings) if as_json else report.to_text(timings))
    return report.exit_code


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    as_json = bool(getattr(args, "json", False))
    timings = bool(getattr(args, "timings", False))

    if args.cmd == "parse":
        try:
            text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text("utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            print(f"homkir: cannot read {args.file}: {exc}", file=sys.stderr)
            return 2
        try:
            sess = parse_session(text)
        except ParseError as err:
            return _emit(parse_error_report(err), as_json, False, out)
        out.write(ast_text(sess) + "\n" if args.ast else format_session(sess))
        return 0

    try:
        config = RunConfig(arity=getattr(args, "arity", 4), degree=getattr(args, "degree", 3),
                           jobs=getattr(args, "jobs", 1), seed=getattr(args, "seed", 0),
                           timings=timings)
    except ValueError as exc:
        print(f"homkir: {exc}", file=sys.stderr)
        return 2
    try:
        text, base = _session_for(args)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"homkir: cannot read input: {exc}", file=sys.stderr)
        return 2
    except ParseError as err:
        return _emit(parse_error_report(err, config.seed), as_json, timings, out)
    except UsageError as exc:
        print(f"homkir: {exc}", file=sys.stderr)
        return 2
    config.base_dir = base
    return _emit(run_text(text, config), as_json, timings, out)


if __name__ == "__main__":
    sys.exit(main())
