"""Elaboration and execution of sessions."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .. import algebra as alg
from .. import algebroid as abd
from .. import brackets as br
from .. import bv
from .. import kirillov as kir
from .. import lie
from .. import operators as ops
from ..algebra import Chart, Poly, Variable, to_text
from ..sampling import random_poly, random_section
from .lexer import ParseError
from .nodes import (ChartDecl, Command, Let, ListArg, Named, Neg, Num, PairDecl, Power, Product,
                    Session, Str, Sum, Use, Var, VarDecl)
from .parser import parse_session
from .printer import format_stmt

MAX_EXPONENT = 1000


class ElabError(ValueError):
    def __init__(self, message: str, pos=None):
        super().__init__(message)
        self.message = message
        self.line = getattr(pos, "line", None)
        self.column = getattr(pos, "column", None)

    def __str__(self):
        if self.line is None:
            return self.message
        return f"{self.line}:{self.column}: {self.message}"


class _Fail(Exception):
    """A check that ran and failed."""

    def __init__(self, witness: str | None, detail: str | None = None, value=None):
        super().__init__(detail or witness)
        self.witness = witness
        self.detail = detail
        self.value = value


@dataclass
class RunConfig:
    arity: int = 4
    degree: int = 3
    jobs: int = 1
    seed: int = 0
    timings: bool = False
    base_dir: Path | None = None

    def __post_init__(self):
        if self.arity < 0 or self.degree < 0 or self.jobs < 1:
            raise ValueError("caps must be non-negative and jobs positive")


@dataclass
class Record:
    line: int | None
    command: str
    status: str  # ok | fail | error
    value: str | None = None
    witness: str | None = None
    detail: str | None = None
    column: int | None = None
    duration: float | None = None

    def as_dict(self, timings: bool) -> dict:
        out = {"line": self.line, "command": self.command, "status": self.status}
        for k in ("column", "value", "witness", "detail"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        if timings and self.duration is not None:
            out["duration"] = round(self.duration, 6)
        return out


@dataclass
class Report:
    records: list[Record] = field(default_factory=list)
    seed: int = 0

    @property
    def status(self) -> str:
        st = {r.status for r in self.records}
        return "error" if "error" in st else "fail" if "fail" in st else "ok"

    @property
    def exit_code(self) -> int:
        return {"ok": 0, "fail": 1, "error": 2}[self.status]

    def to_json(self, timings: bool = False) -> str:
        data = {"schema": 1, "seed": self.seed, "status": self.status, "exit": self.exit_code,
                "records": [r.as_dict(timings) for r in self.records]}
        return json.dumps(data, indent=2, sort_keys=False) + "\n"

    def to_text(self, timings: bool = False) -> str:
        lines = [f"seed: {self.seed}"]
        for r in self.records:
            where = f"line {r.line}" if r.line is not None else "-"
            if r.column is not None:
                where += f":{r.column}"
            head = f"{r.status:<5} {where:<8} {r.command}"
            if timings and r.duration is not None:
                head += f"  ({r.duration:.3f}s)"
            lines.append(head)
            for k in ("value", "witness", "detail"):
                v = getattr(r, k)
                if v is not None:
                    lines.append(f"      {k}: {v}")
        counts = {s: sum(r.status == s for r in self.records) for s in ("ok", "fail", "error")}
        lines.append(f"summary: {len(self.records)} statements, {counts['ok']} ok, "
                     f"{counts['fail']} fail, {counts['error']} error; exit {self.exit_code}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# value display


def _scalar(c) -> str:
    return alg.scalar_text(alg.as_scalar(c))


def show(v) -> str:
    if isinstance(v, Poly):
        return to_text(v)
    if isinstance(v, (kir.KirillovStructure, abd.AlgebroidStructure)):
        return to_text(v.P)
    if isinstance(v, ops.DiffOperator):
        return ops.op_text(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, lie.StructureConstants):
        return v.to_json()
    if isinstance(v, kir.Components):
        parts = []
        for kind, tables in (("plain", v.plain), ("bar", v.bar)):
            for k in sorted(tables):
                for key in sorted(tables[k]):
                    idx = ",".join(v.momenta[i] for i in key)
                    parts.append(f"{kind}[{idx}] = {to_text(tables[k][key])}")
        return "; ".join(parts) or "0"
    if isinstance(v, list):
        return "[" + ", ".join(show(x) for x in v) + "]"
    if isinstance(v, (int, Fraction)):
        return _scalar(v)
    return str(v)


def chart_of(v) -> Chart | None:
    if isinstance(v, (Poly, kir.KirillovStructure, abd.AlgebroidStructure, ops.DiffOperator)):
        return v.chart
    return None


# ---------------------------------------------------------------------------
# builtin charts


def _builtin_chart(interp: Interpreter, d: ChartDecl) -> Chart:
    args = d.builtin_args
    ints = lambda lo, hi: _int_args(d, args, lo, hi)
    fn = d.builtin
    if fn == "kirillov":
        return kir.kirillov_chart(*ints(1, 2), name=d.name)
    if fn == "poisson":
        return kir.poisson_chart(*ints(1, 2))
    if fn == "algebroid":
        return abd.algebroid_chart(*ints(2, 2), name=d.name)
    if fn == "ce":
        return lie.ce_chart(*ints(1, 1))
    if fn == "jet":
        return kir.jet_chart(*ints(1, 2))
    if fn in ("antitangent", "tangent", "invariant"):
        if len(args) != 1 or not isinstance(args[0], str):
            raise ElabError(f"{fn}(...) takes one chart name", d.pos)
        src = interp.get_chart(args[0], d.pos)
        try:
            if fn == "antitangent":
                return ops.antitangent_chart(src)
            if fn == "tangent":
                return abd.tangent_chart(src, kir.kirillov_roles(src)[0])
            if not isinstance(src, ops.AntitangentChart):
                raise ElabError("invariant(...) needs an antitangent chart", d.pos)
            return bv.invariant_chart(src)
        except ElabError:
            raise
        except ValueError as exc:
            raise ElabError(str(exc), d.pos) from None
    raise ElabError(f"unknown chart constructor {fn!r}", d.pos)


def _int_args(d, args, lo, hi):
    if not lo <= len(args) <= hi or not all(isinstance(a, int) for a in args):
        raise ElabError(f"{d.builtin}(...) takes {lo}..{hi} integer arguments", d.pos)
    if any(a > 64 for a in args):
        raise ElabError("chart too large", d.pos)
    return args


def _declared_chart(d: ChartDecl) -> Chart:
    vs: list[Variable] = []
    families: dict[str, list[str]] = {}
    ngrad = None
    for decl in d.body:
        if not isinstance(decl, VarDecl):
            continue
        if decl.weight is not None:
            if ngrad is None:
                ngrad = len(decl.weight)
            elif len(decl.weight) != ngrad:
                raise ElabError("all weights of a chart need the same number of components",
                                decl.pos)
    ngrad = ngrad or 1
    for decl in d.body:
        if not isinstance(decl, VarDecl):
            continue
        if decl.invertible and decl.parity:
            raise ElabError(f"invertible variable {decl.name} must be even", decl.pos)
        w = decl.weight if decl.weight is not None else (0,) * ngrad
        if decl.size is None:
            names = [(decl.name, None)]
        else:
            if not 1 <= decl.size <= 64:
                raise ElabError("family size must be between 1 and 64", decl.pos)
            names = [(f"{decl.name}{i}", i) for i in range(1, decl.size + 1)]
        families[decl.name] = [n for n, _ in names]
        for n, i in names:
            if any(v.name == n for v in vs):
                raise ElabError(f"variable {n} declared twice", decl.pos)
            vs.append(Variable(n, decl.parity, tuple(w), decl.invertible, i))
    pairs = []
    for decl in d.body:
        if not isinstance(decl, PairDecl):
            continue
        a = families.get(decl.base, [decl.base])
        b = families.get(decl.anti, [decl.anti])
        if len(a) != len(b):
            raise ElabError(f"cannot pair families {decl.base} and {decl.anti} of different sizes",
                            decl.pos)
        known = {v.name: v for v in vs}
        for x, y in zip(a, b):
            if x not in known or y not in known:
                raise ElabError(f"pair refers to undeclared variable {x if x not in known else y}",
                                decl.pos)
            if known[x].parity == known[y].parity:
                raise ElabError(f"paired variables {x} and {y} must have opposite parity",
                                decl.pos)
            pairs.append((x, y))
    try:
        return Chart(vs, pairs, name=d.name)
    except ValueError as exc:
        raise ElabError(str(exc), d.pos) from None


# ---------------------------------------------------------------------------
# the interpreter


class Interpreter:
    def __init__(self, config: RunConfig | None = None):
        self.config = config or RunConfig()
        self.charts: dict[str, Chart] = {}
        self.active: Chart | None = None
        self.env: dict[str, object] = {}
        self.algebra: lie.StructureConstants | None = None
        self.rng = random.Random(self.config.seed)

    # lookup
    def get_chart(self, name: str, pos) -> Chart:
        if name not in self.charts:
            raise ElabError(f"undefined chart {name!r}", pos)
        return self.charts[name]

    def register_chart(self, name: str, chart: Chart, activate: bool = True):
        self.charts[name] = chart
        if activate:
            self.active = chart

    # expressions
    def _bindings_in(self, node, out: list):
        if isinstance(node, Var):
            if node.index is None and node.name in self.env:
                out.append(node)
        elif isinstance(node, Neg):
            self._bindings_in(node.operand, out)
        elif isinstance(node, Power):
            self._bindings_in(node.base, out)
        elif isinstance(node, (Product,)):
            for f in node.factors:
                self._bindings_in(f, out)
        elif isinstance(node, Sum):
            for f in node.terms:
                self._bindings_in(f, out)
        elif isinstance(node, ListArg):
            for f in node.items:
                self._bindings_in(f, out)
        elif isinstance(node, Named):
            self._bindings_in(node.value, out)

    def chart_for(self, nodes, on: str | None, pos) -> Chart:
        if on is not None:
            return self.get_chart(on, pos)
        refs: list = []
        for n in nodes:
            self._bindings_in(n, refs)
        charts = []
        for r in refs:
            c = chart_of(self.env[r.name])
            if c is not None and c not in charts:
                charts.append(c)
        if len(charts) == 1:
            return charts[0]
        if len(charts) > 1:
            raise ElabError("expression mixes bindings from different charts; use 'on'", pos)
        if self.active is None:
            raise ElabError("no active chart; declare one with 'chart'", pos)
        return self.active

    def eval_expr(self, e, chart: Chart) -> Poly:
        if isinstance(e, Num):
            return chart.const(e.value)
        if isinstance(e, Var):
            if e.index is None and e.name in self.env:
                v = self.env[e.name]
                if isinstance(v, (kir.KirillovStructure, abd.AlgebroidStructure)):
                    v = v.P
                if not isinstance(v, Poly):
                    raise ElabError(f"{e.name} is not a polynomial", e.pos)
                if v.chart != chart:
                    raise ElabError(f"{e.name} lives on chart {v.chart.name!r}, not "
                                    f"{chart.name!r}", e.pos)
                return v
            name = e.name if e.index is None else f"{e.name}{e.index}"
            if name not in chart:
                raise ElabError(f"undefined name {name!r}", e.pos)
            return chart.var(name)
        if isinstance(e, Neg):
            return -self.eval_expr(e.operand, chart)
        if isinstance(e, Power):
            if abs(e.exponent) > MAX_EXPONENT:
                raise ElabError(f"exponent {e.exponent} exceeds {MAX_EXPONENT}", e.pos)
            base = self.eval_expr(e.base, chart)
            if e.exponent < 0:
                if isinstance(e.base, Var) and len(base.terms) == 1:
                    (m, _), = base.terms.items()
                    for i, k in enumerate(m):
                        if k and not chart.variables[i].invertible:
                            raise ElabError("negative power of non-invertible variable "
                                            f"{chart.variables[i].name}", e.pos)
                try:
                    return base ** e.exponent
                except (ValueError, ZeroDivisionError) as exc:
                    raise ElabError(f"negative power: {exc}", e.pos) from None
            return base ** e.exponent
        if isinstance(e, Product):
            out = chart.one()
            for f in e.factors:
                out = out * self.eval_expr(f, chart)
            return out
        if isinstance(e, Sum):
            out = chart.zero()
            for s, t in zip(e.signs, e.terms):
                v = self.eval_expr(t, chart)
                out = out + v if s > 0 else out - v
            return out
        raise ElabError("expected an expression", getattr(e, "pos", None))

    # session driver
    def run(self, session: Session) -> Report:
        report = Report(seed=self.config.seed)
        for stmt in session.statements:
            rec = self.execute(stmt)
            report.records.append(rec)
            if rec.status == "error":
                break
        return report

    def execute(self, stmt) -> Record:
        pos = getattr(stmt, "pos", None)
        rec = Record(getattr(pos, "line", None), format_stmt(stmt).rstrip(";"), "ok")
        t0 = time.perf_counter()
        try:
            self._execute(stmt, rec)
        except _Fail as f:
            rec.status, rec.witness, rec.detail = "fail", f.witness, f.detail
        except ElabError as exc:
            rec.status, rec.detail = "error", exc.message
            if exc.line is not None:
                rec.line, rec.column = exc.line, exc.column
        except (ValueError, TypeError, ArithmeticError, AssertionError) as exc:
            rec.status, rec.detail = "error", f"{type(exc).__name__}: {exc}"
        rec.duration = time.perf_counter() - t0
        return rec

    def _execute(self, stmt, rec: Record):
        if isinstance(stmt, ChartDecl):
            chart = _builtin_chart(self, stmt) if stmt.builtin else _declared_chart(stmt)
            self.register_chart(stmt.name, chart)
            rec.value = " ".join(chart.names)
        elif isinstance(stmt, Use):
            self.active = self.get_chart(stmt.name, stmt.pos)
        elif isinstance(stmt, Let):
            if isinstance(stmt.value, Command):
                value = self.command(stmt.value, rec, bind=stmt.name)
            else:
                chart = self.chart_for([stmt.value], None, stmt.pos)
                value = self.eval_expr(stmt.value, chart)
            self.env[stmt.name] = value
            rec.value = show(value)
        elif isinstance(stmt, Command):
            self.command(stmt, rec)
        else:
            raise ElabError("unknown statement")

    # commands
    def command(self, c: Command, rec: Record, bind: str | None = None):
        key = (c.word, c.sub) if c.word in ("check", "bv", "lie") else (c.word, None)
        handler = COMMANDS.get(key)
        if handler is None:
            what = f"{c.word} {c.sub}" if c.sub else c.word
            raise ElabError(f"unknown command {what!r}", c.pos)
        ctx = _Ctx(self, c, bind)
        value = handler(ctx)
        if value is not None:
            rec.value = show(value)
        if ctx.detail:
            rec.detail = ctx.detail
        return value


class _Ctx:
    """Argument access for one command invocation."""

    def __init__(self, interp: Interpreter, cmd: Command, bind: str | None):
        self.interp = interp
        self.cmd = cmd
        self.bind = bind
        self.pos = cmd.pos
        self.positional = [a for a in cmd.args if not isinstance(a, Named)]
        self.named = {}
        for a in cmd.args:
            if isinstance(a, Named):
                if a.name in self.named:
                    raise ElabError(f"argument {a.name!r} given twice", a.pos)
                self.named[a.name] = a.value
        self.detail: str | None = None
        self._chart: Chart | None = None

    @property
    def name(self) -> str:
        return self.cmd.word + (f" {self.cmd.sub}" if self.cmd.sub else "")

    def expect(self, n_min: int, n_max: int | None = None, named: tuple = ()):
        n_max = n_min if n_max is None else n_max
        k = len(self.positional)
        if not n_min <= k <= n_max:
            want = str(n_min) if n_min == n_max else f"{n_min} to {n_max}"
            raise ElabError(f"{self.name} takes {want} positional arguments, got {k}", self.pos)
        extra = set(self.named) - set(named)
        if extra:
            raise ElabError(f"{self.name} does not accept {sorted(extra)}", self.pos)

    @property
    def chart(self) -> Chart:
        if self._chart is None:
            c = self.cmd
            first = self.positional[0] if self.positional else None
            if c.on is None and isinstance(first, Var) and first.index is None \
                    and first.name in self.interp.env and chart_of(self.interp.env[first.name]):
                self._chart = chart_of(self.interp.env[first.name])
            else:
                self._chart = self.interp.chart_for(list(c.args), c.on, c.pos)
        return self._chart

    def raw(self, i: int):
        return self.positional[i]

    def binding(self, node):
        if isinstance(node, Var) and node.index is None and node.name in self.interp.env:
            return self.interp.env[node.name]
        return None

    def poly(self, node, chart: Chart | None = None) -> Poly:
        if isinstance(node, (Str, ListArg)):
            raise ElabError("expected an expression", getattr(node, "pos", self.pos))
        return self.interp.eval_expr(node, chart or self.chart)

    def poly_list(self, node, chart: Chart | None = None) -> list[Poly]:
        if not isinstance(node, ListArg):
            raise ElabError("expected a list [ ... ]", getattr(node, "pos", self.pos))
        if len(node.items) > self.interp.config.arity:
            raise ElabError(f"{len(node.items)} arguments exceed the arity cap "
                            f"{self.interp.config.arity}", node.pos)
        return [self.poly(x, chart) for x in node.items]

    def integer(self, key: str, default: int, lo: int = 0, hi: int = 10 ** 6) -> int:
        node = self.named.get(key)
        if node is None:
            return default
        if not isinstance(node, Num) or node.value.denominator != 1:
            raise ElabError(f"{key} must be an integer", getattr(node, "pos", self.pos))
        v = int(node.value)
        if not lo <= v <= hi:
            raise ElabError(f"{key} must lie in [{lo}, {hi}]", node.pos)
        return v

    def kirillov(self, node, strict: bool = True) -> kir.KirillovStructure:
        v = self.binding(node)
        if isinstance(v, kir.KirillovStructure):
            return v
        if isinstance(v, abd.AlgebroidStructure):
            return v.kirillov
        P = self.poly(node)
        res = kir.validate_kirillov(P)
        if not res:
            raise ElabError(f"not a Kirillov structure: {res.check} check failed at {res.witness}",
                            getattr(node, "pos", self.pos))
        return res

    def algebroid(self, node) -> abd.AlgebroidStructure:
        v = self.binding(node)
        if isinstance(v, abd.AlgebroidStructure):
            return v
        P = v.P if isinstance(v, kir.KirillovStructure) else self.poly(node)
        res = abd.validate_algebroid(P)
        if not res:
            raise ElabError(f"not an algebroid: {res.check} check failed at {res.witness}",
                            getattr(node, "pos", self.pos))
        return res

    def operator(self, node) -> ops.DiffOperator:
        v = self.binding(node)
        if not isinstance(v, ops.DiffOperator):
            raise ElabError("expected an operator binding", getattr(node, "pos", self.pos))
        return v

    def text(self, node) -> str:
        if not isinstance(node, Str):
            raise ElabError("expected a string", getattr(node, "pos", self.pos))
        return node.text


# ---------------------------------------------------------------------------
# command handlers

COMMANDS: dict[tuple[str, str | None], Callable[[_Ctx], object]] = {}


def command(word: str, sub: str | None = None):
    def deco(fn):
        COMMANDS[(word, sub)] = fn
        return fn
    return deco


def _zero_check(value: Poly, detail: str | None = None):
    if value:
        raise _Fail(value.witness(), detail)
    return value


@command("print")
def _print(c: _Ctx):
    c.expect(1)
    return c.poly(c.raw(0))


@command("grading")
def _grading(c: _Ctx):
    c.expect(1)
    g = alg.grading_of(c.poly(c.raw(0)))
    if isinstance(g, alg.Inhomogeneous):
        return "inhomogeneous: " + ", ".join(
            f"{'odd' if k.parity else 'even'} {k.weight}"
            for k in sorted(g.classes, key=lambda k: (k.parity, k.weight)))
    return f"{'odd' if g.parity else 'even'} {tuple(g.weight)}"


@command("partial")
def _partial(c: _Ctx):
    c.expect(2)
    v = c.raw(0)
    if not isinstance(v, Var):
        raise ElabError("partial needs a variable first", c.pos)
    name = v.name if v.index is None else f"{v.name}{v.index}"
    if name not in c.chart:
        raise ElabError(f"undefined name {name!r}", v.pos)
    return alg.partial(name, c.poly(c.raw(1)))


@command("restrict")
def _restrict(c: _Ctx):
    c.expect(1)
    return alg.restrict_to_base(c.poly(c.raw(0)))


@command("substitute")
def _substitute(c: _Ctx):
    if len(c.positional) != 1:
        raise ElabError("substitute takes one expression and named images", c.pos)
    p = c.poly(c.raw(0))
    mapping = {}
    for name, node in c.named.items():
        if name not in p.chart:
            raise ElabError(f"undefined name {name!r}", getattr(node, "pos", c.pos))
        mapping[name] = c.poly(node)
    return alg.substitute(p, mapping)


@command("schouten")
def _schouten(c: _Ctx):
    c.expect(2)
    return br.schouten(c.poly(c.raw(0)), c.poly(c.raw(1)))


@command("derived")
def _derived(c: _Ctx):
    c.expect(2)
    return br.derived_bracket(c.poly(c.raw(0)), c.poly_list(c.raw(1)))


@command("skew")
def _skew(c: _Ctx):
    c.expect(2)
    return br.skew_bracket(c.poly(c.raw(0)), c.poly_list(c.raw(1)))


@command("jacobiator")
def _jacobiator(c: _Ctx):
    c.expect(2)
    D = c.poly(c.raw(0))
    args = c.poly_list(c.raw(1))
    try:
        return br.jacobiator(D, args)
    except br.PathDisagreement as exc:
        raise _Fail(None, str(exc)) from None


@command("bracket")
def _bracket(c: _Ctx):
    c.expect(2)
    K = c.kirillov(c.raw(0))
    return kir.kirillov_bracket(K, c.poly_list(c.raw(1)))


@command("anchor")
def _anchor(c: _Ctx):
    c.expect(3)
    K = c.kirillov(c.raw(0))
    return kir.anchor(K, c.poly_list(c.raw(1)), c.poly(c.raw(2)))


@command("components")
def _components(c: _Ctx):
    c.expect(1)
    try:
        return kir.extract_components(c.kirillov(c.raw(0)))
    except kir.ComponentError as exc:
        raise _Fail(exc.witness, str(exc)) from None


def _register_result_chart(c: _Ctx, value, default: str | None = None):
    name = c.bind or default
    if name is not None:
        c.interp.register_chart(name, value.chart)


@command("poissonise")
def _poissonise(c: _Ctx):
    c.expect(1)
    try:
        K = kir.poissonise(c.poly(c.raw(0)))
    except kir.MasterEquationError as exc:
        raise _Fail(exc.residue.witness(), str(exc)) from None
    _register_result_chart(c, K)
    c.detail = f"order {K.order}"
    return K


@command("tlift")
def _tlift(c: _Ctx):
    c.expect(1)
    K = c.kirillov(c.raw(0))
    tgt = abd.tangent_chart(K.chart, K.t)
    res = abd.validate_algebroid(abd.d_T(K.P, tgt))
    if not res:
        raise _Fail(res.witness, f"tangent lift fails the {res.check} check")
    _register_result_chart(c, res)
    return res


@command("rep")
def _rep(c: _Ctx):
    c.expect(3)
    A = c.algebroid(c.raw(0))
    return abd.higher_representation(A, c.poly_list(c.raw(1)), c.poly(c.raw(2)))


@command("qlift")
def _qlift(c: _Ctx):
    c.expect(1)
    Q = c.poly(c.raw(0))
    try:
        K = bv.q_lift(Q)
    except bv.QLiftError as exc:
        raise _Fail(exc.witness, str(exc)) from None
    except kir.MasterEquationError as exc:
        raise _Fail(exc.residue.witness(), str(exc)) from None
    _register_result_chart(c, K)
    c.detail = f"order {K.order}"
    return K


# checks

@command("check", "kirillov")
def _check_kirillov(c: _Ctx):
    c.expect(1)
    v = c.binding(c.raw(0))
    P = v.P if isinstance(v, (kir.KirillovStructure, abd.AlgebroidStructure)) else c.poly(c.raw(0))
    res = kir.validate_kirillov(P)
    if not res:
        raise _Fail(res.witness, f"{res.check} check failed")
    c.detail = f"order {res.order}"
    return None


@command("check", "master")
def _check_master(c: _Ctx):
    c.expect(1)
    P = c.poly(c.raw(0))
    _zero_check(br.schouten(P, P) if P.chart.pairs else P.chart.zero(), "self-bracket is nonzero")


@command("check", "algebroid")
def _check_algebroid(c: _Ctx):
    c.expect(1)
    v = c.binding(c.raw(0))
    P = v.P if isinstance(v, (kir.KirillovStructure, abd.AlgebroidStructure)) else c.poly(c.raw(0))
    res = abd.validate_algebroid(P)
    if not res:
        raise _Fail(res.witness, f"{res.check} check failed")


@command("check", "zero")
def _check_zero(c: _Ctx):
    c.expect(1)
    _zero_check(c.poly(c.raw(0)), "expression is nonzero")


@command("check", "equal")
def _check_equal(c: _Ctx):
    c.expect(2)
    _zero_check(c.poly(c.raw(0)) - c.poly(c.raw(1)), "sides differ")


@command("check", "jacobi")
def _check_jacobi(c: _Ctx):
    c.expect(2)
    D = c.poly(c.raw(0))
    if D.parity:
        raise ElabError("the generator must be even", c.pos)
    _zero_check(br.jacobiator(D, c.poly_list(c.raw(1))), "Jacobiator is nonzero")


@command("check", "section")
def _check_section(c: _Ctx):
    c.expect(2)
    K = c.kirillov(c.raw(0))
    s = c.poly(c.raw(1))
    try:
        kir.check_section(K, s)
    except kir.SectionError as exc:
        raise _Fail(s.witness(), str(exc)) from None


@command("check", "quasi")
def _check_quasi(c: _Ctx):
    """Quasi-derivation rule, on given sections and ``f`` or on seeded random samples."""
    K = c.kirillov(c.raw(0))
    if len(c.positional) == 3:
        c.expect(3)
        sections, f = c.poly_list(c.raw(1)), c.poly(c.raw(2))
        if not sections:
            raise ElabError("needs at least one section", c.pos)
        _zero_check(kir.quasi_derivation_defect(K, sections, f), "rule fails")
        return None
    c.expect(1, 1, named=("arity", "samples"))
    r = c.integer("arity", 2, 1, c.interp.config.arity)
    n = c.integer("samples", 10, 1, 10000)
    base = [v for v in K.chart.base_names() if v != K.t]
    rng = c.interp.rng
    for _ in range(n):
        sections = [random_section(K.chart, rng, K.t, base) for _ in range(r)]
        f = random_poly(K.chart, rng, base)
        for p, fc in f.parity_classes().items():
            d = kir.quasi_derivation_defect(K, sections, fc)
            if d:
                raise _Fail(d.witness(), "rule fails on a random sample")
    c.detail = f"{n} samples at arity {r}"


@command("check", "morphism")
def _check_morphism(c: _Ctx):
    c.expect(2, 2, named=("psi", "phi"))
    K1, K2 = c.kirillov(c.raw(0)), c.kirillov(c.raw(1))
    if "psi" not in c.named or "phi" not in c.named:
        raise ElabError("check morphism needs psi = ... and phi = [...]", c.pos)
    psi = c.poly(c.named["psi"], K1.chart)
    phi = c.named["phi"]
    if not isinstance(phi, ListArg):
        raise ElabError("phi must be a list [ ... ]", c.pos)
    imgs = [c.poly(x, K1.chart) for x in phi.items]
    base2 = [K2.chart.variables[b].name for b, _ in K2.chart.pairs
             if K2.chart.variables[b].name != K2.t]
    if len(imgs) != len(base2):
        raise ElabError(f"phi must list images of {base2}", c.pos)
    d = kir.morphism_defect(K1, K2, psi, dict(zip(base2, imgs)))
    _zero_check(d, "structures are not related")


@command("check", "laws")
def _check_laws(c: _Ctx):
    c.expect(4)
    A = c.algebroid(c.raw(0))
    defects = abd.representation_law_defects(A, c.poly_list(c.raw(1)), c.poly(c.raw(2)),
                                             c.poly(c.raw(3)))
    for k in ("law1", "law2", "flatness"):
        if defects[k]:
            raise _Fail(defects[k].witness(), f"{k} fails")


@command("check", "flat")
def _check_flat(c: _Ctx):
    c.expect(3)
    v = c.binding(c.raw(0))
    P = v.P if isinstance(v, (kir.KirillovStructure, abd.AlgebroidStructure)) else c.poly(c.raw(0))
    args = c.poly_list(c.raw(1))
    s = c.poly(c.raw(2))
    flat = P.chart.zero()
    for j in range(len(args) + 1):
        flat = flat + br.jacobiator(P, args[:j] + [s], check=False)
    _zero_check(flat, "flatness fails")


@command("check", "nilpotent")
def _check_nilpotent(c: _Ctx):
    c.expect(1)
    L = c.operator(c.raw(0))
    sq = ops.op_compose(L, L)
    if sq:
        raise _Fail(ops.op_text(sq), "operator does not square to zero")


@command("check", "closure")
def _check_closure(c: _Ctx):
    c.expect(1, 1, named=("arity", "degree"))
    L = c.operator(c.raw(0))
    r = c.integer("arity", 2, 1, c.interp.config.arity)
    deg = c.integer("degree", min(2, c.interp.config.degree), 0, c.interp.config.degree)
    if not isinstance(L.chart, ops.AntitangentChart):
        raise ElabError("closure needs an operator on an antitangent chart", c.pos)
    res = bv.invariant_closure_check(L, bv.invariant_basis(L.chart, deg), r)
    if res.status == "fail":
        raise _Fail(res.witness, res.detail)
    c.detail = res.status if res.status == "ok" else f"skipped: {res.detail}"


@command("check", "cartan")
def _check_cartan(c: _Ctx):
    c.expect(1, 2, named=("samples",))
    K = c.kirillov(c.raw(0))
    if len(c.positional) == 2:
        Qs = [c.poly(c.raw(1))]
    else:
        n = c.integer("samples", 10, 1, 10000)
        Qs = [random_poly(K.chart, c.interp.rng, max_degree=c.interp.config.degree, negative=1)
              for _ in range(n)]
    AT = ops.antitangent_chart(K.chart)
    for Q in Qs:
        d = bv.cartan_defect(K, Q, 1, AT)
        if d:
            raise _Fail(ops.op_text(d), "Cartan identity fails")
    c.detail = f"{len(Qs)} samples"


# BV

@command("bv", "operator")
def _bv_operator(c: _Ctx):
    c.expect(1)
    K = c.kirillov(c.raw(0))
    L = ops.koszul_brylinski(K)
    if c.bind:
        c.interp.register_chart(c.bind, L.chart, activate=False)
    return L


@command("bv", "interior")
def _bv_interior(c: _Ctx):
    c.expect(1)
    return ops.interior(c.poly(c.raw(0)))


@command("bv", "derham")
def _bv_derham(c: _Ctx):
    c.expect(0)
    ch = c.chart
    if not isinstance(ch, ops.AntitangentChart):
        raise ElabError("the de Rham differential needs an antitangent chart", c.pos)
    return ops.de_rham(ch)


@command("bv", "apply")
def _bv_apply(c: _Ctx):
    c.expect(2)
    L = c.operator(c.raw(0))
    return ops.op_apply(L, c.poly(c.raw(1), L.chart))


@command("bv", "compose")
def _bv_compose(c: _Ctx):
    c.expect(2)
    return ops.op_compose(c.operator(c.raw(0)), c.operator(c.raw(1)))


@command("bv", "commutator")
def _bv_commutator(c: _Ctx):
    c.expect(2)
    return ops.op_commutator(c.operator(c.raw(0)), c.operator(c.raw(1)))


@command("bv", "bracket")
def _bv_bracket(c: _Ctx):
    c.expect(2)
    L = c.operator(c.raw(0))
    try:
        return bv.bv_bracket(L, c.poly_list(c.raw(1), L.chart))
    except bv.NotNilpotent as exc:
        raise _Fail(exc.witness, "operator does not square to zero") from None


# Lie-algebra factory

def _algebra(c: _Ctx) -> lie.StructureConstants:
    if c.interp.algebra is None:
        raise ElabError("no Lie algebra loaded; use 'lie so3', 'lie load' or 'lie algebra'",
                        c.pos)
    return c.interp.algebra


def _bind_default(c: _Ctx, name: str, value):
    if c.bind is None:
        c.interp.env[name] = value


@command("lie", "so3")
def _lie_so3(c: _Ctx):
    c.expect(0)
    c.interp.algebra = lie.so3()
    return c.interp.algebra


@command("lie", "load")
def _lie_load(c: _Ctx):
    c.expect(1)
    path = Path(c.text(c.raw(0)))
    if not path.is_absolute() and c.interp.config.base_dir is not None:
        path = c.interp.config.base_dir / path
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ElabError(f"cannot read {path}: {exc.strerror}", c.pos) from None
    try:
        c.interp.algebra = lie.StructureConstants.from_json(text)
    except (ValueError, TypeError) as exc:
        raise ElabError(f"bad structure constants: {exc}", c.pos) from None
    return c.interp.algebra


@command("lie", "algebra")
def _lie_algebra(c: _Ctx):
    c.expect(2)
    dim = c.raw(0)
    if not isinstance(dim, Num) or dim.value.denominator != 1 or not 0 <= dim.value <= 64:
        raise ElabError("dimension must be an integer in [0, 64]", c.pos)
    rows = c.raw(1)
    if not isinstance(rows, ListArg):
        raise ElabError("expected a list of [i, j, k, num, den] rows", c.pos)
    entries = []
    for r in rows.items:
        if not isinstance(r, ListArg):
            raise ElabError("expected a row [i, j, k, num, den]", getattr(r, "pos", c.pos))
        row = []
        for x in r.items:
            neg = isinstance(x, Neg) and isinstance(x.operand, Num)
            num = x.operand if neg else x
            if not isinstance(num, Num) or num.value.denominator != 1:
                raise ElabError("row entries must be integers", getattr(x, "pos", c.pos))
            row.append(-int(num.value) if neg else int(num.value))
        entries.append(row)
    try:
        c.interp.algebra = lie.StructureConstants.from_entries(int(dim.value), entries)
    except ValueError as exc:
        raise ElabError(str(exc), rows.pos) from None
    return c.interp.algebra


@command("lie", "jacobi")
def _lie_jacobi(c: _Ctx):
    c.expect(0)
    res = lie.jacobi_residues(_algebra(c))
    if res:
        (i, j, k, m), v = next(iter(sorted(res.items())))
        raise _Fail(f"({i + 1},{j + 1},{k + 1};{m + 1}) = {_scalar(v)}",
                    "structure constants violate the Jacobi identity")
    return True


@command("lie", "killing")
def _lie_killing(c: _Ctx):
    c.expect(0)
    return lie.killing_form(_algebra(c))


def _ce_chart(c: _Ctx) -> Chart:
    S = _algebra(c)
    ch = lie.ce_chart(S.dim)
    c.interp.register_chart("CE", ch)
    return ch


@command("lie", "ce")
def _lie_ce(c: _Ctx):
    c.expect(0)
    S = _algebra(c)
    ch = _ce_chart(c)
    lam, euler = lie.ce_structures(S, ch)
    _bind_default(c, "Lambda", lam)
    _bind_default(c, "E", euler)
    return [lam, euler]


@command("lie", "cocycle3")
def _lie_cocycle3(c: _Ctx):
    c.expect(0)
    S = _algebra(c)
    ch = _ce_chart(c)
    try:
        C = lie.cartan_3cocycle(S, ch)
    except lie.CocycleError as exc:
        raise _Fail(exc.residue.witness(), str(exc)) from None
    _bind_default(c, "C3", C)
    return C


@command("lie", "jacobi4")
def _lie_jacobi4(c: _Ctx):
    c.expect(0, 1)
    S = _algebra(c)
    ch = _ce_chart(c)
    C = c.poly(c.raw(0), ch) if c.positional else None
    try:
        K = lie.build_cocycle_jacobi(S, C, ch)
    except kir.MasterEquationError as exc:
        if exc.candidate is not None:
            if c.bind is None:
                c.interp.env["P"] = exc.candidate
            else:
                c.interp.env[c.bind] = exc.candidate
        raise _Fail(exc.residue.witness(), str(exc)) from None
    except lie.CocycleError as exc:
        raise _Fail(exc.residue.witness(), str(exc)) from None
    _bind_default(c, "P", K)
    c.detail = f"order {K.order}"
    return K


@command("lie", "algebroid")
def _lie_algebroid(c: _Ctx):
    c.expect(0, 0, named=("spectators",))
    S = _algebra(c)
    n = c.integer("spectators", 1, 0, 8)
    try:
        A = lie.build_algebroid(S, None, n)
    except kir.MasterEquationError as exc:
        raise _Fail(exc.residue.witness(), str(exc)) from None
    c.interp.register_chart("CEA", A.chart)
    _bind_default(c, "A", A)
    return A


# ---------------------------------------------------------------------------
# entry points


def elaborate(session: Session, config: RunConfig | None = None) -> Report:
    return Interpreter(config).run(session)


def parse_error_report(err: ParseError, seed: int = 0) -> Report:
    rec = Record(err.line, "parse", "error", detail=err.message, column=err.column)
    return Report([rec], seed)


def run_text(text: str, config: RunConfig | None = None) -> Report:
    config = config or RunConfig()
    try:
        session = parse_session(text)
    except ParseError as err:
        return parse_error_report(err, config.seed)
    return Interpreter(config).run(session)
