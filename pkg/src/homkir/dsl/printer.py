"""Canonical text for syntax trees and polynomials."""

from __future__ import annotations

import json
from fractions import Fraction

from ..algebra import Poly, to_text
from .nodes import (ChartDecl, Command, Let, ListArg, Named, Neg, Num, PairDecl, Power, Product,
                    Session, Str, Sum, Use, Var, VarDecl)


def print_canonical(p: Poly) -> str:
    return to_text(p)


def _num(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _atom(e) -> str:
    if isinstance(e, (Num, Var)):
        return format_expr(e)
    return f"({format_expr(e)})"


def _factor(e) -> str:
    if isinstance(e, (Num, Var, Neg, Power)):
        return format_expr(e)
    return f"({format_expr(e)})"


def format_expr(e) -> str:
    if isinstance(e, Num):
        if e.value < 0:
            return f"({_neg_num(e.value)})"
        return _num(e.value)
    if isinstance(e, Var):
        return e.name if e.index is None else f"{e.name}[{e.index}]"
    if isinstance(e, Neg):
        return "-" + _atom(e.operand)
    if isinstance(e, Power):
        base = format_expr(e.base) if isinstance(e.base, Neg) else _atom(e.base)
        return f"{base}^{e.exponent}"
    if isinstance(e, Product):
        return "*".join(_factor(f) for f in e.factors)
    if isinstance(e, Sum):
        parts = []
        for k, (s, t) in enumerate(zip(e.signs, e.terms)):
            body = f"({format_expr(t)})" if isinstance(t, Sum) else format_expr(t)
            parts.append(body if k == 0 else (" + " if s > 0 else " - ") + body)
        return "".join(parts)
    raise TypeError(f"not an expression node: {e!r}")


def _neg_num(v: Fraction) -> str:
    # negative literals never come out of the parser; print them as negations
    return "-" + _num(-v)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_value(v) -> str:
    if isinstance(v, Str):
        return _quote(v.text)
    if isinstance(v, ListArg):
        return "[" + ", ".join(format_value(i) for i in v.items) + "]"
    if isinstance(v, Named):
        return f"{v.name} = {format_value(v.value)}"
    return format_expr(v)


def format_command(c: Command) -> str:
    out = c.word + (f" {c.sub}" if c.sub else "")
    if c.args:
        out += " " + ", ".join(format_value(a) for a in c.args)
    if c.on:
        out += f" on {c.on}"
    return out


def format_stmt(s) -> str:
    if isinstance(s, ChartDecl):
        if s.builtin:
            return f"chart {s.name} = {s.builtin}({', '.join(str(a) for a in s.builtin_args)});"
        body = " ".join(format_decl(d) for d in s.body)
        return f"chart {s.name} {{ {body} }};" if body else f"chart {s.name} {{ }};"
    if isinstance(s, Use):
        return f"use {s.name};"
    if isinstance(s, Let):
        rhs = format_command(s.value) if isinstance(s.value, Command) else format_expr(s.value)
        return f"let {s.name} = {rhs};"
    if isinstance(s, Command):
        return format_command(s) + ";"
    raise TypeError(f"not a statement node: {s!r}")


def format_decl(d) -> str:
    if isinstance(d, VarDecl):
        out = f"var {d.name}" + (f"[{d.size}]" if d.size is not None else "")
        out += ": " + ("odd" if d.parity else "even")
        if d.weight is not None:
            out += f", weight ({', '.join(str(w) for w in d.weight)})"
        if d.invertible:
            out += ", invertible"
        return out + ";"
    if isinstance(d, PairDecl):
        return f"pair {d.base}, {d.anti};"
    raise TypeError(f"not a declaration node: {d!r}")


def format_session(s: Session) -> str:
    return "\n".join(format_stmt(x) for x in s.statements) + ("\n" if s.statements else "")


def ast_to_json(node) -> object:
    """Plain-data rendering of a tree (for ``parse --ast``)."""
    if isinstance(node, Session):
        return {"session": [ast_to_json(s) for s in node.statements]}
    if isinstance(node, Fraction):
        return _num(node)
    if isinstance(node, tuple):
        return [ast_to_json(x) for x in node]
    if hasattr(node, "__dataclass_fields__"):
        out = {"node": type(node).__name__}
        for k in node.__dataclass_fields__:
            if k == "pos":
                continue
            out[k] = ast_to_json(getattr(node, k))
        return out
    return node


def ast_text(node) -> str:
    return json.dumps(ast_to_json(node), indent=2, sort_keys=False)
