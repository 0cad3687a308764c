"""Syntax trees.  Source positions are carried but excluded from equality."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union


@dataclass(frozen=True)
class Pos:
    line: int
    column: int


_pos = lambda: field(default=None, compare=False, repr=False)


# expressions

@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Var:
    name: str
    index: int | None = None
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Neg:
    operand: Expr
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Power:
    base: Expr
    exponent: int
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Product:
    factors: tuple
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Sum:
    """``terms[0] signs[1] terms[1] ...``; ``signs[0]`` is always +1."""

    terms: tuple
    signs: tuple
    pos: Pos | None = _pos()


Expr = Union[Num, Var, Neg, Power, Product, Sum]


# command arguments

@dataclass(frozen=True)
class Str:
    text: str
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class ListArg:
    items: tuple
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Named:
    name: str
    value: object
    pos: Pos | None = _pos()


# statements

@dataclass(frozen=True)
class VarDecl:
    name: str
    size: int | None
    parity: int
    weight: tuple | None
    invertible: bool
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class PairDecl:
    base: str
    anti: str
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class ChartDecl:
    name: str
    builtin: str | None = None
    builtin_args: tuple = ()
    body: tuple = ()
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Use:
    name: str
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Command:
    word: str
    sub: str | None
    args: tuple
    on: str | None = None
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Let:
    name: str
    value: object  # Expr | Command
    pos: Pos | None = _pos()


@dataclass(frozen=True)
class Session:
    statements: tuple
