"""Recursive-descent parser.

    session := stmt*
    stmt    := chart | 'use' IDENT ';' | 'let' IDENT '=' (command | expr) ';' | command ';'
    chart   := 'chart' IDENT ( '=' IDENT '(' carg (',' carg)* ')' | '{' decl* '}' ) ';'?
    decl    := 'var' IDENT ('[' INT ']')? ':' ('even'|'odd') (',' 'weight' '(' int (',' int)* ')')?
               (',' 'invertible')? ';'
             | 'pair' IDENT ',' IDENT ';'
    command := WORD IDENT? (arg (',' arg)*)? ('on' IDENT)?
    arg     := IDENT '=' value | value
    value   := STRING | '[' (value (',' value)*)? ']' | expr
    expr    := term (('+'|'-') term)*
    term    := factor ('*' factor)*
    factor  := '-'? atom ('^' '-'? INT)?
    atom    := INT | RATIONAL | IDENT ('[' INT ']')? | '(' expr ')'
"""

from __future__ import annotations

from fractions import Fraction

from .lexer import COMMANDS, ParseError, Token, tokenize, unquote
from .nodes import (ChartDecl, Command, Let, ListArg, Named, Neg, Num, PairDecl, Pos, Power,
                    Product, Session, Str, Sum, Use, Var, VarDecl)

MAX_DEPTH = 200
SUBWORD = frozenset({"check", "bv", "lie"})


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.depth = 0

    # helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, expected: str, tok: Token | None = None, message: str | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.lexeme)
        raise ParseError(message or f"expected {expected}, found {found}", tok.offset,
                         tok.line, tok.column, expected, found)

    def at(self, lexeme: str) -> bool:
        t = self.tok
        return t.kind in ("punct", "op", "keyword") and t.lexeme == lexeme

    def expect(self, lexeme: str) -> Token:
        if not self.at(lexeme):
            self.error(repr(lexeme))
        return self.advance()

    def ident(self, what: str = "an identifier") -> Token:
        if self.tok.kind != "ident":
            self.error(what)
        return self.advance()

    def integer(self, what: str = "an integer") -> int:
        if self.tok.kind != "integer":
            self.error(what)
        return int(self.advance().lexeme)

    def signed_int(self, what: str = "an integer") -> int:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        v = self.integer(what)
        return -v if neg else v

    @staticmethod
    def pos(t: Token) -> Pos:
        return Pos(t.line, t.column)

    def nest(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.error("", message="expression nested too deeply")

    # session
    def session(self) -> Session:
        out = []
        while self.tok.kind != "eof":
            out.append(self.statement())
        return Session(tuple(out))

    def statement(self):
        t = self.tok
        if self.at("chart"):
            return self.chart()
        if self.at("use"):
            self.advance()
            name = self.ident("a chart name").lexeme
            self.expect(";")
            return Use(name, self.pos(t))
        if self.at("let"):
            self.advance()
            name = self.ident("a binding name")
            if name.lexeme in COMMANDS:
                self.error("a binding name", name)
            self.expect("=")
            if self.tok.kind == "ident" and self.tok.lexeme in COMMANDS:
                value = self.command()
            else:
                value = self.expr()
            self.expect(";")
            return Let(name.lexeme, value, self.pos(t))
        if t.kind == "ident" and t.lexeme in COMMANDS:
            c = self.command()
            self.expect(";")
            return c
        self.error("a statement ('chart', 'use', 'let' or a command)")

    def chart(self) -> ChartDecl:
        t = self.expect("chart")
        name = self.ident("a chart name").lexeme
        if self.at("="):
            self.advance()
            fn = self.ident("a chart constructor").lexeme
            self.expect("(")
            args = []
            if not self.at(")"):
                while True:
                    if self.tok.kind == "ident":
                        args.append(self.advance().lexeme)
                    else:
                        args.append(self.integer("an integer or chart name"))
                    if not self.at(","):
                        break
                    self.advance()
            self.expect(")")
            self.expect(";")
            return ChartDecl(name, fn, tuple(args), (), self.pos(t))
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.at("var"):
                body.append(self.var_decl())
            elif self.at("pair"):
                p = self.advance()
                a = self.ident("a variable name").lexeme
                self.expect(",")
                b = self.ident("a variable name").lexeme
                self.expect(";")
                body.append(PairDecl(a, b, self.pos(p)))
            else:
                self.error("'var', 'pair' or '}'")
        self.advance()
        if self.at(";"):
            self.advance()
        return ChartDecl(name, None, (), tuple(body), self.pos(t))

    def var_decl(self) -> VarDecl:
        t = self.expect("var")
        name = self.ident("a variable name").lexeme
        size = None
        if self.at("["):
            self.advance()
            size = self.integer("a family size")
            self.expect("]")
        self.expect(":")
        if self.at("even"):
            parity = 0
        elif self.at("odd"):
            parity = 1
        else:
            self.error("'even' or 'odd'")
        self.advance()
        weight, inv = None, False
        while self.at(","):
            self.advance()
            if self.at("weight") and weight is None:
                self.advance()
                self.expect("(")
                w = [self.signed_int("a weight component")]
                while self.at(","):
                    self.advance()
                    w.append(self.signed_int("a weight component"))
                self.expect(")")
                weight = tuple(w)
            elif self.at("invertible") and not inv:
                self.advance()
                inv = True
            else:
                self.error("'weight' or 'invertible'")
        self.expect(";")
        return VarDecl(name, size, parity, weight, inv, self.pos(t))

    def command(self) -> Command:
        t = self.ident("a command")
        sub = None
        if t.lexeme in SUBWORD:
            sub = self.ident(f"a '{t.lexeme}' subcommand").lexeme
        args = []
        if not (self.at(";") or self.at("on")):
            args.append(self.arg())
            while self.at(","):
                self.advance()
                args.append(self.arg())
        on = None
        if self.at("on"):
            self.advance()
            on = self.ident("a chart name").lexeme
        return Command(t.lexeme, sub, tuple(args), on, self.pos(t))

    def arg(self):
        if self.tok.kind == "ident" and self.peek().kind == "punct" and self.peek().lexeme == "=":
            t = self.advance()
            self.advance()
            return Named(t.lexeme, self.value(), self.pos(t))
        return self.value()

    def value(self):
        t = self.tok
        if t.kind == "string":
            self.advance()
            return Str(unquote(t.lexeme), self.pos(t))
        if self.at("["):
            self.nest()
            self.advance()
            items = []
            if not self.at("]"):
                items.append(self.value())
                while self.at(","):
                    self.advance()
                    items.append(self.value())
            self.expect("]")
            self.depth -= 1
            return ListArg(tuple(items), self.pos(t))
        return self.expr()

    # expressions
    def expr(self):
        self.nest()
        t = self.tok
        terms, signs = [self.term()], [1]
        while self.at("+") or self.at("-"):
            signs.append(1 if self.advance().lexeme == "+" else -1)
            terms.append(self.term())
        self.depth -= 1
        if len(terms) == 1:
            return terms[0]
        return Sum(tuple(terms), tuple(signs), self.pos(t))

    def term(self):
        t = self.tok
        factors = [self.factor()]
        while self.at("*"):
            self.advance()
            factors.append(self.factor())
        if len(factors) == 1:
            return factors[0]
        return Product(tuple(factors), self.pos(t))

    def factor(self):
        t = self.tok
        node = None
        if self.at("-"):
            self.advance()
            node = Neg(self.atom(), self.pos(t))
        else:
            node = self.atom()
        if self.at("^"):
            self.advance()
            e = self.signed_int("an integer exponent")
            node = Power(node, e, self.pos(t))
        return node

    def atom(self):
        t = self.tok
        if t.kind == "integer":
            self.advance()
            return Num(Fraction(int(t.lexeme)), self.pos(t))
        if t.kind == "rational":
            self.advance()
            num, den = t.lexeme.split("/")
            if int(den) == 0:
                self.error("", t, "zero denominator in rational literal")
            return Num(Fraction(int(num), int(den)), self.pos(t))
        if t.kind == "ident":
            if t.lexeme in COMMANDS:
                self.error("an operand", t)
            self.advance()
            idx = None
            if self.at("["):
                self.advance()
                idx = self.integer("an index")
                self.expect("]")
            return Var(t.lexeme, idx, self.pos(t))
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.error("an operand")


def parse_session(text: str) -> Session:
    """Parse a session; raises ``ParseError`` at the first error."""
    return _Parser(text).session()


def parse_expr(text: str):
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("end of expression")
    return e
