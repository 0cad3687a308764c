"""Tokenizer for the session language."""

from __future__ import annotations

from dataclasses import dataclass

KEYWORDS = frozenset({
    "chart", "var", "pair", "let", "use", "on", "even", "odd", "weight", "invertible",
})

# command words are reserved as well, so `let X = <command>` is unambiguous
COMMANDS = frozenset({
    "print", "grading", "partial", "restrict", "substitute",
    "schouten", "derived", "skew", "jacobiator", "bracket", "anchor",
    "components", "poissonise", "tlift", "rep", "qlift",
    "check", "bv", "lie",
})

PUNCT = frozenset(";,()[]{}:=+-*^")


class ParseError(ValueError):
    """First syntax error: ``offset`` is a 0-based index into the input (<= its length)."""

    def __init__(self, message: str, offset: int, line: int, column: int,
                 expected: str = "", found: str = ""):
        super().__init__(message)
        self.message = message
        self.offset = offset
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str  # ident | keyword | integer | rational | string | op | punct | eof
    lexeme: str
    offset: int
    line: int
    column: int


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    start = text.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)
    line, col = 1, 1

    def emit(kind, start, end):
        toks.append(Token(kind, text[start:end], start, *_position(text, start)))

    while i < n:
        ch = text[i]
        if ch in " \t\r\n\f\v":
            i += 1
            continue
        if ch == "#":
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            emit("keyword" if word in KEYWORDS else "ident", i, j)
            i = j
            continue
        if ch.isascii() and ch.isdigit():
            j = i + 1
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "/" and text[j + 1].isascii() and text[j + 1].isdigit():
                k = j + 2
                while k < n and text[k].isascii() and text[k].isdigit():
                    k += 1
                emit("rational", i, k)
                i = k
            else:
                emit("integer", i, j)
                i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"' and text[j] != "\n":
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                j += 1
            if j >= n or text[j] != '"':
                raise ParseError("unterminated string", i, *_position(text, i),
                                 expected='closing "', found="end of line")
            emit("string", i, j + 1)
            i = j + 1
            continue
        if ch in PUNCT:
            emit("op" if ch in "+-*^" else "punct", i, i + 1)
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i, *_position(text, i),
                         expected="a token", found=repr(ch))
    toks.append(Token("eof", "", n, *_position(text, n)))
    return toks


def unquote(lexeme: str) -> str:
    out, i = [], 1
    while i < len(lexeme) - 1:
        c = lexeme[i]
        if c == "\\" and i + 1 < len(lexeme) - 1:
            i += 1
            c = lexeme[i]
        out.append(c)
        i += 1
    return "".join(out)
