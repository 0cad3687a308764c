"""The session language: lexer, parser, printer and interpreter."""

from .elaborate import ElabError, Interpreter, Record, Report, RunConfig, elaborate, run_text
from .lexer import ParseError, Token, tokenize
from .parser import parse_expr, parse_session
from .printer import ast_text, format_expr, format_session, format_stmt, print_canonical

__all__ = [
    "ElabError", "Interpreter", "ParseError", "Record", "Report", "RunConfig", "Token",
    "ast_text", "elaborate", "format_expr", "format_session", "format_stmt", "parse_expr",
    "parse_session", "print_canonical", "run_text", "tokenize",
]
