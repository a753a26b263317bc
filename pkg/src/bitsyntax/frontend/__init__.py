"""Frontend: scanning, parsing, include resolution, and canonical printing."""

from . import ast
from .includes import resolve_includes
from .lexer import tokenize
from .parser import parse_unit
from .pretty import pretty
from .tokens import KEYWORDS, RESERVED_WORDS, Token, TokenKind

__all__ = [
    "KEYWORDS",
    "RESERVED_WORDS",
    "Token",
    "TokenKind",
    "ast",
    "parse_unit",
    "pretty",
    "resolve_includes",
    "tokenize",
]


def parse_source(source: str, file_id: str = "<input>") -> ast.Ast:
    """Tokenize and parse source text in one step (no include resolution)."""
    return parse_unit(tokenize(source, file_id), file_id)
