"""Token definitions and the keyword tables of the schema language."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..diagnostics import Location


class TokenKind(enum.Enum):
    IDENT = "identifier"
    KEYWORD = "keyword"
    INT = "integer-literal"
    BITSTRING = "bitstring-literal"
    FLOAT = "float-literal"
    CHAR = "char-literal"
    STRING = "string-literal"
    PUNCT = "punctuator"
    DIRECTIVE = "pragma-directive"
    VERBATIM = "verbatim-block"
    EOF = "end-of-file"


# Keywords with meaning in the schema language itself.
KEYWORDS = frozenset(
    {
        "abstract",
        "aligned",
        "big",
        "bit",
        "break",
        "case",
        "char",
        "class",
        "const",
        "continue",
        "default",
        "do",
        "double",
        "else",
        "extends",
        "false",
        "float",
        "for",
        "if",
        "int",
        "isidof",
        "lengthof",
        "little",
        "long",
        "map",
        "short",
        "signed",
        "switch",
        "true",
        "unsigned",
        "while",
    }
)

# C++/Java keywords with no role here; using one as an identifier is a lexical error.
RESERVED_WORDS = frozenset(
    {
        "assert",
        "auto",
        "bool",
        "boolean",
        "byte",
        "catch",
        "delete",
        "enum",
        "explicit",
        "export",
        "extern",
        "final",
        "finally",
        "friend",
        "goto",
        "implements",
        "import",
        "inline",
        "instanceof",
        "interface",
        "mutable",
        "namespace",
        "native",
        "new",
        "operator",
        "package",
        "private",
        "protected",
        "public",
        "register",
        "return",
        "sizeof",
        "static",
        "strictfp",
        "struct",
        "super",
        "synchronized",
        "template",
        "this",
        "throw",
        "throws",
        "transient",
        "try",
        "typedef",
        "typeid",
        "typename",
        "union",
        "using",
        "virtual",
        "void",
        "volatile",
        "wchar_t",
    }
)

# Longest-first so the scanner can match greedily.
PUNCTUATORS = (
    "<<=",
    ">>=",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "||",
    "++",
    "--",
    "+=",
    "-=",
    "*=",
    "/=",
    "%=",
    "&=",
    "|=",
    "^=",
    "<<",
    ">>",
    "..",
    "{",
    "}",
    "(",
    ")",
    "[",
    "]",
    ";",
    ",",
    ".",
    ":",
    "?",
    "=",
    "<",
    ">",
    "+",
    "-",
    "*",
    "/",
    "%",
    "!",
    "~",
    "&",
    "|",
    "^",
)


@dataclass
class Token:
    kind: TokenKind
    text: str
    location: Location = field(compare=False)
    value: int | float | None = None
    bit_length: int | None = None
    # DIRECTIVE extras: name is "include" | "import" | "pragma", payload the argument text.
    directive: str | None = None
    payload: str | None = None
    # VERBATIM extras.
    placement: str | None = None  # "class-scope" | "get" | "put" | "both"
    language: str | None = None  # None | "c" | "j"

    def is_punct(self, text: str) -> bool:
        return self.kind is TokenKind.PUNCT and self.text == text

    def is_keyword(self, text: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.text == text

    def __repr__(self) -> str:  # compact for test failure output
        return f"Token({self.kind.name}, {self.text!r})"
