"""Hand-written scanner for `.fl` schema sources.

Binary literals (`0b...`) carry both a value and an explicit bit length;
hexadecimal and octal constants do too (4 and 3 bits per digit), so that a
later stage can use them wherever a sized bit string is required.  Plain
decimal integers carry no length.
"""

from __future__ import annotations

import re

from ..diagnostics import LexError, Location
from .tokens import KEYWORDS, PUNCTUATORS, RESERVED_WORDS, Token, TokenKind

_IDENT_START = re.compile(r"[A-Za-z_]")
_IDENT_CONT = re.compile(r"[A-Za-z0-9_]")

_ESCAPES = {
    "n": "\n",
    "t": "\t",
    "r": "\r",
    "0": "\0",
    "\\": "\\",
    "'": "'",
    '"': '"',
}

# Verbatim delimiters: % + optional placement (p, g, *) + optional .c/.j + brace.
_VERBATIM_OPEN = re.compile(r"%(?P<place>[pg*])?(?:\.(?P<lang>[cj]))?\{")
_PLACEMENTS = {None: "class-scope", "p": "put", "g": "get", "*": "both"}


class _Scanner:
    def __init__(self, source: str, file_id: str):
        self.src = source
        self.file = file_id
        self.pos = 0
        self.line = 1
        self.col = 1

    def loc(self) -> Location:
        return Location(self.file, self.line, self.col)

    def error(self, message: str, loc: Location | None = None) -> LexError:
        return LexError(message, loc or self.loc())

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.src[i] if i < len(self.src) else ""

    def advance(self, count: int = 1) -> str:
        out = self.src[self.pos : self.pos + count]
        for ch in out:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += count
        return out

    def at_end(self) -> bool:
        return self.pos >= len(self.src)

    # -- token scanners -------------------------------------------------

    def skip_trivia(self) -> None:
        while not self.at_end():
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
            elif ch == "/" and self.peek(1) == "/":
                while not self.at_end() and self.peek() != "\n":
                    self.advance()
            elif ch == "/" and self.peek(1) == "*":
                start = self.loc()
                self.advance(2)
                while not (self.peek() == "*" and self.peek(1) == "/"):
                    if self.at_end():
                        raise self.error("unterminated comment", start)
                    self.advance()
                self.advance(2)
            else:
                return

    def scan_word(self) -> Token:
        start = self.loc()
        begin = self.pos
        while not self.at_end() and _IDENT_CONT.match(self.peek()):
            self.advance()
        word = self.src[begin : self.pos]
        if word in KEYWORDS:
            return Token(TokenKind.KEYWORD, word, start)
        if word in RESERVED_WORDS:
            raise self.error(f"'{word}' is a reserved word and cannot be used here", start)
        return Token(TokenKind.IDENT, word, start)

    def scan_number(self) -> Token:
        start = self.loc()
        if self.peek() == "0" and self.peek(1) in ("b", "B"):
            self.advance(2)
            digits = ""
            while True:
                ch = self.peek()
                if ch in ("0", "1"):
                    digits += self.advance()
                elif ch == "." and self.peek(1) in ("0", "1"):
                    self.advance()  # readability separator
                else:
                    break
            if not digits:
                raise self.error("malformed binary literal", start)
            return Token(
                TokenKind.BITSTRING, "", start, value=int(digits, 2), bit_length=len(digits)
            )
        if self.peek() == "0" and self.peek(1) in ("x", "X"):
            self.advance(2)
            digits = ""
            while self.peek() and self.peek() in "0123456789abcdefABCDEF":
                digits += self.advance()
            if not digits:
                raise self.error("malformed hexadecimal literal", start)
            return Token(
                TokenKind.BITSTRING, "", start, value=int(digits, 16), bit_length=4 * len(digits)
            )
        # Decimal / octal / float.
        begin = self.pos
        while self.peek().isdigit():
            self.advance()
        is_float = False
        if self.peek() == "." and self.peek(1).isdigit():
            is_float = True
            self.advance()
            while self.peek().isdigit():
                self.advance()
        if self.peek() in ("e", "E") and (
            self.peek(1).isdigit()
            or (self.peek(1) in ("+", "-") and self.peek(2).isdigit())
        ):
            is_float = True
            self.advance()
            if self.peek() in ("+", "-"):
                self.advance()
            while self.peek().isdigit():
                self.advance()
        text = self.src[begin : self.pos]
        if is_float:
            return Token(TokenKind.FLOAT, text, start, value=float(text))
        if text[0] == "0" and len(text) > 1:
            if any(c not in "01234567" for c in text[1:]):
                raise self.error("malformed octal literal", start)
            digits = text[1:]
            return Token(
                TokenKind.BITSTRING, text, start, value=int(digits, 8), bit_length=3 * len(digits)
            )
        return Token(TokenKind.INT, text, start, value=int(text, 10))

    def scan_char(self) -> Token:
        start = self.loc()
        self.advance()  # opening quote
        ch = self.peek()
        if ch == "" or ch == "\n":
            raise self.error("unterminated character literal", start)
        if ch == "\\":
            self.advance()
            esc = self.peek()
            if esc == "x":
                self.advance()
                hexdigits = ""
                while self.peek() and self.peek() in "0123456789abcdefABCDEF":
                    hexdigits += self.advance()
                if not hexdigits:
                    raise self.error("malformed escape in character literal", start)
                value = int(hexdigits, 16)
            elif esc in _ESCAPES:
                self.advance()
                value = ord(_ESCAPES[esc])
            else:
                raise self.error(f"unknown escape '\\{esc}'", start)
        else:
            self.advance()
            value = ord(ch)
        if self.peek() != "'":
            raise self.error("unterminated character literal", start)
        self.advance()
        return Token(TokenKind.CHAR, "", start, value=value)

    def scan_string(self) -> Token:
        start = self.loc()
        self.advance()  # opening quote
        out = []
        while True:
            ch = self.peek()
            if ch == "" or ch == "\n":
                raise self.error("unterminated string literal", start)
            if ch == '"':
                self.advance()
                break
            if ch == "\\":
                self.advance()
                esc = self.peek()
                if esc not in _ESCAPES:
                    raise self.error(f"unknown escape '\\{esc}'", start)
                out.append(_ESCAPES[esc])
                self.advance()
            else:
                out.append(self.advance())
        tok = Token(TokenKind.STRING, "", start)
        tok.payload = "".join(out)
        return tok

    def scan_percent(self) -> Token:
        start = self.loc()
        m = _VERBATIM_OPEN.match(self.src, self.pos)
        if m:
            placement = _PLACEMENTS[m.group("place")]
            lang = m.group("lang")
            self.advance(m.end() - m.start())
            closer = "%" + (m.group("place") or "") + (f".{lang}" if lang else "") + "}"
            end = self.src.find(closer, self.pos)
            if end < 0:
                raise self.error(f"unterminated verbatim block (expected '{closer}')", start)
            body = self.src[self.pos : end]
            self.advance(end - self.pos + len(closer))
            tok = Token(TokenKind.VERBATIM, body, start)
            tok.placement = placement
            tok.language = lang
            return tok
        if _IDENT_START.match(self.peek(1) or " "):
            self.advance()  # '%'
            begin = self.pos
            while not self.at_end() and _IDENT_CONT.match(self.peek()):
                self.advance()
            name = self.src[begin : self.pos]
            if name in ("include", "import"):
                self.skip_trivia()
                if self.peek() != '"':
                    raise self.error(f"%{name} expects a quoted file name", start)
                fname = self.scan_string()
                tok = Token(TokenKind.DIRECTIVE, f"%{name}", start)
                tok.directive = name
                tok.payload = fname.payload
                return tok
            if name == "pragma":
                # Settings run to end of line; a trailing // comment is dropped.
                begin = self.pos
                while not self.at_end() and self.peek() != "\n":
                    if self.peek() == "/" and self.peek(1) == "/":
                        break
                    self.advance()
                settings = self.src[begin : self.pos].strip()
                tok = Token(TokenKind.DIRECTIVE, "%pragma", start)
                tok.directive = "pragma"
                tok.payload = settings
                return tok
            raise self.error(f"unknown directive '%{name}'", start)
        self.advance()
        return Token(TokenKind.PUNCT, "%", start)

    def scan_punct(self) -> Token:
        start = self.loc()
        for p in PUNCTUATORS:
            if self.src.startswith(p, self.pos):
                self.advance(len(p))
                return Token(TokenKind.PUNCT, p, start)
        raise self.error(f"unexpected character {self.peek()!r}")


def tokenize(source: str, file_id: str = "<input>") -> list[Token]:
    """Scan a whole source text into tokens (EOF token included)."""
    sc = _Scanner(source, file_id)
    tokens: list[Token] = []
    while True:
        sc.skip_trivia()
        if sc.at_end():
            tokens.append(Token(TokenKind.EOF, "", sc.loc()))
            return tokens
        ch = sc.peek()
        begin = sc.pos
        if _IDENT_START.match(ch):
            tok = sc.scan_word()
        elif ch.isdigit():
            tok = sc.scan_number()
        elif ch == "'":
            tok = sc.scan_char()
        elif ch == '"':
            tok = sc.scan_string()
        elif ch == "%":
            tok = sc.scan_percent()
        else:
            tok = sc.scan_punct()
        if not tok.text:
            tok.text = sc.src[begin : sc.pos]
        tokens.append(tok)
