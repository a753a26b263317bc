"""Recursive-descent parser producing an Ast from a token list."""

from __future__ import annotations

import re
import sys

from ..diagnostics import Location, ParseError
from . import ast
from .tokens import Token, TokenKind

_MAX_NESTING = 256

_MODIFIER_KEYWORDS = frozenset(
    {"aligned", "const", "big", "little", "signed", "unsigned", "short", "long"}
)
_BASE_TYPE_KEYWORDS = frozenset({"bit", "char", "int", "float", "double"})

_ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="})

_BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    ">": 7,
    "<=": 7,
    ">=": 7,
    "<<": 8,
    ">>": 8,
    "+": 9,
    "-": 9,
    "*": 10,
    "/": 10,
    "%": 10,
}

_PRAGMA_ITEM = re.compile(r'\s*(\w+)\s*(?:=\s*("(?:[^"\\]|\\.)*"|\w+))?\s*$')


def parse_pragma_settings(text: str, loc: Location) -> list[ast.PragmaSetting]:
    settings = []
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        m = _PRAGMA_ITEM.match(chunk)
        if not m:
            raise ParseError(f"malformed pragma setting {chunk.strip()!r}", loc)
        name, raw = m.group(1), m.group(2)
        if raw is None:
            settings.append(ast.PragmaSetting(name))
        elif raw.startswith('"'):
            settings.append(ast.PragmaSetting(name, raw[1:-1], quoted=True))
        elif raw.isdigit():
            settings.append(ast.PragmaSetting(name, int(raw)))
        else:
            settings.append(ast.PragmaSetting(name, raw))
    return settings


class Parser:
    def __init__(self, tokens: list[Token], file_id: str = "<input>"):
        self.tokens = tokens
        self.file = file_id
        self.i = 0
        self.depth = 0

    # -- cursor helpers ---------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        j = min(self.i + offset, len(self.tokens) - 1)
        return self.tokens[j]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if self.i < len(self.tokens) - 1:
            self.i += 1
        return tok

    def at_punct(self, text: str) -> bool:
        return self.peek().is_punct(text)

    def at_keyword(self, text: str) -> bool:
        return self.peek().is_keyword(text)

    def accept_punct(self, text: str) -> bool:
        if self.at_punct(text):
            self.advance()
            return True
        return False

    def accept_keyword(self, text: str) -> bool:
        if self.at_keyword(text):
            self.advance()
            return True
        return False

    def expect_punct(self, text: str) -> Token:
        if not self.at_punct(text):
            raise self.error(f"expected '{text}', found {self.describe(self.peek())}")
        return self.advance()

    def expect_keyword(self, text: str) -> Token:
        if not self.at_keyword(text):
            raise self.error(f"expected '{text}', found {self.describe(self.peek())}")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind is not TokenKind.IDENT:
            raise self.error(f"expected {what}, found {self.describe(tok)}")
        return self.advance()

    @staticmethod
    def describe(tok: Token) -> str:
        if tok.kind is TokenKind.EOF:
            return "end of file"
        return f"'{tok.text}'"

    def error(self, message: str, loc: Location | None = None) -> ParseError:
        return ParseError(message, loc or self.peek().location)

    def _enter(self) -> None:
        self.depth += 1
        if self.depth > _MAX_NESTING:
            raise self.error(f"nesting deeper than {_MAX_NESTING} levels")

    def _leave(self) -> None:
        self.depth -= 1

    # -- entry point --------------------------------------------------------

    def parse_unit(self) -> ast.Ast:
        unit = ast.Ast(file=self.file)
        while self.peek().kind is not TokenKind.EOF:
            unit.items.append(self.top_item())
        return unit

    def top_item(self) -> ast.TopItem:
        tok = self.peek()
        if tok.kind is TokenKind.DIRECTIVE:
            self.advance()
            if tok.directive in ("include", "import"):
                return ast.IncludeItem(tok.directive, tok.payload or "", loc=tok.location)
            return ast.PragmaStmt(
                parse_pragma_settings(tok.payload or "", tok.location), loc=tok.location
            )
        if tok.kind is TokenKind.VERBATIM:
            self.advance()
            return ast.VerbatimStmt(tok.placement or "class-scope", tok.language, tok.text,
                                    loc=tok.location)
        if tok.kind is TokenKind.KEYWORD and tok.text == "map":
            return self.map_decl()
        # A class declaration, possibly behind abstract/aligned modifiers.
        save = self.i
        abstract = False
        aligned: ast.Expr | None = None
        while True:
            if self.at_keyword("abstract"):
                self.advance()
                abstract = True
            elif self.at_keyword("aligned") and aligned is None:
                aligned = self.aligned_length(self.advance().location)
            else:
                break
        if self.at_keyword("class"):
            return self.class_decl(abstract, aligned)
        self.i = save
        decl = self.declaration(top_level=True)
        return decl

    # -- classes ------------------------------------------------------------

    def aligned_length(self, loc: Location) -> ast.Expr:
        if self.accept_punct("("):
            expr = self.expression()
            self.expect_punct(")")
            return expr
        return ast.IntLit(8, loc=loc)

    def class_decl(self, abstract: bool, aligned: ast.Expr | None) -> ast.ClassDecl:
        loc = self.expect_keyword("class").location
        name = self.expect_ident("class name").text
        params: list[ast.ParamDecl] = []
        if self.accept_punct("("):
            while True:
                params.append(self.param_decl())
                if not self.accept_punct(","):
                    break
            self.expect_punct(")")
        parent = None
        if self.accept_keyword("extends"):
            parent = self.expect_ident("base class name").text
        id_decl = None
        if self.accept_punct(":"):
            id_decl = self.id_decl()
        self.expect_punct("{")
        body = []
        while not self.at_punct("}"):
            if self.peek().kind is TokenKind.EOF:
                raise self.error(f"unterminated body of class '{name}'")
            body.append(self.statement(top_level=True))
        self.expect_punct("}")
        self.accept_punct(";")
        return ast.ClassDecl(
            name,
            params=params,
            parent=parent,
            id_decl=id_decl,
            body=body,
            abstract=abstract,
            aligned=aligned,
            loc=loc,
        )

    def param_decl(self) -> ast.ParamDecl:
        loc = self.peek().location
        type_spec = self.type_spec()
        name = self.expect_ident("parameter name").text
        dims = 0
        while self.accept_punct("["):
            if not self.at_punct("]"):
                self.expression()  # size is irrelevant, only the dimension count
            self.expect_punct("]")
            dims += 1
        return ast.ParamDecl(type_spec, name, dims, loc=loc)

    def id_decl(self) -> ast.IdDecl:
        loc = self.peek().location
        aligned = None
        if self.accept_keyword("aligned"):
            aligned = self.aligned_length(loc)
        self.accept_keyword("const")  # IDs are implicitly constant
        type_spec = self.type_spec()
        self.expect_punct("(")
        size = self.expression()
        self.expect_punct(")")
        name = self.expect_ident("id field name").text
        self.expect_punct("=")
        value = self.expression()
        high = None
        if self.accept_punct(".."):
            high = self.expression()
        return ast.IdDecl(type_spec, size, name, value, high=high, aligned=aligned, loc=loc)

    # -- maps ----------------------------------------------------------------

    def map_decl(self) -> ast.MapDecl:
        loc = self.expect_keyword("map").location
        name = self.expect_ident("map name").text
        self.expect_punct("(")
        output_type = self.type_spec()
        output_dims = []
        while self.accept_punct("["):
            output_dims.append(self.expression())
            self.expect_punct("]")
        self.expect_punct(")")
        self.expect_punct("{")
        entries = []
        while not self.at_punct("}"):
            entries.append(self.map_entry())
            if not self.accept_punct(","):
                break
        self.expect_punct("}")
        self.accept_punct(";")
        return ast.MapDecl(name, output_type, output_dims, entries, loc=loc)

    def map_entry(self) -> ast.MapEntry:
        tok = self.peek()
        if tok.kind is not TokenKind.BITSTRING:
            raise self.error("map entry must start with a sized bit-string codeword")
        self.advance()
        code = ast.IntLit(tok.value, tok.bit_length, loc=tok.location)
        self.expect_punct(",")
        value = self.map_entry_value()
        return ast.MapEntry(code, value, loc=tok.location)

    def map_entry_value(self) -> ast.Expr | ast.BraceList | ast.ExtensionSpec:
        tok = self.peek()
        if tok.is_punct("{"):
            return self.brace_list()
        starts_type = tok.kind is TokenKind.KEYWORD and (
            tok.text in _BASE_TYPE_KEYWORDS or tok.text in _MODIFIER_KEYWORDS
        )
        starts_class = tok.kind is TokenKind.IDENT and self.peek(1).is_punct("(")
        if starts_type or starts_class:
            loc = tok.location
            type_spec = self.type_spec()
            self.expect_punct("(")
            size = self.expression()
            self.expect_punct(")")
            return ast.ExtensionSpec(type_spec, size, loc=loc)
        return self.expression()

    def brace_list(self) -> ast.BraceList:
        loc = self.expect_punct("{").location
        items = []
        while not self.at_punct("}"):
            items.append(self.expression())
            if not self.accept_punct(","):
                break
        self.expect_punct("}")
        return ast.BraceList(items, loc=loc)

    # -- statements ------------------------------------------------------------

    def statement(self, top_level: bool = False) -> ast.Stmt:
        tok = self.peek()
        if tok.kind is TokenKind.DIRECTIVE:
            self.advance()
            if tok.directive == "pragma":
                return ast.PragmaStmt(
                    parse_pragma_settings(tok.payload or "", tok.location), loc=tok.location
                )
            raise self.error(f"%{tok.directive} is only allowed at global scope", tok.location)
        if tok.kind is TokenKind.VERBATIM:
            self.advance()
            return ast.VerbatimStmt(tok.placement or "class-scope", tok.language, tok.text,
                                    loc=tok.location)
        if tok.kind is TokenKind.KEYWORD:
            if tok.text == "class" or (tok.text == "abstract" and self.peek(1).is_keyword("class")):
                raise self.error("classes cannot be nested", tok.location)
            if tok.text == "map":
                raise self.error("maps can only be declared at global scope", tok.location)
            if tok.text == "{":  # unreachable; braces are punctuators
                pass
            if tok.text == "if":
                return self.if_stmt()
            if tok.text == "switch":
                return self.switch_stmt()
            if tok.text == "for":
                return self.for_stmt()
            if tok.text == "while":
                return self.while_stmt()
            if tok.text == "do":
                return self.do_stmt()
            if tok.text == "break":
                self.advance()
                self.expect_punct(";")
                return ast.Break(loc=tok.location)
            if tok.text == "continue":
                self.advance()
                self.expect_punct(";")
                return ast.Continue(loc=tok.location)
        if tok.is_punct("{"):
            return self.block()
        if self.looks_like_decl():
            return self.declaration(top_level=top_level)
        expr = self.expression()
        self.expect_punct(";")
        return ast.ExprStmt(expr, loc=tok.location)

    def block(self) -> ast.Block:
        loc = self.expect_punct("{").location
        self._enter()
        stmts = []
        while not self.at_punct("}"):
            if self.peek().kind is TokenKind.EOF:
                raise self.error("unterminated block", loc)
            stmts.append(self.statement())
        self.expect_punct("}")
        self._leave()
        return ast.Block(stmts, loc=loc)

    def _guard_header_decl(self, construct: str) -> None:
        if self.looks_like_decl():
            raise self.error(
                f"variable declarations are not allowed within the arguments of {construct}"
            )

    def if_stmt(self) -> ast.If:
        loc = self.expect_keyword("if").location
        self.expect_punct("(")
        self._guard_header_decl("'if'")
        cond = self.expression()
        self.expect_punct(")")
        then = self.statement()
        other = None
        if self.accept_keyword("else"):
            other = self.statement()
        return ast.If(cond, then, other, loc=loc)

    def switch_stmt(self) -> ast.Switch:
        loc = self.expect_keyword("switch").location
        self.expect_punct("(")
        self._guard_header_decl("'switch'")
        subject = self.expression()
        self.expect_punct(")")
        self.expect_punct("{")
        arms = []
        while not self.at_punct("}"):
            arm_loc = self.peek().location
            if self.accept_keyword("case"):
                label = self.expression()
                self.expect_punct(":")
            elif self.accept_keyword("default"):
                label = None
                self.expect_punct(":")
            else:
                raise self.error("expected 'case' or 'default' inside switch")
            stmts = []
            while not (
                self.at_punct("}") or self.at_keyword("case") or self.at_keyword("default")
            ):
                stmts.append(self.statement())
            arms.append(ast.CaseArm(label, stmts, loc=arm_loc))
        self.expect_punct("}")
        return ast.Switch(subject, arms, loc=loc)

    def for_stmt(self) -> ast.For:
        loc = self.expect_keyword("for").location
        self.expect_punct("(")
        self._guard_header_decl("'for'")
        init = None if self.at_punct(";") else self.expression()
        self.expect_punct(";")
        self._guard_header_decl("'for'")
        cond = None if self.at_punct(";") else self.expression()
        self.expect_punct(";")
        self._guard_header_decl("'for'")
        step = None if self.at_punct(")") else self.expression()
        self.expect_punct(")")
        body = self.statement()
        return ast.For(init, cond, step, body, loc=loc)

    def while_stmt(self) -> ast.While:
        loc = self.expect_keyword("while").location
        self.expect_punct("(")
        self._guard_header_decl("'while'")
        cond = self.expression()
        self.expect_punct(")")
        body = self.statement()
        return ast.While(cond, body, loc=loc)

    def do_stmt(self) -> ast.DoWhile:
        loc = self.expect_keyword("do").location
        body = self.statement()
        self.expect_keyword("while")
        self.expect_punct("(")
        self._guard_header_decl("'do-while'")
        cond = self.expression()
        self.expect_punct(")")
        self.expect_punct(";")
        return ast.DoWhile(body, cond, loc=loc)

    # -- declarations ------------------------------------------------------------

    def looks_like_decl(self) -> bool:
        tok = self.peek()
        if tok.kind is TokenKind.KEYWORD:
            return tok.text in _MODIFIER_KEYWORDS or tok.text in _BASE_TYPE_KEYWORDS
        if tok.kind is not TokenKind.IDENT:
            return False
        nxt = self.peek(1)
        if nxt.kind is TokenKind.IDENT:
            return True
        if nxt.is_punct("("):
            # Class type with a map-name parse size: IDENT ( ... ) IDENT.
            depth = 0
            j = self.i + 1
            while j < len(self.tokens):
                t = self.tokens[j]
                if t.is_punct("("):
                    depth += 1
                elif t.is_punct(")"):
                    depth -= 1
                    if depth == 0:
                        return self.tokens[min(j + 1, len(self.tokens) - 1)].kind is TokenKind.IDENT
                elif t.kind is TokenKind.EOF:
                    return False
                j += 1
        return False

    def type_spec(self) -> ast.TypeSpec:
        signed: bool | None = None
        endian = "big"
        base: str | None = None
        class_name: str | None = None
        while True:
            tok = self.peek()
            if tok.is_keyword("signed"):
                self.advance()
                signed = True
            elif tok.is_keyword("unsigned"):
                self.advance()
                signed = False
            elif tok.is_keyword("big"):
                self.advance()
                endian = "big"
            elif tok.is_keyword("little"):
                self.advance()
                endian = "little"
            elif tok.is_keyword("short") or tok.is_keyword("long"):
                self.advance()  # width comes from the parse size, not the type
                if base is None:
                    base = "int"
            elif tok.kind is TokenKind.KEYWORD and tok.text in _BASE_TYPE_KEYWORDS:
                self.advance()
                if base == "int" and tok.text == "double":
                    base = "double"  # "long double"
                else:
                    base = tok.text
            elif tok.kind is TokenKind.IDENT and base is None:
                self.advance()
                base = "class"
                class_name = tok.text
                break
            else:
                break
        if base is None:
            if signed is not None:
                base = "int"
            else:
                raise self.error(f"expected a type, found {self.describe(self.peek())}")
        if signed is None:
            signed = base not in ("bit", "char")
        return ast.TypeSpec(base, class_name=class_name, signed=signed, endian=endian)

    def declaration(self, top_level: bool = False) -> ast.VarDecl:
        loc = self.peek().location
        aligned = None
        const = False
        # aligned/const may precede the remaining type modifiers.
        while True:
            if self.at_keyword("aligned") and aligned is None:
                self.advance()
                aligned = self.aligned_length(loc)
            elif self.at_keyword("const") and not const:
                self.advance()
                const = True
            else:
                break
        type_spec = self.type_spec()
        parse_size = None
        if self.accept_punct("("):
            parse_size = self.expression()
            self.expect_punct(")")
        lookahead = False
        if self.at_punct("*"):
            self.advance()
            lookahead = True
        name = self.expect_ident("variable name").text
        dims: list[ast.Dim] = []
        while self.at_punct("["):
            dloc = self.advance().location
            if self.accept_punct("["):
                size = self.expression()
                self.expect_punct("]")
                self.expect_punct("]")
                dims.append(ast.Dim(size, partial=True, loc=dloc))
            else:
                size = self.expression()
                self.expect_punct("]")
                dims.append(ast.Dim(size, partial=False, loc=dloc))
        actuals: list[ast.Expr] = []
        if self.accept_punct("("):
            while not self.at_punct(")"):
                actuals.append(self.expression())
                if not self.accept_punct(","):
                    break
            self.expect_punct(")")
        init = None
        if self.accept_punct("="):
            init = self.brace_list() if self.at_punct("{") else self.expression()
        self.expect_punct(";")
        return ast.VarDecl(
            type=type_spec,
            name=name,
            parse_size=parse_size,
            lookahead=lookahead,
            aligned=aligned,
            const=const,
            dims=dims,
            init=init,
            actuals=actuals,
            top_level=top_level,
            loc=loc,
        )

    # -- expressions ------------------------------------------------------------

    def expression(self) -> ast.Expr:
        self._enter()
        try:
            return self.assignment()
        finally:
            self._leave()

    def assignment(self) -> ast.Expr:
        left = self.ternary()
        tok = self.peek()
        if tok.kind is TokenKind.PUNCT and tok.text in _ASSIGN_OPS:
            if not isinstance(left, (ast.Name, ast.Index, ast.Member)):
                raise self.error("assignment target must be a variable", tok.location)
            self.advance()
            value = self.assignment()
            return ast.Assign(tok.text, left, value, loc=tok.location)
        return left

    def ternary(self) -> ast.Expr:
        cond = self.binary(1)
        if self.at_punct("?"):
            loc = self.advance().location
            then = self.expression()
            self.expect_punct(":")
            other = self.ternary()
            return ast.Ternary(cond, then, other, loc=loc)
        return cond

    def binary(self, min_prec: int) -> ast.Expr:
        left = self.unary()
        while True:
            tok = self.peek()
            prec = _BINARY_PRECEDENCE.get(tok.text) if tok.kind is TokenKind.PUNCT else None
            if prec is None or prec < min_prec:
                return left
            self.advance()
            right = self.binary(prec + 1)
            left = ast.Binary(tok.text, left, right, loc=tok.location)

    def unary(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind is TokenKind.PUNCT and tok.text in ("+", "-", "!", "~", "++", "--"):
            self.advance()
            operand = self.unary()
            if tok.text in ("++", "--") and not isinstance(
                operand, (ast.Name, ast.Index, ast.Member)
            ):
                raise self.error(f"'{tok.text}' needs a variable operand", tok.location)
            return ast.Unary(tok.text, operand, loc=tok.location)
        return self.postfix()

    def postfix(self) -> ast.Expr:
        expr = self.primary()
        while True:
            tok = self.peek()
            if tok.is_punct("["):
                self._enter()
                self.advance()
                index = self.expression()
                self.expect_punct("]")
                self._leave()
                expr = ast.Index(expr, index, loc=tok.location)
            elif tok.is_punct("."):
                self.advance()
                name = self.expect_ident("member name").text
                expr = ast.Member(expr, name, loc=tok.location)
            elif tok.is_punct("++") or tok.is_punct("--"):
                if not isinstance(expr, (ast.Name, ast.Index, ast.Member)):
                    raise self.error(f"'{tok.text}' needs a variable operand", tok.location)
                self.advance()
                expr = ast.Postfix(tok.text, expr, loc=tok.location)
            else:
                return expr

    def primary(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind is TokenKind.INT:
            self.advance()
            return ast.IntLit(int(tok.value), loc=tok.location)
        if tok.kind is TokenKind.BITSTRING:
            self.advance()
            return ast.IntLit(int(tok.value), tok.bit_length, loc=tok.location)
        if tok.kind is TokenKind.FLOAT:
            self.advance()
            return ast.FloatLit(float(tok.value), loc=tok.location)
        if tok.kind is TokenKind.CHAR:
            self.advance()
            return ast.CharLit(int(tok.value), loc=tok.location)
        if tok.kind is TokenKind.STRING:
            self.advance()
            return ast.StringLit(tok.payload or "", loc=tok.location)
        if tok.is_keyword("true") or tok.is_keyword("false"):
            self.advance()
            return ast.BoolLit(tok.text == "true", loc=tok.location)
        if tok.is_keyword("lengthof"):
            self.advance()
            self.expect_punct("(")
            target = self.expression()
            self.expect_punct(")")
            if not isinstance(target, (ast.Name, ast.Index, ast.Member)):
                raise self.error("lengthof() needs a variable reference", tok.location)
            return ast.LengthOf(target, loc=tok.location)
        if tok.is_keyword("isidof"):
            self.advance()
            self.expect_punct("(")
            cls = self.expect_ident("class name").text
            self.expect_punct(",")
            value = self.expression()
            self.expect_punct(")")
            return ast.IsIdOf(cls, value, loc=tok.location)
        if tok.is_punct("("):
            self._enter()
            self.advance()
            expr = self.expression()
            self.expect_punct(")")
            self._leave()
            return expr
        if tok.kind is TokenKind.IDENT:
            self.advance()
            return ast.Name(tok.text, loc=tok.location)
        raise self.error(f"expected an expression, found {self.describe(tok)}")


def parse_unit(tokens: list[Token], file_id: str = "<input>") -> ast.Ast:
    """Parse one translation unit's tokens into an Ast."""
    if sys.getrecursionlimit() < 6000:
        sys.setrecursionlimit(6000)
    return Parser(tokens, file_id).parse_unit()
