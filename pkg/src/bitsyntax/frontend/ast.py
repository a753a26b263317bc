"""AST node types for parsed schema sources.

Locations never participate in structural equality, so an AST compares equal
to its pretty-printed-and-reparsed self.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from ..diagnostics import Location


def _loc_field() -> Location:
    return Location()


# --------------------------------------------------------------------------
# Expressions


@dataclass
class IntLit:
    value: int
    bit_length: Optional[int] = None  # set for 0b/0x/octal forms
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class FloatLit:
    value: float
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class CharLit:
    value: int
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class StringLit:
    text: str
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class BoolLit:
    value: bool
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Name:
    ident: str
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Unary:
    op: str  # + - ! ~ ++ --
    operand: "Expr"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Postfix:
    op: str  # ++ --
    operand: "Expr"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Assign:
    op: str  # = += -= *= /= %= &= |= ^= <<= >>=
    target: "Expr"
    value: "Expr"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Ternary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Index:
    base: "Expr"
    index: "Expr"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Member:
    base: "Expr"
    name: str
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class LengthOf:
    target: "Expr"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class IsIdOf:
    class_name: str
    value: "Expr"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class BraceList:
    items: list["Expr"]
    loc: Location = field(default_factory=_loc_field, compare=False)


Expr = Union[
    IntLit,
    FloatLit,
    CharLit,
    StringLit,
    BoolLit,
    Name,
    Unary,
    Postfix,
    Binary,
    Assign,
    Ternary,
    Index,
    Member,
    LengthOf,
    IsIdOf,
]


# --------------------------------------------------------------------------
# Types and declarations


@dataclass
class TypeSpec:
    kind: str  # "bit" | "char" | "int" | "float" | "double" | "class"
    class_name: Optional[str] = None
    signed: bool = True
    endian: str = "big"

    def describe(self) -> str:
        if self.kind == "class":
            return self.class_name or "<class>"
        parts = []
        if self.endian == "little":
            parts.append("little")
        if self.kind in ("int", "char") and not self.signed:
            parts.append("unsigned")
        if self.kind in ("int", "char") and self.signed and self.kind == "char":
            parts.append("signed")
        parts.append(self.kind)
        return " ".join(parts)


@dataclass
class Dim:
    size: Expr
    partial: bool = False  # double-bracket form: a single element/row
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class VarDecl:
    type: TypeSpec
    name: str
    parse_size: Optional[Expr] = None  # None: plain variable; Name may denote a map
    lookahead: bool = False
    aligned: Optional[Expr] = None  # alignment length; bare `aligned` stores 8
    const: bool = False
    dims: list[Dim] = field(default_factory=list)
    init: Optional[Union[Expr, BraceList]] = None
    actuals: list[Expr] = field(default_factory=list)  # class-typed declarations only
    top_level: bool = False  # directly in a class body (or global scope)
    origin: str = "main"
    array_cap: Optional[int] = field(default=None, compare=False)  # filled by sema
    resolved_map: Optional[str] = field(default=None, compare=False)  # filled by sema
    loc: Location = field(default_factory=_loc_field, compare=False)

    @property
    def sized(self) -> bool:
        """True when the declaration carries an explicit parse length.

        Class-typed members without one may still be parsable; that depends on
        the class and is decided during analysis.
        """
        return self.parse_size is not None


@dataclass
class ExprStmt:
    expr: Expr
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Block:
    stmts: list["Stmt"]
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class If:
    cond: Expr
    then: "Stmt"
    other: Optional["Stmt"] = None
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class CaseArm:
    label: Optional[Expr]  # None = default
    stmts: list["Stmt"]
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Switch:
    subject: Expr
    arms: list[CaseArm]
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class For:
    init: Optional[Expr]
    cond: Optional[Expr]
    step: Optional[Expr]
    body: "Stmt"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class While:
    cond: Expr
    body: "Stmt"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class DoWhile:
    body: "Stmt"
    cond: Expr
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Break:
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class Continue:
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class PragmaSetting:
    name: str
    value: Optional[Union[int, str]] = None
    quoted: bool = False


@dataclass
class PragmaStmt:
    settings: list[PragmaSetting]
    origin: str = "main"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class VerbatimStmt:
    placement: str  # "class-scope" | "get" | "put" | "both"
    language: Optional[str]  # None | "c" | "j"
    text: str
    origin: str = "main"
    loc: Location = field(default_factory=_loc_field, compare=False)


Stmt = Union[
    VarDecl,
    ExprStmt,
    Block,
    If,
    Switch,
    For,
    While,
    DoWhile,
    Break,
    Continue,
    PragmaStmt,
    VerbatimStmt,
]


# --------------------------------------------------------------------------
# Top-level declarations


@dataclass
class ParamDecl:
    type: TypeSpec
    name: str
    dims: int = 0  # only the dimension count matters for matching
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class IdDecl:
    type: TypeSpec
    size: Expr
    name: str
    value: Expr
    high: Optional[Expr] = None  # inclusive range upper bound
    aligned: Optional[Expr] = None
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class ClassDecl:
    name: str
    params: list[ParamDecl] = field(default_factory=list)
    parent: Optional[str] = None
    id_decl: Optional[IdDecl] = None
    body: list[Stmt] = field(default_factory=list)
    abstract: bool = False
    aligned: Optional[Expr] = None
    origin: str = "main"
    loc: Location = field(default_factory=_loc_field, compare=False)

    def verbatim_blocks(self) -> list[tuple[str, str]]:
        return [(s.placement, s.text) for s in self.body if isinstance(s, VerbatimStmt)]


@dataclass
class ExtensionSpec:
    type: TypeSpec
    size: Expr  # width expression or Name of another map
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class MapEntry:
    code: IntLit  # must carry bit_length
    value: Union[Expr, BraceList, ExtensionSpec]
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class MapDecl:
    name: str
    output_type: TypeSpec
    output_dims: list[Expr] = field(default_factory=list)  # constant sizes
    entries: list[MapEntry] = field(default_factory=list)
    origin: str = "main"
    loc: Location = field(default_factory=_loc_field, compare=False)


@dataclass
class IncludeItem:
    kind: str  # "include" | "import"
    path: str
    origin: str = "main"
    loc: Location = field(default_factory=_loc_field, compare=False)


TopItem = Union[VarDecl, ClassDecl, MapDecl, PragmaStmt, VerbatimStmt, IncludeItem]


@dataclass
class Ast:
    items: list[TopItem] = field(default_factory=list)
    file: str = "<input>"

    @property
    def constants(self) -> list[VarDecl]:
        return [i for i in self.items if isinstance(i, VarDecl)]

    @property
    def classes(self) -> list[ClassDecl]:
        return [i for i in self.items if isinstance(i, ClassDecl)]

    @property
    def maps(self) -> list[MapDecl]:
        return [i for i in self.items if isinstance(i, MapDecl)]

    @property
    def includes(self) -> list[IncludeItem]:
        return [i for i in self.items if isinstance(i, IncludeItem)]

    @property
    def pragma_events(self) -> list[tuple[Location, PragmaSetting]]:
        """All pragma settings in lexical order, including those inside classes."""
        events: list[tuple[Location, PragmaSetting]] = []
        for item in self.items:
            if isinstance(item, PragmaStmt):
                events.extend((item.loc, s) for s in item.settings)
            elif isinstance(item, ClassDecl):
                for stmt in walk_stmts(item.body):
                    if isinstance(stmt, PragmaStmt):
                        events.extend((stmt.loc, s) for s in stmt.settings)
        return events


def walk_stmts(stmts: list[Stmt]) -> Iterator[Stmt]:
    """Yield every statement in a body, depth first, in lexical order."""
    for s in stmts:
        yield s
        if isinstance(s, Block):
            yield from walk_stmts(s.stmts)
        elif isinstance(s, If):
            yield from walk_stmts([s.then])
            if s.other is not None:
                yield from walk_stmts([s.other])
        elif isinstance(s, Switch):
            for arm in s.arms:
                yield from walk_stmts(arm.stmts)
        elif isinstance(s, For):
            yield from walk_stmts([s.body])
        elif isinstance(s, While):
            yield from walk_stmts([s.body])
        elif isinstance(s, DoWhile):
            yield from walk_stmts([s.body])
