"""Semantic analysis: scoping, types, object IDs, constants, map compilation.

Produces an executable SyntaxSpec from a parsed (and include-resolved) Ast.
The two scoping specialties of the language are enforced here: variables with
a parse length are class members no matter how deeply they are declared, and
plain variables are members only when declared at the top level of the class
body.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from . import arith, vlc
from .diagnostics import Diagnostic, Location, SemanticErrors, sort_diagnostics
from .frontend import ast


@dataclass
class Options:
    """Initial translator settings; pragmas override them from that point on."""

    step: int = 4
    array_max: int = 1024


@dataclass
class ClassOptions:
    get: bool = True
    put: bool = True
    trace: bool = True
    trace_name: Optional[str] = None


@dataclass
class ParamInfo:
    name: str
    type: ast.TypeSpec
    dims: int


@dataclass
class IdInfo:
    name: str
    type: ast.TypeSpec
    size_bits: int
    low: int
    high: int  # == low for single-valued ids
    aligned_bits: Optional[int]
    loc: Location


@dataclass
class MemberInfo:
    name: str
    kind: str  # "parsable" | "plain" | "param"
    type: ast.TypeSpec
    dims: int
    const: bool
    from_class: str
    loc: Location


@dataclass
class ClassInfo:
    name: str
    decl: ast.ClassDecl
    parent: Optional[str] = None
    abstract: bool = False
    aligned_bits: Optional[int] = None
    params: list[ParamInfo] = field(default_factory=list)
    id_info: Optional[IdInfo] = None  # the id declared on this class itself
    members: dict[str, MemberInfo] = field(default_factory=dict)  # own members only
    is_parsable: bool = False
    options: ClassOptions = field(default_factory=ClassOptions)


@dataclass
class MapOutput:
    kind: str  # "scalar" | "class" | "array"
    type: ast.TypeSpec
    class_name: Optional[str] = None
    field_names: list[str] = field(default_factory=list)
    dims: list[int] = field(default_factory=list)


@dataclass
class SyntaxSpec:
    """A checked, executable description of one bitstream language."""

    classes: dict[str, ClassInfo] = field(default_factory=dict)
    class_order: list[str] = field(default_factory=list)
    maps: dict[str, vlc.CompiledMap] = field(default_factory=dict)
    map_order: list[str] = field(default_factory=list)
    map_outputs: dict[str, MapOutput] = field(default_factory=dict)
    constants: dict[str, Any] = field(default_factory=dict)
    # Per family root: dispatch entries (low, high, class_name), declaration order.
    id_index: dict[str, list[tuple[int, int, str]]] = field(default_factory=dict)
    options: Options = field(default_factory=Options)

    def chain(self, class_name: str) -> list[ClassInfo]:
        """Ancestry of a class, root first, ending at the class itself."""
        chain: list[ClassInfo] = []
        info: Optional[ClassInfo] = self.classes[class_name]
        while info is not None:
            chain.append(info)
            info = self.classes.get(info.parent) if info.parent else None
        chain.reverse()
        return chain

    def lookup_member(self, class_name: str, member: str) -> Optional[MemberInfo]:
        for info in reversed(self.chain(class_name)):
            found = info.members.get(member)
            if found is not None:
                return found
        return None

    def effective_id(self, class_name: str) -> Optional[IdInfo]:
        """The id declaration governing this class (its own, or the nearest
        ancestor's); derived ids override the expected value."""
        for info in reversed(self.chain(class_name)):
            if info.id_info is not None:
                return info.id_info
        return None

    def family_entries(self, class_name: str) -> list[tuple[int, int, str]]:
        return self.id_index.get(class_name, [])

    def descendants(self, class_name: str) -> list[str]:
        out = []
        for name in self.class_order:
            if name != class_name and any(c.name == class_name for c in self.chain(name)):
                out.append(name)
        return out


# --------------------------------------------------------------------------
# Expression types


@dataclass(frozen=True)
class ExprType:
    cat: str  # "int" | "float" | "bool" | "class" | "array" | "string" | "error"
    class_name: Optional[str] = None
    elem: Optional["ExprType"] = None
    dims: int = 0


T_INT = ExprType("int")
T_FLOAT = ExprType("float")
T_BOOL = ExprType("bool")
T_ERROR = ExprType("error")  # silences cascading diagnostics


def _type_of_spec(t: ast.TypeSpec) -> ExprType:
    if t.kind == "class":
        return ExprType("class", class_name=t.class_name)
    if t.kind in ("float", "double"):
        return T_FLOAT
    return T_INT


def _numeric(t: ExprType) -> bool:
    return t.cat in ("int", "float", "error")


def _is_int(t: ExprType) -> bool:
    return t.cat in ("int", "error")


def _is_bool(t: ExprType) -> bool:
    return t.cat in ("bool", "error")


# --------------------------------------------------------------------------
# Constant expression folding


def _fit_to_field(value: int, size: int, signed: bool) -> int:
    """Truncate a constant into a field of `size` bits, reading it back per
    the declared signedness (C bitfield assignment semantics)."""
    raw = value & ((1 << size) - 1)
    if signed and raw >= 1 << (size - 1):
        raw -= 1 << size
    return raw


class NotConstant(Exception):
    pass


class ConstDivByZero(Exception):
    def __init__(self, loc: Location):
        self.loc = loc


def fold_expr(expr: ast.Expr, constants: dict[str, Any]):
    """Evaluate a constant expression; raises NotConstant / ConstDivByZero."""
    if isinstance(expr, ast.IntLit):
        return expr.value
    if isinstance(expr, ast.FloatLit):
        return expr.value
    if isinstance(expr, ast.CharLit):
        return expr.value
    if isinstance(expr, ast.BoolLit):
        return expr.value
    if isinstance(expr, ast.Name):
        if expr.ident in constants:
            return constants[expr.ident]
        raise NotConstant(expr.ident)
    if isinstance(expr, ast.Unary) and expr.op in ("+", "-", "~", "!"):
        return arith.unary(expr.op, fold_expr(expr.operand, constants))
    if isinstance(expr, ast.Binary):
        if expr.op == "&&":
            return bool(fold_expr(expr.left, constants)) and bool(
                fold_expr(expr.right, constants)
            )
        if expr.op == "||":
            return bool(fold_expr(expr.left, constants)) or bool(
                fold_expr(expr.right, constants)
            )
        try:
            return arith.binary(expr.op, fold_expr(expr.left, constants),
                                fold_expr(expr.right, constants))
        except ZeroDivisionError:
            raise ConstDivByZero(expr.loc) from None
    if isinstance(expr, ast.Ternary):
        cond = fold_expr(expr.cond, constants)
        return fold_expr(expr.then if cond else expr.other, constants)
    raise NotConstant(type(expr).__name__)


# --------------------------------------------------------------------------
# Analyzer


_PRAGMA_FLAGS = {"get", "noget", "put", "noput", "trace", "notrace"}


class _PragmaState:
    def __init__(self, options: Options):
        self.get = True
        self.put = True
        self.trace = True
        self.trace_name: Optional[str] = None
        self.array_max = options.array_max
        self.step = options.step

    def apply(self, setting: ast.PragmaSetting, warn) -> None:
        name = setting.name
        if name in _PRAGMA_FLAGS and setting.value is None:
            if name in ("get", "noget"):
                self.get = name == "get"
            elif name in ("put", "noput"):
                self.put = name == "put"
            else:
                self.trace = name == "trace"
            return
        if name == "trace" and setting.quoted:
            self.trace_name = str(setting.value)
            return
        if name == "array" and isinstance(setting.value, int):
            self.array_max = setting.value
            return
        if name == "step" and isinstance(setting.value, int):
            self.step = setting.value
            return
        warn(name, setting)

    def class_options(self) -> ClassOptions:
        return ClassOptions(self.get, self.put, self.trace, self.trace_name)


class Analyzer:
    def __init__(self, unit: ast.Ast, options: Optional[Options] = None):
        self.unit = unit
        self.options = options or Options()
        self.diagnostics: list[Diagnostic] = []
        self.spec = SyntaxSpec(options=self.options)
        self.map_decls: dict[str, ast.MapDecl] = {}
        self.map_steps: dict[str, int] = {}
        self.const_decl_order: list[ast.VarDecl] = []

    # -- diagnostics -----------------------------------------------------

    def error(self, code: str, message: str, loc: Location) -> None:
        self.diagnostics.append(Diagnostic("error", code, message, loc))

    def warning(self, code: str, message: str, loc: Location) -> None:
        self.diagnostics.append(Diagnostic("warning", code, message, loc))

    # -- driver ----------------------------------------------------------

    def run(self) -> tuple[Optional[SyntaxSpec], list[Diagnostic]]:
        self.collect_globals()
        self.apply_pragmas()
        self.fold_global_consts()
        self.resolve_class_headers()
        self.build_id_index()
        self.compile_maps()
        for name in self.spec.class_order:
            self.check_class_body(self.spec.classes[name])
        diags = sort_diagnostics(self.diagnostics)
        if any(d.is_error for d in diags):
            return None, diags
        return self.spec, diags

    # -- pass 1: global names ------------------------------------------

    def collect_globals(self) -> None:
        seen: dict[str, Location] = {}

        def register(name: str, loc: Location) -> bool:
            if name in seen:
                self.error("E103", f"duplicate global name '{name}'", loc)
                return False
            seen[name] = loc
            return True

        for item in self.unit.items:
            if isinstance(item, ast.ClassDecl):
                if register(item.name, item.loc):
                    self.spec.classes[item.name] = ClassInfo(item.name, item)
                    self.spec.class_order.append(item.name)
            elif isinstance(item, ast.MapDecl):
                if register(item.name, item.loc):
                    self.map_decls[item.name] = item
                    self.spec.map_order.append(item.name)
            elif isinstance(item, ast.VarDecl):
                if item.parse_size is not None or item.lookahead:
                    self.error(
                        "E100",
                        "the global scope cannot contain parsable variables",
                        item.loc,
                    )
                    continue
                if not item.const:
                    self.error("E100", "global variables can only be constants", item.loc)
                    continue
                if item.init is None:
                    self.error("E161", f"constant '{item.name}' needs a value", item.loc)
                    continue
                if register(item.name, item.loc):
                    self.const_decl_order.append(item)

    # -- pass 2: pragma state ---------------------------------------------

    def apply_pragmas(self) -> None:
        state = _PragmaState(self.options)

        def warn(name: str, setting: ast.PragmaSetting) -> None:
            pass  # location-aware warning emitted by the caller below

        def apply_stmt(stmt: ast.PragmaStmt) -> None:
            for setting in stmt.settings:
                before = (state.get, state.put, state.trace, state.trace_name,
                          state.array_max, state.step)
                state.apply(setting, warn)
                after = (state.get, state.put, state.trace, state.trace_name,
                         state.array_max, state.step)
                known = setting.name in _PRAGMA_FLAGS or setting.name in ("array", "step", "trace")
                if before == after and not known:
                    self.warning("W001", f"unknown pragma setting '{setting.name}'", stmt.loc)

        def walk_body(stmts: list[ast.Stmt]) -> None:
            for stmt in stmts:
                if isinstance(stmt, ast.PragmaStmt):
                    apply_stmt(stmt)
                elif isinstance(stmt, ast.VarDecl):
                    stmt.array_cap = state.array_max
                elif isinstance(stmt, ast.Block):
                    walk_body(stmt.stmts)
                elif isinstance(stmt, ast.If):
                    walk_body([stmt.then])
                    if stmt.other is not None:
                        walk_body([stmt.other])
                elif isinstance(stmt, ast.Switch):
                    for arm in stmt.arms:
                        walk_body(arm.stmts)
                elif isinstance(stmt, (ast.For, ast.While, ast.DoWhile)):
                    walk_body([stmt.body])

        for item in self.unit.items:
            if isinstance(item, ast.PragmaStmt):
                apply_stmt(item)
            elif isinstance(item, ast.MapDecl):
                self.map_steps[item.name] = state.step
            elif isinstance(item, ast.ClassDecl):
                walk_body(item.body)
                # Class-wide flags take the state at the end of the class, so a
                # pragma anywhere inside covers the whole class.
                if item.name in self.spec.classes:
                    self.spec.classes[item.name].options = state.class_options()

    # -- pass 3: constants -------------------------------------------------

    def fold_global_consts(self) -> None:
        for decl in self.const_decl_order:
            if isinstance(decl.init, ast.BraceList):
                self.error("E158", "global constants must be scalars", decl.loc)
                continue
            try:
                value = fold_expr(decl.init, self.spec.constants)
            except NotConstant as exc:
                self.error(
                    "E134",
                    f"initializer of constant '{decl.name}' is not constant ({exc})",
                    decl.loc,
                )
                continue
            except ConstDivByZero:
                self.error(
                    "E133", f"division by zero in constant '{decl.name}'", decl.loc
                )
                continue
            if isinstance(value, bool):
                value = int(value)
            if decl.type.kind in ("int", "char", "bit") and isinstance(value, float):
                value = int(value)
            self.spec.constants[decl.name] = value

    def fold_const_int(self, expr: ast.Expr, what: str, code: str = "E134") -> Optional[int]:
        try:
            value = fold_expr(expr, self.spec.constants)
        except NotConstant:
            self.error(code, f"{what} must be a constant expression", expr.loc)
            return None
        except ConstDivByZero:
            self.error("E133", f"division by zero in {what}", expr.loc)
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            self.error(code, f"{what} must be a constant integer", expr.loc)
            return None
        return value

    # -- pass 4: class headers ----------------------------------------------

    def resolve_class_headers(self) -> None:
        # Parents and inheritance cycles.
        for name in self.spec.class_order:
            info = self.spec.classes[name]
            decl = info.decl
            info.abstract = decl.abstract
            if decl.parent is not None:
                if decl.parent not in self.spec.classes:
                    self.error("E141", f"unknown base class '{decl.parent}'", decl.loc)
                else:
                    info.parent = decl.parent
        for name in self.spec.class_order:
            seen = set()
            cur: Optional[str] = name
            while cur is not None:
                if cur in seen:
                    info = self.spec.classes[name]
                    self.error("E142", f"inheritance cycle through '{name}'", info.decl.loc)
                    info.parent = None
                    break
                seen.add(cur)
                cur = self.spec.classes[cur].parent

        for name in self.spec.class_order:
            self.resolve_one_header(self.spec.classes[name])

        # Member tables and parsability need resolved headers everywhere first.
        for name in self.spec.class_order:
            self.collect_members(self.spec.classes[name])
        for name in self.spec.class_order:
            info = self.spec.classes[name]
            info.is_parsable = self._compute_parsable(info, set())

    def resolve_one_header(self, info: ClassInfo) -> None:
        decl = info.decl
        if decl.aligned is not None:
            info.aligned_bits = self._fold_alignment(decl.aligned)
        names = set()
        for p in decl.params:
            if p.name in names:
                self.error("E143", f"duplicate parameter '{p.name}'", p.loc)
                continue
            names.add(p.name)
            if p.type.kind == "class" and p.type.class_name not in self.spec.classes:
                self.error("E102", f"unknown type '{p.type.class_name}'", p.loc)
                continue
            info.params.append(ParamInfo(p.name, p.type, p.dims))
        if decl.id_decl is not None:
            info.id_info = self._resolve_id_decl(decl.id_decl)
        if info.id_info is not None:
            for p in info.params:
                if p.name == info.id_info.name:
                    self.error(
                        "E149",
                        f"parameter '{p.name}' is not allowed to hide the object id",
                        decl.loc,
                    )

    def _fold_alignment(self, expr: ast.Expr) -> Optional[int]:
        bits = self.fold_const_int(expr, "alignment length", "E146")
        if bits is not None and bits <= 0:
            self.error("E146", f"alignment length must be positive, got {bits}", expr.loc)
            return None
        return bits

    def _resolve_id_decl(self, d: ast.IdDecl) -> Optional[IdInfo]:
        if d.type.kind == "class":
            self.error("E128", "object ids must have a built-in type", d.loc)
            return None
        if d.type.kind in ("float", "double"):
            self.error("E128", "object ids must have an integer type", d.loc)
            return None
        size = self.fold_const_int(d.size, "id parse size", "E124")
        low = self.fold_const_int(d.value, "id value", "E124")
        high = low
        if d.high is not None:
            high = self.fold_const_int(d.high, "id range bound", "E124")
        aligned = self._fold_alignment(d.aligned) if d.aligned is not None else None
        if size is None or low is None or high is None:
            return None
        if not 1 <= size <= 64:
            self.error("E117", f"id parse size {size} out of range 1..64", d.loc)
            return None
        if low > high:
            self.error("E144", f"id range {low}..{high} has inverted bounds", d.loc)
            return None
        if d.high is None:
            # Single values follow C bitfield semantics: the constant is
            # truncated into the field width, then read back per signedness.
            if -(1 << (size - 1)) <= low < (1 << size):
                low = high = _fit_to_field(low, size, d.type.signed)
            else:
                self.error("E164", f"id value {low} does not fit {size} bits", d.loc)
        else:
            if d.type.signed:
                fits = -(1 << (size - 1)) <= low and high < (1 << (size - 1))
            else:
                fits = 0 <= low and high < (1 << size)
            if not fits:
                self.error(
                    "E164", f"id value range {low}..{high} does not fit {size} bits", d.loc
                )
        return IdInfo(d.name, d.type, size, low, high, aligned, d.loc)

    def collect_members(self, info: ClassInfo) -> None:
        for p in info.params:
            info.members[p.name] = MemberInfo(
                p.name, "param", p.type, p.dims, False, info.name, info.decl.loc
            )
        if info.id_info is not None:
            info.members[info.id_info.name] = MemberInfo(
                info.id_info.name,
                "parsable",
                info.id_info.type,
                0,
                True,
                info.name,
                info.id_info.loc,
            )
        for stmt in ast.walk_stmts(info.decl.body):
            if not isinstance(stmt, ast.VarDecl):
                continue
            parsable = stmt.parse_size is not None or stmt.type.kind == "class"
            if parsable and stmt.type.kind == "class":
                target = self.spec.classes.get(stmt.type.class_name or "")
                # Treat unknown classes as parsable; E102 comes later.
                if target is not None and not self._class_has_parse_content(target):
                    parsable = False
            name = stmt.name
            if parsable:
                if name not in info.members or info.members[name].kind != "parsable":
                    info.members[name] = MemberInfo(
                        name, "parsable", stmt.type, len(stmt.dims), stmt.const,
                        info.name, stmt.loc,
                    )
            elif stmt.top_level and name not in info.members:
                info.members[name] = MemberInfo(
                    name, "plain", stmt.type, len(stmt.dims), stmt.const, info.name, stmt.loc
                )

    def _class_has_parse_content(self, info: ClassInfo) -> bool:
        """Syntactic pre-check used while member tables are being built."""
        if info.decl.id_decl is not None:
            return True
        for stmt in ast.walk_stmts(info.decl.body):
            if isinstance(stmt, ast.VarDecl):
                if stmt.parse_size is not None:
                    return True
                if stmt.type.kind == "class":
                    inner = self.spec.classes.get(stmt.type.class_name or "")
                    if inner is not None and inner is not info:
                        if self._class_has_parse_content(inner):
                            return True
        if info.parent:
            parent = self.spec.classes.get(info.parent)
            if parent is not None:
                return self._class_has_parse_content(parent)
        return False

    def _compute_parsable(self, info: ClassInfo, active: set[str]) -> bool:
        if info.name in active:
            return False
        active.add(info.name)
        try:
            if info.id_info is not None:
                return True
            for m in info.members.values():
                if m.kind != "parsable":
                    continue
                if m.type.kind == "class":
                    target = self.spec.classes.get(m.type.class_name or "")
                    if target is not None and self._compute_parsable(target, active):
                        return True
                else:
                    return True
            if info.parent:
                return self._compute_parsable(self.spec.classes[info.parent], active)
            return False
        finally:
            active.discard(info.name)

    # -- pass 5: object ids -----------------------------------------------

    def build_id_index(self) -> None:
        roots: dict[str, list[tuple[int, int, str]]] = {}
        for name in self.spec.class_order:
            info = self.spec.classes[name]
            if info.id_info is None or info.abstract:
                continue
            sid = info.id_info
            for ancestor in self.spec.chain(name):
                roots.setdefault(ancestor.name, []).append((sid.low, sid.high, name))
        self.spec.id_index = roots
        self.diagnostics.extend(check_ids(self.spec))

    # -- pass 6: maps ------------------------------------------------------

    def compile_maps(self) -> None:
        compiled: dict[str, Optional[vlc.CompiledMap]] = {}
        active: list[str] = []

        def get_output(decl: ast.MapDecl) -> Optional[MapOutput]:
            t = decl.output_type
            dims: list[int] = []
            for dim_expr in decl.output_dims:
                size = self.fold_const_int(dim_expr, "map output array size")
                if size is None or size <= 0:
                    return None
                dims.append(size)
            if t.kind == "class":
                if t.class_name not in self.spec.classes:
                    self.error("E102", f"unknown type '{t.class_name}'", decl.loc)
                    return None
                target = self.spec.classes[t.class_name]
                if target.params:
                    self.error(
                        "E165",
                        f"map output class '{t.class_name}' cannot take parameters",
                        decl.loc,
                    )
                    return None
                fields = [
                    m.name for m in target.members.values() if m.kind != "param"
                ]
                if dims:
                    self.error("E139", "class-typed map outputs cannot be arrays", decl.loc)
                    return None
                return MapOutput("class", t, t.class_name, fields)
            if dims:
                return MapOutput("array", t, dims=dims)
            return MapOutput("scalar", t)

        def compile_one(name: str) -> Optional[vlc.CompiledMap]:
            if name in compiled:
                return compiled[name]
            if name in active:
                chain = " -> ".join(active[active.index(name):] + [name])
                self.error("E132", f"map cycle: {chain}", self.map_decls[name].loc)
                compiled[name] = None
                return None
            active.append(name)
            try:
                result = build_map(name)
                compiled[name] = result
                return result
            finally:
                active.pop()

        def entry_value(decl: ast.MapDecl, output: MapOutput, entry: ast.MapEntry):
            value = entry.value
            if isinstance(value, ast.ExtensionSpec):
                if output.kind != "scalar":
                    self.error(
                        "E139", "escape entries need a scalar map output type", entry.loc
                    )
                    return None
                if value.type.kind == "class":
                    self.error("E139", "escape extensions must be built-in types", entry.loc)
                    return None
                if isinstance(value.size, ast.Name) and value.size.ident in self.map_decls:
                    nested = compile_one(value.size.ident)
                    if nested is None:
                        return None
                    nested_out = self.spec.map_outputs[value.size.ident]
                    if nested_out.kind != "scalar" or nested_out.type.kind != output.type.kind:
                        self.error(
                            "E166",
                            f"nested map '{value.size.ident}' output type does not match",
                            entry.loc,
                        )
                        return None
                    return vlc.EscapeEntry(_code_of(entry), nested=nested)
                width = self.fold_const_int(value.size, "escape extension width")
                if width is None:
                    return None
                if not 1 <= width <= 64:
                    self.error("E117", f"extension width {width} out of range 1..64", entry.loc)
                    return None
                return vlc.EscapeEntry(_code_of(entry), width=width, signed=value.type.signed)
            if isinstance(value, ast.BraceList):
                arity = len(output.field_names) if output.kind == "class" else (
                    output.dims[0] if output.kind == "array" else None
                )
                if arity is None:
                    self.error("E131", "brace values need a class or array output type",
                               entry.loc)
                    return None
                if len(value.items) != arity:
                    self.error(
                        "E131",
                        f"entry has {len(value.items)} values, output type needs {arity}",
                        entry.loc,
                    )
                    return None
                folded = []
                for item in value.items:
                    v = self._fold_map_scalar(item, output.type)
                    if v is None:
                        return None
                    folded.append(v)
                return vlc.DirectEntry(_code_of(entry), tuple(folded))
            if output.kind != "scalar":
                self.error("E131", "this output type needs a brace-list value", entry.loc)
                return None
            v = self._fold_map_scalar(value, output.type)
            if v is None:
                return None
            return vlc.DirectEntry(_code_of(entry), v)

        def _code_of(entry: ast.MapEntry) -> vlc.BitString:
            return vlc.BitString(entry.code.value, entry.code.bit_length or 1)

        def build_map(name: str) -> Optional[vlc.CompiledMap]:
            decl = self.map_decls[name]
            output = get_output(decl)
            if output is None:
                return None
            self.spec.map_outputs[name] = output
            entries: list[vlc.MapEntry] = []
            ok = True
            for entry in decl.entries:
                if entry.code.bit_length is None or not 1 <= entry.code.bit_length <= 64:
                    self.error("E167", "codeword must be a bit string of 1..64 bits", entry.loc)
                    ok = False
                    continue
                compiled_entry = entry_value(decl, output, entry)
                if compiled_entry is None:
                    ok = False
                    continue
                entries.append(compiled_entry)
            if not ok:
                return None
            if not entries:
                self.error("E131", f"map '{name}' has no entries", decl.loc)
                return None
            violation = vlc.verify_prefix_free([e.code for e in entries])
            if violation is not None:
                self.error("E130", f"map '{name}' is not uniquely decodable: {violation}",
                           decl.loc)
                return None
            step = self.map_steps.get(name, self.options.step)
            return vlc.compile_map(name, entries, step)

        for name in self.spec.map_order:
            result = compile_one(name)
            if result is not None:
                self.spec.maps[name] = result

    def _fold_map_scalar(self, expr: ast.Expr, t: ast.TypeSpec):
        try:
            value = fold_expr(expr, self.spec.constants)
        except NotConstant:
            self.error("E134", "map entry values must be constant expressions", expr.loc)
            return None
        except ConstDivByZero:
            self.error("E133", "division by zero in map entry value", expr.loc)
            return None
        if isinstance(value, bool):
            value = int(value)
        if t.kind in ("float", "double"):
            return float(value)
        if isinstance(value, float):
            self.error("E118", "integer map output cannot hold a float value", expr.loc)
            return None
        return value

    # -- pass 7: class bodies -----------------------------------------------

    def check_class_body(self, info: ClassInfo) -> None:
        checker = _BodyChecker(self, info)
        checker.run()


class _BodyChecker:
    """Scope- and type-checks one class body in lexical order."""

    def __init__(self, analyzer: Analyzer, info: ClassInfo):
        self.a = analyzer
        self.spec = analyzer.spec
        self.info = info
        self.scopes: list[dict[str, ExprType]] = []
        # Names that became visible so far (members appear when declared).
        self.visible_members: dict[str, MemberInfo] = {}
        self.local_consts: set[str] = set()
        self.loop_depth = 0
        self.switch_depth = 0

    def error(self, code: str, message: str, loc: Location) -> None:
        self.a.error(code, message, loc)

    # -- scoping -----------------------------------------------------------

    def run(self) -> None:
        # Inherited members are visible from the start; own parsables appear
        # at their declaration.
        for cls in self.spec.chain(self.info.name)[:-1]:
            for m in cls.members.values():
                self.visible_members[m.name] = m
        for p in self.info.params:
            self.visible_members[p.name] = self.info.members[p.name]
        if self.info.id_info is not None:
            self.visible_members[self.info.id_info.name] = self.info.members[
                self.info.id_info.name
            ]
        for stmt in self.info.decl.body:
            self.check_stmt(stmt)

    def lookup(self, name: str) -> Optional[tuple[str, ExprType, bool]]:
        """Resolve a name to (kind, type, is_const); kind: local|member|const."""
        for scope in reversed(self.scopes):
            if name in scope:
                return "local", scope[name], name in self.local_consts
        m = self.visible_members.get(name)
        if m is not None:
            t = _type_of_spec(m.type)
            if m.dims:
                t = ExprType("array", elem=t, dims=m.dims)
            kind = "member-parsable" if m.kind == "parsable" else "member"
            return kind, t, m.const
        if name in self.spec.constants:
            value = self.spec.constants[name]
            return "const", T_FLOAT if isinstance(value, float) else T_INT, True
        return None

    # -- statements ----------------------------------------------------------

    def check_stmt(self, stmt: ast.Stmt) -> None:
        if isinstance(stmt, ast.VarDecl):
            self.check_decl(stmt)
        elif isinstance(stmt, ast.ExprStmt):
            self.check_expr(stmt.expr)
        elif isinstance(stmt, ast.Block):
            self.scopes.append({})
            for s in stmt.stmts:
                self.check_stmt(s)
            self.scopes.pop()
        elif isinstance(stmt, ast.If):
            self.check_cond(stmt.cond, "if")
            self.in_scope(stmt.then)
            if stmt.other is not None:
                self.in_scope(stmt.other)
        elif isinstance(stmt, ast.Switch):
            t = self.check_expr(stmt.subject)
            if not _is_int(t):
                self.error("E147", "switch subject must be an integer expression",
                           stmt.subject.loc)
            labels: set[int] = set()
            defaults = 0
            self.switch_depth += 1
            for arm in stmt.arms:
                if arm.label is None:
                    defaults += 1
                    if defaults > 1:
                        self.error("E163", "multiple default labels", arm.loc)
                else:
                    value = self.a.fold_const_int(arm.label, "case label", "E120")
                    if value is not None:
                        if value in labels:
                            self.error("E162", f"duplicate case label {value}", arm.loc)
                        labels.add(value)
                self.scopes.append({})
                for s in arm.stmts:
                    self.check_stmt(s)
                self.scopes.pop()
            self.switch_depth -= 1
        elif isinstance(stmt, ast.For):
            if stmt.init is not None:
                self.check_expr(stmt.init)
            if stmt.cond is not None:
                self.check_cond(stmt.cond, "for")
            if stmt.step is not None:
                self.check_expr(stmt.step)
            self.loop_depth += 1
            self.in_scope(stmt.body)
            self.loop_depth -= 1
        elif isinstance(stmt, ast.While):
            self.check_cond(stmt.cond, "while")
            self.loop_depth += 1
            self.in_scope(stmt.body)
            self.loop_depth -= 1
        elif isinstance(stmt, ast.DoWhile):
            self.loop_depth += 1
            self.in_scope(stmt.body)
            self.loop_depth -= 1
            self.check_cond(stmt.cond, "do-while")
        elif isinstance(stmt, ast.Break):
            if self.loop_depth == 0 and self.switch_depth == 0:
                self.error("E135", "break outside of a loop or switch", stmt.loc)
        elif isinstance(stmt, ast.Continue):
            if self.loop_depth == 0:
                self.error("E135", "continue outside of a loop", stmt.loc)
        elif isinstance(stmt, (ast.PragmaStmt, ast.VerbatimStmt)):
            pass
        else:
            raise TypeError(f"unhandled statement {stmt!r}")

    def in_scope(self, stmt: ast.Stmt) -> None:
        if isinstance(stmt, ast.Block):
            self.check_stmt(stmt)
        else:
            self.scopes.append({})
            self.check_stmt(stmt)
            self.scopes.pop()

    def check_cond(self, expr: ast.Expr, construct: str) -> None:
        t = self.check_expr(expr)
        if not _is_bool(t):
            self.error(
                "E119",
                f"the {construct} condition must be a boolean expression",
                expr.loc,
            )

    # -- declarations ----------------------------------------------------------

    def check_decl(self, decl: ast.VarDecl) -> None:
        map_output = self._resolve_parse_size(decl)
        class_info = None
        if decl.type.kind == "class":
            class_info = self.spec.classes.get(decl.type.class_name or "")
            if class_info is None and decl.type.class_name not in self.spec.maps:
                self.error("E102", f"unknown type '{decl.type.class_name}'", decl.loc)
                return
        parsable = decl.parse_size is not None or (
            class_info is not None and class_info.is_parsable
        )

        if decl.aligned is not None:
            self.a._fold_alignment(decl.aligned)

        if decl.type.kind in ("float", "double") and decl.parse_size is not None:
            size = self._try_fold(decl.parse_size)
            if size is not None:
                allowed = (0, 32) if decl.type.kind == "float" else (0, 64)
                if size not in allowed:
                    self.error(
                        "E116",
                        f"{decl.type.kind} parse size must be "
                        f"{allowed[1]} (or 0), got {size}",
                        decl.loc,
                    )

        for dim in decl.dims:
            t = self.check_expr(dim.size)
            if not _is_int(t):
                self.error("E117", "array sizes must be integer expressions", dim.loc)

        if decl.actuals or (class_info is not None and self._chain_params(class_info)):
            self._check_actuals(decl, class_info)

        self._check_init(decl, parsable, map_output)

        if decl.const and decl.init is None:
            self.error("E161", f"constant '{decl.name}' needs a value", decl.loc)

        if class_info is not None and class_info.abstract:
            if not self.spec.family_entries(decl.type.class_name):
                self.error(
                    "E129",
                    f"abstract class '{decl.type.class_name}' cannot be instantiated",
                    decl.loc,
                )

        self._register(decl, parsable)

    def _resolve_parse_size(self, decl: ast.VarDecl) -> Optional[MapOutput]:
        """Type-check the parse size; returns map output info for map-sized
        declarations and records the resolution on the node."""
        decl.resolved_map = None
        ps = decl.parse_size
        if ps is None:
            return None
        if isinstance(ps, ast.Name) and self.lookup(ps.ident) is None and (
            ps.ident in self.spec.maps or ps.ident in self.a.map_decls
        ):
            output = self.spec.map_outputs.get(ps.ident)
            if output is None:
                return None  # map failed to compile; it already produced errors
            decl.resolved_map = ps.ident
            ok = True
            if output.kind == "class":
                ok = decl.type.kind == "class" and decl.type.class_name == output.class_name
            elif output.kind == "array":
                ok = False  # array-output maps cannot size plain variables yet
            else:
                ok = decl.type.kind != "class" and _type_of_spec(decl.type) == _type_of_spec(
                    output.type
                ) and decl.type.signed == output.type.signed
            if not ok:
                self.error(
                    "E118",
                    f"variable type does not match output type of map '{ps.ident}'",
                    decl.loc,
                )
            if decl.lookahead:
                self.error(
                    "E117",
                    "look-ahead parsing cannot be combined with a map parse size",
                    decl.loc,
                )
            return output
        if decl.type.kind == "class":
            self.error(
                "E118",
                "class-typed variables can only take a map name as their parse size",
                decl.loc,
            )
            return None
        t = self.check_expr(ps)
        if not _is_int(t):
            self.error("E117", "parse sizes must be integer expressions", ps.loc)
        size = self._try_fold(ps)
        if size is not None and size < 0:
            self.error("E117", f"parse size must be non-negative, got {size}", ps.loc)
        if size is not None and size > 64 and decl.type.kind not in ("float", "double"):
            self.error("E117", f"parse size {size} exceeds the 64-bit limit", ps.loc)
        return None

    def _try_fold(self, expr: ast.Expr) -> Optional[int]:
        try:
            value = fold_expr(expr, self.spec.constants)
        except (NotConstant, ConstDivByZero):
            return None
        return value if isinstance(value, int) and not isinstance(value, bool) else None

    def _chain_params(self, class_info: ClassInfo) -> list[ParamInfo]:
        return [p for c in self.spec.chain(class_info.name) for p in c.params]

    def _check_actuals(self, decl: ast.VarDecl, class_info: Optional[ClassInfo]) -> None:
        if class_info is None:
            self.error("E157", "arguments are only allowed on class-typed variables",
                       decl.loc)
            return
        formals = self._chain_params(class_info)
        if len(decl.actuals) != len(formals):
            self.error(
                "E121",
                f"'{class_info.name}' takes {len(formals)} argument(s), got "
                f"{len(decl.actuals)}",
                decl.loc,
            )
            return
        for actual, formal in zip(decl.actuals, formals):
            t = self.check_expr(actual)
            if t.cat == "error":
                continue
            if formal.dims:
                if t.cat != "array" or t.dims != formal.dims:
                    self.error(
                        "E122",
                        f"argument for '{formal.name}' must be an array with "
                        f"{formal.dims} dimension(s)",
                        actual.loc,
                    )
                continue
            expect = _type_of_spec(formal.type)
            if expect.cat == "class":
                if t.cat != "class" or t.class_name != expect.class_name:
                    self.error(
                        "E121",
                        f"argument for '{formal.name}' must be of class "
                        f"'{expect.class_name}'",
                        actual.loc,
                    )
            elif not _numeric(t):
                self.error("E121", f"argument for '{formal.name}' must be numeric",
                           actual.loc)

    def _check_init(self, decl: ast.VarDecl, parsable: bool,
                    map_output: Optional[MapOutput]) -> None:
        init = decl.init
        if init is None:
            return
        if isinstance(init, ast.BraceList):
            if not decl.dims:
                self.error("E158", "brace initializers need an array variable", decl.loc)
                return
            for item in init.items:
                t = self.check_expr(item)
                if not _numeric(t):
                    self.error("E117", "brace initializer items must be numeric", item.loc)
            return
        if isinstance(init, ast.StringLit):
            if decl.type.kind != "char" or len(decl.dims) != 1:
                self.error(
                    "E138", "string initializers need a one-dimensional char array", decl.loc
                )
                return
            size = self._try_fold(decl.dims[0].size)
            if size is not None and size not in (len(init.text), len(init.text) + 1):
                self.error(
                    "E138",
                    f"array size {size} does not fit string of length {len(init.text)} "
                    "(exactly the length, or one more for a trailing null)",
                    decl.loc,
                )
            return
        t = self.check_expr(init)
        if decl.type.kind == "class" and map_output is None:
            self.error("E160", "class-typed variables cannot take initializers", decl.loc)
            return
        if not _numeric(t):
            self.error("E117", "initializers must be numeric expressions", init.loc)

    def _register(self, decl: ast.VarDecl, parsable: bool) -> None:
        name = decl.name
        info = self.info
        id_info = self.spec.effective_id(info.name)
        if id_info is not None and name == id_info.name:
            self.error("E127", f"'{name}' redeclares the object id", decl.loc)
            return
        if parsable:
            existing = self.visible_members.get(name)
            local = any(name in scope for scope in self.scopes)
            if local or (existing is not None and existing.kind == "plain"):
                self.error(
                    "E151",
                    f"parsable declaration of '{name}' conflicts with a non-parsable "
                    "variable",
                    decl.loc,
                )
                return
            if existing is not None and existing.kind == "param":
                self.error("E150", f"declaration of '{name}' conflicts with a parameter",
                           decl.loc)
                return
            if existing is not None and existing.kind == "parsable":
                if existing.from_class == info.name:
                    if existing.const:
                        self.error(
                            "E112",
                            f"'{name}' was declared const and cannot be redeclared",
                            decl.loc,
                        )
                    elif not self._same_type(existing.type, decl.type):
                        self.error(
                            "E111",
                            f"redeclaration of '{name}' must keep its type "
                            f"({existing.type.describe()})",
                            decl.loc,
                        )
                    return  # stays a member; const upgrades are ignored
                # Hiding a base-class parsable is allowed; it becomes our own.
            member = info.members.get(name)
            if member is None or member.kind != "parsable":
                member = MemberInfo(name, "parsable", decl.type, len(decl.dims),
                                    decl.const, info.name, decl.loc)
                info.members[name] = member
            self.visible_members[name] = member
            return
        # Plain variable.
        existing = self.visible_members.get(name)
        if existing is not None and existing.kind == "parsable":
            if existing.from_class == info.name:
                self.error(
                    "E110",
                    f"'{name}' hides a parsable variable of the same class",
                    decl.loc,
                )
                return
            # Hiding a base-class parsable with a plain variable is allowed.
        t = _type_of_spec(decl.type)
        if decl.dims:
            t = ExprType("array", elem=t, dims=len(decl.dims))
        if decl.top_level:
            if existing is not None and existing.from_class == info.name and (
                existing.kind in ("plain", "param")
            ):
                self.error("E105", f"duplicate declaration of '{name}'", decl.loc)
                return
            member = info.members.get(name)
            if member is None:
                member = MemberInfo(name, "plain", decl.type, len(decl.dims), decl.const,
                                    info.name, decl.loc)
                info.members[name] = member
            self.visible_members[name] = member
        else:
            scope = self.scopes[-1] if self.scopes else {}
            if name in scope:
                self.error("E105", f"duplicate declaration of '{name}' in this scope",
                           decl.loc)
                return
            if not self.scopes:
                self.scopes.append(scope)
            scope[name] = t
            if decl.const:
                self.local_consts.add(name)

    @staticmethod
    def _same_type(a: ast.TypeSpec, b: ast.TypeSpec) -> bool:
        if a.kind != b.kind:
            return False
        if a.kind == "class":
            return a.class_name == b.class_name
        return a.signed == b.signed  # endianness may vary between redeclarations

    # -- expressions --------------------------------------------------------

    def check_expr(self, expr: ast.Expr) -> ExprType:
        if isinstance(expr, (ast.IntLit, ast.CharLit)):
            return T_INT
        if isinstance(expr, ast.FloatLit):
            return T_FLOAT
        if isinstance(expr, ast.BoolLit):
            return T_BOOL
        if isinstance(expr, ast.StringLit):
            self.error("E156", "string literals are only allowed as initializers", expr.loc)
            return T_ERROR
        if isinstance(expr, ast.Name):
            resolved = self.lookup(expr.ident)
            if resolved is None:
                self.error("E114", f"'{expr.ident}' is not declared", expr.loc)
                return T_ERROR
            return resolved[1]
        if isinstance(expr, ast.Unary):
            t = self.check_expr(expr.operand)
            if expr.op == "!":
                if not _is_bool(t):
                    self.error("E119", "'!' needs a boolean operand", expr.loc)
                return T_BOOL
            if expr.op in ("++", "--"):
                self._check_lvalue(expr.operand, expr.op)
                if not _is_int(t):
                    self.error("E117", f"'{expr.op}' needs an integer operand", expr.loc)
                return T_INT
            if expr.op == "~":
                if not _is_int(t):
                    self.error("E117", "'~' needs an integer operand", expr.loc)
                return T_INT
            if not _numeric(t):
                self.error("E117", f"'{expr.op}' needs a numeric operand", expr.loc)
            return t if t.cat == "float" else T_INT
        if isinstance(expr, ast.Postfix):
            self._check_lvalue(expr.operand, expr.op)
            t = self.check_expr(expr.operand)
            if not _is_int(t):
                self.error("E117", f"'{expr.op}' needs an integer operand", expr.loc)
            return T_INT
        if isinstance(expr, ast.Binary):
            return self._check_binary(expr)
        if isinstance(expr, ast.Assign):
            self._check_lvalue(expr.target, expr.op)
            target = self.check_expr(expr.target)
            value = self.check_expr(expr.value)
            if not _numeric(target):
                self.error("E152", "assignment targets must be numeric variables",
                           expr.loc)
            elif not _numeric(value):
                self.error("E152", "assigned values must be numeric", expr.value.loc)
            return target
        if isinstance(expr, ast.Ternary):
            self.check_cond(expr.cond, "'?:'")
            a = self.check_expr(expr.then)
            b = self.check_expr(expr.other)
            if _numeric(a) and _numeric(b):
                return T_FLOAT if "float" in (a.cat, b.cat) else T_INT
            if a == b:
                return a
            if T_ERROR in (a, b):
                return T_ERROR
            self.error("E117", "'?:' branches must have compatible types", expr.loc)
            return T_ERROR
        if isinstance(expr, ast.Index):
            base = self.check_expr(expr.base)
            idx = self.check_expr(expr.index)
            if not _is_int(idx):
                self.error("E117", "array indices must be integers", expr.index.loc)
            if base.cat == "array":
                if base.dims == 1:
                    return base.elem or T_ERROR
                return ExprType("array", elem=base.elem, dims=base.dims - 1)
            if base.cat != "error":
                self.error("E155", "only arrays can be indexed", expr.loc)
            return T_ERROR
        if isinstance(expr, ast.Member):
            base = self.check_expr(expr.base)
            if base.cat == "error":
                return T_ERROR
            if base.cat != "class":
                self.error("E115", "member access needs a class-typed variable", expr.loc)
                return T_ERROR
            m = self.spec.lookup_member(base.class_name or "", expr.name)
            if m is None:
                self.error(
                    "E115",
                    f"'{expr.name}' is not a class member of '{base.class_name}'",
                    expr.loc,
                )
                return T_ERROR
            t = _type_of_spec(m.type)
            if m.dims:
                t = ExprType("array", elem=t, dims=m.dims)
            return t
        if isinstance(expr, ast.LengthOf):
            self._check_lengthof_target(expr.target)
            return T_INT
        if isinstance(expr, ast.IsIdOf):
            if expr.class_name not in self.spec.classes:
                self.error("E102", f"unknown class '{expr.class_name}'", expr.loc)
            elif not self.spec.family_entries(expr.class_name):
                self.error(
                    "E137",
                    f"'{expr.class_name}' has no object ids to test against",
                    expr.loc,
                )
            t = self.check_expr(expr.value)
            if not _is_int(t):
                self.error("E117", "isidof() needs an integer value", expr.value.loc)
            return T_INT
        raise TypeError(f"unhandled expression {expr!r}")

    def _check_binary(self, expr: ast.Binary) -> ExprType:
        left = self.check_expr(expr.left)
        right = self.check_expr(expr.right)
        op = expr.op
        if op in ("&&", "||"):
            if not (_is_bool(left) and _is_bool(right)):
                self.error("E119", f"'{op}' needs boolean operands", expr.loc)
            return T_BOOL
        if op in ("==", "!="):
            if _is_bool(left) and _is_bool(right):
                return T_BOOL
            if _numeric(left) and _numeric(right):
                return T_BOOL
            self.error("E117", f"'{op}' needs comparable operands", expr.loc)
            return T_BOOL
        if op in ("<", "<=", ">", ">="):
            if not (_numeric(left) and _numeric(right)):
                self.error("E117", f"'{op}' needs numeric operands", expr.loc)
            return T_BOOL
        if op in ("%", "<<", ">>", "&", "|", "^"):
            if not (_is_int(left) and _is_int(right)):
                self.error("E117", f"'{op}' needs integer operands", expr.loc)
            return T_INT
        if not (_numeric(left) and _numeric(right)):
            self.error("E117", f"'{op}' needs numeric operands", expr.loc)
            return T_ERROR
        return T_FLOAT if "float" in (left.cat, right.cat) else T_INT

    def _check_lvalue(self, target: ast.Expr, op: str) -> None:
        if isinstance(target, ast.Name):
            resolved = self.lookup(target.ident)
            if resolved is None:
                self.error("E114", f"'{target.ident}' is not declared", target.loc)
                return
            kind, _, const = resolved
            if kind == "member-parsable":
                self.error(
                    "E113",
                    f"'{target.ident}' is parsable and cannot be used as an lvalue",
                    target.loc,
                )
            elif kind == "const" or const:
                self.error("E153", f"'{target.ident}' is constant", target.loc)
            return
        if isinstance(target, ast.Index):
            self._check_lvalue(target.base, op)
            return
        if isinstance(target, ast.Member):
            base = self.check_expr(target.base)
            if base.cat != "class":
                return
            m = self.spec.lookup_member(base.class_name or "", target.name)
            if m is not None and m.kind == "parsable":
                self.error(
                    "E113",
                    f"'{target.name}' is parsable and cannot be used as an lvalue",
                    target.loc,
                )
            return

    def _check_lengthof_target(self, target: ast.Expr) -> None:
        base = target
        while isinstance(base, ast.Index):
            self.check_expr(base.index)
            base = base.base
        if isinstance(base, ast.Name):
            resolved = self.lookup(base.ident)
            if resolved is None:
                self.error("E114", f"'{base.ident}' is not declared", base.loc)
            elif resolved[0] != "member-parsable":
                self.error(
                    "E136",
                    f"lengthof() needs a parsable variable, '{base.ident}' is not",
                    base.loc,
                )
            return
        if isinstance(base, ast.Member):
            outer = self.check_expr(base.base)
            if outer.cat != "class":
                if outer.cat != "error":
                    self.error("E136", "lengthof() needs a parsable variable", base.loc)
                return
            m = self.spec.lookup_member(outer.class_name or "", base.name)
            if m is None:
                self.error(
                    "E115",
                    f"'{base.name}' is not a class member of '{outer.class_name}'",
                    base.loc,
                )
            elif m.kind != "parsable":
                self.error("E136", f"lengthof() needs a parsable variable, "
                                   f"'{base.name}' is not", base.loc)
            return
        self.error("E136", "lengthof() needs a variable reference", target.loc)


# --------------------------------------------------------------------------
# Public surface


def analyze_unit(
    unit: ast.Ast, options: Optional[Options] = None
) -> tuple[Optional[SyntaxSpec], list[Diagnostic]]:
    """Analyze a unit; returns (spec, diagnostics).  spec is None on errors."""
    return Analyzer(unit, options).run()


def analyze(unit: ast.Ast, options: Optional[Options] = None) -> SyntaxSpec:
    """Analyze a unit; raises SemanticErrors carrying the diagnostics."""
    spec, diags = analyze_unit(unit, options)
    if spec is None:
        raise SemanticErrors(diags)
    return spec


def check_ids(spec: SyntaxSpec) -> list[Diagnostic]:
    """Re-validate object-id families: base/derived consistency and
    pairwise-disjoint dispatch values."""
    diags: list[Diagnostic] = []
    for name in spec.class_order:
        info = spec.classes[name]
        if info.id_info is None or info.parent is None:
            continue
        ancestor_id = spec.effective_id(info.parent)
        if ancestor_id is None:
            continue
        own = info.id_info
        if own.name != ancestor_id.name:
            diags.append(
                Diagnostic(
                    "error",
                    "E126",
                    f"id field '{own.name}' must keep the base class name "
                    f"'{ancestor_id.name}'",
                    own.loc,
                )
            )
        if own.size_bits != ancestor_id.size_bits:
            diags.append(
                Diagnostic(
                    "error",
                    "E126",
                    f"id parse size {own.size_bits} differs from the base class's "
                    f"{ancestor_id.size_bits}",
                    own.loc,
                )
            )
        if (own.type.kind, own.type.signed) != (
            ancestor_id.type.kind,
            ancestor_id.type.signed,
        ):
            diags.append(
                Diagnostic(
                    "error",
                    "E126",
                    f"id type '{own.type.describe()}' differs from the base class's "
                    f"'{ancestor_id.type.describe()}'",
                    own.loc,
                )
            )
    reported: set[tuple[str, str]] = set()
    for root, entries in spec.id_index.items():
        ordered = sorted(entries, key=lambda e: (e[0], e[1]))
        for (lo1, hi1, c1), (lo2, hi2, c2) in zip(ordered, ordered[1:]):
            if lo2 <= hi1 and (c1, c2) not in reported and c1 != c2:
                reported.add((c1, c2))
                loc = spec.classes[c2].id_info.loc if spec.classes[c2].id_info else Location()
                diags.append(
                    Diagnostic(
                        "error",
                        "E125",
                        f"ids of '{c1}' ({lo1}..{hi1}) and '{c2}' ({lo2}..{hi2}) overlap",
                        loc,
                    )
                )
    return sort_diagnostics(diags)


def fold_consts(spec: SyntaxSpec) -> SyntaxSpec:
    """Verify that every required constant folded to a literal; idempotent."""
    for name, value in spec.constants.items():
        if not isinstance(value, (int, float)):
            raise SemanticErrors(
                [Diagnostic("error", "E134", f"constant '{name}' did not fold", Location())]
            )
    return spec
