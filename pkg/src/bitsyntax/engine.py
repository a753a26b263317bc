"""Execution of a checked schema over bitstreams.

`parse_object` reads a bitstream into a tree of field values;
`generate_object` writes a bitstream from a value document.  Both run the
same class bodies with C-style expression semantics in the 64-bit integer
model, produce the same trace events, and do exact per-field bit accounting:
an object's span equals the sum of its field lengths plus the alignment bits
inside it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from . import arith, bitio
from .diagnostics import EndOfStream, GenerateFailure, ParseFailure, RunError
from .frontend import ast
from .sema import ClassInfo, IdInfo, MapOutput, SyntaxSpec
from .vlc import VlcDecodeError, VlcEncodeError, decode_symbol, encode_symbol

_MISSING = object()


class Incomplete:
    """A look-ahead value cut short by the end of the stream."""

    __slots__ = ("value", "available", "wanted")

    def __init__(self, value: int, available: int, wanted: int):
        self.value = value
        self.available = available
        self.wanted = wanted

    def __repr__(self) -> str:
        return f"<incomplete {self.available}/{self.wanted} bits>"


# --------------------------------------------------------------------------
# Trace events


@dataclass
class TraceEvent:
    kind: str  # "enter" | "leave" | "field" | "align" | "dispatch" | "mismatch"
    name: str
    offset: int
    length: int
    value_text: str
    depth: int

    def render(self) -> str:
        pad = "  " * self.depth
        if self.kind == "enter":
            return f"{pad}+{self.name} @{self.offset}"
        if self.kind == "leave":
            return f"{pad}-{self.name} ({self.length} bits)"
        if self.kind == "field":
            return f"{pad}{self.name} = {self.value_text} ({self.length} bits @ {self.offset})"
        if self.kind == "align":
            return f"{pad}align +{self.length}"
        if self.kind == "dispatch":
            return f"{pad}id-dispatch -> {self.name}"
        if self.kind == "mismatch":
            return f"{pad}MISMATCH {self.name} {self.value_text} @ {self.offset}"
        raise ValueError(self.kind)


def render_trace(events: list[TraceEvent]) -> str:
    return "\n".join(e.render() for e in events)


# --------------------------------------------------------------------------
# Error hook


@dataclass
class Report:
    kind: str  # "mismatch" | "vlc" | "dispatch"
    name: str
    bit_offset: int
    expected: Any = None
    actual: Any = None


class ErrorHook:
    """Receives every expected-value mismatch and VLC failure.

    policy "abort" stops the run with a positioned error; "warn" continues
    with the parsed value where that is possible (mismatches only).
    """

    def __init__(self, policy: str = "abort"):
        if policy not in ("abort", "warn"):
            raise ValueError(f"unknown error policy {policy!r}")
        self.policy = policy
        self.reports: list[Report] = []

    def report(self, report: Report) -> bool:
        """Record a failure; returns True when execution may continue."""
        self.reports.append(report)
        return self.policy == "warn" and report.kind == "mismatch"


# --------------------------------------------------------------------------
# Runtime values


class ArrayValue:
    def __init__(self, char_hint: bool = False):
        self.elements: dict[int, Any] = {}
        self.elem_bits: dict[int, int] = {}
        self.char_hint = char_hint

    def indices(self) -> list[int]:
        return sorted(self.elements)

    def is_contiguous(self) -> bool:
        idx = self.indices()
        return idx == list(range(len(idx)))

    def get(self, index: int, bit: int) -> Any:
        if index not in self.elements:
            raise RunError(f"array index {index} was never populated", bit)
        return self.elements[index]

    def total_bits(self) -> int:
        return sum(self.elem_bits.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, ArrayValue) and self.elements == other.elements

    def __repr__(self) -> str:
        return f"ArrayValue({self.elements!r})"


@dataclass
class Instance:
    value: Any
    bits: int
    expected: bool  # value fixed by the schema (not document-supplied)
    lookahead: bool = False
    incomplete: bool = False


@dataclass
class MemberRecord:
    kind: str  # "scalar" | "array" | "object" | "map"
    instances: list[Instance] = field(default_factory=list)
    bits_last: int = 0
    is_param: bool = False
    is_id: bool = False
    id_ranged: bool = False

    @property
    def all_expected(self) -> bool:
        return all(i.expected for i in self.instances)


class ObjectValue:
    """A parsed or to-be-generated object: member values plus bit accounting."""

    def __init__(self, class_name: str, span_start: int = 0):
        self.class_name = class_name
        self.fields: dict[str, Any] = {}
        self.order: list[str] = []
        self.meta: dict[str, MemberRecord] = {}
        self.span_start = span_start
        self.span_bits = 0

    def record(self, name: str, value: Any, kind: str, instance: Optional[Instance],
               **flags) -> MemberRecord:
        rec = self.meta.get(name)
        if rec is None:
            rec = MemberRecord(kind, **flags)
            self.meta[name] = rec
            self.order.append(name)
        self.fields[name] = value
        if instance is not None:
            rec.instances.append(instance)
            rec.bits_last = instance.bits
        return rec

    def member_bits(self, name: str) -> Optional[int]:
        rec = self.meta.get(name)
        return rec.bits_last if rec is not None else None

    def __repr__(self) -> str:
        return f"ObjectValue({self.class_name}, {self.fields!r})"


class Env:
    """Lexical scopes over an object's members and the global constants."""

    def __init__(self, spec: Optional[SyntaxSpec], obj: ObjectValue,
                 bit_of=lambda: 0):
        self.spec = spec
        self.obj = obj
        self.scopes: list[dict[str, Any]] = []
        self.bit_of = bit_of

    @classmethod
    def standalone(cls, variables: Optional[dict[str, Any]] = None) -> "Env":
        env = cls(None, ObjectValue("<env>"))
        env.scopes.append(dict(variables or {}))
        return env

    def push(self) -> None:
        self.scopes.append({})

    def pop(self) -> None:
        self.scopes.pop()

    def get(self, name: str) -> Any:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if name in self.obj.fields:
            return self.obj.fields[name]
        if self.spec is not None and name in self.spec.constants:
            return self.spec.constants[name]
        if self.spec is not None and self.spec.lookup_member(self.obj.class_name, name):
            raise RunError(f"'{name}' referenced before it was parsed", self.bit_of())
        raise RunError(f"'{name}' is not defined", self.bit_of())

    def declare_local(self, name: str, value: Any) -> None:
        if not self.scopes:
            self.scopes.append({})
        self.scopes[-1][name] = value

    def set(self, name: str, value: Any) -> None:
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        if name in self.obj.fields:
            self.obj.fields[name] = value
            return
        raise RunError(f"'{name}' is not assignable here", self.bit_of())


class _BreakSignal(Exception):
    pass


class _ContinueSignal(Exception):
    pass


# --------------------------------------------------------------------------
# Value rendering for traces


def _render_value(value: Any) -> str:
    if isinstance(value, ArrayValue):
        if value.char_hint and value.is_contiguous():
            codes = [value.elements[i] for i in value.indices()]
            if all(isinstance(c, int) and 32 <= c < 127 for c in codes):
                return '"' + "".join(chr(c) for c in codes) + '"'
        if value.is_contiguous():
            return "[" + ", ".join(_render_value(value.elements[i]) for i in value.indices()) + "]"
        return "{" + ", ".join(
            f"{i}: {_render_value(value.elements[i])}" for i in value.indices()
        ) + "}"
    if isinstance(value, ObjectValue):
        inner = ", ".join(f"{k}={_render_value(v)}" for k, v in value.fields.items())
        return "{" + inner + "}"
    if isinstance(value, Incomplete):
        return repr(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


# --------------------------------------------------------------------------
# Document helpers (generation input / extraction output)


def _doc_depth(value: Any) -> int:
    depth = 0
    while isinstance(value, list) and value and isinstance(value[0], list):
        depth += 1
        value = value[0]
    return depth + (1 if isinstance(value, list) else 0)


class _DocState:
    def __init__(self, doc: Optional[dict]):
        self.doc = doc or {}
        self.counters: dict[str, int] = {}

    def fetch_instance(self, name: str) -> Any:
        """Next per-declaration value for a scalar or object member; lists are
        consumed one element per declaration instance."""
        raw = self.doc.get(name, _MISSING)
        if isinstance(raw, list):
            i = self.counters.get(name, 0)
            self.counters[name] = i + 1
            return raw[i] if i < len(raw) else _MISSING
        return raw

    def fetch_array_instance(self, name: str, dims: int) -> Any:
        """Next per-declaration value for an array member.  A plain array of
        the declared depth serves every instance; one extra nesting level is a
        per-instance sequence."""
        raw = self.doc.get(name, _MISSING)
        if raw is _MISSING or isinstance(raw, (dict, str)):
            return raw
        if isinstance(raw, list) and _doc_depth(raw) > dims and not any(
            isinstance(x, (dict, str)) for x in raw
        ):
            i = self.counters.get(name, 0)
            self.counters[name] = i + 1
            return raw[i] if i < len(raw) else _MISSING
        return raw


def _array_to_doc(value: ArrayValue) -> Any:
    def elem(v: Any) -> Any:
        if isinstance(v, ArrayValue):
            return _array_to_doc(v)
        if isinstance(v, ObjectValue):
            return extract_document(v)
        return v

    if value.is_contiguous():
        return [elem(value.elements[i]) for i in value.indices()]
    return {"_sparse": {str(i): elem(value.elements[i]) for i in value.indices()}}


def extract_document(obj: ObjectValue) -> dict:
    """Rebuild the value document a generation run would need to reproduce
    this object: every free (schema-unconstrained) field, sequences for
    redeclared scalars, sparse maps for partially populated arrays."""
    doc: dict[str, Any] = {"_class": obj.class_name}
    for name in obj.order:
        rec = obj.meta[name]
        if rec.is_param:
            continue
        if rec.is_id and not rec.id_ranged:
            continue
        if rec.kind == "array":
            values = [
                _array_to_doc(inst.value) for inst in rec.instances if not inst.expected
            ]
        elif rec.kind == "object":
            values = [
                extract_document(inst.value) for inst in rec.instances if not inst.expected
            ]
        elif rec.kind == "map":
            values = []
            for inst in rec.instances:
                if inst.expected:
                    continue
                if isinstance(inst.value, ObjectValue):
                    values.append(dict(inst.value.fields))
                else:
                    values.append(inst.value)
        else:
            values = [
                inst.value
                for inst in rec.instances
                if not inst.expected and not inst.incomplete
            ]
        if not values:
            continue
        doc[name] = values[0] if len(values) == 1 else values
    return doc


# --------------------------------------------------------------------------
# The interpreter


class _Exec:
    def __init__(
        self,
        spec: SyntaxSpec,
        mode: str,
        cursor: bitio.BitCursorBase,
        hook: ErrorHook,
        events: list[TraceEvent],
    ):
        self.spec = spec
        self.mode = mode  # "get" | "put"
        self.cursor = cursor
        self.hook = hook
        self.events = events
        self.suppress = 0

    # -- small helpers ------------------------------------------------------

    def bit(self) -> int:
        return self.cursor.tell()

    def fail(self, reason: str, bit: Optional[int] = None) -> RunError:
        cls = ParseFailure if self.mode == "get" else GenerateFailure
        return cls(reason, self.bit() if bit is None else bit)

    def emit(self, kind: str, name: str, offset: int, length: int, value_text: str,
             depth: int) -> None:
        if self.suppress and kind not in ("enter", "leave"):
            return
        self.events.append(TraceEvent(kind, name, offset, length, value_text, depth))

    def align_to(self, bits: Optional[int], depth: int) -> int:
        if not bits:
            return 0
        moved = self.cursor.align(bits)
        if moved:
            self.emit("align", "", self.bit() - moved, moved, "", depth)
        return moved

    def eval_int(self, expr: ast.Expr, env: Env, what: str) -> int:
        value = self.eval(expr, env)
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(f"{what} must be an integer, got {value!r}")
        return value

    # -- objects ------------------------------------------------------------

    def member_alignments(self, decl_aligned: Optional[ast.Expr], info: ClassInfo,
                          env: Env, depth: int) -> None:
        if decl_aligned is not None:
            self.align_to(self.eval_int(decl_aligned, env, "alignment length"), depth)
        if info.aligned_bits:
            self.align_to(info.aligned_bits, depth)
        eff = self.spec.effective_id(info.name)
        if eff is not None and eff.aligned_bits:
            self.align_to(eff.aligned_bits, depth)

    def choose_class(self, declared: str, depth: int, doc_node: Any) -> str:
        """Resolve a polymorphic member to its concrete class."""
        family = self.spec.family_entries(declared)
        if not family:
            return declared
        if self.mode == "put":
            name = declared
            if isinstance(doc_node, dict) and "_class" in doc_node:
                name = doc_node["_class"]
            if name not in self.spec.classes:
                raise self.fail(f"unknown class '{name}' in document")
            chain_names = [c.name for c in self.spec.chain(name)]
            if declared not in chain_names:
                raise self.fail(f"document class '{name}' does not derive from '{declared}'")
            if self.spec.classes[name].abstract:
                raise self.fail(f"abstract class '{name}' cannot be generated")
            return name
        eff = self.spec.effective_id(declared)
        raw, available = self.cursor.peek_bits(eff.size_bits)
        if available < eff.size_bits:
            self.hook.report(Report("dispatch", declared, self.bit()))
            raise self.fail(f"no class id match for '{declared}' (end of stream)")
        value = raw
        if eff.type.signed and value >= 1 << (eff.size_bits - 1):
            value -= 1 << eff.size_bits
        for low, high, cls in family:
            if low <= value <= high:
                self.emit("dispatch", cls, self.bit(), 0, "", depth)
                return cls
        self.hook.report(Report("dispatch", declared, self.bit(), actual=value))
        raise self.fail(f"no class id match for '{declared}' (saw {value})")

    def run_object(
        self,
        class_name: str,
        actuals: list[Any],
        doc_node: Any,
        depth: int,
        emit_frame: bool,
    ) -> ObjectValue:
        info = self.spec.classes[class_name]
        if self.mode == "get" and not info.options.get:
            raise self.fail(f"class '{class_name}' was compiled without parsing support")
        if self.mode == "put" and not info.options.put:
            raise self.fail(f"class '{class_name}' was compiled without generation support")
        chain = self.spec.chain(class_name)
        params = [p for c in chain for p in c.params]
        if len(actuals) != len(params):
            raise self.fail(
                f"class '{class_name}' takes {len(params)} argument(s), got {len(actuals)}"
            )
        suppressed = not info.options.trace
        if emit_frame:
            self.emit("enter", class_name, self.bit(), 0, "", depth)
        if suppressed:
            self.suppress += 1
        start = self.bit()
        obj = ObjectValue(class_name, span_start=start)
        doc = _DocState(doc_node if isinstance(doc_node, dict) else None)
        env = Env(self.spec, obj, self.bit)
        inner = depth + 1 if emit_frame else depth
        try:
            for param, value in zip(params, actuals):
                if isinstance(value, (list, tuple)):
                    arr = ArrayValue()
                    arr.elements = dict(enumerate(value))
                    value = arr
                elif isinstance(value, ArrayValue):
                    copy = ArrayValue(value.char_hint)
                    copy.elements = dict(value.elements)
                    copy.elem_bits = dict(value.elem_bits)
                    value = copy
                obj.record(param.name, value, "scalar", None, is_param=True)
            eff = self.spec.effective_id(class_name)
            if eff is not None:
                self.read_or_write_id(eff, obj, doc, env, inner)
            for cls in chain:
                env.scopes = [{}]
                for stmt in cls.decl.body:
                    self.exec_stmt(stmt, env, doc, inner)
        finally:
            obj.span_bits = self.bit() - start
            if suppressed:
                self.suppress -= 1
            if emit_frame:
                self.emit("leave", class_name, self.bit(), obj.span_bits, "", depth)
        return obj

    def read_or_write_id(self, eff: IdInfo, obj: ObjectValue, doc: _DocState,
                         env: Env, depth: int) -> None:
        ranged = eff.low != eff.high
        offset = self.bit()
        if self.mode == "get":
            try:
                value = self.cursor.read_bits(eff.size_bits, signed=eff.type.signed)
            except EndOfStream as exc:
                raise self.fail("end of stream", exc.bit_position) from None
            if not eff.low <= value <= eff.high:
                self.mismatch(eff.name, f"{eff.low}..{eff.high}" if ranged else eff.low,
                              value, offset, depth)
        else:
            supplied = doc.fetch_instance(eff.name)
            value = eff.low
            if supplied is not _MISSING:
                if not isinstance(supplied, int) or not eff.low <= supplied <= eff.high:
                    self.mismatch(eff.name, f"{eff.low}..{eff.high}" if ranged else eff.low,
                                  supplied, offset, depth)
                else:
                    value = supplied
            elif ranged:
                value = eff.low
            self.write_scalar_bits(eff.type, eff.size_bits, value, eff.name)
        self.emit("field", eff.name, offset, eff.size_bits, _render_value(value), depth)
        obj.record(
            eff.name,
            value,
            "scalar",
            Instance(value, eff.size_bits, expected=not ranged),
            is_id=True,
            id_ranged=ranged,
        )

    def mismatch(self, name: str, expected: Any, actual: Any, offset: int,
                 depth: int) -> None:
        self.emit("mismatch", name, offset, 0, f"expected {expected} got {actual}", depth)
        ok = self.hook.report(Report("mismatch", name, offset, expected, actual))
        if not ok:
            raise self.fail(f"expected-value mismatch on '{name}' "
                            f"(expected {expected}, got {actual})", offset)

    # -- statements --------------------------------------------------------

    def exec_stmt(self, stmt: ast.Stmt, env: Env, doc: _DocState, depth: int) -> None:
        if isinstance(stmt, ast.VarDecl):
            self.exec_decl(stmt, env, doc, depth)
        elif isinstance(stmt, ast.ExprStmt):
            self.eval(stmt.expr, env)
        elif isinstance(stmt, ast.Block):
            env.push()
            try:
                for s in stmt.stmts:
                    self.exec_stmt(s, env, doc, depth)
            finally:
                env.pop()
        elif isinstance(stmt, ast.If):
            if self.eval_bool(stmt.cond, env):
                self.exec_scoped(stmt.then, env, doc, depth)
            elif stmt.other is not None:
                self.exec_scoped(stmt.other, env, doc, depth)
        elif isinstance(stmt, ast.Switch):
            self.exec_switch(stmt, env, doc, depth)
        elif isinstance(stmt, ast.For):
            if stmt.init is not None:
                self.eval(stmt.init, env)
            while stmt.cond is None or self.eval_bool(stmt.cond, env):
                try:
                    self.exec_scoped(stmt.body, env, doc, depth)
                except _BreakSignal:
                    break
                except _ContinueSignal:
                    pass
                if stmt.step is not None:
                    self.eval(stmt.step, env)
        elif isinstance(stmt, ast.While):
            while self.eval_bool(stmt.cond, env):
                try:
                    self.exec_scoped(stmt.body, env, doc, depth)
                except _BreakSignal:
                    break
                except _ContinueSignal:
                    continue
        elif isinstance(stmt, ast.DoWhile):
            while True:
                try:
                    self.exec_scoped(stmt.body, env, doc, depth)
                except _BreakSignal:
                    break
                except _ContinueSignal:
                    pass
                if not self.eval_bool(stmt.cond, env):
                    break
        elif isinstance(stmt, ast.Break):
            raise _BreakSignal()
        elif isinstance(stmt, ast.Continue):
            raise _ContinueSignal()
        elif isinstance(stmt, (ast.PragmaStmt, ast.VerbatimStmt)):
            pass  # options were bound during analysis; verbatim code never runs
        else:
            raise TypeError(f"unhandled statement {stmt!r}")

    def exec_scoped(self, stmt: ast.Stmt, env: Env, doc: _DocState, depth: int) -> None:
        if isinstance(stmt, ast.Block):
            self.exec_stmt(stmt, env, doc, depth)
            return
        env.push()
        try:
            self.exec_stmt(stmt, env, doc, depth)
        finally:
            env.pop()

    def exec_switch(self, stmt: ast.Switch, env: Env, doc: _DocState, depth: int) -> None:
        subject = self.eval(stmt.subject, env)
        matched = None
        default = None
        for i, arm in enumerate(stmt.arms):
            if arm.label is None:
                default = i
            elif matched is None and self.eval(arm.label, env) == subject:
                matched = i
        start = matched if matched is not None else default
        if start is None:
            return
        env.push()
        try:
            for arm in stmt.arms[start:]:
                for s in arm.stmts:
                    self.exec_stmt(s, env, doc, depth)
        except _BreakSignal:
            pass
        finally:
            env.pop()

    def eval_bool(self, expr: ast.Expr, env: Env) -> bool:
        value = self.eval(expr, env)
        if not isinstance(value, bool):
            raise self.fail(f"condition evaluated to non-boolean {value!r}")
        return value

    # -- declarations ----------------------------------------------------------

    def exec_decl(self, decl: ast.VarDecl, env: Env, doc: _DocState, depth: int) -> None:
        info = self.spec.classes.get(decl.type.class_name) if decl.type.kind == "class" else None
        parsable = decl.parse_size is not None or (info is not None and info.is_parsable)
        if not parsable:
            self.exec_plain_decl(decl, env, doc, depth, info)
            return
        if decl.aligned is not None:
            self.align_to(self.eval_int(decl.aligned, env, "alignment length"), depth)
        if decl.dims:
            self.exec_parsable_array(decl, env, doc, depth, info)
        elif info is not None and decl.resolved_map is None:
            self.exec_object_member(decl, env, doc, depth)
        else:
            self.exec_parsable_scalar(decl, env, doc, depth)

    # plain (non-parsable) declarations -------------------------------------

    def exec_plain_decl(self, decl: ast.VarDecl, env: Env, doc: _DocState, depth: int,
                        info: Optional[ClassInfo]) -> None:
        if info is not None:
            # Non-parsable class instance: run its body without stream traffic.
            child = self.run_object(
                decl.type.class_name,
                [self.eval(a, env) for a in decl.actuals],
                None,
                depth,
                emit_frame=False,
            )
            value: Any = child
        elif decl.dims:
            value = self.build_plain_array(decl, env)
        else:
            if decl.init is not None:
                value = self.eval_init_scalar(decl, decl.init, env)
            else:
                value = 0.0 if decl.type.kind in ("float", "double") else 0
        if decl.top_level:
            env.obj.record(decl.name, value, "scalar", None)
        else:
            env.declare_local(decl.name, value)

    def build_plain_array(self, decl: ast.VarDecl, env: Env) -> ArrayValue:
        sizes = [self.eval_int(d.size, env, "array size") for d in decl.dims]
        for size in sizes:
            self.check_array_size(size, decl)
        flat_index = 0

        def fill(level: int) -> ArrayValue:
            nonlocal flat_index
            arr = ArrayValue(decl.type.kind == "char" and level == len(sizes) - 1)
            for i in range(sizes[level]):
                if level < len(sizes) - 1:
                    arr.elements[i] = fill(level + 1)
                else:
                    arr.elements[i] = self.element_init_value(decl, flat_index, env)
                    flat_index += 1
            return arr

        return fill(0)

    def element_init_value(self, decl: ast.VarDecl, flat_index: int, env: Env) -> Any:
        init = decl.init
        if init is None:
            return 0.0 if decl.type.kind in ("float", "double") else 0
        if isinstance(init, ast.BraceList):
            if flat_index >= len(init.items):
                raise self.fail(f"brace initializer for '{decl.name}' is too short")
            return self.eval_init_scalar(decl, init.items[flat_index], env)
        if isinstance(init, ast.StringLit):
            data = init.text.encode("ascii", "replace")
            if flat_index < len(data):
                return data[flat_index]
            return 0  # trailing null
        return self.eval_init_scalar(decl, init, env)

    def eval_init_scalar(self, decl: ast.VarDecl, expr: ast.Expr, env: Env) -> Any:
        value = self.eval(expr, env)
        if isinstance(value, bool):
            value = int(value)
        if decl.type.kind in ("float", "double"):
            return float(value)
        if isinstance(value, float):
            value = int(value)
        return value

    def check_array_size(self, size: int, decl: ast.VarDecl) -> None:
        cap = decl.array_cap if decl.array_cap is not None else self.spec.options.array_max
        if size < 0:
            raise self.fail(f"array size {size} of '{decl.name}' is negative")
        if size > cap:
            raise self.fail(f"array size {size} of '{decl.name}' exceeds the cap of {cap}")

    # parsable scalars ---------------------------------------------------------

    def read_scalar_bits(self, t: ast.TypeSpec, size: int, name: str,
                         lookahead: bool) -> Any:
        if t.kind in ("float", "double"):
            if size not in (32, 64) or (t.kind == "float") != (size == 32):
                raise self.fail(f"bad {t.kind} width {size} for '{name}'")
            if lookahead:
                raw, available = self.cursor.peek_bits(size)
                if available < size:
                    return Incomplete(raw, available, size)
                return bitio.float_from_bits(raw, size)
            raw = self.cursor.read_bits(size, byte_order=t.endian)
            return bitio.float_from_bits(raw, size)
        if lookahead:
            raw, available = self.cursor.peek_bits(size)
            if available < size:
                return Incomplete(raw, available, size)
            if t.endian == "little":
                if size % 8:
                    raise self.fail(f"little-endian width {size} of '{name}' is not a "
                                    "byte multiple")
                raw = int.from_bytes(raw.to_bytes(size // 8, "big"), "little")
            if t.signed and raw >= 1 << (size - 1):
                raw -= 1 << size
            return raw
        return self.cursor.read_bits(size, signed=t.signed, byte_order=t.endian)

    def write_scalar_bits(self, t: ast.TypeSpec, size: int, value: Any, name: str) -> None:
        try:
            if t.kind in ("float", "double"):
                if size not in (32, 64) or (t.kind == "float") != (size == 32):
                    raise self.fail(f"bad {t.kind} width {size} for '{name}'")
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise self.fail(f"field '{name}' needs a number, got {value!r}")
                self.cursor.write_bits(size, bitio.float_to_bits(float(value), size),
                                       byte_order=t.endian)
                return
            if not isinstance(value, int) or isinstance(value, bool):
                raise self.fail(f"field '{name}' needs an integer, got {value!r}")
            self.cursor.write_bits(size, value, signed=t.signed, byte_order=t.endian)
        except bitio.StreamError as exc:
            if isinstance(exc, EndOfStream):
                raise
            raise self.fail(f"field '{name}': {exc.message}", exc.bit_position) from None

    def round_expected(self, decl_type: ast.TypeSpec, size: int, value: Any) -> Any:
        """Expected values compare in the field's own domain: floats round to
        the declared width, integers truncate into the field like C bitfield
        assignments and read back per signedness."""
        if decl_type.kind in ("float", "double") and isinstance(value, (int, float)):
            if size == 32:
                return bitio.float_from_bits(bitio.float_to_bits(float(value), 32), 32)
            return float(value)
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int) and 0 < size <= 64:
            raw = value & ((1 << size) - 1)
            if decl_type.signed and raw >= 1 << (size - 1):
                raw -= 1 << size
            return raw
        return value

    def exec_parsable_scalar(self, decl: ast.VarDecl, env: Env, doc: _DocState,
                             depth: int) -> None:
        offset = self.bit()
        if decl.resolved_map is not None:
            self.exec_map_field(decl, env, doc, depth, offset)
            return
        size = self.eval_int(decl.parse_size, env, f"parse size of '{decl.name}'")
        self.check_scalar_size(decl, size)
        expected_init = decl.init is not None
        if size == 0:
            value = self.eval_init_scalar(decl, decl.init, env) if expected_init else (
                0.0 if decl.type.kind in ("float", "double") else 0
            )
            self.finish_scalar(decl, env, value, 0, offset, depth,
                               expected=True, lookahead=False)
            return
        if self.mode == "get":
            try:
                value = self.read_scalar_bits(decl.type, size, decl.name, decl.lookahead)
            except EndOfStream as exc:
                raise self.fail("end of stream", exc.bit_position) from None
            if expected_init and not isinstance(value, Incomplete):
                expected = self.round_expected(decl.type, size,
                                               self.eval(decl.init, env))
                if value != expected:
                    self.mismatch(decl.name, expected, value, offset, depth)
            consumed = 0 if decl.lookahead else size
            self.finish_scalar(decl, env, value, consumed, offset, depth,
                               expected=expected_init, lookahead=decl.lookahead)
            return
        # put
        if decl.lookahead:
            supplied = doc.fetch_instance(decl.name)
            value = supplied if supplied is not _MISSING else Incomplete(0, 0, size)
            if expected_init and not isinstance(value, Incomplete):
                expected = self.round_expected(decl.type, size, self.eval(decl.init, env))
                if value != expected:
                    self.mismatch(decl.name, expected, value, offset, depth)
            self.finish_scalar(decl, env, value, 0, offset, depth,
                               expected=expected_init, lookahead=True)
            return
        if expected_init:
            value = self.round_expected(decl.type, size, self.eval(decl.init, env))
            supplied = doc.fetch_instance(decl.name)
            if supplied is not _MISSING:
                rounded = self.round_expected(decl.type, size, supplied)
                if rounded != value:
                    self.mismatch(decl.name, value, supplied, offset, depth)
                    value = rounded  # warn policy keeps the caller's value
        else:
            supplied = doc.fetch_instance(decl.name)
            if supplied is _MISSING:
                raise self.fail(f"missing field {decl.name}")
            value = supplied
        self.write_scalar_bits(decl.type, size, value, decl.name)
        self.finish_scalar(decl, env, value, size, offset, depth,
                           expected=expected_init, lookahead=False)

    def check_scalar_size(self, decl: ast.VarDecl, size: int) -> None:
        if size < 0:
            raise self.fail(f"parse size {size} of '{decl.name}' is negative")
        if size > 64:
            raise self.fail(f"parse size {size} of '{decl.name}' exceeds 64 bits")

    def finish_scalar(self, decl: ast.VarDecl, env: Env, value: Any, bits: int,
                      offset: int, depth: int, expected: bool, lookahead: bool) -> None:
        self.emit("field", decl.name, offset, bits, _render_value(value), depth)
        env.obj.record(
            decl.name,
            value,
            "scalar",
            Instance(value, bits, expected=expected, lookahead=lookahead,
                     incomplete=isinstance(value, Incomplete)),
        )

    # map-typed fields -----------------------------------------------------------

    def exec_map_field(self, decl: ast.VarDecl, env: Env, doc: _DocState, depth: int,
                       offset: int) -> None:
        cmap = self.spec.maps[decl.resolved_map]
        output = self.spec.map_outputs[decl.resolved_map]
        if self.mode == "get":
            try:
                raw, consumed = decode_symbol(cmap, self.cursor)
            except VlcDecodeError as exc:
                self.hook.report(Report("vlc", decl.name, exc.bit_position))
                raise self.fail(f"vlc lookup failed in map '{cmap.name}'",
                                exc.bit_position) from None
            value = self.map_value_to_runtime(raw, output)
            if decl.init is not None and output.kind == "scalar":
                expected = self.eval(decl.init, env)
                if value != expected:
                    self.mismatch(decl.name, expected, value, offset, depth)
            self.finish_map(decl, env, value, consumed, offset, depth,
                            expected=decl.init is not None)
            return

        def fetch():
            if output.kind == "array":
                return doc.fetch_array_instance(decl.name, len(output.dims))
            return doc.fetch_instance(decl.name)

        if decl.init is not None and output.kind == "scalar":
            value = self.eval(decl.init, env)
            supplied = fetch()
            if supplied is not _MISSING and supplied != value:
                self.mismatch(decl.name, value, supplied, offset, depth)
                value = supplied
        else:
            supplied = fetch()
            if supplied is _MISSING:
                raise self.fail(f"missing field {decl.name}")
            value = supplied
        raw = self.runtime_to_map_value(value, output, decl.name)
        try:
            consumed = encode_symbol(cmap, raw, self.cursor)
        except VlcEncodeError as exc:
            self.hook.report(Report("vlc", decl.name, self.bit(), actual=raw))
            raise self.fail(str(exc)) from None
        value = self.map_value_to_runtime(raw, output)
        self.finish_map(decl, env, value, consumed, offset, depth,
                        expected=decl.init is not None and output.kind == "scalar")

    def finish_map(self, decl: ast.VarDecl, env: Env, value: Any, bits: int, offset: int,
                   depth: int, expected: bool) -> None:
        self.emit("field", decl.name, offset, bits, _render_value(value), depth)
        env.obj.record(decl.name, value, "map", Instance(value, bits, expected=expected))

    def map_value_to_runtime(self, raw: Any, output: MapOutput) -> Any:
        if output.kind == "class":
            obj = ObjectValue(output.class_name or "")
            for name, item in zip(output.field_names, raw):
                obj.record(name, item, "scalar", None)
            return obj
        if output.kind == "array":
            arr = ArrayValue(output.type.kind == "char")
            for i, item in enumerate(raw):
                arr.elements[i] = item
            return arr
        return raw

    def runtime_to_map_value(self, value: Any, output: MapOutput, name: str) -> Any:
        if output.kind == "class":
            if isinstance(value, ObjectValue):
                value = value.fields
            if isinstance(value, dict):
                try:
                    return tuple(value[f] for f in output.field_names)
                except KeyError as exc:
                    raise self.fail(f"field {name} is missing map output value {exc}")
            if isinstance(value, (list, tuple)):
                return tuple(value)
            raise self.fail(f"field {name} needs the map's output fields")
        if output.kind == "array":
            if isinstance(value, ArrayValue):
                return tuple(value.elements[i] for i in value.indices())
            if isinstance(value, (list, tuple)):
                return tuple(value)
            raise self.fail(f"field {name} needs an array value")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(f"field {name} needs a number, got {value!r}")
        return value

    # parsable arrays --------------------------------------------------------------

    def exec_parsable_array(self, decl: ast.VarDecl, env: Env, doc: _DocState, depth: int,
                            info: Optional[ClassInfo]) -> None:
        offset = self.bit()
        partial = any(d.partial for d in decl.dims)
        # Dimension expressions run once, left to right, before any element.
        dims: list[tuple[bool, int]] = []
        for d in decl.dims:
            n = self.eval_int(d.size, env, f"array bound of '{decl.name}'")
            if d.partial:
                self.check_array_size(n + 1, decl)  # index n must stay under the cap
            else:
                self.check_array_size(n, decl)
            dims.append((d.partial, n))

        existing = env.obj.fields.get(decl.name)
        if partial and isinstance(existing, ArrayValue):
            root = existing
            fresh = False
        else:
            root = ArrayValue(decl.type.kind == "char" and len(decl.dims) == 1)
            fresh = True

        doc_node: Any = _MISSING
        if self.mode == "put":
            doc_node = doc.fetch_array_instance(decl.name, len(decl.dims))

        bits_before = self.bit()
        flat = [0]

        def walk(level: int, container: ArrayValue, doc_level: Any) -> None:
            is_partial, n = dims[level]
            indices = [n] if is_partial else list(range(n))
            for i in indices:
                if level < len(dims) - 1:
                    child = container.elements.get(i)
                    if not isinstance(child, ArrayValue):
                        child = ArrayValue(
                            decl.type.kind == "char" and level == len(dims) - 2
                        )
                        container.elements[i] = child
                    sub_doc = self.doc_element(doc_level, i)
                    mark = self.bit()
                    walk(level + 1, child, sub_doc)
                    container.elem_bits[i] = container.elem_bits.get(i, 0) + (
                        self.bit() - mark
                    )
                else:
                    value, bits = self.parse_element(decl, env, doc,
                                                     self.doc_element(doc_level, i),
                                                     flat[0], depth, info)
                    container.elements[i] = value
                    container.elem_bits[i] = bits
                    flat[0] += 1

        walk(0, root, doc_node)
        total = self.bit() - bits_before
        kind = "array"
        rec_value_text = _render_value(root)
        self.emit("field", decl.name, offset, total, rec_value_text, depth)
        rec = env.obj.record(
            decl.name,
            root,
            kind,
            None,
        )
        expected = decl.init is not None
        if fresh or not rec.instances:
            rec.instances.append(Instance(root, total, expected=expected))
        else:
            inst = rec.instances[-1]
            inst.bits += total
            inst.expected = inst.expected and expected
        rec.bits_last = root.total_bits()

    def doc_element(self, doc_node: Any, index: int) -> Any:
        if doc_node is _MISSING or doc_node is None:
            return _MISSING
        if isinstance(doc_node, str):
            data = doc_node.encode("ascii", "replace")
            return data[index] if index < len(data) else 0
        if isinstance(doc_node, dict):
            sparse = doc_node.get("_sparse", doc_node)
            if str(index) in sparse:
                return sparse[str(index)]
            if index in sparse:
                return sparse[index]
            return _MISSING
        if isinstance(doc_node, list):
            return doc_node[index] if index < len(doc_node) else _MISSING
        return _MISSING

    def parse_element(self, decl: ast.VarDecl, env: Env, doc: _DocState, doc_value: Any,
                      flat_index: int, depth: int, info: Optional[ClassInfo]) -> tuple[Any, int]:
        """One array element; parse size and initializer run per element."""
        start = self.bit()
        if info is not None and decl.resolved_map is None:
            concrete = self.choose_class(decl.type.class_name, depth, doc_value)
            actuals = [self.eval(a, env) for a in decl.actuals]
            child = self.run_object(concrete, actuals, doc_value, depth, emit_frame=True)
            return child, self.bit() - start

        if decl.resolved_map is not None:
            return self.map_element(decl, env, doc_value, depth)

        size = self.eval_int(decl.parse_size, env, f"parse size of '{decl.name}'")
        self.check_scalar_size(decl, size)
        expected_expr = self.element_expected_expr(decl, flat_index)
        if size == 0:
            value = (self.eval_expected(decl, expected_expr, env, size)
                     if expected_expr is not None else
                     (0.0 if decl.type.kind in ("float", "double") else 0))
            return value, 0
        if self.mode == "get":
            try:
                value = self.read_scalar_bits(decl.type, size, decl.name, decl.lookahead)
            except EndOfStream as exc:
                raise self.fail("end of stream", exc.bit_position) from None
            if expected_expr is not None and not isinstance(value, Incomplete):
                expected = self.eval_expected(decl, expected_expr, env, size)
                if value != expected:
                    self.mismatch(decl.name, expected, value, start, depth)
            return value, 0 if decl.lookahead else size
        if decl.lookahead:
            return (doc_value if doc_value is not _MISSING else Incomplete(0, 0, size)), 0
        if expected_expr is not None:
            value = self.eval_expected(decl, expected_expr, env, size)
            if doc_value is not _MISSING:
                rounded = self.round_expected(decl.type, size, doc_value)
                if rounded != value:
                    self.mismatch(decl.name, value, doc_value, start, depth)
                    value = rounded
        else:
            if doc_value is _MISSING:
                raise self.fail(f"missing field {decl.name}")
            value = doc_value
        self.write_scalar_bits(decl.type, size, value, decl.name)
        return value, size

    def element_expected_expr(self, decl: ast.VarDecl, flat_index: int):
        init = decl.init
        if init is None:
            return None
        if isinstance(init, ast.BraceList):
            if flat_index >= len(init.items):
                raise self.fail(f"brace initializer for '{decl.name}' is too short")
            return init.items[flat_index]
        if isinstance(init, ast.StringLit):
            data = init.text.encode("ascii", "replace")
            value = data[flat_index] if flat_index < len(data) else 0
            return ast.IntLit(value, loc=init.loc)
        return init

    def eval_expected(self, decl: ast.VarDecl, expr: ast.Expr, env: Env, size: int) -> Any:
        return self.round_expected(decl.type, size, self.eval(expr, env))

    def map_element(self, decl: ast.VarDecl, env: Env, doc_value: Any,
                    depth: int) -> tuple[Any, int]:
        cmap = self.spec.maps[decl.resolved_map]
        output = self.spec.map_outputs[decl.resolved_map]
        if self.mode == "get":
            try:
                raw, consumed = decode_symbol(cmap, self.cursor)
            except VlcDecodeError as exc:
                self.hook.report(Report("vlc", decl.name, exc.bit_position))
                raise self.fail(f"vlc lookup failed in map '{cmap.name}'",
                                exc.bit_position) from None
            return self.map_value_to_runtime(raw, output), consumed
        if doc_value is _MISSING:
            raise self.fail(f"missing field {decl.name}")
        raw = self.runtime_to_map_value(doc_value, output, decl.name)
        try:
            consumed = encode_symbol(cmap, raw, self.cursor)
        except VlcEncodeError as exc:
            self.hook.report(Report("vlc", decl.name, self.bit(), actual=raw))
            raise self.fail(str(exc)) from None
        return self.map_value_to_runtime(raw, output), consumed

    # nested objects ---------------------------------------------------------------

    def exec_object_member(self, decl: ast.VarDecl, env: Env, doc: _DocState,
                           depth: int) -> None:
        offset = self.bit()
        doc_value = doc.fetch_instance(decl.name) if self.mode == "put" else _MISSING
        concrete = self.choose_class(decl.type.class_name, depth, doc_value)
        actuals = [self.eval(a, env) for a in decl.actuals]
        child = self.run_object(concrete, actuals, doc_value, depth, emit_frame=True)
        env.obj.record(
            decl.name,
            child,
            "object",
            Instance(child, self.bit() - offset, expected=False),
        )

    # -- expressions ------------------------------------------------------------

    def eval(self, expr: ast.Expr, env: Env) -> Any:
        try:
            return eval_expr(expr, env, self)
        except (ParseFailure, GenerateFailure):
            raise
        except RunError as exc:
            raise self.fail(exc.reason, exc.bit_position) from None


# --------------------------------------------------------------------------
# Expression evaluation (usable standalone with Env.standalone)


def eval_expr(expr: ast.Expr, env: Env, exec_: Optional[_Exec] = None) -> Any:
    bit = env.bit_of()

    def run(e: ast.Expr) -> Any:
        return eval_expr(e, env, exec_)

    if isinstance(expr, (ast.IntLit, ast.CharLit)):
        return expr.value
    if isinstance(expr, ast.FloatLit):
        return expr.value
    if isinstance(expr, ast.BoolLit):
        return expr.value
    if isinstance(expr, ast.StringLit):
        raise RunError("string literals cannot be evaluated here", bit)
    if isinstance(expr, ast.Name):
        return env.get(expr.ident)
    if isinstance(expr, ast.Unary):
        if expr.op in ("++", "--"):
            value = _as_number(run(expr.operand), expr.op, bit)
            value = arith.binary("+" if expr.op == "++" else "-", value, 1)
            _assign_to(expr.operand, value, env, exec_)
            return value
        operand = run(expr.operand)
        if expr.op == "!":
            if not isinstance(operand, bool):
                raise RunError("'!' needs a boolean operand", bit)
            return not operand
        return arith.unary(expr.op, _as_number(operand, expr.op, bit))
    if isinstance(expr, ast.Postfix):
        value = _as_number(run(expr.operand), expr.op, bit)
        _assign_to(expr.operand,
                   arith.binary("+" if expr.op == "++" else "-", value, 1), env, exec_)
        return value
    if isinstance(expr, ast.Binary):
        if expr.op == "&&":
            left = run(expr.left)
            _need_bool(left, "&&", bit)
            if not left:
                return False
            right = run(expr.right)
            _need_bool(right, "&&", bit)
            return right
        if expr.op == "||":
            left = run(expr.left)
            _need_bool(left, "||", bit)
            if left:
                return True
            right = run(expr.right)
            _need_bool(right, "||", bit)
            return right
        left = run(expr.left)
        right = run(expr.right)
        if isinstance(left, Incomplete) or isinstance(right, Incomplete):
            raise RunError("value incomplete near end of stream", bit)
        if expr.op in ("==", "!=") and isinstance(left, bool) and isinstance(right, bool):
            return left == right if expr.op == "==" else left != right
        left = _as_number(left, expr.op, bit)
        right = _as_number(right, expr.op, bit)
        try:
            return arith.binary(expr.op, left, right)
        except ZeroDivisionError:
            raise RunError("division by zero", bit) from None
    if isinstance(expr, ast.Assign):
        value = run(expr.value)
        if expr.op != "=":
            current = _as_number(run(expr.target), expr.op, bit)
            try:
                value = arith.binary(expr.op[:-1], current,
                                     _as_number(value, expr.op, bit))
            except ZeroDivisionError:
                raise RunError("division by zero", bit) from None
        _assign_to(expr.target, value, env, exec_)
        return value
    if isinstance(expr, ast.Ternary):
        cond = run(expr.cond)
        _need_bool(cond, "?:", bit)
        return run(expr.then) if cond else run(expr.other)
    if isinstance(expr, ast.Index):
        container = run(expr.base)
        index = _as_number(run(expr.index), "[]", bit)
        if not isinstance(container, ArrayValue):
            raise RunError("only arrays can be indexed", bit)
        return container.get(index, bit)
    if isinstance(expr, ast.Member):
        base = run(expr.base)
        if not isinstance(base, ObjectValue):
            raise RunError("member access needs an object", bit)
        if expr.name not in base.fields:
            raise RunError(
                f"'{expr.name}' of '{base.class_name}' referenced before it was parsed",
                bit,
            )
        return base.fields[expr.name]
    if isinstance(expr, ast.LengthOf):
        return _lengthof(expr.target, env, exec_)
    if isinstance(expr, ast.IsIdOf):
        value = run(expr.value)
        if isinstance(value, Incomplete):
            return 0
        if env.spec is None:
            raise RunError("isidof() needs a compiled description", bit)
        return isidof(env.spec, expr.class_name, _as_number(value, "isidof", bit))
    raise TypeError(f"unhandled expression {expr!r}")


def _need_bool(value: Any, op: str, bit: int) -> None:
    if not isinstance(value, bool):
        raise RunError(f"'{op}' needs boolean operands", bit)


def _as_number(value: Any, op: str, bit: int):
    if isinstance(value, Incomplete):
        raise RunError("value incomplete near end of stream", bit)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RunError(f"'{op}' needs a numeric operand, got {value!r}", bit)
    return value


def _assign_to(target: ast.Expr, value: Any, env: Env, exec_: Optional[_Exec]) -> None:
    bit = env.bit_of()
    if isinstance(target, ast.Name):
        env.set(target.ident, value)
        return
    if isinstance(target, ast.Index):
        container = eval_expr(target.base, env, exec_)
        index = _as_number(eval_expr(target.index, env, exec_), "[]", bit)
        if not isinstance(container, ArrayValue):
            raise RunError("only arrays can be indexed", bit)
        container.elements[index] = value
        return
    if isinstance(target, ast.Member):
        base = eval_expr(target.base, env, exec_)
        if not isinstance(base, ObjectValue):
            raise RunError("member access needs an object", bit)
        base.fields[target.name] = value
        return
    raise RunError("invalid assignment target", bit)


def _lengthof(target: ast.Expr, env: Env, exec_: Optional[_Exec]) -> int:
    bit = env.bit_of()
    if isinstance(target, ast.Name):
        bits = env.obj.member_bits(target.ident)
        if bits is None:
            raise RunError(f"lengthof: '{target.ident}' was never parsed on this path", bit)
        return bits
    if isinstance(target, ast.Index):
        container = eval_expr(target.base, env, exec_)
        index = _as_number(eval_expr(target.index, env, exec_), "[]", bit)
        if not isinstance(container, ArrayValue):
            raise RunError("lengthof: not an array element", bit)
        if index not in container.elem_bits:
            raise RunError(f"lengthof: element {index} was never parsed on this path", bit)
        return container.elem_bits[index]
    if isinstance(target, ast.Member):
        base = eval_expr(target.base, env, exec_)
        if not isinstance(base, ObjectValue):
            raise RunError("lengthof: member access needs an object", bit)
        bits = base.member_bits(target.name)
        if bits is None:
            raise RunError(f"lengthof: '{target.name}' was never parsed on this path", bit)
        return bits
    raise RunError("lengthof needs a variable reference", bit)


# --------------------------------------------------------------------------
# Public operations


def isidof(spec: SyntaxSpec, class_name: str, value: int) -> int:
    """1 when the value is among the ids of the class's dispatchable family."""
    for low, high, _cls in spec.family_entries(class_name):
        if low <= value <= high:
            return 1
    return 0


def dispatch_id(spec: SyntaxSpec, base_class: str, cursor: bitio.BitCursorBase
                ) -> Optional[str]:
    """Peek the id field (honoring its alignment) and name the concrete class;
    None when nothing matches.  Never consumes bits."""
    family = spec.family_entries(base_class)
    if not family:
        return None
    eff = spec.effective_id(base_class)
    pad = (-cursor.tell()) % eff.aligned_bits if eff.aligned_bits else 0
    raw, available = cursor.peek_bits(eff.size_bits, offset=pad)
    if available < eff.size_bits:
        return None
    value = raw
    if eff.type.signed and value >= 1 << (eff.size_bits - 1):
        value -= 1 << eff.size_bits
    for low, high, cls in family:
        if low <= value <= high:
            return cls
    return None


def _prepare(spec: SyntaxSpec, class_name: str, mode: str) -> None:
    if class_name not in spec.classes:
        raise RunError(f"unknown class '{class_name}'", 0)
    info = spec.classes[class_name]
    if not info.is_parsable:
        raise RunError(f"class '{class_name}' is not parsable", 0)
    if info.abstract and not spec.family_entries(class_name):
        raise RunError(f"abstract class '{class_name}' cannot be instantiated", 0)


def parse_object(
    spec: SyntaxSpec,
    class_name: str,
    cursor: bitio.BitCursorBase,
    params: tuple = (),
    hook: Optional[ErrorHook] = None,
    events: Optional[list[TraceEvent]] = None,
) -> tuple[ObjectValue, list[TraceEvent]]:
    """Parse one object of `class_name` from the cursor.

    Returns the value tree and the trace events; on failure the positioned
    ParseFailure propagates and `events` (if supplied) holds the partial trace.
    """
    _prepare(spec, class_name, "get")
    if events is None:
        events = []
    ex = _Exec(spec, "get", cursor, hook or ErrorHook(), events)
    info = spec.classes[class_name]
    ex.member_alignments(None, info, Env(spec, ObjectValue(class_name), cursor.tell), 0)
    concrete = ex.choose_class(class_name, 0, None)
    obj = ex.run_object(concrete, list(params), None, 0, emit_frame=False)
    return obj, events


def generate_object(
    spec: SyntaxSpec,
    class_name: str,
    document: dict,
    cursor: bitio.BitCursorBase,
    params: tuple = (),
    hook: Optional[ErrorHook] = None,
    events: Optional[list[TraceEvent]] = None,
) -> tuple[int, list[TraceEvent]]:
    """Generate a bitstream for one object from a value document.

    Returns (bits written, trace events).  The document supplies every free
    parsable field the control path needs; expected-value and look-ahead
    fields may be omitted.
    """
    _prepare(spec, class_name, "put")
    if events is None:
        events = []
    ex = _Exec(spec, "put", cursor, hook or ErrorHook(), events)
    info = spec.classes[class_name]
    start = cursor.tell()
    ex.member_alignments(None, info, Env(spec, ObjectValue(class_name), cursor.tell), 0)
    concrete = ex.choose_class(class_name, 0, document)
    ex.run_object(concrete, list(params), document, 0, emit_frame=False)
    return cursor.tell() - start, events
