"""Canonical text rendering of an Ast.

Guarantee: parse_unit(tokenize(pretty(ast))) is structurally equal to ast.
Verbatim blocks are re-emitted byte-identical; pragmas keep their positions.
"""

from __future__ import annotations

from . import ast

_INDENT = "  "

# Rendering precedence levels; higher binds tighter.
_PREC_ASSIGN = 0
_PREC_TERNARY = 1
_PREC_BINARY_BASE = 2  # + _BINARY_PRECEDENCE offsets (1..10) => 3..12
_PREC_UNARY = 13
_PREC_POSTFIX = 14
_PREC_PRIMARY = 15

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

_VERBATIM_TAGS = {"class-scope": "", "get": "g", "put": "p", "both": "*"}

_CHAR_ESCAPES = {0: "\\0", 9: "\\t", 10: "\\n", 13: "\\r", 39: "\\'", 92: "\\\\"}


def _escape_string(text: str) -> str:
    out = []
    for ch in text:
        code = ord(ch)
        if ch == '"':
            out.append('\\"')
        elif code in _CHAR_ESCAPES and code != 39:
            out.append(_CHAR_ESCAPES[code])
        else:
            out.append(ch)
    return "".join(out)


def render_int(lit: ast.IntLit) -> str:
    if lit.bit_length is None:
        return str(lit.value)
    if lit.bit_length % 4 == 0:
        return f"0x{lit.value:0{lit.bit_length // 4}X}"
    return f"0b{lit.value:0{lit.bit_length}b}"


def render_type(t: ast.TypeSpec) -> str:
    if t.kind == "class":
        return t.class_name or "<class>"
    parts = []
    if t.endian == "little":
        parts.append("little")
    if t.kind in ("int",) and not t.signed:
        parts.append("unsigned")
    if t.kind in ("char", "bit") and t.signed:
        parts.append("signed")
    parts.append(t.kind)
    return " ".join(parts)


def render_expr(expr: ast.Expr, parent_prec: int = 0) -> str:
    prec, text = _expr_parts(expr)
    if prec < parent_prec:
        return f"({text})"
    return text


def _expr_parts(expr: ast.Expr) -> tuple[int, str]:
    if isinstance(expr, ast.IntLit):
        return _PREC_PRIMARY, render_int(expr)
    if isinstance(expr, ast.FloatLit):
        return _PREC_PRIMARY, repr(expr.value)
    if isinstance(expr, ast.CharLit):
        if expr.value in _CHAR_ESCAPES:
            return _PREC_PRIMARY, f"'{_CHAR_ESCAPES[expr.value]}'"
        if 32 <= expr.value < 127:
            return _PREC_PRIMARY, f"'{chr(expr.value)}'"
        return _PREC_PRIMARY, f"'\\x{expr.value:02x}'"
    if isinstance(expr, ast.StringLit):
        return _PREC_PRIMARY, f'"{_escape_string(expr.text)}"'
    if isinstance(expr, ast.BoolLit):
        return _PREC_PRIMARY, "true" if expr.value else "false"
    if isinstance(expr, ast.Name):
        return _PREC_PRIMARY, expr.ident
    if isinstance(expr, ast.Unary):
        inner = render_expr(expr.operand, _PREC_UNARY)
        # Avoid gluing '- -x' into '--x'.
        sep = " " if expr.op[-1] == inner[0] and expr.op[-1] in "+-" else ""
        return _PREC_UNARY, f"{expr.op}{sep}{inner}"
    if isinstance(expr, ast.Postfix):
        return _PREC_POSTFIX, f"{render_expr(expr.operand, _PREC_POSTFIX)}{expr.op}"
    if isinstance(expr, ast.Binary):
        prec = _PREC_BINARY_BASE + _BINARY_PRECEDENCE[expr.op]
        left = render_expr(expr.left, prec)
        right = render_expr(expr.right, prec + 1)
        return prec, f"{left} {expr.op} {right}"
    if isinstance(expr, ast.Assign):
        target = render_expr(expr.target, _PREC_POSTFIX)
        value = render_expr(expr.value, _PREC_ASSIGN)
        return _PREC_ASSIGN, f"{target} {expr.op} {value}"
    if isinstance(expr, ast.Ternary):
        cond = render_expr(expr.cond, _PREC_TERNARY + 1)
        then = render_expr(expr.then, _PREC_ASSIGN)
        other = render_expr(expr.other, _PREC_TERNARY)
        return _PREC_TERNARY, f"{cond} ? {then} : {other}"
    if isinstance(expr, ast.Index):
        return _PREC_POSTFIX, f"{render_expr(expr.base, _PREC_POSTFIX)}[{render_expr(expr.index)}]"
    if isinstance(expr, ast.Member):
        return _PREC_POSTFIX, f"{render_expr(expr.base, _PREC_POSTFIX)}.{expr.name}"
    if isinstance(expr, ast.LengthOf):
        return _PREC_PRIMARY, f"lengthof({render_expr(expr.target)})"
    if isinstance(expr, ast.IsIdOf):
        return _PREC_PRIMARY, f"isidof({expr.class_name}, {render_expr(expr.value)})"
    raise TypeError(f"cannot render expression {expr!r}")


def _render_init(init: ast.Expr | ast.BraceList) -> str:
    if isinstance(init, ast.BraceList):
        return "{" + ", ".join(render_expr(e) for e in init.items) + "}"
    return render_expr(init)


def render_var_decl(decl: ast.VarDecl) -> str:
    parts = []
    if decl.aligned is not None:
        parts.append(f"aligned({render_expr(decl.aligned)})")
    if decl.const:
        parts.append("const")
    head = render_type(decl.type)
    if decl.parse_size is not None:
        head += f"({render_expr(decl.parse_size)})"
    if decl.lookahead:
        head += "*"
    parts.append(head)
    name = decl.name
    for dim in decl.dims:
        if dim.partial:
            name += f"[[{render_expr(dim.size)}]]"
        else:
            name += f"[{render_expr(dim.size)}]"
    if decl.actuals:
        name += "(" + ", ".join(render_expr(e) for e in decl.actuals) + ")"
    parts.append(name)
    text = " ".join(parts)
    if decl.init is not None:
        text += f" = {_render_init(decl.init)}"
    return text + ";"


def render_pragma(stmt: ast.PragmaStmt) -> str:
    parts = []
    for s in stmt.settings:
        if s.value is None:
            parts.append(s.name)
        elif s.quoted:
            parts.append(f'{s.name}="{s.value}"')
        else:
            parts.append(f"{s.name}={s.value}")
    return "%pragma " + ", ".join(parts)


def render_verbatim(stmt: ast.VerbatimStmt) -> str:
    tag = _VERBATIM_TAGS[stmt.placement]
    lang = f".{stmt.language}" if stmt.language else ""
    return f"%{tag}{lang}{{{stmt.text}%{tag}{lang}}}"


def _render_stmt(stmt: ast.Stmt, depth: int) -> list[str]:
    pad = _INDENT * depth
    if isinstance(stmt, ast.VarDecl):
        return [pad + render_var_decl(stmt)]
    if isinstance(stmt, ast.ExprStmt):
        return [pad + render_expr(stmt.expr) + ";"]
    if isinstance(stmt, ast.Block):
        lines = [pad + "{"]
        for s in stmt.stmts:
            lines.extend(_render_stmt(s, depth + 1))
        lines.append(pad + "}")
        return lines
    if isinstance(stmt, ast.If):
        lines = [pad + f"if ({render_expr(stmt.cond)})"]
        lines.extend(_render_nested(stmt.then, depth))
        if stmt.other is not None:
            lines.append(pad + "else")
            lines.extend(_render_nested(stmt.other, depth))
        return lines
    if isinstance(stmt, ast.Switch):
        lines = [pad + f"switch ({render_expr(stmt.subject)}) {{"]
        for arm in stmt.arms:
            if arm.label is None:
                lines.append(pad + _INDENT + "default:")
            else:
                lines.append(pad + _INDENT + f"case {render_expr(arm.label)}:")
            for s in arm.stmts:
                lines.extend(_render_stmt(s, depth + 2))
        lines.append(pad + "}")
        return lines
    if isinstance(stmt, ast.For):
        init = render_expr(stmt.init) if stmt.init is not None else ""
        cond = render_expr(stmt.cond) if stmt.cond is not None else ""
        step = render_expr(stmt.step) if stmt.step is not None else ""
        lines = [pad + f"for ({init}; {cond}; {step})"]
        lines.extend(_render_nested(stmt.body, depth))
        return lines
    if isinstance(stmt, ast.While):
        lines = [pad + f"while ({render_expr(stmt.cond)})"]
        lines.extend(_render_nested(stmt.body, depth))
        return lines
    if isinstance(stmt, ast.DoWhile):
        lines = [pad + "do"]
        lines.extend(_render_nested(stmt.body, depth))
        lines.append(pad + f"while ({render_expr(stmt.cond)});")
        return lines
    if isinstance(stmt, ast.Break):
        return [pad + "break;"]
    if isinstance(stmt, ast.Continue):
        return [pad + "continue;"]
    if isinstance(stmt, ast.PragmaStmt):
        return [pad + render_pragma(stmt)]
    if isinstance(stmt, ast.VerbatimStmt):
        return [pad + render_verbatim(stmt)]
    raise TypeError(f"cannot render statement {stmt!r}")


def _render_nested(stmt: ast.Stmt, depth: int) -> list[str]:
    if isinstance(stmt, ast.Block):
        return _render_stmt(stmt, depth)
    return _render_stmt(stmt, depth + 1)


def render_class(decl: ast.ClassDecl) -> list[str]:
    head = ""
    if decl.abstract:
        head += "abstract "
    if decl.aligned is not None:
        head += f"aligned({render_expr(decl.aligned)}) "
    head += f"class {decl.name}"
    if decl.params:
        rendered = []
        for p in decl.params:
            rendered.append(render_type(p.type) + " " + p.name + "[]" * p.dims)
        head += "(" + ", ".join(rendered) + ")"
    if decl.parent:
        head += f" extends {decl.parent}"
    if decl.id_decl is not None:
        d = decl.id_decl
        head += " : "
        if d.aligned is not None:
            head += f"aligned({render_expr(d.aligned)}) "
        head += f"{render_type(d.type)}({render_expr(d.size)}) {d.name} = {render_expr(d.value)}"
        if d.high is not None:
            head += f" .. {render_expr(d.high)}"
    lines = [head + " {"]
    for s in decl.body:
        lines.extend(_render_stmt(s, 1))
    lines.append("};")
    return lines


def render_map(decl: ast.MapDecl) -> list[str]:
    out = render_type(decl.output_type)
    for d in decl.output_dims:
        out += f"[{render_expr(d)}]"
    lines = [f"map {decl.name}({out}) {{"]
    for i, entry in enumerate(decl.entries):
        if isinstance(entry.value, ast.ExtensionSpec):
            value = f"{render_type(entry.value.type)}({render_expr(entry.value.size)})"
        elif isinstance(entry.value, ast.BraceList):
            value = "{" + ", ".join(render_expr(e) for e in entry.value.items) + "}"
        else:
            value = render_expr(entry.value)
        comma = "," if i < len(decl.entries) - 1 else ""
        lines.append(f"{_INDENT}{render_int(entry.code)}, {value}{comma}")
    lines.append("};")
    return lines


def pretty(unit: ast.Ast) -> str:
    """Render a whole translation unit as canonical source text."""
    lines: list[str] = []
    for item in unit.items:
        if isinstance(item, ast.VarDecl):
            lines.append(render_var_decl(item))
        elif isinstance(item, ast.ClassDecl):
            lines.extend(render_class(item))
        elif isinstance(item, ast.MapDecl):
            lines.extend(render_map(item))
        elif isinstance(item, ast.PragmaStmt):
            lines.append(render_pragma(item))
        elif isinstance(item, ast.VerbatimStmt):
            lines.append(render_verbatim(item))
        elif isinstance(item, ast.IncludeItem):
            lines.append(f'%{item.kind} "{item.path}"')
        else:
            raise TypeError(f"cannot render item {item!r}")
        lines.append("")
    return "\n".join(lines)
