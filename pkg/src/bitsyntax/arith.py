"""C-style evaluation helpers over the 64-bit two's-complement integer model."""

from __future__ import annotations

_WRAP = 1 << 64
_HALF = 1 << 63


def wrap64(value: int) -> int:
    return (value + _HALF) % _WRAP - _HALF


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def trunc_mod(a: int, b: int) -> int:
    return a - trunc_div(a, b) * b


def binary(op: str, left, right):
    """Apply a binary operator with C semantics.

    Integer operands stay in the 64-bit model; a float operand promotes the
    operation to floating point.  Comparisons yield bool.  Raises
    ZeroDivisionError for integer / and % by zero.
    """
    if op == "==":
        return left == right
    if op == "!=":
        return left != right
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == ">=":
        return left >= right

    floaty = isinstance(left, float) or isinstance(right, float)
    if op == "+":
        return left + right if floaty else wrap64(left + right)
    if op == "-":
        return left - right if floaty else wrap64(left - right)
    if op == "*":
        return left * right if floaty else wrap64(left * right)
    if op == "/":
        if floaty:
            return left / right
        if right == 0:
            raise ZeroDivisionError
        return wrap64(trunc_div(left, right))
    if op == "%":
        if right == 0:
            raise ZeroDivisionError
        return wrap64(trunc_mod(left, right))
    if op == "<<":
        return wrap64(left << (right & 63))
    if op == ">>":
        return left >> (right & 63)  # arithmetic shift; Python keeps the sign
    if op == "&":
        return wrap64(left & right)
    if op == "|":
        return wrap64(left | right)
    if op == "^":
        return wrap64(left ^ right)
    raise ValueError(f"unknown operator {op!r}")


def unary(op: str, value):
    if op == "+":
        return value
    if op == "-":
        return -value if isinstance(value, float) else wrap64(-value)
    if op == "~":
        return wrap64(~value)
    if op == "!":
        return not value
    raise ValueError(f"unknown operator {op!r}")
