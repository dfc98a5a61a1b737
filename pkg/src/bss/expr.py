"""Arithmetic expressions over tape cells and machine parameters.

Compute nodes assign rational expressions to cells; branch nodes test a
polynomial expression.  The same tree is evaluated concretely by the
interpreter and symbolically by the path enumerator.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Union

from bss.scalar import (
    AlgebraicNumber, DivisionByZero, IndeterminateOperand, Scalar, Sign,
    render, scalar_sign,
)


@dataclass(frozen=True)
class Const:
    value: Scalar


@dataclass(frozen=True)
class Cell:
    index: int


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Const, Cell, Param, BinOp, Neg, Pow]


def walk(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, BinOp):
            stack.extend((node.right, node.left))
        elif isinstance(node, Neg):
            stack.append(node.operand)
        elif isinstance(node, Pow):
            stack.append(node.base)


def cells_of(e: Expr) -> set[int]:
    return {n.index for n in walk(e) if isinstance(n, Cell)}


def params_of(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Param)}


def is_polynomial(e: Expr) -> bool:
    """No division by anything that depends on the tape."""
    return all(not (isinstance(n, BinOp) and n.op == "/" and cells_of(n.right)) for n in walk(e))


def has_division(e: Expr) -> bool:
    return any(isinstance(n, BinOp) and n.op == "/" for n in walk(e))


def exact_div(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(b, (int, Fraction)):
        if b == 0:
            raise DivisionByZero("division by zero")
        if isinstance(a, int) and isinstance(b, int):
            return Fraction(a, b)
        return a / b
    s = scalar_sign(b)
    if s is Sign.ZERO:
        raise DivisionByZero("division by zero")
    if s is Sign.INDETERMINATE:
        raise IndeterminateOperand("stream divisor not certified nonzero")
    return a / b


Getter = Callable[[int], Scalar]


def compile_expr(e: Expr, params: Mapping[str, Scalar]) -> Callable[[Getter], Scalar]:
    """Closure evaluating ``e`` against a cell getter, parameters bound now."""
    if isinstance(e, Const):
        v = e.value
        return lambda get: v
    if isinstance(e, Cell):
        i = e.index
        return lambda get: get(i)
    if isinstance(e, Param):
        v = params[e.name]
        return lambda get: v
    if isinstance(e, Neg):
        f = compile_expr(e.operand, params)
        return lambda get: -f(get)
    if isinstance(e, Pow):
        f, n = compile_expr(e.base, params), e.exponent
        return lambda get: f(get) ** n
    lf, rf = compile_expr(e.left, params), compile_expr(e.right, params)
    if e.op == "+":
        return lambda get: lf(get) + rf(get)
    if e.op == "-":
        return lambda get: lf(get) - rf(get)
    if e.op == "*":
        return lambda get: lf(get) * rf(get)
    if e.op == "/":
        return lambda get: exact_div(lf(get), rf(get))
    raise ValueError(f"unknown operator {e.op!r}")


def evaluate(e: Expr, get: Getter, params: Mapping[str, Scalar]) -> Scalar:
    return compile_expr(e, params)(get)


# -- printing ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def cell_name(i: int) -> str:
    return f"x{i}"


def literal(v: Scalar) -> str:
    if isinstance(v, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, AlgebraicNumber):
        return v.literal()
    return render(v)


def to_source(e: Expr, prec: int = 0) -> str:
    """Infix rendering that parses back to the same tree.

    Binary operators are spaced (``a / b``) while rational literals are not
    (``5/6``); the parser relies on that distinction.
    """
    if isinstance(e, Const):
        s = literal(e.value)
        negative = isinstance(e.value, (int, Fraction)) and e.value < 0
        return f"({s})" if negative or "/" in s and prec > 0 else s
    if isinstance(e, Cell):
        return cell_name(e.index)
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        inner = to_source(e.operand, 3)
        if isinstance(e.operand, Const) or inner[:1].isdigit():
            # "-3" would read back as the literal -3
            inner = f"({to_source(e.operand)})"
        return f"(-{inner})" if prec > 3 else f"-{inner}"
    if isinstance(e, Pow):
        s = f"{to_source(e.base, 5)}^{e.exponent}"
        return f"({s})" if prec > 4 else s
    p = _PREC[e.op]
    # left-associative: the right operand needs parentheses at equal precedence
    s = f"{to_source(e.left, p)} {e.op} {to_source(e.right, p + 1)}"
    return f"({s})" if p < prec else s
