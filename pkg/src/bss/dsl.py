"""Text format for machines.

::

    machine newton over rational
    param eps = 1/1000
    node start: input -> iter
    node iter: compute x1 := (x1 + 2 / x1) / 2 -> test
    node test: branch eps - (x1^2 - 2) * (x1^2 - 2) >= 0 ? done : iter
    node done: output

Cells are ``x0``, ``x1``, ``x-1``; rational literals are written without
spaces (``5/6``) while the division operator is spaced or at least not
flanked by two digit runs.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from bss import _upoly as up
from bss.expr import BinOp, Cell, Const, Expr, Neg, Param, Pow, cell_name, literal, to_source
from bss.machine import (
    BranchNode, ComputeNode, InputNode, Machine, OracleNode, OutputNode, ShiftNode, Violation,
    validate,
)
from bss.scalar import Backend, Scalar, StreamReal, parse_scalar


class ParseError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        self.line, self.col, self.message = line, col, message
        super().__init__(f"{line}:{col}: {message}")


class ValidationError(ValueError):
    """Structural violations, each paired with the line and column of its node."""

    def __init__(self, items: list[tuple[int, int, Violation]]):
        self.items = items
        super().__init__("; ".join(f"{ln}:{col}: {v}" for ln, col, v in items))

    @property
    def violations(self) -> list[Violation]:
        return [v for _, _, v in self.items]


# -- tokens -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<alg>alg\()
  | (?P<num>\d+/\d+|\d+)
  | (?P<cell>x-?\d+\b)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<op>:=|->|>=|[-+*/^()\[\],:?=])
""", re.VERBOSE)

_UNI_TOKEN = re.compile(r"(?P<ws>\s+)|(?P<num>\d+/\d+|\d+)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*/^()])")


@dataclass
class Tok:
    kind: str
    text: str
    col: int  # 1-based


def _tokenize(text: str, line: int, pattern=_TOKEN, col0: int = 1) -> list[Tok]:
    out, i = [], 0
    while i < len(text):
        m = pattern.match(text, i)
        if not m:
            raise ParseError(line, col0 + i, f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        if kind == "alg":
            depth, j = 1, m.end()
            while j < len(text) and depth:
                depth += {"(": 1, ")": -1}.get(text[j], 0)
                j += 1
            if depth:
                raise ParseError(line, col0 + i, "unterminated alg(...) literal")
            out.append(Tok("alg", text[i:j], col0 + i))
            i = j
            continue
        if kind != "ws":
            out.append(Tok(kind, m.group(), col0 + i))
        i = m.end()
    return out


class _Cursor:
    def __init__(self, toks: list[Tok], line: int, end_col: int):
        self.toks, self.i, self.line, self.end_col = toks, 0, line, end_col

    def peek(self) -> Optional[Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def col(self) -> int:
        t = self.peek()
        return t.col if t else self.end_col

    def error(self, message: str) -> ParseError:
        return ParseError(self.line, self.col(), message)

    def next(self) -> Tok:
        t = self.peek()
        if t is None:
            raise self.error("unexpected end of line")
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.text == text and t.kind in ("op", "ident"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        t = self.peek()
        if t is None or t.text != text:
            found = repr(t.text) if t else "end of line"
            raise self.error(f"expected {text!r}, found {found}")
        self.i += 1
        return t

    def ident(self, what: str) -> str:
        t = self.peek()
        if t is None or t.kind != "ident":
            raise self.error(f"expected {what}")
        self.i += 1
        return t.text

    def cell(self) -> int:
        t = self.peek()
        if t is None or t.kind != "cell":
            raise self.error("expected a cell such as x1")
        self.i += 1
        return int(t.text[1:])

    def done(self) -> None:
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().text!r}")


# -- expressions ----------------------------------------------------------------


def _number(text: str) -> Scalar:
    if "/" in text:
        n, d = text.split("/")
        if int(d) == 0:
            raise ZeroDivisionError
        return Fraction(int(n), int(d))
    return int(text)


def _expr(c: _Cursor) -> Expr:
    left = _term(c)
    while True:
        t = c.peek()
        if t is not None and t.kind == "op" and t.text in "+-" and len(t.text) == 1:
            c.next()
            left = BinOp(t.text, left, _term(c))
        else:
            return left


def _term(c: _Cursor) -> Expr:
    left = _unary(c)
    while True:
        t = c.peek()
        if t is not None and t.kind == "op" and t.text in ("*", "/"):
            c.next()
            left = BinOp(t.text, left, _unary(c))
        else:
            return left


def _unary(c: _Cursor) -> Expr:
    t = c.peek()
    if t is not None and t.kind == "op" and t.text == "-":
        c.next()
        nxt = c.peek()
        if nxt is not None and nxt.kind == "num" and nxt.col == t.col + 1:
            # "-3" is a literal; "-(3)" and "- 3" negate
            c.next()
            return _power(c, Const(-_literal(c, nxt)))
        return Neg(_unary(c))
    return _power(c, _atom(c))


def _power(c: _Cursor, base: Expr) -> Expr:
    if c.accept("^"):
        t = c.peek()
        if t is None or t.kind != "num" or "/" in t.text:
            raise c.error("exponent must be a natural number")
        c.next()
        return Pow(base, int(t.text))
    return base


def _literal(c: _Cursor, t: Tok) -> Scalar:
    try:
        return _number(t.text)
    except ZeroDivisionError:
        raise ParseError(c.line, t.col, f"zero denominator in {t.text!r}") from None


def _atom(c: _Cursor) -> Expr:
    t = c.next()
    if t.kind == "num":
        return Const(_literal(c, t))
    if t.kind == "cell":
        return Cell(int(t.text[1:]))
    if t.kind == "ident":
        return Param(t.text)
    if t.kind == "alg":
        try:
            return Const(parse_scalar(t.text))
        except (ValueError, ArithmeticError) as exc:
            raise ParseError(c.line, t.col, f"bad algebraic literal: {exc}") from None
    if t.text == "(":
        e = _expr(c)
        c.expect(")")
        return e
    raise ParseError(c.line, t.col, f"unexpected {t.text!r} in expression")


def parse_expr(text: str, line: int = 1) -> Expr:
    c = _Cursor(_tokenize(text, line), line, len(text) + 1)
    e = _expr(c)
    c.done()
    return e


def parse_univariate(text: str, var: str = "x") -> list:
    """Coefficient list (low degree first) of a polynomial in one variable."""
    c = _Cursor(_tokenize(text, 1, _UNI_TOKEN), 1, len(text) + 1)
    e = _expr(c)
    c.done()

    def poly(e: Expr) -> list:
        if isinstance(e, Const):
            return [e.value]
        if isinstance(e, Param):
            if e.name != var:
                raise ParseError(1, 1, f"unknown variable {e.name!r}")
            return [0, 1]
        if isinstance(e, Neg):
            return [-a for a in poly(e.operand)]
        if isinstance(e, Pow):
            acc, base = [1], poly(e.base)
            for _ in range(e.exponent):
                acc = _mul(acc, base)
            return acc
        a, b = poly(e.left), poly(e.right)
        if e.op == "+":
            return _add(a, b)
        if e.op == "-":
            return _add(a, [-x for x in b])
        if e.op == "*":
            return _mul(a, b)
        if len(up.trim(b)) != 1:
            raise ParseError(1, 1, "division by a non-constant polynomial")
        return [Fraction(x) / b[0] for x in a]

    return up.trim(poly(e))


def _add(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# -- machines -------------------------------------------------------------------


def _cell_list(c: _Cursor) -> tuple[int, ...]:
    c.expect("[")
    cells: list[int] = []
    if not c.accept("]"):
        cells.append(c.cell())
        while c.accept(","):
            cells.append(c.cell())
        c.expect("]")
    return tuple(cells)


def _arrow(c: _Cursor) -> str:
    c.expect("->")
    return c.ident("a node id")


def _node(c: _Cursor, equational: bool):
    kind = c.ident("a node kind")
    if kind == "input":
        cells = _cell_list(c) if c.peek() and c.peek().text == "[" else None
        return InputNode(_arrow(c), cells)
    if kind == "compute":
        assigns = []
        while True:
            target = c.cell()
            c.expect(":=")
            assigns.append((target, _expr(c)))
            if not c.accept(","):
                break
        targets = [t for t, _ in assigns]
        if len(set(targets)) != len(targets):
            raise c.error("a compute node assigns each cell at most once")
        return ComputeNode(tuple(assigns), _arrow(c))
    if kind == "branch":
        e = _expr(c)
        rel_tok = c.peek()
        if rel_tok is None or rel_tok.text not in (">=", "="):
            raise c.error("expected '>= 0' or '= 0'")
        c.next()
        if equational and rel_tok.text == ">=":
            raise ParseError(c.line, rel_tok.col, "equational machines branch on '= 0' only")
        zero = c.next()
        if zero.text != "0":
            raise ParseError(c.line, zero.col, "branch tests compare against 0")
        c.expect("?")
        yes = c.ident("a node id")
        c.expect(":")
        no = c.ident("a node id")
        return BranchNode(e, yes, no, rel_tok.text)
    if kind == "shift":
        d = c.ident("left or right")
        if d not in ("left", "right"):
            raise c.error("expected left or right")
        return ShiftNode(d, _arrow(c))
    if kind == "output":
        cells = _cell_list(c) if c.peek() is not None else None
        return OutputNode(cells)
    if kind == "oracle":
        query = _cell_list(c)
        c.expect("into")
        target = c.cell()
        return OracleNode(query, target, _arrow(c))
    raise ParseError(c.line, c.toks[c.i - 1].col, f"unknown node kind {kind!r}")


def parse_machine_dsl(text: str, streams: Mapping[str, StreamReal] | None = None,
                      *, check: bool = True) -> Machine:
    """Parse machine source; streams referenced as ``stream(NAME)`` come from ``streams``."""
    streams = dict(streams or {})
    name: Optional[str] = None
    backend = Backend.RATIONAL
    equational = False
    params: dict[str, Scalar] = {}
    nodes: dict = {}
    where: dict[str, tuple[int, int]] = {}
    header = (1, 1)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        c = _Cursor(_tokenize(body, lineno), lineno, len(body.rstrip()) + 1)
        head = c.peek()
        if head is None:
            continue
        kw = c.ident("'machine', 'param', or 'node'")
        if kw == "machine":
            if name is not None:
                raise ParseError(lineno, head.col, "duplicate machine header")
            name = c.ident("a machine name")
            c.expect("over")
            b = c.ident("a backend")
            try:
                backend = Backend.parse(b)
            except ValueError as exc:
                raise ParseError(lineno, c.toks[c.i - 1].col, str(exc)) from None
            equational = c.accept("equational")
            c.done()
            header = (lineno, head.col)
            continue
        if name is None:
            raise ParseError(lineno, head.col, "expected 'machine NAME over BACKEND' first")
        if kw == "param":
            pname_tok = c.peek()
            pname = c.ident("a parameter name")
            if pname in params:
                raise ParseError(lineno, pname_tok.col, f"duplicate parameter {pname!r}")
            c.expect("=")
            params[pname] = _param_value(c, streams)
            c.done()
        elif kw == "node":
            id_tok = c.peek()
            nid = c.ident("a node id")
            if nid in nodes:
                raise ParseError(lineno, id_tok.col, f"duplicate node {nid!r}")
            c.expect(":")
            nodes[nid] = _node(c, equational)
            c.done()
            where[nid] = (lineno, id_tok.col)
        else:
            raise ParseError(lineno, head.col, f"unknown declaration {kw!r}")
    if name is None:
        raise ParseError(1, 1, "empty machine description")
    m = Machine(name, backend, nodes, params, equational)
    if check:
        problems = validate(m)
        if problems:
            raise ValidationError([(*where.get(v.node, header), v) for v in problems])
    return m


def _param_value(c: _Cursor, streams: Mapping[str, StreamReal]) -> Scalar:
    t = c.peek()
    if t is not None and t.kind == "ident" and t.text == "stream":
        c.next()
        c.expect("(")
        ref_tok = c.peek()
        ref = c.ident("a stream name")
        c.expect(")")
        if ref not in streams:
            raise ParseError(c.line, ref_tok.col, f"stream {ref!r} is not bound")
        return streams[ref]
    e = _expr(c)
    value = _const_value(e)
    if value is None:
        raise ParseError(c.line, t.col if t else c.col(), "parameter values are literals")
    return value


def _const_value(e: Expr) -> Optional[Scalar]:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg):
        v = _const_value(e.operand)
        return None if v is None else -v
    return None


# -- printing -------------------------------------------------------------------


def _cells(cells) -> str:
    return "[" + ", ".join(cell_name(i) for i in cells) + "]"


def format_node(node) -> str:
    if isinstance(node, InputNode):
        cells = f" {_cells(node.cells)}" if node.cells is not None else ""
        return f"input{cells} -> {node.next}"
    if isinstance(node, ComputeNode):
        body = ", ".join(f"{cell_name(t)} := {to_source(e)}" for t, e in node.assignments)
        return f"compute {body} -> {node.next}"
    if isinstance(node, BranchNode):
        return f"branch {to_source(node.expr)} {node.relation} 0 ? {node.if_true} : {node.if_false}"
    if isinstance(node, ShiftNode):
        return f"shift {node.direction} -> {node.next}"
    if isinstance(node, OutputNode):
        return "output" + (f" {_cells(node.cells)}" if node.cells is not None else "")
    if isinstance(node, OracleNode):
        return f"oracle {_cells(node.query)} into {cell_name(node.target)} -> {node.next}"
    raise TypeError(node)


def format_machine(m: Machine) -> str:
    """Source text that parses back to ``m`` (streams by their own names)."""
    lines = [f"machine {m.name} over {m.backend.name.lower()}" + (" equational" if m.equational else "")]
    for k, v in m.params.items():
        if isinstance(v, StreamReal):
            ref = getattr(v, "name", None) or k
            lines.append(f"param {k} = stream({ref})")
        else:
            lines.append(f"param {k} = {literal(v)}")
    for k, n in m.nodes.items():
        lines.append(f"node {k}: {format_node(n)}")
    return "\n".join(lines) + "\n"
