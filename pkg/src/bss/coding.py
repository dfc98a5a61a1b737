"""Machines as words: a flat, self-delimiting scalar encoding.

Layout (every entry is a scalar)::

    header   1, backend, equational, node count, edge count, param count
    params   value per parameter, in sorted-name order
    nodes    tag then payload, nodes in canonical order
    edges    source, label, target (node positions)

Node tags: 0 input, 1 compute, 2 branch, 3 shift, 4 output, 5 oracle.
Cell lists are a length (-1 for the default convention) then indices.
Expressions are prefix code: 0 const c, 1 cell i, 2 param k, 3 add, 4 sub,
5 mul, 6 div, 7 neg, 8 pow n.  Edge labels: 0 single, 1 the 1-edge, 2 the
0-edge.  Decoded machines name nodes ``n0, n1, ...`` in canonical order
and parameters ``p0, p1, ...``.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Optional, Sequence

from bss.expr import BinOp, Cell, Const, Expr, Neg, Param, Pow
from bss.machine import (
    BranchNode, ComputeNode, InputNode, Machine, OracleNode, OutputNode, ShiftNode, successors,
    validate,
)
from bss.scalar import AlgebraicNumber, Backend, Scalar, StreamReal

FORMAT_VERSION = 1

_TAGS = {InputNode: 0, ComputeNode: 1, BranchNode: 2, ShiftNode: 3, OutputNode: 4, OracleNode: 5}
_OPS = {"+": 3, "-": 4, "*": 5, "/": 6}
_OPS_INV = {v: k for k, v in _OPS.items()}
_LABELS = {"": 0, "1": 1, "0": 2}


class UnencodableParameter(ValueError):
    pass


class DecodeError(ValueError):
    def __init__(self, position: int, reason: str):
        self.position, self.reason = position, reason
        super().__init__(f"at entry {position}: {reason}")


def canonical_order(m: Machine) -> list[str]:
    """Breadth-first from the input node, edge 1 before edge 0; stragglers in insertion order."""
    order: list[str] = []
    seen: set[str] = set()
    start = m.input_id
    queue = deque([start])
    seen.add(start)
    while queue:
        k = queue.popleft()
        order.append(k)
        for _, dst in successors(m.nodes[k]):
            if dst is not None and dst in m.nodes and dst not in seen:
                seen.add(dst)
                queue.append(dst)
    order.extend(k for k in m.nodes if k not in seen)
    return order


def canonical(m: Machine) -> Machine:
    """``m`` with nodes and parameters renamed the way decoding names them."""
    order = canonical_order(m)
    ren = {k: f"n{i}" for i, k in enumerate(order)}
    pnames = sorted(m.params)
    pren = {k: f"p{i}" for i, k in enumerate(pnames)}

    def rx(e: Expr) -> Expr:
        if isinstance(e, Param):
            return Param(pren.get(e.name, e.name))
        if isinstance(e, BinOp):
            return BinOp(e.op, rx(e.left), rx(e.right))
        if isinstance(e, Neg):
            return Neg(rx(e.operand))
        if isinstance(e, Pow):
            return Pow(rx(e.base), e.exponent)
        return e

    def rn(n):
        r = lambda k: ren.get(k, k) if k is not None else None  # noqa: E731
        if isinstance(n, InputNode):
            return InputNode(r(n.next), n.cells)
        if isinstance(n, ComputeNode):
            return ComputeNode(tuple((t, rx(e)) for t, e in n.assignments), r(n.next))
        if isinstance(n, BranchNode):
            return BranchNode(rx(n.expr), r(n.if_true), r(n.if_false), n.relation)
        if isinstance(n, ShiftNode):
            return ShiftNode(n.direction, r(n.next))
        if isinstance(n, OracleNode):
            return OracleNode(n.query, n.target, r(n.next))
        return n

    nodes = {ren[k]: rn(m.nodes[k]) for k in order}
    params = {pren[k]: m.params[k] for k in pnames}
    return Machine("decoded", m.backend, nodes, params, m.equational)


def _check_scalar(v: Scalar, what: str) -> None:
    if isinstance(v, StreamReal):
        raise UnencodableParameter(f"{what} is a digit stream and has no finite code")


def encode_machine(m: Machine) -> tuple:
    order = canonical_order(m)
    pos = {k: i for i, k in enumerate(order)}
    pnames = sorted(m.params)
    pidx = {k: i for i, k in enumerate(pnames)}
    for k in pnames:
        _check_scalar(m.params[k], f"parameter {k!r}")
    edges = [(pos[src], _LABELS[label], pos[dst]) for src in order
             for label, dst in successors(m.nodes[src])]
    out: list[Scalar] = [FORMAT_VERSION, int(m.backend), int(m.equational), len(order), len(edges), len(pnames)]
    out.extend(m.params[k] for k in pnames)

    def cells(cs: Optional[Sequence[int]]) -> None:
        if cs is None:
            out.append(-1)
        else:
            out.append(len(cs))
            out.extend(cs)

    def expr(e: Expr) -> None:
        if isinstance(e, Const):
            _check_scalar(e.value, "a constant")
            out.extend((0, e.value))
        elif isinstance(e, Cell):
            out.extend((1, e.index))
        elif isinstance(e, Param):
            out.extend((2, pidx[e.name]))
        elif isinstance(e, BinOp):
            out.append(_OPS[e.op])
            expr(e.left)
            expr(e.right)
        elif isinstance(e, Neg):
            out.append(7)
            expr(e.operand)
        else:
            out.extend((8, e.exponent))
            expr(e.base)

    for k in order:
        n = m.nodes[k]
        out.append(_TAGS[type(n)])
        if isinstance(n, (InputNode, OutputNode)):
            cells(n.cells)
        elif isinstance(n, ComputeNode):
            out.append(len(n.assignments))
            for t, e in n.assignments:
                out.append(t)
                expr(e)
        elif isinstance(n, BranchNode):
            out.append(0 if n.relation == ">=" else 1)
            expr(n.expr)
        elif isinstance(n, ShiftNode):
            out.append(0 if n.direction == "left" else 1)
        else:
            cells(n.query)
            out.append(n.target)
    for e in edges:
        out.extend(e)
    return tuple(out)


class _Reader:
    def __init__(self, w: Sequence[Scalar]):
        self.w, self.i = list(w), 0

    def scalar(self) -> Scalar:
        if self.i >= len(self.w):
            raise DecodeError(self.i, "word ends early")
        v = self.w[self.i]
        self.i += 1
        return v

    def int(self, lo: int | None = None, hi: int | None = None, what: str = "field") -> int:
        at = self.i
        v = self.scalar()
        if isinstance(v, Fraction) and v.denominator == 1:
            v = int(v)
        elif isinstance(v, AlgebraicNumber) and v.is_rational and v.as_fraction().denominator == 1:
            v = int(v.as_fraction())
        if not isinstance(v, int) or isinstance(v, bool):
            raise DecodeError(at, f"{what} must be an integer")
        if (lo is not None and v < lo) or (hi is not None and v > hi):
            raise DecodeError(at, f"{what} {v} out of range")
        return v


def decode_machine(w: Sequence[Scalar]) -> Machine:
    r = _Reader(w)
    version = r.int(what="format version")
    if version != FORMAT_VERSION:
        raise DecodeError(0, f"unsupported format version {version}")
    backend = Backend(r.int(0, len(Backend) - 1, "backend"))
    equational = bool(r.int(0, 1, "equational flag"))
    n_nodes = r.int(1, None, "node count")
    n_edges = r.int(0, None, "edge count")
    n_params = r.int(0, None, "parameter count")
    params = {f"p{i}": r.scalar() for i in range(n_params)}

    def cells() -> Optional[tuple[int, ...]]:
        k = r.int(-1, None, "cell count")
        return None if k == -1 else tuple(r.int(what="cell index") for _ in range(k))

    def expr(depth: int = 0) -> Expr:
        if depth > 10_000:
            raise DecodeError(r.i, "expression nests too deeply")
        at = r.i
        op = r.int(0, 8, "expression opcode")
        if op == 0:
            return Const(r.scalar())
        if op == 1:
            return Cell(r.int(what="cell index"))
        if op == 2:
            k = r.int(0, n_params - 1, "parameter reference")
            return Param(f"p{k}")
        if op in _OPS_INV:
            left = expr(depth + 1)
            return BinOp(_OPS_INV[op], left, expr(depth + 1))
        if op == 7:
            return Neg(expr(depth + 1))
        if op == 8:
            n = r.int(0, None, "exponent")
            return Pow(expr(depth + 1), n)
        raise DecodeError(at, f"unknown opcode {op}")

    raw: list[tuple] = []
    for _ in range(n_nodes):
        tag = r.int(0, 5, "node tag")
        if tag in (0, 4):
            raw.append((tag, cells()))
        elif tag == 1:
            k = r.int(1, None, "assignment count")
            raw.append((tag, tuple((r.int(what="target cell"), expr()) for _ in range(k))))
        elif tag == 2:
            rel = ">=" if r.int(0, 1, "relation") == 0 else "="
            raw.append((tag, rel, expr()))
        elif tag == 3:
            raw.append((tag, "left" if r.int(0, 1, "direction") == 0 else "right"))
        else:
            q = cells()
            if q is None:
                raise DecodeError(r.i - 1, "oracle query needs explicit cells")
            raw.append((tag, q, r.int(what="target cell")))
    out_edges: dict[int, dict[int, int]] = {i: {} for i in range(n_nodes)}
    for _ in range(n_edges):
        at = r.i
        src = r.int(what="edge source")
        label = r.int(0, 2, "edge label")
        dst = r.int(what="edge target")
        for end, v in (("source", src), ("target", dst)):
            if not 0 <= v < n_nodes:
                raise DecodeError(at, f"dangling edge: {end} {v} is not a node")
        if label in out_edges[src]:
            raise DecodeError(at, f"node {src} has two edges labelled {label}")
        out_edges[src][label] = dst
    if r.i != len(r.w):
        raise DecodeError(r.i, "trailing entries after the last edge")

    def target(i: int, label: int) -> Optional[str]:
        d = out_edges[i].get(label)
        return None if d is None else f"n{d}"

    nodes = {}
    for i, rec in enumerate(raw):
        tag = rec[0]
        if tag == 0:
            nodes[f"n{i}"] = InputNode(target(i, 0), rec[1])
        elif tag == 1:
            nodes[f"n{i}"] = ComputeNode(rec[1], target(i, 0))
        elif tag == 2:
            nodes[f"n{i}"] = BranchNode(rec[2], target(i, 1), target(i, 2), rec[1])
        elif tag == 3:
            nodes[f"n{i}"] = ShiftNode(rec[1], target(i, 0))
        elif tag == 4:
            nodes[f"n{i}"] = OutputNode(rec[1])
        else:
            nodes[f"n{i}"] = OracleNode(rec[1], rec[2], target(i, 0))
    m = Machine("decoded", backend, nodes, params, equational)
    problems = validate(m)
    if problems:
        raise DecodeError(len(r.w), "; ".join(str(p) for p in problems))
    return m
