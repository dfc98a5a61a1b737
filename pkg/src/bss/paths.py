"""Path cells: symbolic execution of a machine up to a step bound.

Every path through the graph that halts within ``depth`` steps cuts out a
semialgebraic cell of inputs, described by the sign conditions of the
branch tests taken along it (plus ``divisor != 0`` side conditions for the
divisions it performs).  The halting set restricted to ``depth`` steps is
the disjoint union of the halting cells.

Tape contents are rational functions kept as a hash-consed DAG of
polynomial operations; expansion into canonical form happens only when a
condition is printed, so deep paths stay cheap to build and to test.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional, Sequence

from bss.expr import Cell as CellRef, Const, Expr, Neg, Param, Pow
from bss.machine import (
    BranchNode, ComputeNode, Halted, InputNode, Machine, OracleNode, OutOfBudget, OutputNode, ShiftNode,
    describe_outcome, run,
)
from bss.scalar import AlgebraicNumber, Scalar, Sign, StreamReal, compare, render, scalar_sign

FORMAT_VERSION = 1


class ParameterNotEncodable(ValueError):
    """A digit-stream parameter has no finite symbolic description."""


class UnsupportedNode(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class ExpansionTooLarge(ValueError):
    pass


class PathLimitExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Polynomial DAG


class PolyDag:
    """Hash-consed polynomial expressions over Q in named variables.

    Node ids are allocated in creation order, so children always have
    smaller ids than their parents.
    """

    def __init__(self, variables: Sequence[str]):
        self.variables = list(variables)
        self._var_index = {v: i for i, v in enumerate(self.variables)}
        self.nodes: list[tuple] = []
        self._intern: dict[tuple, int] = {}
        self._expanded: dict[int, dict] = {}
        self._bounds: list[int] = []
        self.zero = self.const(0)
        self.one = self.const(1)

    def _make(self, key: tuple) -> int:
        i = self._intern.get(key)
        if i is None:
            i = len(self.nodes)
            self.nodes.append(key)
            self._intern[key] = i
            self._bounds.append(self._term_bound(key))
        return i

    def _term_bound(self, key: tuple) -> int:
        # cheap upper bound on the number of terms after expansion, capped
        kind = key[0]
        if kind in ("c", "v"):
            return 1
        if kind == "-":
            return self._bounds[key[1]]
        a, b = self._bounds[key[1]], self._bounds[key[2]]
        return min(a + b if kind == "+" else a * b, 1 << 62)

    def expandable(self, a: int, limit: int = 20_000) -> bool:
        """Whether ``a`` is cheap enough to expand; the bound ignores cancellation."""
        return a in self._expanded or self._bounds[a] <= limit

    def const(self, c) -> int:
        c = Fraction(c)
        return self._make(("c", c))

    def var(self, name: str) -> int:
        if name not in self._var_index:
            raise KeyError(name)
        return self._make(("v", name))

    def const_value(self, a: int) -> Optional[Fraction]:
        node = self.nodes[a]
        return node[1] if node[0] == "c" else None

    def add(self, a: int, b: int) -> int:
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is not None and cb is not None:
            return self.const(ca + cb)
        if ca == 0:
            return b
        if cb == 0:
            return a
        return self._make(("+",) + tuple(sorted((a, b))))

    def neg(self, a: int) -> int:
        node = self.nodes[a]
        if node[0] == "c":
            return self.const(-node[1])
        if node[0] == "-":
            return node[1]
        return self._make(("-", a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is not None and cb is not None:
            return self.const(ca * cb)
        for c, other in ((ca, b), (cb, a)):
            if c == 0:
                return self.zero
            if c == 1:
                return other
            if c == -1:
                return self.neg(other)
        return self._make(("*",) + tuple(sorted((a, b))))

    def pow(self, a: int, n: int) -> int:
        result, base = self.one, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    # -- evaluation ------------------------------------------------------

    def evaluate(self, a: int, env: Mapping[str, Scalar], cache: dict) -> Scalar:
        if a in cache:
            return cache[a]
        stack = [a]
        nodes = self.nodes
        while stack:
            i = stack[-1]
            if i in cache:
                stack.pop()
                continue
            node = nodes[i]
            kind = node[0]
            if kind == "c":
                v = node[1]
                cache[i] = v.numerator if v.denominator == 1 else v
                stack.pop()
                continue
            if kind == "v":
                cache[i] = env[node[1]]
                stack.pop()
                continue
            pending = [c for c in node[1:] if c not in cache]
            if pending:
                stack.extend(pending)
                continue
            if kind == "+":
                cache[i] = cache[node[1]] + cache[node[2]]
            elif kind == "*":
                cache[i] = cache[node[1]] * cache[node[2]]
            else:
                cache[i] = -cache[node[1]]
            stack.pop()
        return cache[a]

    # -- expansion -------------------------------------------------------

    def expand(self, a: int, limit: int = 20_000) -> dict[tuple, Fraction]:
        """Sparse form {exponent tuple: coefficient}; raises past ``limit`` terms."""
        if a in self._expanded:
            return self._expanded[a]
        stack = [a]
        nvars = len(self.variables)
        out = self._expanded
        while stack:
            i = stack[-1]
            if i in out:
                stack.pop()
                continue
            node = self.nodes[i]
            kind = node[0]
            if kind == "c":
                out[i] = {(0,) * nvars: node[1]} if node[1] else {}
            elif kind == "v":
                e = [0] * nvars
                e[self._var_index[node[1]]] = 1
                out[i] = {tuple(e): Fraction(1)}
            else:
                pending = [c for c in node[1:] if c not in out]
                if pending:
                    stack.extend(pending)
                    continue
                if kind == "+":
                    acc = dict(out[node[1]])
                    for m, c in out[node[2]].items():
                        s = acc.get(m, 0) + c
                        if s:
                            acc[m] = s
                        else:
                            acc.pop(m, None)
                elif kind == "-":
                    acc = {m: -c for m, c in out[node[1]].items()}
                else:
                    p, q = out[node[1]], out[node[2]]
                    if len(p) * len(q) > limit * 50:
                        raise ExpansionTooLarge("polynomial too large to expand")
                    acc = {}
                    for m1, c1 in p.items():
                        for m2, c2 in q.items():
                            m = tuple(x + y for x, y in zip(m1, m2))
                            s = acc.get(m, 0) + c1 * c2
                            if s:
                                acc[m] = s
                            else:
                                acc.pop(m, None)
                if len(acc) > limit:
                    raise ExpansionTooLarge(f"polynomial has more than {limit} terms")
                out[i] = acc
            stack.pop()
        return out[a]

    def shared(self, a: int, defs: dict[int, str]) -> str:
        """Name of ``a`` in a table of one-operation definitions, extending ``defs`` in place.

        ``defs`` maps node ids to definition lines; the result is linear in
        the size of the DAG even when the expanded form is astronomically large.
        """
        def name(i: int) -> str:
            node = self.nodes[i]
            if node[0] == "c":
                c = node[1]
                return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            if node[0] == "v":
                return node[1]
            return f"t{i}"

        stack = [a]
        while stack:
            i = stack[-1]
            node = self.nodes[i]
            if node[0] in ("c", "v") or i in defs:
                stack.pop()
                continue
            pending = [c for c in node[1:] if self.nodes[c][0] not in ("c", "v") and c not in defs]
            if pending:
                stack.extend(pending)
                continue
            if node[0] == "-":
                defs[i] = f"t{i} = -{name(node[1])}"
            else:
                defs[i] = f"t{i} = {name(node[1])} {node[0]} {name(node[2])}"
            stack.pop()
        return name(a)

    def render(self, a: int, normalize: str = "none") -> str:
        """Canonical text: expanded, graded-lexicographic, highest term first.

        ``normalize`` is ``"none"``, ``"positive"`` (divide by the positive
        content, keeping signs), or ``"monic-sign"`` (also make the leading
        coefficient positive).
        """
        terms = self.expand(a)
        if not terms:
            return "0"
        order = sorted(terms, key=lambda m: (sum(m), m), reverse=True)
        coeffs = [terms[m] for m in order]
        if normalize != "none":
            den = 1
            for c in coeffs:
                den = den * c.denominator // gcd(den, c.denominator)
            ints = [int(c * den) for c in coeffs]
            g = 0
            for c in ints:
                g = gcd(g, c)
            coeffs = [Fraction(c, g) for c in ints]
            if normalize == "monic-sign" and coeffs[0] < 0:
                coeffs = [-c for c in coeffs]
        parts = []
        for m, c in zip(order, coeffs):
            mono = "*".join(
                (v if e == 1 else f"{v}^{e}") for v, e in zip(self.variables, m) if e
            )
            mag = abs(c)
            mag_s = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if not mono:
                body = mag_s
            elif mag == 1:
                body = mono
            else:
                body = f"{mag_s}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)


@dataclass(frozen=True)
class RationalExpr:
    num: int
    den: int


@dataclass(frozen=True)
class SignCondition:
    poly: int   # node id in the enumeration's PolyDag
    rel: str    # ">=0", "<0", "=0", "!=0"
    kind: str   # "branch" or "divisor"
    step: int   # step index of the node that produced it


_NEGATE = {">=0": "<0", "<0": ">=0", "=0": "!=0", "!=0": "=0"}


@dataclass
class PathCell:
    path: tuple[str, ...]
    conditions: tuple[SignCondition, ...]
    output: Optional[tuple[RationalExpr, ...]]
    truncated: bool
    dag: PolyDag = field(repr=False, compare=False)
    params: Mapping[str, Scalar] = field(repr=False, compare=False, default_factory=dict)
    dim: int = 0

    @property
    def halting(self) -> bool:
        return not self.truncated

    def to_json(self, defs: Optional[dict[int, str]] = None) -> dict:
        """JSON form; polynomials too large to expand go into ``defs`` as shared definitions."""
        dag = self.dag
        defs = {} if defs is None else defs
        conds = []
        for c in self.conditions:
            norm = "monic-sign" if c.rel in ("=0", "!=0") else "positive"
            conds.append({"poly": _render_poly(dag, c.poly, defs, norm), "rel": c.rel, "kind": c.kind,
                          "step": c.step})
        out = None
        if self.output is not None:
            out = [_render_rational(dag, e, defs) for e in self.output]
        # emptiness is never decided; only a cell without conditions is known to be inhabited
        return {"path": list(self.path), "conditions": conds, "output": out, "truncated": self.truncated,
                "possibly_empty": bool(conds)}


def _render_poly(dag: PolyDag, a: int, defs: dict[int, str], normalize: str = "none") -> str:
    if dag.expandable(a):
        return dag.render(a, normalize)
    return dag.shared(a, defs)


def _render_rational(dag: PolyDag, e: RationalExpr, defs: dict[int, str]) -> str:
    if e.den == dag.one:
        return _render_poly(dag, e.num, defs)
    return f"({_render_poly(dag, e.num, defs)}) / ({_render_poly(dag, e.den, defs)})"


# ---------------------------------------------------------------------------
# Symbolic execution


class _Dead(Exception):
    """The path divides by a provably zero quantity."""


class _Symbolic:
    def __init__(self, m: Machine, dim: int):
        for k, v in m.params.items():
            if isinstance(v, StreamReal):
                raise ParameterNotEncodable(f"parameter {k!r} is a digit stream")
        for k, n in m.nodes.items():
            if isinstance(n, OracleNode):
                raise UnsupportedNode(f"node {k!r} queries an oracle; path cells need a closed machine")
        self.m = m
        self.dim = dim
        # algebraic parameters stay symbolic; rational ones are folded in
        self.symbolic_params = sorted(k for k, v in m.params.items() if isinstance(v, AlgebraicNumber)
                                      and not v.is_rational)
        self.inputs = [f"x{i}" for i in range(1, dim + 1)]
        self.dag = PolyDag(self.inputs + self.symbolic_params)
        self.zero = RationalExpr(self.dag.zero, self.dag.one)

    def const(self, v: Scalar) -> RationalExpr:
        if isinstance(v, AlgebraicNumber):
            if not v.is_rational:
                raise UnsupportedNode("algebraic constants must be bound as parameters")
            v = v.as_fraction()
        return RationalExpr(self.dag.const(v), self.dag.one)

    # rational-function arithmetic; ``side`` collects divisor conditions
    def add(self, a: RationalExpr, b: RationalExpr) -> RationalExpr:
        d = self.dag
        if a.den == b.den:
            return self._norm(d.add(a.num, b.num), a.den)
        return self._norm(d.add(d.mul(a.num, b.den), d.mul(b.num, a.den)), d.mul(a.den, b.den))

    def neg(self, a: RationalExpr) -> RationalExpr:
        return RationalExpr(self.dag.neg(a.num), a.den)

    def mul(self, a: RationalExpr, b: RationalExpr) -> RationalExpr:
        d = self.dag
        return self._norm(d.mul(a.num, b.num), d.mul(a.den, b.den))

    def div(self, a: RationalExpr, b: RationalExpr, side: list) -> RationalExpr:
        d = self.dag
        c = d.const_value(b.num)
        if c == 0:
            raise _Dead
        if c is None:
            side.append(b.num)
        return self._norm(d.mul(a.num, b.den), d.mul(a.den, b.num))

    def pow(self, a: RationalExpr, n: int) -> RationalExpr:
        d = self.dag
        return self._norm(d.pow(a.num, n), d.pow(a.den, n))

    def _norm(self, num: int, den: int) -> RationalExpr:
        d = self.dag
        c = d.const_value(den)
        if c is not None and c != 1:
            return RationalExpr(d.mul(num, d.const(1 / c)), d.one)
        if d.const_value(num) == 0:
            return RationalExpr(d.zero, d.one)
        return RationalExpr(num, den)

    def eval_expr(self, e: Expr, get, side: list) -> RationalExpr:
        if isinstance(e, Const):
            return self.const(e.value)
        if isinstance(e, CellRef):
            return get(e.index)
        if isinstance(e, Param):
            if e.name in self.symbolic_params:
                return RationalExpr(self.dag.var(e.name), self.dag.one)
            return self.const(self.m.params[e.name])
        if isinstance(e, Neg):
            return self.neg(self.eval_expr(e.operand, get, side))
        if isinstance(e, Pow):
            return self.pow(self.eval_expr(e.base, get, side), e.exponent)
        a = self.eval_expr(e.left, get, side)
        b = self.eval_expr(e.right, get, side)
        if e.op == "+":
            return self.add(a, b)
        if e.op == "-":
            return self.add(a, self.neg(b))
        if e.op == "*":
            return self.mul(a, b)
        return self.div(a, b, side)

    def branch_poly(self, h: RationalExpr, relation: str) -> int:
        # sign(n/d) = sign(n*d) wherever d != 0, and n/d = 0 iff n = 0
        if relation == "=" or h.den == self.dag.one:
            return h.num
        return self.dag.mul(h.num, h.den)


@dataclass
class _State:
    node: str
    offset: int
    support: dict
    path: tuple
    conditions: tuple
    known: dict  # poly id -> set of relations holding on this path


def _implied(known: dict, dag: PolyDag, poly: int, rel: str) -> Optional[bool]:
    """Whether ``poly rel`` is already decided on this path (None: open)."""
    c = dag.const_value(poly)
    if c is not None:
        return {">=0": c >= 0, "<0": c < 0, "=0": c == 0, "!=0": c != 0}[rel]
    facts = known.get(poly, ())
    if rel in facts:
        return True
    if _NEGATE[rel] in facts:
        return False
    if rel == ">=0" and "=0" in facts:
        return True
    if rel == "!=0" and "<0" in facts:
        return True
    if rel == "=0" and "<0" in facts:
        return False
    return None


def enumerate_paths(m: Machine, input_dim: int, depth: int, *, max_cells: int = 100_000) -> list[PathCell]:
    """Halting and truncated cells of all paths of at most ``depth`` steps.

    Depth counts executed nodes, exactly like the budget of ``run``; the
    output node's own step counts.  Cells come back sorted by path.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    sym = _Symbolic(m, input_dim)
    dag = sym.dag
    params = {k: m.params[k] for k in sym.symbolic_params}
    cells: list[PathCell] = []
    start = _State(m.input_id, 0, {}, (), (), {})
    stack = [start]

    def emit(cell: PathCell) -> None:
        cells.append(cell)
        if len(cells) > max_cells:
            raise PathLimitExceeded(f"more than {max_cells} cells")

    while stack:
        st = stack.pop()
        while True:
            step_index = len(st.path)
            if step_index >= depth:
                emit(PathCell(st.path + ("*",), st.conditions, None, True, dag, params, input_dim))
                break
            node = m.nodes[st.node]
            path = st.path + (st.node,)
            get = lambda i, st=st: st.support.get(i + st.offset, sym.zero)  # noqa: E731
            if isinstance(node, InputNode):
                support = {}
                if node.cells is None:
                    if input_dim:
                        support[0] = sym.const(input_dim)
                    targets = range(1, input_dim + 1)
                else:
                    targets = node.cells
                for i, name in zip(targets, sym.inputs):
                    support[i] = RationalExpr(dag.var(name), dag.one)
                st = _State(node.next, 0, support, path, st.conditions, st.known)
                continue
            if isinstance(node, ComputeNode):
                side: list[int] = []
                try:
                    values = [(t, sym.eval_expr(e, get, side)) for t, e in node.assignments]
                except _Dead:
                    break
                conditions, known = st.conditions, st.known
                dead = False
                for p in side:
                    verdict = _implied(known, dag, p, "!=0")
                    if verdict is False:
                        dead = True
                        break
                    conditions = conditions + (SignCondition(p, "!=0", "divisor", step_index),)
                    known = _with_fact(known, p, "!=0")
                if dead:
                    break
                support = dict(st.support)
                for t, v in values:
                    pos = t + st.offset
                    if v.num == dag.zero:
                        support.pop(pos, None)
                    else:
                        support[pos] = v
                st = _State(node.next, st.offset, support, path, conditions, known)
                continue
            if isinstance(node, ShiftNode):
                off = st.offset + (1 if node.direction == "left" else -1)
                st = _State(node.next, off, st.support, path, st.conditions, st.known)
                continue
            if isinstance(node, BranchNode):
                side = []
                try:
                    h = sym.eval_expr(node.expr, get, side)
                except _Dead:
                    break
                eq = node.relation == "="
                poly = sym.branch_poly(h, node.relation)
                yes, no = ("=0", "!=0") if eq else (">=0", "<0")
                verdict = _implied(st.known, dag, poly, yes)
                forks = []
                if verdict is not False:
                    forks.append((node.if_true, yes))
                if verdict is not True:
                    forks.append((node.if_false, no))
                constant = dag.const_value(poly) is not None
                children = []
                for target, rel in forks:
                    conds = st.conditions if constant else st.conditions + (
                        SignCondition(poly, rel, "branch", step_index),)
                    known = st.known if constant else _with_fact(st.known, poly, rel)
                    children.append(_State(target, st.offset, st.support, path, conds, known))
                if not children:
                    break
                # explore the 1-edge first; order is fixed again by the final sort
                stack.extend(reversed(children[1:]))
                st = children[0]
                continue
            if isinstance(node, OutputNode):
                if node.cells is None:
                    n = dag.const_value(get(0).num) if get(0).den == dag.one else None
                    if n is None or n < 0 or n.denominator != 1:
                        raise UnsupportedNode("output length in x0 must be a constant natural number")
                    out_cells = range(1, int(n) + 1)
                else:
                    out_cells = node.cells
                emit(PathCell(path, st.conditions, tuple(get(i) for i in out_cells), False, dag, params,
                              input_dim))
                break
            raise UnsupportedNode(f"node {st.node!r} of kind {type(node).__name__}")
    cells.sort(key=lambda c: c.path)
    return cells


def _with_fact(known: dict, poly: int, rel: str) -> dict:
    out = dict(known)
    out[poly] = frozenset(known.get(poly, frozenset())) | {rel}
    return out


# ---------------------------------------------------------------------------
# Membership


def _holds(value: Scalar, rel: str) -> bool:
    if type(value) is int or type(value) is Fraction:
        if rel == ">=0":
            return value >= 0
        if rel == "<0":
            return value < 0
        if rel == "=0":
            return value == 0
        return value != 0
    s = scalar_sign(value)
    if s is Sign.INDETERMINATE:
        raise DimensionMismatch("cell membership needs exact points, not digit streams")
    if rel == ">=0":
        return s is not Sign.NEGATIVE
    if rel == "<0":
        return s is Sign.NEGATIVE
    if rel == "=0":
        return s is Sign.ZERO
    return s is not Sign.ZERO


def _env(cell: PathCell, point: Sequence[Scalar]) -> dict:
    if len(point) != cell.dim:
        raise DimensionMismatch(f"cell has {cell.dim} input variables, point has {len(point)}")
    for v in point:
        if isinstance(v, StreamReal):
            raise DimensionMismatch("cell membership needs exact points, not digit streams")
    env = {f"x{i}": v for i, v in enumerate(point, start=1)}
    env.update(cell.params)
    return env


def cell_contains(c: PathCell, point: Sequence[Scalar], cache: Optional[dict] = None) -> bool:
    """Exact membership; ``cache`` may be shared across cells of one enumeration at one point."""
    env = _env(c, point)
    cache = {} if cache is None else cache
    dag = c.dag
    return all(_holds(dag.evaluate(cond.poly, env, cache), cond.rel) for cond in c.conditions)


def evaluate_output(c: PathCell, point: Sequence[Scalar], cache: Optional[dict] = None) -> tuple:
    if c.output is None:
        raise ValueError("truncated cells have no output")
    env = _env(c, point)
    cache = {} if cache is None else cache
    out = []
    for e in c.output:
        n = c.dag.evaluate(e.num, env, cache)
        d = c.dag.evaluate(e.den, env, cache)
        if isinstance(n, int) and isinstance(d, int):
            out.append(Fraction(n, d) if d != 1 else n)
        else:
            out.append(n / d)
    return tuple(out)


class CellIndex:
    """Cells of one enumeration arranged as a trie over their condition lists.

    Cells sharing a prefix of conditions share its evaluation, so locating
    a point costs about one pass over the longest matching path.
    """

    def __init__(self, cells: Sequence[PathCell]):
        self.cells = list(cells)
        self._root: dict = {"cells": [], "next": {}}
        for c in self.cells:
            node = self._root
            for cond in c.conditions:
                node = node["next"].setdefault((cond.poly, cond.rel), {"cells": [], "next": {}})
            node["cells"].append(c)

    def locate(self, point: Sequence[Scalar], cache: Optional[dict] = None) -> list[PathCell]:
        """All indexed cells containing ``point``, in index order."""
        if not self.cells:
            return []
        env = _env(self.cells[0], point)
        dag = self.cells[0].dag
        cache = {} if cache is None else cache
        found: list[PathCell] = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            found.extend(node["cells"])
            for (poly, rel), child in node["next"].items():
                if _holds(dag.evaluate(poly, env, cache), rel):
                    stack.append(child)
        order = {id(c): i for i, c in enumerate(self.cells)}
        found.sort(key=lambda c: order[id(c)])
        return found


def containing_cells(cells: Sequence[PathCell], point: Sequence[Scalar]) -> list[PathCell]:
    return CellIndex(cells).locate(point)


def check_equational(m: Machine) -> bool:
    """True iff every branch tests an equality; vacuously true without branches."""
    return all(n.relation == "=" for n in m.nodes.values() if isinstance(n, BranchNode))


def parameter_field(m: Machine) -> list[str]:
    """Generators adjoined to Q by the machine's parameters (lossless renderings)."""
    return [render(v) for _, v in sorted(m.params.items())
            if isinstance(v, AlgebraicNumber) and not v.is_rational]


def cells_to_json(m: Machine, dim: int, depth: int, cells: Sequence[PathCell]) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "machine": m.name,
        "dim": dim,
        "depth": depth,
        "parameter_field": parameter_field(m),
    }
    defs: dict[int, str] = {}
    doc["cells"] = [c.to_json(defs) for c in cells]
    # unexpanded polynomials, one operation per line, children before parents
    doc["definitions"] = [defs[k] for k in sorted(defs)]
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# Run/cell agreement


@dataclass
class Disagreement:
    point: tuple
    run: dict
    cells: list[str]
    reason: str

    def to_json(self) -> dict:
        return {"point": [render(v) for v in self.point], "run": self.run,
                "cells": self.cells, "reason": self.reason}


def check_agreement(m: Machine, cells: Sequence[PathCell], depth: int,
                    points: Sequence[Sequence[Scalar]]) -> list[Disagreement]:
    """Compare running ``m`` for ``depth`` steps with locating each point among ``cells``.

    A halting run must lie in exactly one cell, a halting one whose output
    expressions evaluate to the run's output.  A run that exhausts the
    budget must lie in exactly one truncated cell.  A stuck run lies in no
    halting cell.
    """
    index = CellIndex(cells)
    bad: list[Disagreement] = []
    for p in points:
        p = tuple(p)
        out = run(m, p, depth)
        cache: dict = {}
        found = index.locate(p, cache)
        names = ["/".join(c.path) for c in found]

        def fail(reason: str) -> None:
            bad.append(Disagreement(p, describe_outcome(out), names, reason))

        if isinstance(out, Halted):
            if len(found) != 1 or not found[0].halting:
                fail("halting run is not in exactly one halting cell")
                continue
            expect = evaluate_output(found[0], p, cache)
            if len(expect) != len(out.output) or any(
                    compare(a, b) is not Sign.ZERO for a, b in zip(expect, out.output)):
                fail("cell output differs from run output")
        elif isinstance(out, OutOfBudget):
            if len(found) != 1 or found[0].halting:
                fail("unfinished run is not in exactly one truncated cell")
        elif any(c.halting for c in found):
            fail("stuck run lies in a halting cell")
    return bad
