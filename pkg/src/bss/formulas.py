"""Infinitary formulas of finite level over computable structures.

Formulas are trees whose leaves are atoms (or negated atoms), with finite
``And``/``Or``, quantifier blocks, and countable ``BigOr``/``BigAnd`` nodes.
A countable node ranges an index variable over the halting set of an index
machine and produces one subformula per index.

``classify`` assigns the least finite level.  ``eval_finite`` is the
brute-force truth oracle for structures with an explicit universe;
``eval_budgeted`` semi-decides Sigma_1 truth (and dually refutes Pi_1) by
dovetailing over (index, witness) pairs in Cantor order.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

from bss.dsl import parse_machine_dsl
from bss.machine import Machine
from bss.scalar import parse_scalar, render
from bss.structures import (
    App, Atom, Lit, Ref, RStructure, Word, atomic_truth, rational_grid, run_decision,
)


class TransfiniteNotSupported(ValueError):
    pass


class InfiniteUniverse(ValueError):
    pass


class UnboundedEnumerator(ValueError):
    pass


class LevelTooHigh(ValueError):
    pass


class AtomUndetermined(RuntimeError):
    """An atomic check ran out of budget during exact evaluation."""


class FormulaSyntaxError(ValueError):
    def __init__(self, pos: int, message: str):
        self.pos = pos
        super().__init__(f"at offset {pos}: {message}")


# ---------------------------------------------------------------------------
# Syntax


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    premise: "Formula"
    conclusion: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    vars: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class IndexSet:
    """Naturals ``i`` (below ``bound``, if given) on which ``machine`` halts.

    With no machine the set is every natural below the bound.  Membership
    is probed with ``budget`` steps; a run that does not halt in time counts
    as outside the set.
    """

    machine: Optional[Machine] = None
    bound: Optional[int] = None
    budget: int = 10_000

    def contains(self, i: int, budget: Optional[int] = None) -> bool:
        if self.bound is not None and i >= self.bound:
            return False
        if self.machine is None:
            return True
        b = self.budget if budget is None else budget
        return run_decision(self.machine, (i,), b, None) is not None


@dataclass(frozen=True)
class BigOr:
    """The disjunction over ``i`` in ``indices`` of ``body`` with ``var`` bound to ``(i)``.

    ``body`` is a formula mentioning ``var`` or a callable from ``i`` to a
    formula.  ``field`` records generators of the parameter field; it is
    metadata and is not checked.
    """

    var: str
    indices: IndexSet
    body: Union["Formula", Callable[[int], "Formula"]]
    field: tuple = ()

    def instance(self, i: int) -> "Formula":
        return self.body(i) if callable(self.body) else self.body


@dataclass(frozen=True)
class BigAnd:
    var: str
    indices: IndexSet
    body: Union["Formula", Callable[[int], "Formula"]]
    field: tuple = ()

    def instance(self, i: int) -> "Formula":
        return self.body(i) if callable(self.body) else self.body


@dataclass(frozen=True)
class Limit:
    """A limit-level countable node; representable but not classified."""

    kind: str
    parts: tuple = ()


Formula = Union[Atom, Not, And, Or, Implies, Exists, Forall, BigOr, BigAnd, Limit]

_PROBE = 8  # indices inspected when a countable body is a callable


# ---------------------------------------------------------------------------
# Levels


@dataclass(frozen=True)
class Level:
    n: int
    kind: str  # "Sigma", "Pi" or "Delta0"

    def __post_init__(self):
        if (self.n == 0) != (self.kind == "Delta0") or self.kind not in ("Sigma", "Pi", "Delta0"):
            raise ValueError(f"bad level {self.kind}_{self.n}")

    def __str__(self) -> str:
        return "Delta_0" if self.n == 0 else f"{self.kind}_{self.n}"

    def as_sigma(self) -> int:
        """Least n with this level inside Sigma_n."""
        return self.n if self.kind != "Pi" else self.n + 1

    def as_pi(self) -> int:
        return self.n if self.kind != "Sigma" else self.n + 1


DELTA0 = Level(0, "Delta0")


def _bodies(f: Union[BigOr, BigAnd]) -> list:
    if not callable(f.body):
        return [f.body]
    hi = _PROBE if f.indices.bound is None else min(_PROBE, f.indices.bound)
    return [f.body(i) for i in range(max(hi, 1))]


def _join(levels: Sequence[Level], prefer: str) -> Level:
    levels = [lv for lv in levels if lv.n > 0]
    if not levels:
        return DELTA0
    s = max(lv.as_sigma() for lv in levels)
    p = max(lv.as_pi() for lv in levels)
    if s < p or (s == p and prefer == "Sigma"):
        return Level(s, "Sigma")
    return Level(p, "Pi")


def classify(f: Formula) -> Level:
    """Least finite level of ``f``."""
    if isinstance(f, Atom):
        return DELTA0
    if isinstance(f, Limit):
        raise TransfiniteNotSupported("limit levels need ordinal notations")
    if isinstance(f, Not):
        lv = classify(f.body)
        return lv if lv.n == 0 else Level(lv.n, "Pi" if lv.kind == "Sigma" else "Sigma")
    if isinstance(f, Implies):
        return classify(Or((Not(f.premise), f.conclusion)))
    if isinstance(f, And):
        return _join([classify(p) for p in f.parts], "Pi")
    if isinstance(f, Or):
        return _join([classify(p) for p in f.parts], "Sigma")
    if isinstance(f, (Exists, BigOr)):
        bodies = [f.body] if isinstance(f, Exists) else _bodies(f)
        return Level(max(max(classify(b).as_sigma() for b in bodies), 1), "Sigma")
    if isinstance(f, (Forall, BigAnd)):
        bodies = [f.body] if isinstance(f, Forall) else _bodies(f)
        return Level(max(max(classify(b).as_pi() for b in bodies), 1), "Pi")
    raise TypeError(f"not a formula: {f!r}")


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        out: set = set()

        def walk(t):
            if isinstance(t, Ref):
                out.add(t.name)
            elif isinstance(t, App):
                for a in t.args:
                    walk(a)
        for a in f.args:
            walk(a)
        return frozenset(out)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, Implies):
        return free_vars(f.premise) | free_vars(f.conclusion)
    if isinstance(f, (And, Or, Limit)):
        return frozenset().union(*(free_vars(p) for p in f.parts))
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - set(f.vars)
    if isinstance(f, (BigOr, BigAnd)):
        return frozenset().union(*(free_vars(b) for b in _bodies(f))) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def negate(f: Formula) -> Formula:
    """The negation of ``f`` with ``Not`` pushed down to the atoms."""
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return nnf(f.body)
    if isinstance(f, Implies):
        return And((nnf(f.premise), negate(f.conclusion)))
    if isinstance(f, And):
        return Or(tuple(negate(p) for p in f.parts))
    if isinstance(f, Or):
        return And(tuple(negate(p) for p in f.parts))
    if isinstance(f, Exists):
        return Forall(f.vars, negate(f.body))
    if isinstance(f, Forall):
        return Exists(f.vars, negate(f.body))
    if isinstance(f, (BigOr, BigAnd)):
        dual = BigAnd if isinstance(f, BigOr) else BigOr
        body = f.body
        neg = (lambda i: negate(body(i))) if callable(body) else negate(body)
        return dual(f.var, f.indices, neg, f.field)
    raise TransfiniteNotSupported("limit levels need ordinal notations")


def nnf(f: Formula) -> Formula:
    """``f`` in negation normal form, without ``Implies``."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return negate(f.body)
    if isinstance(f, Implies):
        return Or((negate(f.premise), nnf(f.conclusion)))
    if isinstance(f, And):
        return And(tuple(nnf(p) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(nnf(p) for p in f.parts))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.vars, nnf(f.body))
    if isinstance(f, (BigOr, BigAnd)):
        body = f.body
        return type(f)(f.var, f.indices, (lambda i: nnf(body(i))) if callable(body) else nnf(body), f.field)
    raise TransfiniteNotSupported("limit levels need ordinal notations")


# ---------------------------------------------------------------------------
# Exact evaluation on finite structures


def _bind(env: Mapping[str, Word], names: Sequence[str], values: Sequence[Word]) -> dict:
    out = dict(env)
    out.update(zip(names, (tuple(v) for v in values)))
    return out


def _tuples(elements: Sequence[Word], k: int) -> Iterator[tuple]:
    if k == 0:
        yield ()
        return
    for e in elements:
        for rest in _tuples(elements, k - 1):
            yield (e,) + rest


def eval_finite(s: RStructure, f: Formula, asg: Mapping[str, Word] | None = None,
                budget: int = 100_000) -> bool:
    """Tarskian truth of ``f`` in the finite structure ``s`` under ``asg``."""
    if s.elements is None:
        raise InfiniteUniverse(f"{s.name} has no explicit universe")
    elements = [tuple(e) for e in s.elements]
    env0 = {k: tuple(v) for k, v in (asg or {}).items()}

    def members(node) -> list[int]:
        if node.indices.bound is None:
            raise UnboundedEnumerator(f"countable node over {node.var!r} has no declared bound")
        return [i for i in range(node.indices.bound) if node.indices.contains(i)]

    def ev(g: Formula, env: dict) -> bool:
        if isinstance(g, Atom):
            v = atomic_truth(s, g, budget, env)
            if v is None:
                raise AtomUndetermined(f"atom {g.rel} undetermined within {budget} steps")
            return v
        if isinstance(g, Not):
            return not ev(g.body, env)
        if isinstance(g, Implies):
            return (not ev(g.premise, env)) or ev(g.conclusion, env)
        if isinstance(g, And):
            return all(ev(p, env) for p in g.parts)
        if isinstance(g, Or):
            return any(ev(p, env) for p in g.parts)
        if isinstance(g, Exists):
            return any(ev(g.body, _bind(env, g.vars, t)) for t in _tuples(elements, len(g.vars)))
        if isinstance(g, Forall):
            return all(ev(g.body, _bind(env, g.vars, t)) for t in _tuples(elements, len(g.vars)))
        if isinstance(g, BigOr):
            return any(ev(g.instance(i), _bind(env, (g.var,), ((i,),))) for i in members(g))
        if isinstance(g, BigAnd):
            return all(ev(g.instance(i), _bind(env, (g.var,), ((i,),))) for i in members(g))
        raise TransfiniteNotSupported("limit levels need ordinal notations")

    return ev(f, env0)


# ---------------------------------------------------------------------------
# Budgeted semi-evaluation


class _Lazy:
    """A cached view of an iterator; ``length`` is set once it is exhausted."""

    def __init__(self, it: Iterable):
        self._it = iter(it)
        self._items: list = []
        self.length: Optional[int] = None

    def get(self, i: int):
        while len(self._items) <= i and self.length is None:
            try:
                self._items.append(next(self._it))
            except StopIteration:
                self.length = len(self._items)
        return self._items[i] if i < len(self._items) else None

    def has(self, i: int) -> bool:
        self.get(i)
        return i < len(self._items)


class _Search:
    """Shared state of one budgeted evaluation."""

    def __init__(self, s: RStructure, budget: int, witnesses: Callable[[], Iterable[Word]], bounded: bool):
        self.s, self.budget = s, budget
        self.witnesses, self.bounded = witnesses, bounded
        self.complete = True  # stays True while nothing was cut short
        self.probes = 0

    def witness_seq(self) -> _Lazy:
        src = iter(self.witnesses())
        if self.bounded:
            return _Lazy(src)

        def capped():
            for k, w in enumerate(src):
                if k >= self.budget:
                    self.complete = False
                    return
                yield w
            # an unbounded stream never certifies exhaustion
            self.complete = False
        return _Lazy(capped())

    def index_seq(self, node) -> _Lazy:
        ix = node.indices

        def gen():
            i = 0
            while ix.bound is None or i < ix.bound:
                if ix.bound is None and i >= self.budget:
                    self.complete = False
                    return
                if ix.contains(i, min(ix.budget, self.budget) if ix.bound is None else None):
                    yield i
                i += 1
        return _Lazy(gen())


def _diagonal(outer: _Lazy, inner: Callable[[int], _Lazy]) -> Iterator:
    """Pairs (outer a, inner_a b) in Cantor order of (a, b); stops when both sides are exhausted."""
    inners: dict[int, _Lazy] = {}
    t = 0
    while True:
        live = False
        for b in range(t + 1):
            a = t - b
            if not outer.has(a):
                continue
            seq = inners.get(a)
            if seq is None:
                seq = inners[a] = inner(a)
            if seq.has(b):
                live = True
                yield seq.get(b)
        if not live and outer.length is not None and all(
                inners.get(a) is not None and inners[a].length is not None and inners[a].length + a <= t
                for a in range(outer.length)):
            return
        t += 1


def _kleene_and(values: Iterable[Optional[bool]]) -> Optional[bool]:
    out: Optional[bool] = True
    for v in values:
        if v is False:
            return False
        if v is None:
            out = None
    return out


def _kleene_or(values: Iterable[Optional[bool]]) -> Optional[bool]:
    out: Optional[bool] = False
    for v in values:
        if v is True:
            return True
        if v is None:
            out = None
    return out


def _eval_qf(s: RStructure, f: Formula, env: Mapping[str, Word], budget: int) -> Optional[bool]:
    if isinstance(f, Atom):
        return atomic_truth(s, f, budget, env)
    if isinstance(f, Not):
        v = _eval_qf(s, f.body, env, budget)
        return None if v is None else not v
    if isinstance(f, Implies):
        return _kleene_or((_eval_qf(s, Not(f.premise), env, budget), _eval_qf(s, f.conclusion, env, budget)))
    if isinstance(f, And):
        return _kleene_and(_eval_qf(s, p, env, budget) for p in f.parts)
    if isinstance(f, Or):
        return _kleene_or(_eval_qf(s, p, env, budget) for p in f.parts)
    raise TypeError("quantified formula where a quantifier-free one was expected")


def _candidates(search: _Search, f: Formula, env: dict) -> Iterator[tuple[Formula, dict]]:
    """Quantifier-free instances of the Sigma_1 formula ``f`` (in NNF); ``f`` holds iff one does."""
    if classify(f).n == 0:
        yield f, env
        return
    if isinstance(f, Or):
        seqs = [_candidates(search, p, env) for p in f.parts]
        while seqs:
            for g in list(seqs):
                try:
                    yield next(g)
                except StopIteration:
                    seqs.remove(g)
        return
    if isinstance(f, And):
        quantified = [p for p in f.parts if classify(p).n > 0]
        plain = tuple(p for p in f.parts if classify(p).n == 0)
        first, rest = quantified[0], quantified[1:]
        tail = And(tuple(rest) + plain) if (rest or plain) else None
        outer = _Lazy(_candidates(search, first, env))

        def inner(a: int) -> _Lazy:
            g, e = outer.get(a)
            if tail is None:
                return _Lazy([(g, e)])
            return _Lazy((And((g, h)), e2) for h, e2 in _candidates(search, tail, e))
        yield from _diagonal(outer, inner)
        return
    if isinstance(f, Exists):
        if len(f.vars) > 1:
            yield from _candidates(search, Exists(f.vars[:1], Exists(f.vars[1:], f.body)), env)
            return
        outer = search.witness_seq()
        yield from _diagonal(outer, lambda a: _Lazy(
            _candidates(search, f.body, _bind(env, f.vars, (outer.get(a),)))))
        return
    if isinstance(f, BigOr):
        outer = search.index_seq(f)
        yield from _diagonal(outer, lambda a: _Lazy(
            _candidates(search, f.instance(outer.get(a)), _bind(env, (f.var,), ((outer.get(a),),)))))
        return
    raise LevelTooHigh(f"{type(f).__name__} inside a Sigma_1 search")


def default_witnesses(s: RStructure) -> Callable[[], Iterable[Word]]:
    """The explicit universe, else the structure's enumerator, else a rational grid of width 1."""
    if s.elements is not None:
        return lambda: iter(s.elements)
    if s.enumerate_elements is not None:
        return s.enumerate_elements
    return lambda: rational_grid(1)


def eval_budgeted(s: RStructure, f: Formula, asg: Mapping[str, Word] | None = None,
                  witnesses: Union[Iterable[Word], Callable[[], Iterable[Word]], None] = None,
                  budget: int = 1000, bounded: bool = False) -> Optional[bool]:
    """Semi-decide ``f`` in ``s``: True, False, or None for unknown.

    Sigma_1 formulas are searched for a satisfied disjunct among at most
    ``budget`` quantifier-free instances, each machine run also limited to
    ``budget`` steps.  The search yields True or unknown, except that when
    ``bounded`` declares the witnesses to be the whole universe and the
    search exhausts them, the answer False is certified.  Pi_1 formulas are
    evaluated through their negation, giving False, unknown, or True by
    exhaustion.
    """
    lv = classify(f)
    if lv.n >= 2:
        raise LevelTooHigh(f"budgeted evaluation stops at level 1; got {lv}")
    env = {k: tuple(v) for k, v in (asg or {}).items()}
    if witnesses is None:
        source = default_witnesses(s)
    elif callable(witnesses):
        source = witnesses
    else:
        items = list(witnesses)
        source = lambda: iter(items)  # noqa: E731
    if lv.n == 0:
        return _eval_qf(s, f, env, budget)
    sigma = nnf(f) if lv.kind == "Sigma" else negate(f)
    search = _Search(s, budget, source, bounded)
    verdict: Optional[bool] = None
    saw_unknown = False
    for g, e in _candidates(search, sigma, env):
        if search.probes >= budget:
            search.complete = False
            break
        search.probes += 1
        v = _eval_qf(s, g, e, budget)
        if v is True:
            verdict = True
            break
        if v is None:
            saw_unknown = True
    else:
        if search.complete and bounded and not saw_unknown:
            verdict = False
    if lv.kind == "Pi" and verdict is not None:
        return not verdict
    return verdict


# ---------------------------------------------------------------------------
# S-expression files

_SEXP_TOKEN = re.compile(r'\s*(?:;[^\n]*\n?\s*)*(\(|\)|"(?:[^"\\]|\\.)*"|[^\s()";]+)')


def _read_sexp(text: str):
    pos = 0
    stack: list[list] = [[]]
    while True:
        m = _SEXP_TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip() == "" or re.fullmatch(r"(\s*;[^\n]*\n?)*\s*", rest):
                break
            raise FormulaSyntaxError(pos, f"cannot read {rest[:20]!r}")
        tok, at = m.group(1), m.start(1)
        pos = m.end()
        if tok == "(":
            stack.append([])
            stack[-1].append(at)  # remember where the list opened
        elif tok == ")":
            if len(stack) == 1:
                raise FormulaSyntaxError(at, "unbalanced ')'")
            done = stack.pop()
            stack[-1].append(_SList(done[0], done[1:]))
        elif tok.startswith('"'):
            stack[-1].append(_SStr(at, tok[1:-1].replace('\\"', '"').replace("\\\\", "\\")))
        else:
            stack[-1].append(_SAtom(at, tok))
    if len(stack) != 1:
        raise FormulaSyntaxError(len(text), "unbalanced '('")
    if len(stack[0]) != 1:
        raise FormulaSyntaxError(0, "expected exactly one formula")
    return stack[0][0]


@dataclass
class _SAtom:
    pos: int
    text: str


@dataclass
class _SStr:
    pos: int
    text: str


@dataclass
class _SList:
    pos: int
    items: list


_NUMBER = re.compile(r"-?\d+(/\d+)?$")


def parse_formula(text: str, base_dir: str | None = None, streams: Mapping | None = None,
                  machines: Mapping[str, Machine] | None = None) -> Formula:
    """Read a formula from its S-expression form.

    ::

        F := (atom R t ...) | (= t t) | (not F) | (and F ...) | (or F ...)
           | (implies F F) | (exists (y ...) F) | (forall (y ...) F)
           | (or-enum IX (i) F) | (and-enum IX (i) F)
        IX := (machine "file.bss") | (machine "file.bss" BOUND) | (range BOUND) | naturals
        t := NAME | NUMBER | (word NUMBER ...) | (FUNCTION t ...)

    An optional ``(field g ...)`` after the index variable records the
    parameter field.  Machine files resolve against ``base_dir``, or are
    taken from ``machines`` when named there.
    """
    tree = _read_sexp(text)

    def fail(node, msg):
        raise FormulaSyntaxError(node.pos, msg)

    def head(node) -> str:
        if not isinstance(node, _SList) or not node.items or not isinstance(node.items[0], _SAtom):
            fail(node, "expected a list starting with a keyword")
        return node.items[0].text

    def number(node) -> int:
        if not isinstance(node, _SAtom) or not re.fullmatch(r"\d+", node.text):
            fail(node, "expected a natural number")
        return int(node.text)

    def term(node):
        if isinstance(node, _SAtom):
            if _NUMBER.match(node.text):
                return Lit((parse_scalar(node.text),))
            return Ref(node.text)
        if isinstance(node, _SStr):
            fail(node, "strings are not terms")
        h = head(node)
        if h == "word":
            return Lit(tuple(parse_scalar(x.text) for x in node.items[1:]))
        return App(h, tuple(term(x) for x in node.items[1:]))

    def names(node) -> tuple[str, ...]:
        if not isinstance(node, _SList) or not all(isinstance(x, _SAtom) for x in node.items):
            fail(node, "expected a list of variable names")
        return tuple(x.text for x in node.items)

    def load_machine(node) -> Machine:
        if not isinstance(node, _SStr):
            fail(node, "expected a quoted machine file name")
        if machines and node.text in machines:
            return machines[node.text]
        path = node.text if base_dir is None else os.path.join(base_dir, node.text)
        try:
            with open(path, encoding="utf-8") as fh:
                return parse_machine_dsl(fh.read(), dict(streams or {}))
        except OSError as e:
            fail(node, f"cannot open {node.text!r}: {e.strerror}")

    def index_set(node) -> IndexSet:
        if isinstance(node, _SAtom) and node.text == "naturals":
            return IndexSet()
        h = head(node)
        args = node.items[1:]
        if h == "range" and len(args) == 1:
            return IndexSet(bound=number(args[0]))
        if h == "machine" and len(args) in (1, 2):
            return IndexSet(load_machine(args[0]), number(args[1]) if len(args) == 2 else None)
        fail(node, "expected (machine \"file\" [bound]), (range n) or naturals")

    def formula(node) -> Formula:
        h = head(node)
        args = node.items[1:]
        if h == "atom":
            if not args or not isinstance(args[0], _SAtom):
                fail(node, "atom needs a relation symbol")
            return Atom(args[0].text, tuple(term(a) for a in args[1:]))
        if h in ("=", "<", ">", "<=", ">=", "!="):
            if len(args) != 2:
                fail(node, f"{h} takes two terms")
            return Atom(h, tuple(term(a) for a in args))
        if h == "not" and len(args) == 1:
            return Not(formula(args[0]))
        if h in ("and", "or"):
            parts = tuple(formula(a) for a in args)
            return And(parts) if h == "and" else Or(parts)
        if h == "implies" and len(args) == 2:
            return Implies(formula(args[0]), formula(args[1]))
        if h in ("exists", "forall") and len(args) == 2:
            return (Exists if h == "exists" else Forall)(names(args[0]), formula(args[1]))
        if h in ("or-enum", "and-enum") and len(args) in (3, 4):
            ix = index_set(args[0])
            var = names(args[1])
            if len(var) != 1:
                fail(args[1], "a countable node binds exactly one index variable")
            fld: tuple = ()
            if len(args) == 4:
                if head(args[2]) != "field":
                    fail(args[2], "expected (field ...)")
                fld = tuple(x.text for x in args[2].items[1:])
            body = formula(args[-1])
            return (BigOr if h == "or-enum" else BigAnd)(var[0], ix, body, fld)
        if h == "limit":
            return Limit("limit", tuple(formula(a) for a in args))
        fail(node, f"unknown or malformed form {h!r}")

    return formula(tree)


def load_formula(path: str, streams: Mapping | None = None) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse_formula(fh.read(), os.path.dirname(os.path.abspath(path)), streams)


def to_sexp(f: Formula) -> str:
    """Printed form of formulas without machine-indexed nodes."""
    def term(t) -> str:
        if isinstance(t, Lit):
            if len(t.word) == 1:
                return render(t.word[0])
            return "(word " + " ".join(render(x) for x in t.word) + ")"
        if isinstance(t, Ref):
            return t.name
        return "(" + " ".join([t.symbol] + [term(a) for a in t.args]) + ")"

    if isinstance(f, Atom):
        args = " ".join(term(a) for a in f.args)
        if f.rel in ("=", "<", ">", "<=", ">=", "!="):
            return f"({f.rel} {args})"
        return f"(atom {f.rel} {args})".replace(" )", ")")
    if isinstance(f, Not):
        return f"(not {to_sexp(f.body)})"
    if isinstance(f, (And, Or)):
        return "(" + " ".join([type(f).__name__.lower()] + [to_sexp(p) for p in f.parts]) + ")"
    if isinstance(f, Implies):
        return f"(implies {to_sexp(f.premise)} {to_sexp(f.conclusion)})"
    if isinstance(f, (Exists, Forall)):
        return f"({type(f).__name__.lower()} ({' '.join(f.vars)}) {to_sexp(f.body)})"
    if isinstance(f, (BigOr, BigAnd)):
        if f.indices.machine is not None or callable(f.body):
            raise ValueError("machine-indexed or generated nodes have no printed form")
        ix = "naturals" if f.indices.bound is None else f"(range {f.indices.bound})"
        fld = f" (field {' '.join(f.field)})" if f.field else ""
        kw = "or-enum" if isinstance(f, BigOr) else "and-enum"
        return f"({kw} {ix} ({f.var}){fld} {to_sexp(f.body)})"
    raise TransfiniteNotSupported("limit levels need ordinal notations")


__all__ = [
    "And", "AtomUndetermined", "BigAnd", "BigOr", "Exists", "Forall", "FormulaSyntaxError", "Implies",
    "IndexSet", "InfiniteUniverse", "Level", "LevelTooHigh", "Limit", "Not", "Or", "TransfiniteNotSupported",
    "UnboundedEnumerator", "classify", "default_witnesses", "eval_budgeted", "eval_finite", "free_vars",
    "load_formula", "negate", "nnf", "parse_formula", "to_sexp",
]
