"""Computable structures: signatures, decider bundles, and the constructions.

* well-orderings of naturals coded into the digits of one real,
* finite-dimensional vector spaces and isomorphisms onto spans,
* disjoint unions of cycles whose lengths encode a set of naturals.
"""
from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from math import isqrt
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

from bss.dsl import format_machine, parse_machine_dsl
from bss.expr import BinOp, Cell, Const, Expr
from bss.machine import (
    ComputeNode, Halted, InputNode, Machine, Oracle, OutputNode, Runner, Stuck, check,
)
from bss.scalar import (
    AlgebraicNumber, Backend, DigitStream, Scalar, Sign, StreamReal, backend_of, compare, make_stream,
    parse_scalar, render, scalar_arith, scalar_sign,
)

FORMAT_VERSION = 1
Word = tuple


class NotAStrictOrder(ValueError):
    pass


class DependentBasis(ValueError):
    pass


class NotInSpan(ValueError):
    pass


class SignatureMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Pairing


def pair(a: int, b: int) -> int:
    """Cantor pairing (a + b)(a + b + 1)/2 + b."""
    if a < 0 or b < 0:
        raise ValueError("pairing is defined on naturals")
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("pairing is defined on naturals")
    s = (isqrt(8 * n + 1) - 1) // 2
    b = n - s * (s + 1) // 2
    return s - b, b


# ---------------------------------------------------------------------------
# Signatures and structures


@dataclass(frozen=True)
class Signature:
    relations: Mapping[str, int] = field(default_factory=dict)
    functions: Mapping[str, int] = field(default_factory=dict)
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        names = list(self.relations) + list(self.functions) + list(self.constants)
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be unique across kinds")
        for k, a in list(self.relations.items()) + list(self.functions.items()):
            if a < 0:
                raise ValueError(f"negative arity for {k!r}")

    def to_json(self) -> dict:
        return {"relations": dict(self.relations), "functions": dict(self.functions),
                "constants": list(self.constants)}


@dataclass(frozen=True)
class Relation:
    """A relation decided by one machine (output 1 or 0) or by a semi-decider pair."""

    arity: int
    decider: Optional[Machine] = None
    semi: Optional[Machine] = None       # halts exactly on tuples in the relation
    co_semi: Optional[Machine] = None    # halts exactly on tuples outside it


@dataclass
class RStructure:
    sig: Signature
    universe: Machine
    relations: dict[str, Relation]
    functions: dict[str, Machine]
    constants: dict[str, Word]
    oracle: Optional[Oracle] = None
    backend: Backend = Backend.RATIONAL
    # optional explicit universe (finite structures) and witness enumerator
    elements: Optional[Sequence[Word]] = None
    enumerate_elements: Optional[Callable[[], Iterator[Word]]] = None
    name: str = "structure"


def run_decision(m: Machine, word: Sequence[Scalar], budget: int, oracle: Optional[Oracle]):
    """Halted output word, or None if the machine did not halt within budget (or stuck)."""
    r = Runner(m, word, oracle)
    out = r.advance(budget)
    return out.output if isinstance(out, Halted) else None


def dovetail(semi: Machine, co_semi: Machine, word: Sequence[Scalar], budget: int,
             oracle: Optional[Oracle], chunk: int = 256) -> Optional[bool]:
    """True if ``semi`` halts first, False if ``co_semi`` does, None if neither within budget."""
    runners = [(True, Runner(semi, word, oracle)), (False, Runner(co_semi, word, oracle))]
    live = list(runners)
    limit = 0
    while live and limit < budget:
        limit = min(budget, limit + chunk)
        for verdict, r in list(live):
            out = r.advance(limit)
            if isinstance(out, Halted):
                return verdict
            if isinstance(out, Stuck):
                live.remove((verdict, r))
    return None


def decide(rel: Relation, word: Sequence[Scalar], budget: int, oracle: Optional[Oracle]) -> Optional[bool]:
    if rel.decider is not None:
        out = run_decision(rel.decider, word, budget, oracle)
        if out is None:
            return None
        if len(out) != 1:
            return None
        if compare(out[0], 1) is Sign.ZERO:
            return True
        if compare(out[0], 0) is Sign.ZERO:
            return False
        return None
    if rel.semi is not None and rel.co_semi is not None:
        return dovetail(rel.semi, rel.co_semi, word, budget, oracle)
    if rel.semi is not None:
        return True if run_decision(rel.semi, word, budget, oracle) is not None else None
    raise ValueError("relation has no machine")


def in_universe(s: RStructure, element: Word, budget: int) -> Optional[bool]:
    """True when the universe semi-decider halts on ``element`` within budget."""
    return True if run_decision(s.universe, element, budget, s.oracle) is not None else None


# ---------------------------------------------------------------------------
# Atomic sentences


@dataclass(frozen=True)
class Lit:
    word: Word


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple


@dataclass(frozen=True)
class Ref:
    name: str  # a constant or (inside formulas) a variable


Term = Union[Lit, App, Ref]


@dataclass(frozen=True)
class Atom:
    """``rel(args)``; equality is the relation ``=``."""

    rel: str
    args: tuple


_ATOM_TOKEN = re.compile(r"\s*(alg\((?:[^()]|\([^()]*\))*\)|-?\d+/\d+|-?\d+|[A-Za-z_]\w*|[<>]=?|!=|=|[(),])")


def _tokens(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _ATOM_TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot read {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_atom(text: str) -> Atom:
    """``E((2,0),(2,2))``, ``0 < 2``, ``add((1,0),(0,1)) = (1,1)``, ``x < y``."""
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def take(expected=None):
        nonlocal i
        t = peek()
        if t is None or (expected is not None and t != expected):
            raise ValueError(f"expected {expected or 'more input'} in {text!r}")
        i += 1
        return t

    def scalar_tok(t):
        return t is not None and (t[0].isdigit() or t[0] == "-" or t.startswith("alg("))

    def term():
        t = peek()
        if t == "(":
            take("(")
            items = []
            if peek() != ")":
                items.append(parse_scalar(take()))
                while peek() == ",":
                    take(",")
                    items.append(parse_scalar(take()))
            take(")")
            return Lit(tuple(items))
        if scalar_tok(t):
            return Lit((parse_scalar(take()),))
        name = take()
        if not re.match(r"[A-Za-z_]\w*$", name):
            raise ValueError(f"unexpected {name!r} in {text!r}")
        if peek() == "(":
            take("(")
            args = []
            if peek() != ")":
                args.append(term())
                while peek() == ",":
                    take(",")
                    args.append(term())
            take(")")
            return App(name, tuple(args))
        return Ref(name)

    first = term()
    if peek() in ("<", "=", ">", "<=", ">=", "!="):
        op = take()
        second = term()
        if i != len(toks):
            raise ValueError(f"trailing input in {text!r}")
        return Atom(op, (first, second))
    if i != len(toks):
        raise ValueError(f"trailing input in {text!r}")
    if isinstance(first, App):
        return Atom(first.symbol, first.args)
    raise ValueError(f"not an atomic sentence: {text!r}")


def _words_equal(a: Word, b: Word) -> bool:
    if len(a) != len(b):
        return False
    return all(compare(x, y) is Sign.ZERO for x, y in zip(a, b))


def eval_term(s: RStructure, t: Term, budget: int, env: Mapping[str, Word] | None = None) -> Optional[Word]:
    """Value of a closed term (None: some evaluator ran out of budget)."""
    env = env or {}
    if isinstance(t, Lit):
        return t.word
    if isinstance(t, Ref):
        if t.name in env:
            return tuple(env[t.name])
        if t.name in s.constants:
            return tuple(s.constants[t.name])
        raise SignatureMismatch(f"unknown constant or variable {t.name!r}")
    if t.symbol not in s.functions:
        raise SignatureMismatch(f"unknown function {t.symbol!r}")
    if len(t.args) != s.sig.functions[t.symbol]:
        raise SignatureMismatch(f"{t.symbol} takes {s.sig.functions[t.symbol]} arguments")
    args = []
    for a in t.args:
        v = eval_term(s, a, budget, env)
        if v is None:
            return None
        args.extend(v)
    return run_decision(s.functions[t.symbol], args, budget, s.oracle)


def atomic_truth(s: RStructure, sentence: Union[str, Atom], budget: int,
                 env: Mapping[str, Word] | None = None) -> Optional[bool]:
    """True, False, or None (unknown: a machine ran out of budget or got stuck)."""
    atom = parse_atom(sentence) if isinstance(sentence, str) else sentence
    if atom.rel != "=" and atom.rel not in s.relations:
        raise SignatureMismatch(f"unknown relation {atom.rel!r}")
    if atom.rel != "=" and len(atom.args) != s.sig.relations[atom.rel]:
        raise SignatureMismatch(f"{atom.rel} takes {s.sig.relations[atom.rel]} arguments")
    values = []
    for a in atom.args:
        v = eval_term(s, a, budget, env)
        if v is None:
            return None
        values.append(v)
    if atom.rel == "=":
        if len(values) != 2:
            raise SignatureMismatch("= is binary")
        return _words_equal(values[0], values[1])
    word = tuple(x for v in values for x in v)
    return decide(s.relations[atom.rel], word, budget, s.oracle)


# ---------------------------------------------------------------------------
# Well-orderings coded in one real


def indicator_stream(member: Callable[[int, int], bool], name: str = "ell",
                     budget: int = 1000) -> DigitStream:
    """The real sum of 10**-i over codes i = <a, b> of member pairs; digit 0 weighs 1."""
    def digit(i: int) -> int:
        a, b = unpair(i)
        return 1 if member(a, b) else 0
    return make_stream(0, digit, budget, name)


def _extractor_source(pairs_input: bool, complement: bool) -> str:
    name = ("order" if pairs_input else "digit") + ("_complement" if complement else "")
    index = "(x1 + x2) * (x1 + x2 + 1) / 2 + x2" if pairs_input else "x1"
    found, absent = ("done", "spin") if not complement else ("spin", "done")
    verdict = "0" if complement else "1"
    # x2 holds 10^j times the unread tail of l.  With 0/1 digits that tail
    # is d_j + (something below 1/9), so digit j is 1 iff x2 >= 1/2.
    return f"""\
machine {name} over stream
param l = stream(ell)
node start: input -> init
node init: compute x1 := {index}, x2 := l -> test
node test: branch x2 - 1/2 >= 0 ? one : zero
node one: branch -x1 >= 0 ? {found} : drop
node drop: compute x1 := x1 - 1, x2 := 10 * (x2 - 1) -> test
node zero: branch -x1 >= 0 ? {absent} : next
node next: compute x1 := x1 - 1, x2 := 10 * x2 -> test
node done: compute x0 := 1, x1 := {verdict} -> out
node out: output
node spin: compute x0 := x0 -> spin
"""


def build_digit_extractor(ell: StreamReal, complement: bool = False) -> Machine:
    """Input (i): halts with 1 iff digit i of ``ell`` is 1, else runs forever.

    With ``complement`` the roles swap: halts (with 0) iff the digit is 0.
    """
    return parse_machine_dsl(_extractor_source(False, complement), {"ell": ell})


def build_pair_extractor(ell: StreamReal, complement: bool = False) -> Machine:
    """Input (a, b): the digit extractor applied at index <a, b>."""
    return parse_machine_dsl(_extractor_source(True, complement), {"ell": ell})


@dataclass
class OrderPresentation:
    D: frozenset
    ell: DigitStream
    less: Machine
    not_less: Machine
    structure: RStructure
    pairing: str = "cantor"


def field_of(D: Iterable[tuple[int, int]]) -> list[int]:
    return sorted({x for p in D for x in p})


def check_strict_order(D: Iterable[tuple[int, int]]) -> None:
    D = set(D)
    fld = field_of(D)
    for a, b in D:
        if a == b:
            raise NotAStrictOrder(f"not irreflexive: ({a},{b})")
        if not (isinstance(a, int) and isinstance(b, int)) or a < 0 or b < 0:
            raise NotAStrictOrder(f"pairs must be naturals: ({a},{b})")
    for a, b in D:
        for c, d in D:
            if b == c and (a, d) not in D:
                raise NotAStrictOrder(f"not transitive: ({a},{b}), ({b},{d})")
    for i, a in enumerate(fld):
        for b in fld[i + 1:]:
            if ((a, b) in D) == ((b, a) in D):
                raise NotAStrictOrder(f"not total and antisymmetric on ({a},{b})")


def _membership_machine(name: str, values: Sequence[int]) -> Machine:
    lines = [f"machine {name} over rational", "node start: input -> t0"]
    if not values:
        lines[-1] = "node start: input -> spin"
    for k, v in enumerate(values):
        nxt = f"t{k + 1}" if k + 1 < len(values) else "spin"
        lines.append(f"node t{k}: branch x1 - {v} >= 0 ? u{k} : {nxt}")
        lines.append(f"node u{k}: branch {v} - x1 >= 0 ? done : {nxt}")
    if values:
        lines += ["node done: compute x0 := 1, x1 := 1 -> out", "node out: output"]
    lines.append("node spin: compute x0 := x0 -> spin")
    return parse_machine_dsl("\n".join(lines))


def build_order_structure(D: Iterable[tuple[int, int]], budget: int = 1000) -> OrderPresentation:
    D = frozenset((int(a), int(b)) for a, b in D)
    check_strict_order(D)
    ell = indicator_stream(lambda a, b: (a, b) in D, "ell", budget)
    less = build_pair_extractor(ell)
    not_less = build_pair_extractor(ell, complement=True)
    fld = field_of(D)
    sig = Signature(relations={"<": 2})
    s = RStructure(
        sig=sig,
        universe=_membership_machine("order_universe", fld),
        relations={"<": Relation(2, semi=less, co_semi=not_less)},
        functions={},
        constants={},
        backend=Backend.STREAM,
        elements=[(a,) for a in fld],
        name="order",
    )
    return OrderPresentation(D, ell, less, not_less, s)


def random_strict_order(rng: random.Random, size: int = 10) -> frozenset:
    perm = list(range(size))
    rng.shuffle(perm)
    return frozenset((perm[i], perm[j]) for i in range(size) for j in range(i + 1, size))


# ---------------------------------------------------------------------------
# Vector spaces


def _vs_machines(n: int, backend: Backend) -> tuple[Machine, Machine, Machine]:
    b = backend.name.lower()
    universe = parse_machine_dsl(f"""\
machine vs{n}_universe over {b} equational
node start: input -> test
node test: branch x0 - {n} = 0 ? done : spin
node done: compute x0 := 1, x1 := 1 -> out
node out: output
node spin: compute x0 := x0 -> spin
""")
    add_assign = ", ".join([f"x{i} := x{i} + x{n + i}" for i in range(1, n + 1)] + [f"x0 := {n}"])
    scale_assign = ", ".join([f"x{i} := x1 * x{i + 1}" for i in range(1, n + 1)] + [f"x0 := {n}"])
    add = parse_machine_dsl(f"machine vs{n}_add over {b}\nnode start: input -> sum\n"
                            f"node sum: compute {add_assign} -> out\nnode out: output\n")
    scale = parse_machine_dsl(f"machine vs{n}_scale over {b}\nnode start: input -> mul\n"
                              f"node mul: compute {scale_assign} -> out\nnode out: output\n")
    return universe, add, scale


def unit_word(n: int, i: int) -> Word:
    return tuple(1 if k == i else 0 for k in range(n))


def rational_grid(dim: int) -> Iterator[Word]:
    """Every rational vector of length ``dim``, each exactly once, smallest heights first."""
    if dim == 0:
        yield ()
        return
    seen: set = set()
    for h in count(0):
        # all vectors whose entries have numerator and denominator at most h
        values = sorted({Fraction(p, q) for q in range(1, h + 2) for p in range(-h, h + 1)},
                        key=lambda x: (abs(x.numerator) + x.denominator, x))
        for w in _product(values, dim):
            if w not in seen:
                seen.add(w)
                yield tuple(x.numerator if x.denominator == 1 else x for x in w)


def _product(values, dim):
    if dim == 0:
        yield ()
        return
    for head in values:
        for tail in _product(values, dim - 1):
            yield (head,) + tail


def vs_make(n: int, backend: Backend = Backend.RATIONAL) -> RStructure:
    if n < 0:
        raise ValueError("dimension must be a natural number")
    backend = Backend(backend)
    universe, add, scale = _vs_machines(n, backend)
    consts = {f"b{i}": unit_word(n, i - 1) for i in range(1, n + 1)}
    consts["zero"] = (0,) * n
    sig = Signature(functions={"add": 2, "scale": 2}, constants=tuple(consts))
    return RStructure(sig, universe, {}, {"add": add, "scale": scale}, consts, backend=backend,
                      elements=[()] if n == 0 else None,
                      enumerate_elements=lambda: rational_grid(n), name=f"V{n}")


def basis(s: RStructure) -> list[Word]:
    return [s.constants[c] for c in s.sig.constants if c != "zero"]


def _is_zero(x: Scalar) -> bool:
    return scalar_sign(x) is Sign.ZERO


def _common_backend(rows: Sequence[Sequence[Scalar]]) -> Backend:
    return max((backend_of(x) for r in rows for x in r), default=Backend.INTEGER)


def _div(a: Scalar, b: Scalar) -> Scalar:
    return scalar_arith("div", a, b)


def rank(rows: Sequence[Sequence[Scalar]]) -> int:
    """Exact rank by Gaussian elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    width = len(m[0])
    r = 0
    for col in range(width):
        piv = next((i for i in range(r, len(m)) if not _is_zero(m[i][col])), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and not _is_zero(m[i][col]):
                f = _div(m[i][col], m[r][col])
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def solve(columns: Sequence[Sequence[Scalar]], y: Sequence[Scalar]) -> tuple:
    """Coefficients lambda with sum(lambda_i * columns[i]) = y (columns independent)."""
    n, mdim = len(columns), len(y)
    aug = [[columns[i][j] for i in range(n)] + [y[j]] for j in range(mdim)]
    r, pivots = 0, []
    for col in range(n):
        piv = next((i for i in range(r, mdim) if not _is_zero(aug[i][col])), None)
        if piv is None:
            raise DependentBasis("basis vectors are linearly dependent")
        aug[r], aug[piv] = aug[piv], aug[r]
        p = aug[r][col]
        aug[r] = [_div(a, p) for a in aug[r]]
        for i in range(mdim):
            if i != r and not _is_zero(aug[i][col]):
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    for i in range(r, mdim):
        if not _is_zero(aug[i][n]):
            raise NotInSpan("vector is not in the span of the basis")
    return tuple(_tidy(aug[i][n]) for i in range(n))


def _tidy(x: Scalar) -> Scalar:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, AlgebraicNumber) and x.is_rational:
        return _tidy(x.as_fraction())
    return x


@dataclass
class Isomorphism:
    machine: Machine
    basis: tuple[Word, ...]
    n: int
    m: int

    def inverse(self, y: Sequence[Scalar]) -> tuple:
        """Coordinates of ``y`` in the target basis (computed by elimination, not by a machine)."""
        return solve(self.basis, y)


def vs_iso(n: int, target_basis: Sequence[Sequence[Scalar]], backend: Backend | None = None) -> Isomorphism:
    """Machine mapping (l_1..l_n) to sum l_i a_i for the given independent a_i."""
    vecs = [tuple(v) for v in target_basis]
    if len(vecs) != n:
        raise ValueError(f"expected {n} basis words, got {len(vecs)}")
    m = len(vecs[0]) if vecs else 0
    if any(len(v) != m for v in vecs):
        raise ValueError("basis words must have a common length")
    if rank(vecs) < n:
        raise DependentBasis("basis vectors are linearly dependent")
    if backend is None:
        backend = max(Backend.RATIONAL, _common_backend(vecs))
    assigns: list[tuple[int, Expr]] = []
    for j in range(m):
        terms: list[Expr] = []
        for i, v in enumerate(vecs):
            c = v[j]
            if _is_zero(c):
                continue
            cell = Cell(i + 1)
            terms.append(cell if (not isinstance(c, AlgebraicNumber) and c == 1) else BinOp("*", Const(c), cell))
        e: Expr = Const(0)
        for k, t in enumerate(terms):
            e = t if k == 0 else BinOp("+", e, t)
        assigns.append((j + 1, e))
    assigns.append((0, Const(m)))
    nodes = {
        "start": InputNode("map"),
        "map": ComputeNode(tuple(assigns), "out"),
        "out": OutputNode(),
    }
    machine = check(Machine(f"iso{n}to{m}", backend, nodes, {}))
    return Isomorphism(machine, tuple(vecs), n, m)


# ---------------------------------------------------------------------------
# Cycles


def cycle_length(n: int, in_s: bool) -> int:
    return 2 * n if in_s else 2 * n + 1


def _as_oracle(S) -> Oracle:
    if isinstance(S, Oracle):
        return S
    if callable(S):
        return Oracle(lambda w: bool(S(int(w[0]))), "S")
    members = frozenset(int(x) for x in S)
    return Oracle(lambda w: len(w) == 1 and w[0] in members, "S")


def cycle_machines(n_min: int = 2) -> tuple[Machine, Machine]:
    adjacency = parse_machine_dsl("""\
# E((n,j),(n',j')) for the union of cycles; the oracle answers n in S
machine cycle_adjacency over integer equational
node start: input -> same
node same: branch x1 - x3 = 0 ? ask : no
node ask: oracle [x1] into x5 -> len
node len: compute x6 := 2 * x1 + 1 - x5, x7 := x4 - x2 -> step
node step: branch (x7 - 1) * (x7 + 1) * (x7 - x6 + 1) * (x7 + x6 - 1) = 0 ? yes : no
node yes: compute x0 := 1, x1 := 1 -> out
node no: compute x0 := 1, x1 := 0 -> out
node out: output
""")
    universe = parse_machine_dsl(f"""\
# halts on (n, j) with n >= {n_min} and 0 <= j < len(n)
machine cycle_universe over integer
node start: input -> width
node width: branch x0 - 2 = 0 ? low : spin
node low: branch x1 - {n_min} >= 0 ? ask : spin
node ask: oracle [x1] into x3 -> len
node len: compute x4 := 2 * x1 + 1 - x3 -> lo
node lo: branch x2 >= 0 ? hi : spin
node hi: branch x4 - x2 - 1 >= 0 ? done : spin
node done: compute x0 := 1, x1 := 1 -> out
node out: output
node spin: compute x0 := x0 -> spin
""")
    return adjacency, universe


def cycle_vertices(S: Oracle, n_min: int = 2) -> Iterator[Word]:
    """All vertices, cycle by cycle."""
    for n in count(n_min):
        for j in range(cycle_length(n, bool(S((n,))))):
            yield (n, j)


def cycle_graph_structure(S, n_min: int = 2, n_max: Optional[int] = None) -> RStructure:
    """Disjoint union of C_2n (n in S) and C_2n+1 (n not in S) over n >= n_min.

    ``n_max`` truncates the union to a finite structure with an explicit universe.
    """
    if n_min < 2:
        raise ValueError("n_min must be at least 2")
    oracle = _as_oracle(S)
    adjacency, universe = cycle_machines(n_min)
    elements = None
    if n_max is not None:
        elements = [(n, j) for n in range(n_min, n_max + 1)
                    for j in range(cycle_length(n, bool(oracle((n,)))))]
    return RStructure(
        sig=Signature(relations={"E": 2}),
        universe=universe,
        relations={"E": Relation(2, decider=adjacency)},
        functions={},
        constants={},
        oracle=oracle,
        backend=Backend.INTEGER,
        elements=elements,
        enumerate_elements=lambda: cycle_vertices(oracle, n_min),
        name="cycles",
    )


# ---------------------------------------------------------------------------
# Finite structures given by tables


def _table_decider(name: str, arity: int, rows: Sequence[tuple[int, ...]]) -> Machine:
    """Equational decider: output (1) on a listed tuple, (0) otherwise."""
    lines = [f"machine {name} over integer equational", "node start: input -> r0" if rows else "node start: input -> no"]
    for k, row in enumerate(rows):
        miss = f"r{k + 1}" if k + 1 < len(rows) else "no"
        for j, v in enumerate(row):
            nxt = f"r{k}c{j + 1}" if j + 1 < arity else "yes"
            label = f"r{k}" if j == 0 else f"r{k}c{j}"
            lines.append(f"node {label}: branch x{j + 1} - ({v}) = 0 ? {nxt} : {miss}")
    lines += ["node yes: compute x1 := 1 -> out", "node no: compute x1 := 0 -> out", "node out: output [x1]"]
    return parse_machine_dsl("\n".join(lines))


def finite_structure(elements: Iterable[int], relations: Mapping[str, Iterable[Sequence[int]]],
                     name: str = "finite", arities: Mapping[str, int] | None = None) -> RStructure:
    """A relational structure on finitely many integers, each relation a table.

    Arities come from the rows; ``arities`` fixes them for empty tables (default 2).
    """
    elements = sorted({int(e) for e in elements})
    arities = dict(arities or {})
    rels = {}
    for k, rows in relations.items():
        rows = sorted({tuple(int(v) for v in r) for r in rows})
        arity = arities.get(k, len(rows[0]) if rows else 2)
        if any(len(r) != arity for r in rows) or arity == 0:
            raise ValueError(f"relation {k!r} needs rows of one positive arity")
        if any(v not in elements for r in rows for v in r):
            raise ValueError(f"relation {k!r} mentions a non-element")
        label = re.sub(r"\W", "_", k)
        rels[k] = Relation(arity, decider=_table_decider(f"{name}_{label}", arity, rows))
    universe = _membership_machine(f"{name}_universe", elements)
    return RStructure(Signature(relations={k: r.arity for k, r in rels.items()}), universe, rels, {}, {},
                      backend=Backend.INTEGER, elements=[(e,) for e in elements], name=name)


# ---------------------------------------------------------------------------
# Manifests


def _machine_file(name: str) -> str:
    return f"{name}.bss"


def structure_manifest(s: RStructure, kind: str, files: Mapping[str, str],
                       extra: Mapping | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "name": s.name,
        "backend": s.backend.name.lower(),
        "signature": s.sig.to_json(),
        "universe": files["universe"],
        "relations": {},
        "functions": {k: files[f"function:{k}"] for k in s.functions},
        "constants": {k: [render(x) for x in v] for k, v in s.constants.items()},
        "oracle": s.oracle.name if s.oracle is not None else None,
    }
    for k, rel in s.relations.items():
        entry = {"arity": rel.arity}
        for role in ("decider", "semi", "co_semi"):
            key = f"relation:{k}:{role}"
            if key in files:
                entry[role] = files[key]
        doc["relations"][k] = entry
    if extra:
        doc.update(extra)
    return doc


def machine_files(s: RStructure) -> dict[str, tuple[str, Machine]]:
    """Role -> (file name, machine) for every machine of ``s``."""
    out = {"universe": (_machine_file(s.universe.name), s.universe)}
    for k, fn in s.functions.items():
        out[f"function:{k}"] = (_machine_file(fn.name), fn)
    for k, rel in s.relations.items():
        for role in ("decider", "semi", "co_semi"):
            mm = getattr(rel, role)
            if mm is not None:
                out[f"relation:{k}:{role}"] = (_machine_file(mm.name), mm)
    return out


def write_structure(s: RStructure, kind: str, directory, extra: Mapping | None = None) -> str:
    """Write machine sources and ``manifest.json`` into ``directory``; returns the manifest path."""
    import os

    os.makedirs(directory, exist_ok=True)
    files = machine_files(s)
    for _, (fname, mm) in sorted(files.items()):
        with open(os.path.join(directory, fname), "w", encoding="utf-8") as fh:
            fh.write(format_machine(mm))
    doc = structure_manifest(s, kind, {k: v[0] for k, v in files.items()}, extra)
    path = os.path.join(directory, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return path


def load_structure(path: str) -> RStructure:
    """Rebuild a structure from a manifest written by :func:`write_structure`."""
    import os

    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported manifest format_version {doc.get('format_version')!r}")
    base = os.path.dirname(os.path.abspath(path))
    streams: dict[str, StreamReal] = {}
    oracle = None
    kind = doc["kind"]
    if kind == "order":
        D = frozenset(tuple(p) for p in doc["pairs"])
        streams["ell"] = indicator_stream(lambda a, b: (a, b) in D, "ell", doc.get("digit_budget", 1000))
    if kind == "cycles":
        oracle = _as_oracle(doc["set"])

    def load(fname: str) -> Machine:
        with open(os.path.join(base, fname), encoding="utf-8") as fh:
            return parse_machine_dsl(fh.read(), streams)

    sig = Signature(doc["signature"]["relations"], doc["signature"]["functions"],
                    tuple(doc["signature"]["constants"]))
    relations = {}
    for k, entry in doc["relations"].items():
        relations[k] = Relation(entry["arity"], **{role: load(entry[role])
                                                   for role in ("decider", "semi", "co_semi") if role in entry})
    functions = {k: load(v) for k, v in doc["functions"].items()}
    constants = {k: tuple(parse_scalar(x) for x in v) for k, v in doc["constants"].items()}
    s = RStructure(sig, load(doc["universe"]), relations, functions, constants, oracle,
                   Backend.parse(doc["backend"]), name=doc.get("name", kind))
    if kind == "order":
        s.elements = [(a,) for a in field_of(doc["pairs"])]
    elif kind == "vectorspace":
        n = doc["dim"]
        s.enumerate_elements = lambda: rational_grid(n)
        if n == 0:
            s.elements = [()]
    elif kind == "finite":
        s.elements = [(e,) for e in doc["elements"]]
    elif kind == "cycles":
        n_min = doc.get("n_min", 2)
        s.enumerate_elements = lambda: cycle_vertices(oracle, n_min)
        if doc.get("n_max") is not None:
            s.elements = [(n, j) for n in range(n_min, doc["n_max"] + 1)
                          for j in range(cycle_length(n, bool(oracle((n,)))))]
    return s
