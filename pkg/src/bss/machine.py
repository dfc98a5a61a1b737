"""Machines over a ring: graphs, configurations, and the interpreter.

A machine is a finite directed graph of input, compute, branch, shift,
output, and (optionally) oracle nodes acting on a bi-infinite tape with
finite support.  The interpreter is deterministic: every configuration has
at most one successor.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from bss.expr import (
    BinOp, Const, Expr, cell_name, compile_expr, is_polynomial, params_of, walk,
)
from bss.scalar import (
    AlgebraicNumber, Backend, BackendMismatch, DivisionByZero, IndeterminateOperand, Scalar,
    Sign, render, scalar_sign,
)

Word = tuple  # finite sequence of scalars


# ---------------------------------------------------------------------------
# Tape


def _is_exact_zero(v: Scalar) -> bool:
    if isinstance(v, (int, Fraction)):
        return v == 0
    if isinstance(v, AlgebraicNumber):
        return v.degree == 1 and v.as_fraction() == 0
    return False


class Tape:
    """Finitely supported bi-infinite sequence; ``tape[i]`` is cell x_i.

    Shifts only move ``offset``; ``support`` is keyed by absolute position
    and never stores an exact zero.
    """

    __slots__ = ("offset", "support")

    def __init__(self, support: Mapping[int, Scalar] | None = None, offset: int = 0):
        self.offset = offset
        self.support = {k: v for k, v in (support or {}).items() if not _is_exact_zero(v)}

    @classmethod
    def from_cells(cls, cells: Mapping[int, Scalar]) -> "Tape":
        return cls(cells, 0)

    def __getitem__(self, i: int) -> Scalar:
        return self.support.get(i + self.offset, 0)

    def set(self, i: int, v: Scalar) -> "Tape":
        support = dict(self.support)
        if _is_exact_zero(v):
            support.pop(i + self.offset, None)
        else:
            support[i + self.offset] = v
        t = Tape.__new__(Tape)
        t.offset, t.support = self.offset, support
        return t

    def shift(self, direction: str) -> "Tape":
        # sigma_l(x)_i = x_{i+1}: the new x_i is read one position further on
        t = Tape.__new__(Tape)
        t.support = self.support
        t.offset = self.offset + (1 if direction == "left" else -1)
        return t

    def cells(self) -> dict[int, Scalar]:
        """Nonzero cells by relative index."""
        return {k - self.offset: v for k, v in sorted(self.support.items())}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tape):
            return NotImplemented
        return self.cells() == other.cells()

    def __hash__(self) -> int:
        return hash(frozenset(self.cells().items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{cell_name(k)}={render(v)}" for k, v in self.cells().items())
        return f"Tape({inner})"


# ---------------------------------------------------------------------------
# Nodes and machines


@dataclass(frozen=True)
class InputNode:
    next: Optional[str]
    cells: Optional[tuple[int, ...]] = None  # None: length in x0, entries in x1..xn


@dataclass(frozen=True)
class ComputeNode:
    assignments: tuple[tuple[int, Expr], ...]
    next: Optional[str]


@dataclass(frozen=True)
class BranchNode:
    expr: Expr
    if_true: Optional[str]   # edge 1: expr >= 0 (or expr = 0 for an equality test)
    if_false: Optional[str]  # edge 0
    relation: str = ">="     # ">=" or "="


@dataclass(frozen=True)
class ShiftNode:
    direction: str  # "left" or "right"
    next: Optional[str]


@dataclass(frozen=True)
class OutputNode:
    cells: Optional[tuple[int, ...]] = None  # None: length in x0, entries in x1..xm


@dataclass(frozen=True)
class OracleNode:
    query: tuple[int, ...]
    target: int
    next: Optional[str]


Node = Union[InputNode, ComputeNode, BranchNode, ShiftNode, OutputNode, OracleNode]

NODE_KINDS = {
    InputNode: "input", ComputeNode: "compute", BranchNode: "branch",
    ShiftNode: "shift", OutputNode: "output", OracleNode: "oracle",
}


def successors(node: Node) -> list[tuple[str, Optional[str]]]:
    """Labelled out-edges: ``""`` for the single edge, ``"1"``/``"0"`` for branches."""
    if isinstance(node, BranchNode):
        return [("1", node.if_true), ("0", node.if_false)]
    if isinstance(node, OutputNode):
        return []
    return [("", node.next)]


def node_exprs(node: Node) -> list[Expr]:
    if isinstance(node, ComputeNode):
        return [e for _, e in node.assignments]
    if isinstance(node, BranchNode):
        return [node.expr]
    return []


@dataclass(frozen=True, eq=False)
class Machine:
    name: str
    backend: Backend
    nodes: dict[str, Node]
    params: dict[str, Scalar] = field(default_factory=dict)
    equational: bool = False

    @property
    def input_id(self) -> str:
        ids = [k for k, n in self.nodes.items() if isinstance(n, InputNode)]
        if len(ids) != 1:
            raise ValueError(f"machine {self.name!r} has {len(ids)} input nodes")
        return ids[0]

    def edges(self) -> list[tuple[str, str, Optional[str]]]:
        return [(k, label, dst) for k, n in self.nodes.items() for label, dst in successors(n)]

    def has_oracle(self) -> bool:
        return any(isinstance(n, OracleNode) for n in self.nodes.values())

    def branches(self) -> list[BranchNode]:
        return [n for n in self.nodes.values() if isinstance(n, BranchNode)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Machine):
            return NotImplemented
        return (self.name, self.backend, self.nodes, self.params, self.equational) == (
            other.name, other.backend, other.nodes, other.params, other.equational)

    __hash__ = None


@dataclass(frozen=True)
class Violation:
    node: Optional[str]
    clause: str
    message: str

    def __str__(self) -> str:
        where = f"node {self.node}: " if self.node is not None else ""
        return f"{where}{self.message} [{self.clause}]"


def validate(m: Machine) -> list[Violation]:
    """Structural check against the machine definition; empty iff well formed."""
    out: list[Violation] = []
    inputs = [k for k, n in m.nodes.items() if isinstance(n, InputNode)]
    if len(inputs) != 1:
        out.append(Violation(None, "input-unique", f"expected exactly one input node, found {len(inputs)}"))
    incoming: dict[str, int] = {k: 0 for k in m.nodes}
    for src, label, dst in m.edges():
        kind = NODE_KINDS[type(m.nodes[src])]
        if dst is None:
            clause = "branch-two-edges" if kind == "branch" else f"{kind}-one-edge"
            what = f"edge {label}" if label else "its outgoing edge"
            out.append(Violation(src, clause, f"{kind} node is missing {what}"))
        elif dst not in m.nodes:
            out.append(Violation(src, "dangling-edge", f"edge to unknown node {dst!r}"))
        else:
            incoming[dst] += 1
    for k in inputs:
        if incoming[k]:
            out.append(Violation(k, "input-no-incoming", "input node has incoming edges"))
    if inputs and not _weakly_connected(m):
        out.append(Violation(None, "connected", "graph is not connected"))
    for k, n in m.nodes.items():
        for e in node_exprs(n):
            for name in sorted(params_of(e)):
                if name not in m.params:
                    out.append(Violation(k, "param-bound", f"parameter {name!r} is not bound"))
            for sub in walk(e):
                if getattr(sub, "exponent", 0) < 0:
                    out.append(Violation(k, "exponent", "negative exponent"))
        if isinstance(n, BranchNode):
            if n.relation not in (">=", "="):
                out.append(Violation(k, "branch-relation", f"unknown relation {n.relation!r}"))
            if m.equational and n.relation != "=":
                out.append(Violation(k, "equational", "equational machines branch on equalities only"))
            if not is_polynomial(n.expr):
                out.append(Violation(k, "branch-polynomial", "branch test divides by a tape expression"))
        if isinstance(n, ShiftNode) and n.direction not in ("left", "right"):
            out.append(Violation(k, "shift-direction", f"unknown direction {n.direction!r}"))
        if m.backend is Backend.INTEGER:
            for e in node_exprs(n):
                if any(isinstance(s, BinOp) and s.op == "/" for s in walk(e)):
                    out.append(Violation(k, "backend", "division is not a ring operation over Z"))
                if any(isinstance(s, Const) and not isinstance(s.value, int) for s in walk(e)):
                    out.append(Violation(k, "backend", "non-integer constant over Z"))
    for name, v in m.params.items():
        try:
            ok = m.backend.admits(v)
        except TypeError:
            ok = False
        if not ok:
            out.append(Violation(None, "backend", f"parameter {name!r} is not in the {m.backend.name} backend"))
    return out


def _weakly_connected(m: Machine) -> bool:
    adj: dict[str, set[str]] = {k: set() for k in m.nodes}
    for src, _, dst in m.edges():
        if dst in adj:
            adj[src].add(dst)
            adj[dst].add(src)
    start = next(iter(m.nodes))
    seen, stack = {start}, [start]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(m.nodes)


class InvalidMachine(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in violations))


def check(m: Machine) -> Machine:
    problems = validate(m)
    if problems:
        raise InvalidMachine(problems)
    return m


def check_equational(m: Machine) -> bool:
    """True iff every branch is an equality test (vacuously true with no branches)."""
    return all(b.relation == "=" for b in m.branches())


# ---------------------------------------------------------------------------
# Configurations and outcomes


@dataclass(frozen=True)
class Config:
    node: str
    tape: Tape
    steps: int = 0
    word: Optional[Word] = None  # the raw input, consumed by the input node


class StuckReason(enum.Enum):
    DIVISION_BY_ZERO = "DivisionByZero"
    INDETERMINATE_BRANCH = "IndeterminateBranch"
    INDETERMINATE_OPERAND = "IndeterminateOperand"
    ORACLE_UNAVAILABLE = "OracleUnavailable"
    INVALID_OUTPUT = "InvalidOutput"


@dataclass(frozen=True)
class Halted:
    output: Word
    steps: int


@dataclass(frozen=True)
class OutOfBudget:
    last: Config


@dataclass(frozen=True)
class Stuck:
    reason: StuckReason
    at: Config


RunOutcome = Union[Halted, OutOfBudget, Stuck]


@dataclass(frozen=True)
class Oracle:
    """Characteristic function of a set of words."""

    membership: Callable[[Word], bool]
    name: str = "X"

    def __call__(self, query: Word) -> int:
        return 1 if self.membership(tuple(query)) else 0

    @classmethod
    def finite(cls, members: Iterable[Sequence], name: str = "X") -> "Oracle":
        table = frozenset(tuple(w) for w in members)
        return cls(lambda w: w in table, name)


class _Halt(Exception):
    def __init__(self, output: Word):
        self.output = output


class _StuckSignal(Exception):
    def __init__(self, reason: StuckReason):
        self.reason = reason


def _natural(v: Scalar) -> Optional[int]:
    if isinstance(v, int):
        return v if v >= 0 else None
    if isinstance(v, Fraction) and v.denominator == 1 and v >= 0:
        return int(v)
    if isinstance(v, AlgebraicNumber) and v.degree == 1:
        return _natural(v.as_fraction())
    return None


class _Compiled:
    """Per-node closures over a mutable (support, offset) state."""

    def __init__(self, m: Machine):
        self.machine = m
        self.ops: dict[str, Callable] = {}
        for k, n in m.nodes.items():
            self.ops[k] = self._compile(n)

    def _compile(self, n: Node):
        params = self.machine.params
        if isinstance(n, InputNode):
            return ("input", n)
        if isinstance(n, ComputeNode):
            return ("compute", tuple((t, compile_expr(e, params)) for t, e in n.assignments), n.next)
        if isinstance(n, BranchNode):
            return ("branch", compile_expr(n.expr, params), n.if_true, n.if_false, n.relation == "=")
        if isinstance(n, ShiftNode):
            return ("shift", 1 if n.direction == "left" else -1, n.next)
        if isinstance(n, OutputNode):
            return ("output", n.cells)
        if isinstance(n, OracleNode):
            return ("oracle", n.query, n.target, n.next)
        raise TypeError(n)


def _compiled(m: Machine) -> _Compiled:
    c = m.__dict__.get("_compiled")
    if c is None:
        c = _Compiled(m)
        object.__setattr__(m, "_compiled", c)
    return c


class Runner:
    """Steppable execution of one machine on one input.

    Holds the live configuration so that several runs can be interleaved
    (dovetailed) by a caller; :func:`run` is the one-shot wrapper.
    """

    def __init__(self, m: Machine, word: Sequence[Scalar], oracle: Optional[Oracle] = None,
                 trace: Optional[list] = None, *, detect_cycles: bool = True):
        self.machine = m
        self.word = tuple(word)
        for v in self.word:
            if not m.backend.admits(v):
                raise BackendMismatch(f"input {render(v)} is not in the {m.backend.name} backend")
        self._code = _compiled(m)
        self.oracle = oracle
        self.trace = trace
        self.node = m.input_id
        self.support: dict[int, Scalar] = {}
        self.offset = 0
        self.steps = 0
        self.outcome: Optional[RunOutcome] = None
        self._detect = detect_cycles
        self._mark: Optional[tuple] = None
        self._mark_step = 0
        self._power = 1

    # -- state -----------------------------------------------------------

    def config(self) -> Config:
        tape = Tape.__new__(Tape)
        tape.offset, tape.support = self.offset, dict(self.support)
        word = self.word if self.steps == 0 else None
        return Config(self.node, tape, self.steps, word)

    def _get(self, i: int) -> Scalar:
        return self.support.get(i + self.offset, 0)

    def _write(self, i: int, v: Scalar, writes: Optional[dict]) -> None:
        pos = i + self.offset
        if _is_exact_zero(v):
            self.support.pop(pos, None)
        else:
            self.support[pos] = v
        if writes is not None:
            writes[cell_name(i)] = render(v)

    # -- execution ---------------------------------------------------------

    def _execute(self) -> Optional[str]:
        """Run the current node; return the next node id or raise _Halt/_StuckSignal."""
        op = self._code.ops[self.node]
        kind = op[0]
        rec = {"step": self.steps, "node": self.node} if self.trace is not None else None
        writes = {} if rec is not None else None
        try:
            if kind == "compute":
                get = self._get
                values = [(t, f(get)) for t, f in op[1]]
                for t, v in values:
                    self._write(t, v, writes)
                nxt = op[2]
            elif kind == "branch":
                value = op[1](self._get)
                s = scalar_sign(value)
                if s is Sign.INDETERMINATE:
                    raise _StuckSignal(StuckReason.INDETERMINATE_BRANCH)
                taken = (s is Sign.ZERO) if op[4] else (s is not Sign.NEGATIVE)
                nxt = op[2] if taken else op[3]
                if rec is not None:
                    rec["edge"] = 1 if taken else 0
                    rec["sign"] = s.name.lower()
            elif kind == "shift":
                self.offset += op[1]
                nxt = op[2]
                if rec is not None:
                    rec["shift"] = "left" if op[1] == 1 else "right"
            elif kind == "oracle":
                if self.oracle is None:
                    raise _StuckSignal(StuckReason.ORACLE_UNAVAILABLE)
                query = tuple(self._get(i) for i in op[1])
                self._write(op[2], self.oracle(query), writes)
                nxt = op[3]
            elif kind == "input":
                self._place(op[1], writes)
                nxt = op[1].next
            else:
                raise _Halt(self._extract(op[1]))
        except (DivisionByZero, ZeroDivisionError):
            raise _StuckSignal(StuckReason.DIVISION_BY_ZERO) from None
        except IndeterminateOperand:
            raise _StuckSignal(StuckReason.INDETERMINATE_OPERAND) from None
        finally:
            if rec is not None:
                if writes:
                    rec["writes"] = writes
                self.trace.append(rec)
        return nxt

    def _place(self, node: InputNode, writes: Optional[dict]) -> None:
        self.support, self.offset = {}, 0
        if node.cells is None:
            self._write(0, len(self.word), writes)
            for i, v in enumerate(self.word, start=1):
                self._write(i, v, writes)
        else:
            for i, v in zip(node.cells, self.word):
                self._write(i, v, writes)

    def _extract(self, cells: Optional[tuple[int, ...]]) -> Word:
        if cells is None:
            n = _natural(self._get(0))
            if n is None:
                raise _StuckSignal(StuckReason.INVALID_OUTPUT)
            cells = tuple(range(1, n + 1))
        return tuple(self._get(i) for i in cells)

    def step(self) -> Optional[RunOutcome]:
        """Execute one node; return the final outcome if the run just ended."""
        if self.outcome is not None:
            return self.outcome
        node, offset = self.node, self.offset
        try:
            nxt = self._execute()
        except _Halt as h:
            self.steps += 1
            self.outcome = Halted(h.output, self.steps)
            return self.outcome
        except _StuckSignal as s:
            # nodes write only after every value is computed, so the tape is untouched
            tape = Tape.__new__(Tape)
            tape.offset, tape.support = offset, dict(self.support)
            word = self.word if self.steps == 0 else None
            self.outcome = Stuck(s.reason, Config(node, tape, self.steps, word))
            return self.outcome
        self.node = nxt
        self.steps += 1
        return None

    def advance(self, budget: int) -> Optional[RunOutcome]:
        """Step until the total step count reaches ``budget`` or the run ends.

        A repeated configuration proves divergence; whole periods are then
        skipped, which lands on the configuration a step-by-step run would
        reach at ``budget``.
        """
        detect = self._detect and self.trace is None
        while self.steps < budget:
            out = self.step()
            if out is not None:
                return out
            if detect and self._check_cycle(budget):
                break
        return self.outcome

    def _relative(self) -> dict:
        off = self.offset
        return {k - off: v for k, v in self.support.items()}

    def _check_cycle(self, budget: int) -> bool:
        # Brent: compare against a checkpoint refreshed at powers of two.
        mark = self._mark
        if mark is not None and mark[0] == self.node and mark[1] == self._relative():
            period = self.steps - self._mark_step
            remaining = (budget - self.steps) % period
            self.steps = budget - remaining
            for _ in range(remaining):
                self.step()
            return True
        if mark is None or self.steps - self._mark_step >= self._power:
            self._mark = (self.node, self._relative())
            self._mark_step = self.steps
            self._power *= 2
        return False


def step(m: Machine, c: Config, oracle: Optional[Oracle] = None) -> Union[Config, RunOutcome]:
    """Apply one node to a configuration.

    Returns the successor configuration, ``Halted`` when ``c`` sits at an
    output node, or ``Stuck``.
    """
    r = Runner.__new__(Runner)
    r.machine, r._code, r.oracle, r.trace = m, _compiled(m), oracle, None
    r.word = tuple(c.word) if c.word is not None else ()
    r.node, r.offset, r.support = c.node, c.tape.offset, dict(c.tape.support)
    r.steps, r.outcome = c.steps, None
    r._detect, r._mark = False, None
    out = r.step()
    if out is not None:
        return out
    return r.config()


def initial_config(m: Machine, word: Sequence[Scalar]) -> Config:
    return Config(m.input_id, Tape(), 0, tuple(word))


def run(m: Machine, word: Sequence[Scalar], budget: int, oracle: Optional[Oracle] = None,
        trace: Optional[list] = None) -> RunOutcome:
    """Run ``m`` on ``word`` for at most ``budget`` node executions."""
    if budget < 1:
        raise ValueError("budget must be positive")
    r = Runner(m, word, oracle, trace)
    out = r.advance(budget)
    return out if out is not None else OutOfBudget(r.config())


def describe_outcome(out: RunOutcome) -> dict:
    """JSON-ready summary with lossless scalar renderings."""
    if isinstance(out, Halted):
        return {"status": "halted", "steps": out.steps, "output": [render(v) for v in out.output]}
    if isinstance(out, OutOfBudget):
        return {"status": "out_of_budget", "steps": out.last.steps, "node": out.last.node}
    return {"status": "stuck", "reason": out.reason.value, "steps": out.at.steps, "node": out.at.node}
