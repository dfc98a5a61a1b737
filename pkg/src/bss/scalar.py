"""Exact scalars for the four ring backends a machine can run over.

Integers and rationals are the builtin ``int`` and ``fractions.Fraction``.
Real algebraic numbers are :class:`AlgebraicNumber` (minimal polynomial
plus an isolating interval), and transcendental parameters are
:class:`StreamReal` values given by base-10 digit sources.  Every sign
query is exact, except that a stream may answer ``Sign.INDETERMINATE``
once its digit budget is spent.
"""
from __future__ import annotations

import enum
import threading
from fractions import Fraction
from typing import Callable, Sequence, Union

from bss import _upoly as up

DEFAULT_DIGIT_BUDGET = 1000


class ScalarError(ArithmeticError):
    pass


class DivisionByZero(ScalarError, ZeroDivisionError):
    pass


class IndeterminateOperand(ScalarError):
    pass


class BackendMismatch(ScalarError, TypeError):
    pass


class NoRootInInterval(ScalarError, ValueError):
    pass


class MultipleRootsInInterval(ScalarError, ValueError):
    pass


class Backend(enum.IntEnum):
    # Ordered by promotion: a value of one backend embeds in every later one,
    # except that STREAM only extends RATIONAL.
    INTEGER = 0
    RATIONAL = 1
    ALGEBRAIC = 2
    STREAM = 3

    @classmethod
    def parse(cls, name: str) -> "Backend":
        key = name.strip().lower()
        aliases = {
            "z": cls.INTEGER, "integer": cls.INTEGER, "int": cls.INTEGER,
            "q": cls.RATIONAL, "rational": cls.RATIONAL,
            "r": cls.ALGEBRAIC, "algebraic": cls.ALGEBRAIC, "real": cls.ALGEBRAIC,
            "stream": cls.STREAM, "s": cls.STREAM,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown backend {name!r}") from None

    def admits(self, x: "Scalar") -> bool:
        b = backend_of(x)
        if self is Backend.STREAM:
            return b in (Backend.INTEGER, Backend.RATIONAL, Backend.STREAM)
        return b <= self


class Sign(enum.Enum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1
    INDETERMINATE = None

    @classmethod
    def of(cls, n: int) -> "Sign":
        return cls.POSITIVE if n > 0 else cls.NEGATIVE if n < 0 else cls.ZERO


# ---------------------------------------------------------------------------
# Real algebraic numbers


def _interval_mul(a: tuple, b: tuple) -> tuple:
    products = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    return min(products), max(products)


def _bisect(poly, lo: Fraction, hi: Fraction, steps: int, lo_sign: int | None = None) -> tuple:
    """Halve a sign-change interval of ``poly`` ``steps`` times."""
    if lo_sign is None:
        lo_sign = up.sign_at(poly, lo)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if up.sign_at(poly, mid) == lo_sign:
            lo = mid
        else:
            hi = mid
    return lo, hi


class AlgebraicNumber:
    """A real root of an irreducible integer polynomial.

    ``poly`` is the minimal polynomial (primitive, positive leading
    coefficient, low degree first) and ``(lo, hi)`` a rational interval
    containing exactly that one root.  For degree >= 2 the root is
    irrational, so it sits strictly inside the interval and the polynomial
    has opposite signs at the endpoints.  For degree 1 the interval is the
    point ``[r, r]``.

    The interval is a cache: comparisons tighten it in place, which never
    changes the number represented.
    """

    __slots__ = ("poly", "_lo", "_hi", "_lo_sign", "_lock")

    def __init__(self, poly: Sequence[int], lo, hi, *, _checked: bool = False):
        self.poly = tuple(poly)
        self._lo, self._hi = Fraction(lo), Fraction(hi)
        self._lock = threading.Lock()
        if len(self.poly) == 2:
            r = Fraction(-self.poly[0], self.poly[1])
            self._lo = self._hi = r
            self._lo_sign = 0
            return
        self._lo_sign = up.sign_at(self.poly, self._lo)
        if not _checked:
            if self._lo_sign == 0 or up.sign_at(self.poly, self._hi) != -self._lo_sign:
                raise ValueError("interval does not isolate a root of the polynomial")

    @classmethod
    def from_rational(cls, q) -> "AlgebraicNumber":
        q = Fraction(q)
        return cls((-q.numerator, q.denominator), q, q)

    # -- structure -----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self._lo, self._hi

    def is_rational(self) -> bool:
        return self.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("irrational algebraic number")
        return self._lo

    def refine(self, steps: int = 1) -> None:
        """Halve the isolating interval ``steps`` times."""
        if self.degree == 1:
            return
        with self._lock:
            self._lo, self._hi = _bisect(self.poly, self._lo, self._hi, steps, self._lo_sign)

    def refine_to(self, width: Fraction) -> None:
        while self._hi - self._lo > width:
            self.refine(4)

    def width(self) -> Fraction:
        return self._hi - self._lo

    # -- sign and comparison --------------------------------------------

    def sign(self) -> Sign:
        if self.degree == 1:
            return Sign.of(self.poly[0] * -1)
        while self._lo <= 0 <= self._hi:
            self.refine(2)
        return Sign.POSITIVE if self._lo > 0 else Sign.NEGATIVE

    def compare(self, other) -> int:
        """-1, 0, or 1 as self is below, equal to, or above ``other``."""
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if self.degree == 1:
                return (self._lo > other) - (self._lo < other)
            while self._lo <= other <= self._hi:
                self.refine(2)
            return 1 if self._lo > other else -1
        if not isinstance(other, AlgebraicNumber):
            raise BackendMismatch(f"cannot compare algebraic with {type(other).__name__}")
        if other.degree == 1:
            return self.compare(other._lo)
        if self.degree == 1:
            return -other.compare(self._lo)
        if self.poly == other.poly:
            # each interval isolates one root, so they share it iff the
            # polynomial changes sign across their overlap
            lo, hi = max(self._lo, other._lo), min(self._hi, other._hi)
            if lo <= hi and up.sign_at(self.poly, lo) * up.sign_at(self.poly, hi) < 0:
                return 0
        # Distinct numbers: refine until the intervals separate.
        while not (self._hi < other._lo or other._hi < self._lo):
            self.refine(2)
            other.refine(2)
        return 1 if self._lo > other._hi else -1

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, AlgebraicNumber)):
            if isinstance(other, AlgebraicNumber) and self.poly != other.poly:
                return False
            if not isinstance(other, AlgebraicNumber) and self.degree != 1:
                return False
            return self.compare(other) == 0
        return NotImplemented

    def __hash__(self) -> int:
        if self.degree == 1:
            return hash(self._lo)
        return hash(self.poly)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    # -- arithmetic ----------------------------------------------------

    def __neg__(self) -> "AlgebraicNumber":
        poly = up.primitive(up.scale_var(self.poly, -1))
        return AlgebraicNumber(poly, -self._hi, -self._lo, _checked=True)

    def _shift(self, q: Fraction) -> "AlgebraicNumber":
        poly = up.primitive(up.taylor_shift(self.poly, -q))
        return AlgebraicNumber(poly, self._lo + q, self._hi + q, _checked=True)

    def _scale(self, q: Fraction) -> "AlgebraicNumber":
        if q == 0:
            return AlgebraicNumber.from_rational(0)
        poly = up.primitive(up.scale_var(self.poly, 1 / q))
        lo, hi = sorted((self._lo * q, self._hi * q))
        return AlgebraicNumber(poly, lo, hi, _checked=True)

    def inverse(self) -> "AlgebraicNumber":
        if self.sign() is Sign.ZERO:
            raise DivisionByZero("algebraic division by zero")
        if self.degree == 1:
            return AlgebraicNumber.from_rational(1 / self._lo)
        # sign() left an interval excluding zero
        poly = up.primitive(up.reverse(self.poly))
        return AlgebraicNumber(poly, 1 / self._hi, 1 / self._lo, _checked=True)

    def _combine(self, other: "AlgebraicNumber", product: bool) -> "AlgebraicNumber":
        if product:
            resultant = up.composed_product(self.poly, other.poly)
        else:
            resultant = up.composed_sum(self.poly, other.poly)
        live = up.factor(resultant)
        while True:
            a, b = (self._lo, self._hi), (other._lo, other._hi)
            if product:
                lo, hi = _interval_mul(a, b)
            else:
                lo, hi = a[0] + b[0], a[1] + b[1]
            # the true value is a root of exactly one factor and lies in [lo, hi]
            counts = [up.roots_in(f, lo, hi) for f in live]
            live = [f for f, c in zip(live, counts) if c != 0]
            if len(live) == 1 and up.roots_in(live[0], lo, hi) == 1:
                f = live[0]
                if len(f) == 2:
                    return AlgebraicNumber.from_rational(Fraction(-f[0], f[1]))
                return AlgebraicNumber(f, lo, hi, _checked=True)
            self.refine(2)
            other.refine(2)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._shift(Fraction(other))
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        if other.degree == 1:
            return self._shift(other._lo)
        if self.degree == 1:
            return other._shift(self._lo)
        return self._combine(other, product=False)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, AlgebraicNumber)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return (-self)._shift(Fraction(other))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._scale(Fraction(other))
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        if other.degree == 1:
            return self._scale(other._lo)
        if self.degree == 1:
            return other._scale(self._lo)
        return self._combine(other, product=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("algebraic division by zero")
            return self._scale(1 / Fraction(other))
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * Fraction(other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = AlgebraicNumber.from_rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __float__(self) -> float:
        self.refine_to(Fraction(1, 10**17))
        return float((self._lo + self._hi) / 2)

    def __repr__(self) -> str:
        return f"AlgebraicNumber({self.literal()})"

    def literal(self) -> str:
        """DSL literal, e.g. ``alg(x^2 - 2, 1, 2)``."""
        if self.degree == 1:
            r = self._lo
            return f"alg({up.to_string(self.poly)}, {r}, {r})"
        return f"alg({up.to_string(self.poly)}, {self._lo}, {self._hi})"


def make_algebraic(poly: Sequence, lo, hi) -> AlgebraicNumber:
    """The unique real root of ``poly`` in the closed interval ``[lo, hi]``.

    ``poly`` is given low degree first and may be reducible or carry
    repeated factors; the result holds the irreducible factor that
    vanishes at the root.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    p = up.trim(poly)
    if not p:
        raise ValueError("zero polynomial")
    if lo > hi:
        raise ValueError("empty interval")
    sqf = up.squarefree(p)
    if len(sqf) <= 1:
        raise NoRootInInterval("constant polynomial has no roots")
    n = up.count_roots(up.sturm_sequence(sqf), lo, hi)
    if n == 0:
        raise NoRootInInterval(f"no real root of {up.to_string(p)} in [{lo}, {hi}]")
    if n > 1:
        raise MultipleRootsInInterval(f"{n} real roots of {up.to_string(p)} in [{lo}, {hi}]")
    for f in up.factor(sqf):
        seq = up.sturm_sequence(f)
        if up.count_roots(seq, lo, hi) == 0:
            continue
        if len(f) == 2:
            return AlgebraicNumber.from_rational(Fraction(-f[0], f[1]))
        # Shrink until both endpoints are non-roots (they are irrational roots
        # of f, so any rational endpoint is already fine unless it is a root
        # of another factor, which does not matter for f).
        return AlgebraicNumber(f, lo, hi, _checked=True)
    raise AssertionError("root counting and factorisation disagree")


# ---------------------------------------------------------------------------
# Digit-stream reals


Enclosure = Union[tuple, None]


def _ratio(a, b) -> Fraction:
    """Exact a / b for ints and Fractions (never a float)."""
    if type(a) is int and type(b) is int:
        return Fraction(a, b)
    return Fraction(a) / b


def _digits_hint(c: Fraction) -> int:
    return int(c.denominator.bit_length() * 0.30103) + 2


def _schedule(budget: int, start: int = 1):
    k = max(1, min(start, budget))
    while k < budget:
        yield k
        k *= 2
    yield budget


class StreamReal:
    """A real known only through rational enclosures that tighten with precision.

    ``enclosure(k)`` returns a closed rational interval containing the value
    using at most ``k`` digits of every digit source involved, or ``None``
    when no bound is available at that precision.  Enclosures are nested in
    ``k``.
    """

    budget: int = DEFAULT_DIGIT_BUDGET

    def enclosure(self, k: int) -> Enclosure:
        raise NotImplementedError

    def precision_hint(self) -> int:
        """Digits worth reading before the first sign attempt."""
        return 1

    def sign(self) -> Sign:
        for k in _schedule(self.budget, self.precision_hint()):
            enc = self.enclosure(k)
            if enc is None:
                continue
            lo, hi = enc
            if lo > 0:
                return Sign.POSITIVE
            if hi < 0:
                return Sign.NEGATIVE
        return Sign.INDETERMINATE

    # -- arithmetic: folding rational operands keeps expression trees shallow

    def _affine(self, scale, offset) -> "StreamReal":
        return AffineStream(self, scale, offset)

    def __neg__(self):
        return self._affine(-1, 0)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._affine(1, other)
        if isinstance(other, StreamReal):
            return StreamBinary("+", self, other)
        if isinstance(other, AlgebraicNumber):
            raise BackendMismatch("streams do not mix with algebraic numbers")
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._affine(1, -other)
        if isinstance(other, StreamReal):
            return StreamBinary("+", self, -other)
        if isinstance(other, AlgebraicNumber):
            raise BackendMismatch("streams do not mix with algebraic numbers")
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._affine(-1, other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._affine(other, 0)
        if isinstance(other, StreamReal):
            return StreamBinary("*", self, other)
        if isinstance(other, AlgebraicNumber):
            raise BackendMismatch("streams do not mix with algebraic numbers")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return self._affine(_ratio(1, other), 0)
        if isinstance(other, StreamReal):
            return StreamBinary("*", self, _certified_inverse(other))
        if isinstance(other, AlgebraicNumber):
            raise BackendMismatch("streams do not mix with algebraic numbers")
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return _certified_inverse(self)._affine(other, 0)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result: Scalar = 1
        for _ in range(n):
            result = result * self
        return result

    def describe(self, k: int = 12) -> str:
        enc = self.enclosure(min(k, self.budget))
        if enc is None:
            return "stream[?]"
        return f"stream[{enc[0]}, {enc[1]}]"

    def __repr__(self) -> str:
        return self.describe()


class DigitStream(StreamReal):
    """``integer_part + sum(digit(i) * 10**-i for i >= 0)``.

    Digit 0 carries weight 1, matching the sum it is meant to realise.
    Digits are read lazily and memoised, so repeated queries agree.
    """

    def __init__(self, integer_part: int, digits: Callable[[int], int],
                 budget: int = DEFAULT_DIGIT_BUDGET, name: str | None = None):
        if budget < 1:
            raise ValueError("digit budget must be positive")
        self.integer_part = int(integer_part)
        self._source = digits
        self.budget = budget
        self.name = name
        self._digits: list[int] = []
        # _prefix[k] = sum(d_i * 10**(k-1-i) for i < k), an integer numerator
        # over 10**(k-1) (k >= 1).
        self._prefix: list[int] = [0]
        self._lock = threading.Lock()

    def digit(self, i: int) -> int:
        if i < 0:
            raise IndexError("digit index must be non-negative")
        if i >= len(self._digits):
            with self._lock:
                while len(self._digits) <= i:
                    j = len(self._digits)
                    d = self._source(j)
                    if not isinstance(d, int) or not 0 <= d <= 9:
                        raise ValueError(f"digit source returned {d!r} at index {j}")
                    self._digits.append(d)
                    self._prefix.append(self._prefix[-1] * 10 + d if j else d)
        return self._digits[i]

    def enclosure(self, k: int) -> Enclosure:
        k = max(1, min(k, self.budget))
        self.digit(k - 1)
        scale = 10 ** (k - 1)
        lo = Fraction(self.integer_part * scale + self._prefix[k], scale)
        # every unread digit is at most 9: the tail is at most 10**(1-k)
        return lo, lo + Fraction(1, scale)

    def compare_rational(self, c: Fraction, start: int = 1) -> Sign:
        """Sign of ``self - c`` from digit prefixes, in integer arithmetic."""
        p, q = c.numerator, c.denominator
        for k in _schedule(self.budget, start):
            self.digit(k - 1)
            scale = 10 ** (k - 1)
            lo = (self.integer_part * scale + self._prefix[k]) * q
            target = p * scale
            if lo > target:
                return Sign.POSITIVE
            if lo + q < target:
                return Sign.NEGATIVE
        return Sign.INDETERMINATE

    def describe(self, k: int = 12) -> str:
        shown = "".join(str(self.digit(i)) for i in range(min(k, self.budget)))
        label = f"{self.name}=" if self.name else ""
        return f"stream({label}{self.integer_part};{shown}...)"


class AffineStream(StreamReal):
    def __init__(self, base: StreamReal, scale, offset):
        if isinstance(base, AffineStream):
            offset = scale * base.offset + offset
            scale = scale * base.scale
            base = base.base
        self.base, self.scale, self.offset = base, scale, offset
        self.budget = base.budget

    def enclosure(self, k: int) -> Enclosure:
        enc = self.base.enclosure(k)
        if enc is None:
            return None
        a, b = enc[0] * self.scale + self.offset, enc[1] * self.scale + self.offset
        return (a, b) if a <= b else (b, a)

    def precision_hint(self) -> int:
        if not self.scale:
            return 1
        return max(self.base.precision_hint(), _digits_hint(_ratio(-self.offset, self.scale)))

    def sign(self) -> Sign:
        if not isinstance(self.base, DigitStream) or not self.scale:
            return super().sign()
        # scale * base + offset has the sign of scale times that of base - c;
        # comparing against c needs about as many digits as its denominator has
        c = _ratio(-self.offset, self.scale)
        s = self.base.compare_rational(c, _digits_hint(c))
        if s is Sign.INDETERMINATE or self.scale > 0:
            return s
        return Sign.NEGATIVE if s is Sign.POSITIVE else Sign.POSITIVE

    def describe(self, k: int = 12) -> str:
        return f"({self.scale})*{self.base.describe(k)} + ({self.offset})"


class StreamBinary(StreamReal):
    def __init__(self, op: str, left: StreamReal, right: StreamReal):
        self.op, self.left, self.right = op, left, right
        self.budget = min(left.budget, right.budget)

    def enclosure(self, k: int) -> Enclosure:
        a, b = self.left.enclosure(k), self.right.enclosure(k)
        if a is None or b is None:
            return None
        if self.op == "+":
            return a[0] + b[0], a[1] + b[1]
        return _interval_mul(a, b)


class StreamInverse(StreamReal):
    def __init__(self, base: StreamReal):
        self.base = base
        self.budget = base.budget

    def enclosure(self, k: int) -> Enclosure:
        enc = self.base.enclosure(k)
        if enc is None or enc[0] <= 0 <= enc[1]:
            return None
        return 1 / enc[1], 1 / enc[0]


def _certified_inverse(s: StreamReal) -> StreamReal:
    sgn = s.sign()
    if sgn is Sign.INDETERMINATE:
        raise IndeterminateOperand("cannot certify a stream divisor is nonzero within its digit budget")
    return StreamInverse(s)


def make_stream(integer_part: int, digits: Callable[[int], int] | Sequence[int],
                budget: int = DEFAULT_DIGIT_BUDGET, name: str | None = None) -> DigitStream:
    """Digit-stream real from a deterministic digit source.

    A finite sequence is padded with zeros.
    """
    if not callable(digits):
        seq = tuple(digits)
        digits = lambda i: seq[i] if i < len(seq) else 0  # noqa: E731
    return DigitStream(integer_part, digits, budget, name)


# ---------------------------------------------------------------------------
# Generic entry points

Scalar = Union[int, Fraction, AlgebraicNumber, StreamReal]


def backend_of(x: Scalar) -> Backend:
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Backend.INTEGER
    if isinstance(x, Fraction):
        return Backend.RATIONAL
    if isinstance(x, AlgebraicNumber):
        return Backend.ALGEBRAIC
    if isinstance(x, StreamReal):
        return Backend.STREAM
    raise TypeError(f"not a scalar: {x!r}")


def promote(x: Scalar, backend: Backend) -> Scalar:
    """Embed ``x`` into ``backend`` (integer -> rational -> algebraic)."""
    src = backend_of(x)
    if src == backend:
        return x
    if backend is Backend.STREAM and src <= Backend.RATIONAL:
        return Fraction(x)
    if src > backend or backend is Backend.STREAM:
        raise BackendMismatch(f"cannot promote {src.name} to {backend.name}")
    if backend is Backend.RATIONAL:
        return Fraction(x)
    return AlgebraicNumber.from_rational(x)


def scalar_sign(x: Scalar) -> Sign:
    if isinstance(x, (int, Fraction)):
        return Sign.of(x)
    if isinstance(x, (AlgebraicNumber, StreamReal)):
        return x.sign()
    raise TypeError(f"not a scalar: {x!r}")


def is_zero(x: Scalar) -> bool:
    """True iff ``x`` is certified zero; raises for an indeterminate stream."""
    s = scalar_sign(x)
    if s is Sign.INDETERMINATE:
        raise IndeterminateOperand("zero test on a stream exhausted its digit budget")
    return s is Sign.ZERO


def compare(a: Scalar, b: Scalar) -> Sign:
    """Sign of ``a - b``."""
    if isinstance(a, AlgebraicNumber) and not isinstance(b, StreamReal):
        return Sign.of(a.compare(b))
    if isinstance(b, AlgebraicNumber) and not isinstance(a, StreamReal):
        return Sign.of(-b.compare(a))
    return scalar_sign(scalar_arith("sub", a, b))


def _join(a: Scalar, b: Scalar) -> Backend:
    ba, bb = backend_of(a), backend_of(b)
    if Backend.STREAM in (ba, bb) and Backend.ALGEBRAIC in (ba, bb):
        raise BackendMismatch("streams extend the rationals, not the algebraic numbers")
    return max(ba, bb)


def scalar_arith(op: str, a: Scalar, b: Scalar) -> Scalar:
    """Exact ``a op b`` for op in add/sub/mul/div.

    The result lives in the smaller backend closed under ``op`` that holds
    both operands: integer division yields a rational, and any algebraic
    operand gives an algebraic result.
    """
    target = _join(a, b)
    if target is Backend.ALGEBRAIC:
        a, b = promote(a, target), promote(b, target)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        s = scalar_sign(b)
        if s is Sign.ZERO:
            raise DivisionByZero("division by zero")
        if s is Sign.INDETERMINATE:
            raise IndeterminateOperand("cannot certify a stream divisor is nonzero within its digit budget")
        if target is Backend.INTEGER:
            return Fraction(a, b)
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def parse_scalar(text: str) -> Scalar:
    """Parse ``-17``, ``5/6``, or ``alg(x^2-2, 1, 2)``."""
    t = text.strip()
    if t.startswith("alg(") and t.endswith(")"):
        from bss.dsl import parse_univariate

        body = t[4:-1]
        parts = _split_top(body)
        if len(parts) != 3:
            raise ValueError(f"alg(...) takes a polynomial and two bounds: {text!r}")
        poly = parse_univariate(parts[0])
        return make_algebraic(poly, Fraction(parts[1].strip()), Fraction(parts[2].strip()))
    q = Fraction(t)
    return q.numerator if q.denominator == 1 and "/" not in t else q


def parse_word(text: str) -> tuple:
    """Comma-separated scalar literals; the empty string is the empty word."""
    if not text.strip():
        return ()
    return tuple(parse_scalar(p) for p in _split_top(text))


def _split_top(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def render(x: Scalar) -> str:
    """Lossless text for integers, rationals, and algebraics."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else f"{x.numerator}/1"
    if isinstance(x, AlgebraicNumber):
        return x.literal()
    if isinstance(x, StreamReal):
        return x.describe()
    raise TypeError(f"not a scalar: {x!r}")
