"""Dense univariate polynomials over Q, stored low degree first.

Small toolkit backing the real-algebraic scalars: evaluation, exact
division, square-free parts, Sturm root counting, certified root
exclusion, and the composed
sum/product polynomials used for arithmetic on algebraic numbers.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Sequence

import flint

Poly = list  # list[int | Fraction], index i holds the coefficient of x**i


def trim(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    return len(p) - 1


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_at(p: Sequence, x: Fraction) -> int:
    # Clear the denominator so Horner runs on integers only.
    num, den = x.numerator, x.denominator
    acc = 0
    scale = 1
    for c in reversed(p):
        acc = acc * num + c * scale
        scale *= den
    # acc == p(x) * den**deg; den > 0
    return (acc > 0) - (acc < 0)


def derivative(p: Sequence) -> list:
    return [i * p[i] for i in range(1, len(p))]


def _q(p: Sequence) -> flint.fmpq_poly:
    return flint.fmpq_poly([_fmpq(c) for c in p])


def _back(p: flint.fmpq_poly) -> list:
    return trim([Fraction(int(c.p), int(c.q)) for c in p.coeffs()])


def divmod_q(a: Sequence, b: Sequence) -> tuple[list, list]:
    """Polynomial long division over Q."""
    if not trim(b):
        raise ZeroDivisionError("polynomial division by zero")
    q, r = divmod(_q(a), _q(b))
    return _back(q), _back(r)


def gcd_q(a: Sequence, b: Sequence) -> list:
    """Monic gcd over Q."""
    return _back(_q(trim(a)).gcd(_q(trim(b))))


def primitive(p: Sequence) -> list[int]:
    """Scale to integer coefficients with content 1 and positive leading term."""
    p = trim(p)
    if not p:
        return []
    den = 1
    for c in p:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in p] if den != 1 else [int(c) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def squarefree(p: Sequence) -> list[int]:
    p = trim(p)
    if len(p) <= 2:
        return primitive(p)
    f = flint.fmpz_poly(primitive(p))
    g = f.gcd(f.derivative())
    if g.degree() > 0:
        f = f // g
    return primitive([int(c) for c in f.coeffs()])


def factor(p: Sequence[int]) -> list[list[int]]:
    """Distinct irreducible factors over Z (each primitive, positive leading term)."""
    p = primitive(p)
    if len(p) <= 2:
        return [p] if len(p) == 2 else []
    return [list(f) for f in _factor(tuple(p))]


@lru_cache(maxsize=4096)
def _factor(p: tuple) -> tuple:
    # resultants recur (a + b and b + a share one), so factorisations are cached
    _, factors = flint.fmpz_poly(list(p)).factor()
    return tuple(sorted((tuple(primitive([int(c) for c in f.coeffs()])) for f, _ in factors),
                        key=lambda f: (len(f), f)))


def sturm_sequence(p: Sequence) -> list[list]:
    seq = [_q(trim(p))]
    seq.append(seq[0].derivative())
    while seq[-1].degree() > 0:
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append(-r)
    return [_back(q) for q in seq]


def _variations(seq: list[list], x: Fraction) -> int:
    count, last = 0, 0
    for q in seq:
        s = sign_at(q, x)
        if s:
            if last and s != last:
                count += 1
            last = s
    return count


def count_roots(seq: list[list], lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in the closed interval [lo, hi] (square-free input)."""
    if lo > hi:
        return 0
    n = _variations(seq, lo) - _variations(seq, hi)
    if sign_at(seq[0], lo) == 0:
        n += 1
    return n


def roots_in(p: Sequence[int], lo: Fraction, hi: Fraction):
    """Number of roots (0 or 1) of the irreducible ``p`` in ``[lo, hi]``, or None if undecided.

    A ball evaluation of ``p`` excluding zero rules the interval out; a ball
    evaluation of ``p'`` excluding zero makes ``p`` monotonic there, so the
    exact endpoint signs decide.  Narrower intervals decide more often.
    """
    if len(p) == 2:
        r = Fraction(-p[0], p[1])
        return int(lo <= r <= hi)
    width = hi - lo
    k = width.denominator.bit_length() - width.numerator.bit_length() if width else 0
    old = flint.ctx.prec
    flint.ctx.prec = 64 + 2 * max(k, 0)
    try:
        ball = flint.arb(flint.fmpq(lo.numerator, lo.denominator)).union(
            flint.arb(flint.fmpq(hi.numerator, hi.denominator)))
        f = flint.arb_poly(list(p))
        if not f(ball).contains(0):
            return 0
        if f.derivative()(ball).contains(0):
            return None
    finally:
        flint.ctx.prec = old
    return 1 if sign_at(p, lo) * sign_at(p, hi) < 0 else 0


def root_bound(p: Sequence) -> Fraction:
    """Cauchy bound: every real root lies in (-B, B)."""
    p = trim(p)
    lead = abs(Fraction(p[-1]))
    return 1 + max(abs(Fraction(c)) / lead for c in p[:-1]) if len(p) > 1 else Fraction(1)


def taylor_shift(p: Sequence, c) -> list:
    """Coefficients of p(x + c)."""
    shifted = flint.fmpq_poly([_fmpq(a) for a in p])(flint.fmpq_poly([_fmpq(c), 1]))
    return trim([Fraction(int(q.p), int(q.q)) for q in shifted.coeffs()])


def _fmpq(x) -> flint.fmpq:
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def scale_var(p: Sequence, c) -> list:
    """Coefficients of p(c * x)."""
    c = Fraction(c)
    return trim([a * c**k for k, a in enumerate(p)])


def reverse(p: Sequence) -> list:
    """x**deg * p(1/x): roots are the reciprocals of the roots of p."""
    return trim(list(reversed(trim(p))))


def power_sums(p: Sequence, count: int) -> list[Fraction]:
    """Newton power sums s_0..s_{count-1} of the roots of p (with multiplicity)."""
    p = trim(p)
    lead = Fraction(p[-1])
    return _power_sums_monic([Fraction(c) / lead for c in p], count)


def _power_sums_monic(a: Sequence, count: int) -> list:
    n = len(a) - 1
    s = [n * (a[0] ** 0)]
    for k in range(1, count):
        acc = 0
        for i in range(1, min(k, n + 1)):
            acc += a[n - i] * s[k - i]
        if k <= n:
            acc += k * a[n - k]
        s.append(-acc)
    return s


def _monic_scaled(p: Sequence[int]) -> tuple[list[int], int]:
    """(m, a) with m monic over Z whose roots are a * (roots of p), a = lc(p)."""
    n = degree(p)
    a = p[-1]
    return [c * a ** (n - 1 - i) for i, c in enumerate(p[:-1])] + [1], a


def _from_power_sums_int(s: Sequence[int], n: int) -> list[int]:
    # Newton identities; the division by k is exact for a monic integer polynomial.
    c = [0] * (n + 1)
    c[n] = 1
    for k in range(1, n + 1):
        acc = s[k]
        for i in range(1, k):
            acc += c[n - i] * s[k - i]
        q, r = divmod(-acc, k)
        assert r == 0
        c[n - k] = q
    return c


def from_power_sums(s: Sequence[Fraction], n: int) -> list[Fraction]:
    """Monic degree-n polynomial with the given power sums s_0..s_n."""
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    for k in range(1, n + 1):
        acc = s[k]
        for i in range(1, k):
            acc += c[n - i] * s[k - i]
        c[n - k] = -acc / k
    return c


def _composed(p: Sequence[int], q: Sequence[int], product: bool) -> list[int]:
    p, q = sorted((tuple(primitive(p)), tuple(primitive(q))))
    return list(_composed_cached(p, q, product))


@lru_cache(maxsize=4096)
def _composed_cached(p: tuple, q: tuple, product: bool) -> tuple:
    mp, a = _monic_scaled(p)
    mq, b = _monic_scaled(q)
    n = degree(p) * degree(q)
    sp, sq = _power_sums_monic(mp, n + 1), _power_sums_monic(mq, n + 1)
    if product:
        # gamma = (a alpha)(b beta) = ab * alpha beta
        s = [x * y for x, y in zip(sp, sq)]
    else:
        # gamma = b (a alpha) + a (b beta) = ab (alpha + beta)
        # binomial convolution as a product of exponential generating
        # functions, scaled by n! to stay in Z
        fact = [1] * (n + 1)
        for k in range(1, n + 1):
            fact[k] = fact[k - 1] * k
        N = fact[n]
        bp = flint.fmpz_poly([x * b**k * (N // fact[k]) for k, x in enumerate(sp)])
        aq = flint.fmpz_poly([y * a**k * (N // fact[k]) for k, y in enumerate(sq)])
        conv = [int(c) for c in bp.mul_low(aq, n + 1).coeffs()]
        conv += [0] * (n + 1 - len(conv))
        s = [c * fact[k] // (N * N) for k, c in enumerate(conv)]
    g = _from_power_sums_int(s, n)
    ab = a * b
    return tuple(primitive([c * ab**k for k, c in enumerate(g)]))


def composed_sum(p: Sequence[int], q: Sequence[int]) -> list[int]:
    """Integer polynomial whose roots are all alpha + beta (p(alpha) = q(beta) = 0).

    Equal up to a constant to Res_y(p(y), q(x - y)); computed from power
    sums of the roots, in integer arithmetic.
    """
    return _composed(p, q, product=False)


def composed_product(p: Sequence[int], q: Sequence[int]) -> list[int]:
    """Integer polynomial whose roots are all alpha * beta (Res_y(p(y), y^m q(x/y)))."""
    return _composed(p, q, product=True)


def to_string(p: Sequence, var: str = "x") -> str:
    p = trim(p)
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)
