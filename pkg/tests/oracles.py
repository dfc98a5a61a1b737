"""Reference computations that share no code with the package."""
from __future__ import annotations

import random
from fractions import Fraction

import sympy


def newton_iterates(x0, eps, limit=50):
    """Exact iterates x <- (x + 2/x)/2 until (x^2 - 2)^2 < eps^2."""
    x = Fraction(x0)
    out = []
    for _ in range(limit):
        x = (x + 2 / x) / 2
        out.append(x)
        if (x * x - 2) ** 2 < eps * eps:
            return out
    raise AssertionError("no convergence")


def cantor(a, b):
    """Position of (a, b) when the diagonals of N x N are listed in order."""
    n = 0
    for s in range(a + b + 1):
        for j in range(s + 1):
            if (s - j, j) == (a, b):
                return n
            n += 1
    raise AssertionError


def random_real_root(rng: random.Random, max_degree=4):
    """(integer coefficients low first, lo, hi) for a root of a random polynomial, via sympy."""
    x = sympy.Symbol("x")
    while True:
        d = rng.randint(1, max_degree)
        coeffs = [rng.randint(-6, 6) for _ in range(d)] + [rng.choice([1, 2, 3])]
        poly = sympy.Poly(list(reversed(coeffs)), x)
        roots = poly.intervals()
        if not roots:
            continue
        (lo, hi), _ = rng.choice(roots)
        # sympy intervals are open unless degenerate; keep closed ones isolating
        if lo != hi and (poly.eval(lo) == 0 or poly.eval(hi) == 0):
            continue
        return coeffs, Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))


def to_sympy_number(coeffs, lo, hi):
    """The unique root of the polynomial in [lo, hi] as a sympy CRootOf."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x)
    for r in poly.real_roots():
        if sympy.Rational(lo.numerator, lo.denominator) <= r <= sympy.Rational(hi.numerator, hi.denominator):
            return r
    raise AssertionError("no root")


def det(rows):
    return sympy.Matrix([[sympy.nsimplify(str(v)) for v in r] for r in rows]).det()


def cycle_adjacent(S, u, v):
    (n, j), (m, k) = u, v
    if n != m:
        return False
    length = 2 * n if n in S else 2 * n + 1
    return (k - j) % length in (1, length - 1)


def truth(elements, tables, f, env):
    """Tarskian truth by direct table lookup; formulas use the package's node shapes only."""
    kind = type(f).__name__

    def val(t):
        if type(t).__name__ == "Lit":
            return t.word[0]
        return env[t.name][0]

    if kind == "Atom":
        args = tuple(val(t) for t in f.args)
        if f.rel == "=":
            return args[0] == args[1]
        return args in set(map(tuple, tables[f.rel]))
    if kind == "Not":
        return not truth(elements, tables, f.body, env)
    if kind == "And":
        return all(truth(elements, tables, p, env) for p in f.parts)
    if kind == "Or":
        return any(truth(elements, tables, p, env) for p in f.parts)
    if kind == "Implies":
        return not truth(elements, tables, f.premise, env) or truth(elements, tables, f.conclusion, env)
    if kind in ("Exists", "Forall"):
        import itertools
        results = (truth(elements, tables, f.body, {**env, **{v: (e,) for v, e in zip(f.vars, combo)}})
                   for combo in itertools.product(elements, repeat=len(f.vars)))
        return any(results) if kind == "Exists" else all(results)
    if kind in ("BigOr", "BigAnd"):
        results = (truth(elements, tables, f.instance(i), {**env, f.var: (i,)}) for i in range(f.indices.bound))
        return any(results) if kind == "BigOr" else all(results)
    raise TypeError(kind)
