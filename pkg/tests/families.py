"""Seeded generators of small finite structures and Sigma_1 formulas."""
from __future__ import annotations

import random

from bss.formulas import And, BigOr, Exists, IndexSet, Not, Or
from bss.structures import Atom, Lit, Ref, finite_structure


def random_tables(rng: random.Random, max_size: int = 6):
    n = rng.randint(1, max_size)
    elements = list(range(n))
    density = rng.choice([0.2, 0.4, 0.7])
    E = [(a, b) for a in elements for b in elements if rng.random() < density]
    P = [(a,) for a in elements if rng.random() < 0.5]
    return elements, {"E": E, "P": P}


def random_structure(rng: random.Random, max_size: int = 6):
    elements, tables = random_tables(rng, max_size)
    return finite_structure(elements, tables, arities={"E": 2, "P": 1}), elements, tables


def _term(rng, names, n):
    if rng.random() < 0.8:
        return Ref(rng.choice(names))
    return Lit((rng.randrange(n),))


def random_qf(rng, names, n, depth=2):
    if depth == 0 or rng.random() < 0.4:
        kind = rng.choice(["E", "E", "P", "="])
        if kind == "P":
            atom = Atom("P", (_term(rng, names, n),))
        else:
            atom = Atom(kind, (_term(rng, names, n), _term(rng, names, n)))
        return Not(atom) if rng.random() < 0.3 else atom
    parts = tuple(random_qf(rng, names, n, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(parts) if rng.random() < 0.5 else Or(parts)


def random_sigma1(rng: random.Random, n: int):
    """A Sigma_1 formula with free variable x: at most 4 disjuncts, at most 2 quantified variables."""
    shape = rng.choice(["or", "bigor", "and"])
    if shape == "bigor":
        k = rng.randint(1, 4)
        qv = tuple(["y", "z"][:rng.randint(1, 2)])
        body = Exists(qv, random_qf(rng, ["x", "i", *qv], n))
        # indices beyond the universe make atoms about i false, not undefined
        return BigOr("i", IndexSet(bound=min(k, n)), body)
    disjuncts = []
    for _ in range(rng.randint(1, 4)):
        qv = tuple(["y", "z"][:rng.randint(0, 2)])
        body = random_qf(rng, ["x", *qv], n)
        disjuncts.append(Exists(qv, body) if qv else body)
    if shape == "and":
        return And((random_qf(rng, ["x"], n, 1), Or(tuple(disjuncts))))
    return Or(tuple(disjuncts))
