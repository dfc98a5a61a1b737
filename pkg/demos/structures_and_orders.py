"""
Computable structures
=====================

A structure is a bundle of machines: one semi-deciding the universe and
one per relation or function. Three constructions follow.
"""
import random

from bss.machine import Halted, run
from bss.scalar import render
from bss.structures import (
    atomic_truth, build_order_structure, cycle_graph_structure, pair, random_strict_order, vs_iso, vs_make,
)

# A strict order D on naturals is stored in the digits of one real number:
# digit pair(a, b) is 1 exactly when a < b in D.
D = random_strict_order(random.Random(0), 5)
p = build_order_structure(D)
print("D =", sorted(D))
print("first digits:", "".join(str(p.ell.digit(i)) for i in range(20)))
print("pair(1, 3) =", pair(1, 3))

# The less machine halts on members of D and runs forever otherwise; its
# complement machine does the reverse. Neither needs to know D itself.
for a, b in [(0, 1), (1, 0), (2, 4)]:
    yes = isinstance(run(p.less, (a, b), 10 ** 4), Halted)
    no = isinstance(run(p.not_less, (a, b), 10 ** 4), Halted)
    print(f"{a} < {b}: less halts {yes}, complement halts {no}, truth {(a, b) in D}")

# Finite-dimensional vector spaces: addition and scaling are machines, and a
# basis of the target defines an isomorphism machine.
v2 = vs_make(2)
print("add(b1, b2) = (1,1):", atomic_truth(v2, "add(b1, b2) = (1,1)", 100))
iso = vs_iso(2, [(1, 1, 0), (0, 1, 1)])
y = run(iso.machine, (2, 3), 10).output
print("iso(2, 3) =", tuple(render(v) for v in y), "back:", tuple(render(v) for v in iso.inverse(y)))

# Disjoint unions of cycles: a 2n-cycle for each n in S and a (2n+1)-cycle otherwise.
s = cycle_graph_structure({2, 3}, n_max=4)
for n in range(2, 5):
    size = len([v for v in s.elements if v[0] == n])
    print(f"component {n}: {size} vertices")
print("E((3,0),(3,5)):", atomic_truth(s, "E((3,0),(3,5))", 100))
