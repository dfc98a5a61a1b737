"""
Evaluating formulas
===================

Formulas may use countable disjunctions indexed by the halting set of a
machine. On finite structures truth is decided outright. Elsewhere a Sigma_1
formula can only be confirmed by finding a witness within a budget.
"""
from bss import corpus
from bss.formulas import BigOr, IndexSet, classify, eval_budgeted, eval_finite, parse_formula
from bss.structures import Atom, Lit, Ref, build_order_structure, finite_structure, vs_make

triangle = finite_structure([0, 1, 2], {"E": [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]})
every_vertex_has_a_neighbour = parse_formula("(forall (u) (exists (v) (atom E u v)))")
print(classify(every_vertex_has_a_neighbour), eval_finite(triangle, every_vertex_has_a_neighbour))

# A disjunction over the inputs on which countdown halts within 50 steps.
f = BigOr("i", IndexSet(corpus.countdown(), bound=5, budget=50), Atom("=", (Ref("i"), Lit((2,)))))
print(classify(f), eval_finite(triangle, f))

# Over the order 0 < 1 < 2 the search for a larger element succeeds from 0.
# From 2 it finds nothing, which proves nothing unless the universe is known
# to be exhausted.
order = build_order_structure({(0, 1), (1, 2), (0, 2)}).structure
larger = parse_formula("(exists (y) (atom < x y))")
for x in (0, 2):
    print(x, eval_budgeted(order, larger, {"x": (x,)}, budget=1000),
          eval_budgeted(order, larger, {"x": (x,)}, budget=1000, bounded=True))

# The rationals as a vector space have an infinite universe: the witness for
# y + y = 1 turns up in the enumeration.
half = parse_formula("(exists (y) (= (add y y) (word 1)))")
print(eval_budgeted(vs_make(1), half, budget=2000))
