"""
Halting sets as unions of cells
===============================

Running a machine symbolically splits its inputs by the branch tests met
along each path. Each path up to a depth bound gives a cell: a conjunction
of polynomial sign conditions with a rational output expression.
"""
import random

from bss import corpus
from bss.paths import check_agreement, check_equational, enumerate_paths

# One Newton step: the test compares the new iterate with the threshold.
for cell in enumerate_paths(corpus.newton(), 1, 4):
    doc = cell.to_json()
    print("/".join(doc["path"]))
    for cond in doc["conditions"]:
        print("   ", cond["poly"], cond["rel"])
    print("    output:", doc["output"])

# The countdown machine halts on a different cell for each natural number.
cells = enumerate_paths(corpus.countdown(), 1, 30)
print(sum(c.halting for c in cells), "halting cells for countdown at depth 30")

# Equational machines only ever test for zero, so their cells are
# Boolean combinations of algebraic sets.
for name, m in corpus.all_machines().items():
    if check_equational(m):
        rels = {c.rel for cell in enumerate_paths(m, corpus.DIMENSIONS[name], 50) for c in cell.conditions}
        print(name, "is equational; relations used:", sorted(rels))

# Cells and runs agree: a point lies in a halting cell exactly when the run
# halts within the depth, and the cell's output expression gives the output.
rng = random.Random(1)
for name in corpus.CELL_CORPUS:
    m, dim = corpus.BUILDERS[name](), corpus.DIMENSIONS[name]
    cells = enumerate_paths(m, dim, 100)
    points = [corpus.sample(name, rng, dim) for _ in range(200)]
    bad = check_agreement(m, cells, 100, points)
    print(f"{name:12s} {len(cells):4d} cells, {len(bad)} disagreements on 200 points")
