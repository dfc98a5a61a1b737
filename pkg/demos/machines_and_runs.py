"""
Running machines exactly
========================

A machine is a finite graph of input, compute, branch, shift, and output
nodes acting on a tape of ring elements. Every value below is exact.
"""
from fractions import Fraction
from math import gcd

from bss import corpus
from bss.dsl import format_machine, parse_machine_dsl
from bss.machine import describe_outcome, run
from bss.scalar import make_algebraic, render

# Newton's iteration for sqrt(2), written in the machine language.
newton = corpus.newton()
print(format_machine(newton))

# From 1 it stops at the third iterate once (x^2 - 2)^2 < eps^2.
out = run(newton, (1,), budget=1000)
print("eps = 1/1000:", render(out.output[0]), "after", out.steps, "steps")

# A tighter threshold gives the fifth iterate, still an exact fraction.
out = run(corpus.newton(Fraction(1, 10 ** 12)), (1,), budget=1000)
print("eps = 1e-12: ", render(out.output[0]))

# Over the integers the model is classical computation: Euclid by subtraction.
g = corpus.gcd()
table = [(a, b, run(g, (a, b), 10_000).output[0]) for a, b in [(84, 36), (17, 5), (100, 75)]]
for a, b, d in table:
    print(f"gcd({a}, {b}) = {d}", "ok" if d == gcd(a, b) else "MISMATCH")

# The Mandelbrot escape test halts outside the set and runs on inside it.
# Orbits inside are exact rationals whose size doubles each step, so only
# eventually periodic ones such as c = 0 and c = -1 stay cheap.
m = corpus.mandelbrot()
for c in [(1, 1), (0, 0), (-1, 0)]:
    print("c =", tuple(render(v) for v in c), "->", describe_outcome(run(m, c, 500))["status"])

# Machines over the real algebraic numbers take sqrt(2) as an input.
src = """machine scale over algebraic
node start: input -> c
node c: compute x1 := 3 * x1 * x1 -> o
node o: output [x1]
"""
sqrt2 = make_algebraic([-2, 0, 1], 1, 2)
(y,) = run(parse_machine_dsl(src), (sqrt2,), 10).output
print("3 * sqrt(2)^2 =", render(y), "which is the rational", y.as_fraction())

# A trace records every configuration visited.
trace = []
run(corpus.sign_branch(), (Fraction(-3, 2),), 6, trace=trace)
for step in trace:
    print(step)
