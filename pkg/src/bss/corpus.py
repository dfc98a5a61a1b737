"""Reference machines used by the tests, the demos, and the CLI."""
from __future__ import annotations

from fractions import Fraction

from bss.dsl import format_machine, parse_machine_dsl
from bss.machine import Machine

IDENTITY = """\
machine identity over rational
node start: input -> done
node done: output
"""

SIGN_BRANCH = """\
# halts on x1 >= 0 with output (x1), spins otherwise
machine sign_branch over rational
node start: input -> test
node test: branch x1 >= 0 ? done : spin
node spin: compute x0 := x0 -> spin
node done: output [x1]
"""

NEWTON = """\
# Newton's method for x^2 - 2; halts once |x^2 - 2| < eps
machine newton over rational
param eps = {eps}
node start: input -> step
node step: compute x1 := (x1 + 2 / x1) / 2 -> test
node test: branch (x1^2 - 2)^2 - eps^2 >= 0 ? step : done
node done: output [x1]
"""

MANDELBROT = """\
# escape-time semi-decider for the complement of the Mandelbrot set, c = x1 + i*x2
machine mandelbrot over rational
node start: input -> step
node step: compute x3 := x3^2 - x4^2 + x1, x4 := 2 * x3 * x4 + x2 -> test
node test: branch 4 - (x3^2 + x4^2) >= 0 ? step : done
node done: output [x3, x4]
"""

ZERO_TEST = """\
machine zero_test over rational equational
node start: input -> test
node test: branch x1 = 0 ? done : spin
node spin: compute x0 := x0 -> spin
node done: output [x1]
"""

COUNTDOWN = """\
# halts iff x1 is a natural number; counts it down to zero
machine countdown over rational equational
node start: input -> test
node test: branch x1 - x2 = 0 ? done : step
node step: compute x2 := x2 + 1 -> test
node done: output [x2]
"""

SHIFT_LOOP = """\
# walks right along the tape writing a+1, a+2, ... until the value is >= 0
machine shift_loop over rational
node start: input -> test
node test: branch x1 >= 0 ? done : step
node step: compute x2 := x1 + 1 -> move
node move: shift left -> test
node done: output [x1]
"""

GCD = """\
# Euclid by repeated subtraction over Z, for natural inputs
machine gcd over integer
node start: input -> check
node check: branch -x2 >= 0 ? done : reduce
node reduce: branch x1 - x2 >= 0 ? sub : swap
node sub: compute x1 := x1 - x2 -> reduce
node swap: compute x1 := x2, x2 := x1 -> check
node done: output [x1]
"""


def identity() -> Machine:
    return parse_machine_dsl(IDENTITY)


def sign_branch() -> Machine:
    return parse_machine_dsl(SIGN_BRANCH)


def newton(eps: Fraction = Fraction(1, 1000)) -> Machine:
    return parse_machine_dsl(NEWTON.format(eps=f"{eps.numerator}/{eps.denominator}"))


def mandelbrot() -> Machine:
    return parse_machine_dsl(MANDELBROT)


def zero_test() -> Machine:
    return parse_machine_dsl(ZERO_TEST)


def countdown() -> Machine:
    return parse_machine_dsl(COUNTDOWN)


def shift_loop() -> Machine:
    return parse_machine_dsl(SHIFT_LOOP)


def gcd() -> Machine:
    return parse_machine_dsl(GCD)


BUILDERS = {
    "identity": identity,
    "sign_branch": sign_branch,
    "newton": newton,
    "mandelbrot": mandelbrot,
    "zero_test": zero_test,
    "countdown": countdown,
    "shift_loop": shift_loop,
    "gcd": gcd,
}

# input dimension of each corpus machine
DIMENSIONS = {
    "identity": 2, "sign_branch": 1, "newton": 1, "mandelbrot": 2,
    "zero_test": 1, "countdown": 1, "shift_loop": 1, "gcd": 2,
}


def all_machines() -> dict[str, Machine]:
    return {name: build() for name, build in BUILDERS.items()}


def source(name: str) -> str:
    return format_machine(BUILDERS[name]())


# -- input samplers -------------------------------------------------------------


def _rational(rng, lo: int, hi: int, max_den: int) -> Fraction:
    d = rng.randint(1, max_den)
    q = Fraction(rng.randint(lo * d, hi * d), d)
    return q


def generic_sample(rng, dim: int) -> tuple:
    """Rationals in [-100, 100] with denominators up to 20; zero one time in ten."""
    return tuple(0 if rng.random() < 0.1 else _rational(rng, -100, 100, 20) for _ in range(dim))


def _mandelbrot_sample(rng) -> tuple:
    # Exact iterates double in size every step, so only orbits that escape
    # early or are eventually periodic are feasible: Gaussian integers,
    # points right of the set (Re c >= 1/2), and points outside |c| = 2.
    pool = rng.randrange(3)
    if pool == 0:
        return (rng.randint(-2, 2), rng.randint(-2, 2))
    if pool == 1:
        return (_rational(rng, 1, 3, 8) if rng.random() < 0.9 else Fraction(1, 2), _rational(rng, -3, 3, 8))
    while True:
        a, b = _rational(rng, -4, 4, 8), _rational(rng, -4, 4, 8)
        if a * a + b * b > 4:
            return (a, b)


SAMPLERS = {
    "sign_branch": lambda rng: (_rational(rng, -50, 50, 20),),
    "zero_test": lambda rng: (0,) if rng.random() < 0.3 else (_rational(rng, -5, 5, 7),),
    "newton": lambda rng: (0,) if rng.random() < 0.02 else (_rational(rng, -60, 60, 20),),
    "mandelbrot": _mandelbrot_sample,
    "shift_loop": lambda rng: (_rational(rng, -100, 40, 9),),
    "countdown": lambda rng: ((rng.randint(-10, 120),) if rng.random() < 0.6
                              else (_rational(rng, -5, 100, 4),)),
    "identity": lambda rng: generic_sample(rng, 2),
    "gcd": lambda rng: (rng.randint(0, 100), rng.randint(0, 100)),
}

# machines of the run/cell agreement corpus (closed, no oracle, no streams)
CELL_CORPUS = ("sign_branch", "newton", "mandelbrot", "zero_test", "shift_loop", "countdown")


def sample(name: str, rng, dim: int | None = None) -> tuple:
    if name in SAMPLERS:
        return SAMPLERS[name](rng)
    return generic_sample(rng, dim if dim is not None else 1)
