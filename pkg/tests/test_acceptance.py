"""Acceptance criteria. Each test records one pass/fail line, printed in the session summary."""
import contextlib
import filecmp
import math
import os
import random
import time
from fractions import Fraction

import pytest

from bss import corpus
from bss.cli import main
from bss.coding import UnencodableParameter, decode_machine, encode_machine
from bss.formulas import eval_budgeted, eval_finite
from bss.machine import Halted, OutOfBudget, describe_outcome, run
from bss.paths import check_agreement, check_equational, enumerate_paths
from bss.scalar import Backend, Sign, compare, make_algebraic, promote, scalar_arith as op
from bss.structures import DependentBasis, build_order_structure, random_strict_order, rank, vs_iso
from families import random_sigma1, random_structure
from oracles import det, newton_iterates, random_real_root

RESULTS: dict[int, str] = {}


@contextlib.contextmanager
def criterion(n, title, limit=None):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
    except BaseException as e:
        RESULTS[n] = f"criterion {n:2d} FAIL  {title} ({time.perf_counter() - t0:.1f}s): {e}"
        raise
    RESULTS[n] = f"criterion {n:2d} PASS  {title} ({elapsed:.1f}s)"


def test_01_gcd_matches_reference():
    with criterion(1, "gcd machine over Z on 10^4 pairs", limit=10):
        m = corpus.gcd()
        bad = []
        for a in range(1, 101):
            for b in range(1, 101):
                out = run(m, (a, b), 10_000)
                if not isinstance(out, Halted) or out.output != (math.gcd(a, b),):
                    bad.append((a, b))
        assert bad == [], bad[:5]


def test_02_run_cell_agreement():
    with criterion(2, "run/cell agreement, depth 200, 1000 samples per machine", limit=60):
        for name in corpus.CELL_CORPUS:
            m = corpus.BUILDERS[name]()
            dim = corpus.DIMENSIONS[name]
            cells = enumerate_paths(m, dim, 200)
            rng = random.Random(1)
            points = [corpus.sample(name, rng, dim) for _ in range(1000)]
            bad = check_agreement(m, cells, 200, points)
            assert bad == [], f"{name}: {bad[0].to_json()}"


def test_03_equational_cells():
    with criterion(3, "equational machines emit only =0 and !=0 conditions"):
        checked = 0
        for name, m in corpus.all_machines().items():
            if not check_equational(m):
                continue
            for c in enumerate_paths(m, corpus.DIMENSIONS[name], 200):
                assert {cond.rel for cond in c.conditions} <= {"=0", "!=0"}, name
                checked += 1
        assert checked > 0


def test_04_well_ordering_construction():
    with criterion(4, "100 random orders on {0..9}, 10^4 pairs, both machines", limit=120):
        rng = random.Random(2024)
        errors = 0
        for _ in range(100):
            D = random_strict_order(rng)
            p = build_order_structure(D)
            for a in range(10):
                for b in range(10):
                    yes, no = run(p.less, (a, b), 10 ** 5), run(p.not_less, (a, b), 10 ** 5)
                    halts, diverges = (Halted, OutOfBudget) if (a, b) in D else (OutOfBudget, Halted)
                    errors += not isinstance(yes, halts) or not isinstance(no, diverges)
        assert errors == 0


def test_05_newton_convergence():
    with criterion(5, "Newton from 1 halts at the exact iterates"):
        coarse = newton_iterates(1, Fraction(1, 1000))
        fine = newton_iterates(1, Fraction(1, 10 ** 12))
        assert len(coarse) == 3 and coarse[-1] == Fraction(577, 408)
        assert len(fine) == 5
        assert run(corpus.newton(), (1,), 1000).output == (coarse[-1],)
        assert run(corpus.newton(Fraction(1, 10 ** 12)), (1,), 1000).output == (fine[-1],)


def _sign(x, y):
    return compare(x, y)


def test_06_exact_arithmetic_suite():
    with criterion(6, "field and order axioms on 10^4 algebraic operands", limit=60):
        rng = random.Random(6)
        ops = [make_algebraic(*random_real_root(rng)) for _ in range(10_002)]
        zero, one = promote(0, Backend.ALGEBRAIC), promote(1, Backend.ALGEBRAIC)
        for i in range(0, len(ops), 3):
            a, b, c = ops[i:i + 3]
            eq = lambda x, y: compare(x, y) is Sign.ZERO  # noqa: E731
            assert eq(op("add", a, b), op("add", b, a)) and eq(op("mul", a, b), op("mul", b, a))
            assert eq(op("add", op("add", a, b), c), op("add", a, op("add", b, c)))
            assert eq(op("mul", op("mul", a, b), c), op("mul", a, op("mul", b, c)))
            assert eq(op("mul", a, op("add", b, c)), op("add", op("mul", a, b), op("mul", a, c)))
            assert eq(op("add", a, zero), a) and eq(op("mul", a, one), a)
            assert eq(op("add", a, op("sub", zero, a)), zero)
            if compare(a, 0) is not Sign.ZERO:
                assert eq(op("mul", a, op("div", one, a)), one)
            # order: totality, antisymmetry, transitivity, compatibility
            ab, ba = _sign(a, b), _sign(b, a)
            assert {ab, ba} in ({Sign.ZERO}, {Sign.POSITIVE, Sign.NEGATIVE})
            if ab is Sign.NEGATIVE and _sign(b, c) is Sign.NEGATIVE:
                assert _sign(a, c) is Sign.NEGATIVE
            assert _sign(op("add", a, c), op("add", b, c)) is ab
            # promotion embeds Z into Q into the algebraic numbers
            r, s = rng.randint(-50, 50), Fraction(rng.randint(-50, 50), rng.randint(1, 9))
            for f in ("add", "sub", "mul"):
                q = op(f, Fraction(r), s)
                assert q == op(f, r, s)
                assert eq(promote(q, Backend.ALGEBRAIC),
                          op(f, promote(r, Backend.ALGEBRAIC), promote(s, Backend.ALGEBRAIC)))
            assert _sign(promote(s, Backend.ALGEBRAIC), promote(r, Backend.ALGEBRAIC)) is compare(s, r)


def test_07_coding_round_trip():
    with criterion(7, "decode(encode(M)) runs like M on 20 inputs per corpus machine"):
        rng = random.Random(7)
        checked = 0
        for name, m in corpus.all_machines().items():
            try:
                d = decode_machine(encode_machine(m))
            except UnencodableParameter:
                continue
            for _ in range(20):
                w = corpus.sample(name, rng, corpus.DIMENSIONS[name])
                x, y = describe_outcome(run(m, w, 2000)), describe_outcome(run(d, w, 2000))
                assert (x["status"], x.get("output")) == (y["status"], y.get("output")), (name, w)
                checked += 1
        assert checked == 20 * len(corpus.BUILDERS)


def _rows(rng, n, m, lo=-9, hi=9):
    return [[Fraction(rng.randint(lo, hi), rng.randint(1, 4)) for _ in range(m)] for _ in range(n)]


def test_08_vector_space_isomorphism():
    with criterion(8, "vs_iso on 100 bases with 100 vectors each, determinant check"):
        rng = random.Random(8)
        bases = 0
        while bases < 100:
            n = rng.randint(1, 5)
            rows = _rows(rng, n, rng.randint(n, 5))
            if rank(rows) < n:
                continue
            iso = vs_iso(n, rows)
            f = lambda v: run(iso.machine, v, 10).output  # noqa: E731
            for _ in range(100):
                lam, mu = _rows(rng, 1, n)[0], _rows(rng, 1, n)[0]
                c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
                y = f(lam)
                assert f([a + b for a, b in zip(lam, mu)]) == tuple(p + q for p, q in zip(y, f(mu)))
                assert f([c * a for a in lam]) == tuple(c * p for p in y)
                assert iso.inverse(y) == tuple(lam)
            bases += 1
        singular = 0
        for _ in range(200):
            n = rng.randint(1, 4)
            rows = [[rng.randint(-1, 1) for _ in range(n)] for _ in range(n)]
            if det(rows) == 0:
                singular += 1
                with pytest.raises(DependentBasis):
                    vs_iso(n, rows)
            else:
                vs_iso(n, rows)
        assert singular > 0


def test_09_budgeted_matches_finite():
    with criterion(9, "eval_budgeted true iff eval_finite true on the Sigma_1 family"):
        rng = random.Random(9)
        checks = 0
        for _ in range(400):
            s, elements, _ = random_structure(rng)
            f = random_sigma1(rng, len(elements))
            for x in elements:
                env = {"x": (x,)}
                assert (eval_budgeted(s, f, env, budget=2000) is True) == eval_finite(s, f, env), (f, x)
                checks += 1
        assert checks > 400


def _cli_session(root):
    os.makedirs(root)
    for name in corpus.BUILDERS:
        with open(os.path.join(root, f"{name}.bss"), "w") as fh:
            fh.write(corpus.source(name))
    j = lambda *p: os.path.join(root, *p)  # noqa: E731
    with open(j("f.sexp"), "w") as fh:
        fh.write("(exists (y) (atom < x y))")
    calls = [
        ["run", "--machine", j("newton.bss"), "--input", "1", "--budget", "1000", "--trace", j("newton.trace.json")],
        ["run", "--machine", j("gcd.bss"), "--input", "84,36", "--budget", "1000", "--trace", j("gcd.trace.json")],
        ["paths", "--machine", j("mandelbrot.bss"), "--dim", "2", "--depth", "60", "--out", j("mandelbrot.cells.json")],
        ["paths", "--machine", j("countdown.bss"), "--dim", "1", "--depth", "40", "--format", "text",
         "--out", j("countdown.cells.txt")],
        ["check-cells", "--machine", j("newton.bss"), "--dim", "1", "--depth", "100", "--samples", "200",
         "--seed", "3", "--report", j("newton.check.json")],
        ["structure", "order", "--random", "6", "--seed", "5", "--out", j("order")],
        ["structure", "vectorspace", "--dim", "2", "--basis", "1,2;3,4", "--out", j("vs")],
        ["structure", "cycles", "--set", "2,4", "--n-max", "5", "--out", j("cycles")],
        ["structure", "finite", "--elements", "0,1,2", "--relation", "E=0:1;1:2", "--out", j("finite")],
        ["eval", "--structure", j("order", "manifest.json"), "--formula", j("f.sexp"), "--budget", "500",
         "--assign", "x=0", "--report", j("order.eval.json")],
    ]
    return [main(c) for c in calls]


def _tree(root):
    out = []
    for d, _, files in os.walk(root):
        out += [os.path.relpath(os.path.join(d, f), root) for f in files]
    return sorted(out)


def test_10_cli_artifacts_are_deterministic(tmp_path, capsys):
    with criterion(10, "two CLI sessions write byte-identical artifacts"):
        a, b = str(tmp_path / "a"), str(tmp_path / "b")
        codes_a = _cli_session(a)
        out_a = capsys.readouterr().out
        codes_b = _cli_session(b)
        out_b = capsys.readouterr().out
        assert codes_a == codes_b and set(codes_a) == {0}
        assert out_a.replace(a, "") == out_b.replace(b, "")
        files = _tree(a)
        assert files == _tree(b) and len(files) > 15
        _, mismatch, errors = filecmp.cmpfiles(a, b, files, shallow=False)
        assert mismatch == [] and errors == []
