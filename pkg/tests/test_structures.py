import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bss.machine import Halted, OutOfBudget, run
from bss.scalar import Sign, compare, make_algebraic, make_stream
from bss.structures import (
    DependentBasis, NotAStrictOrder, NotInSpan, SignatureMismatch, atomic_truth, build_digit_extractor,
    build_order_structure, cycle_graph_structure, cycle_vertices, finite_structure, in_universe,
    indicator_stream, load_structure, pair, random_strict_order, rank, unpair, vs_iso, vs_make,
    write_structure, _as_oracle,
)
from oracles import cantor, cycle_adjacent, det

# -- pairing -----------------------------------------------------------------------


def test_pair_examples():
    assert pair(0, 0) == 0
    assert pair(1, 2) == 8


def test_pair_is_injective_on_a_square():
    codes = {pair(a, b) for a in range(51) for b in range(51)}
    assert len(codes) == 51 * 51


@given(st.integers(0, 60), st.integers(0, 60))
def test_pair_matches_diagonal_enumeration(a, b):
    assert pair(a, b) == cantor(a, b)
    assert unpair(pair(a, b)) == (a, b)


# -- digit extraction ----------------------------------------------------------------


def test_extractor_alternating_digits():
    ell = make_stream(0, lambda i: 1 - i % 2, budget=200)
    m = build_digit_extractor(ell)
    assert run(m, (0,), 1000).output == (1,)
    assert isinstance(run(m, (1,), 10_000), OutOfBudget)
    assert run(m, (6,), 1000).output == (1,)


def test_extractor_all_ones():
    ell = make_stream(0, lambda i: 1, budget=200)
    assert run(build_digit_extractor(ell), (5,), 1000).output == (1,)


def test_complement_extractor():
    ell = make_stream(0, lambda i: 1 - i % 2, budget=200)
    co = build_digit_extractor(ell, complement=True)
    assert run(co, (1,), 1000).output == (0,)
    assert isinstance(run(co, (2,), 10_000), OutOfBudget)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=25), st.data())
def test_extractor_reads_every_digit(digits, data):
    ell = make_stream(0, lambda i: digits[i] if i < len(digits) else 0, budget=100)
    i = data.draw(st.integers(0, len(digits) - 1))
    yes = run(build_digit_extractor(ell), (i,), 2000)
    no = run(build_digit_extractor(ell, complement=True), (i,), 2000)
    assert isinstance(yes, Halted) == (digits[i] == 1)
    assert isinstance(no, Halted) == (digits[i] == 0)


def test_stream_digit_index_is_the_pair_code():
    D = {(0, 1)}
    ell = indicator_stream(lambda a, b: (a, b) in D)
    assert [ell.digit(i) for i in range(4)] == [0, 0, 1, 0]


# -- orders ------------------------------------------------------------------------


def test_single_pair_order():
    p = build_order_structure({(0, 1)})
    assert run(p.less, (0, 1), 1000).output == (1,)
    assert isinstance(run(p.less, (1, 0), 10_000), OutOfBudget)
    assert isinstance(run(p.not_less, (1, 0), 1000), Halted)


def test_empty_order():
    p = build_order_structure(set())
    for a in range(3):
        for b in range(3):
            assert isinstance(run(p.less, (a, b), 2000), OutOfBudget)
            assert isinstance(run(p.not_less, (a, b), 2000), Halted)


def test_three_element_order_all_pairs():
    D = {(0, 1), (1, 2), (0, 2)}
    p = build_order_structure(D)
    for a in range(3):
        for b in range(3):
            assert isinstance(run(p.less, (a, b), 10 ** 5), Halted) == ((a, b) in D)
            assert isinstance(run(p.not_less, (a, b), 10 ** 5), Halted) == ((a, b) not in D)
    assert atomic_truth(p.structure, "0 < 2", 10_000) is True
    assert atomic_truth(p.structure, "2 < 0", 10_000) is False


@pytest.mark.parametrize("D", [{(0, 0)}, {(0, 1), (1, 0)}, {(0, 1), (1, 2)}, {(0, 1), (2, 3)}, {(-1, 2)}])
def test_not_a_strict_order(D):
    with pytest.raises(NotAStrictOrder):
        build_order_structure(D)


def test_random_orders_on_ten_points():
    rng = random.Random(4)
    for _ in range(3):
        D = random_strict_order(rng)
        p = build_order_structure(D)
        for a in range(10):
            for b in range(10):
                assert isinstance(run(p.less, (a, b), 10 ** 5), Halted) == ((a, b) in D)


# -- vector spaces -------------------------------------------------------------------


def test_vs_examples():
    v2 = vs_make(2)
    assert run(v2.functions["add"], (1, 0, 0, 1), 10).output == (1, 1)
    assert run(v2.functions["scale"], (Fraction(3, 2), 2, 4), 10).output == (3, 6)
    assert atomic_truth(v2, "add((1,0),(0,1)) = (1,1)", 100) is True
    assert atomic_truth(v2, "add(b1, b2) = (1,2)", 100) is False
    v0 = vs_make(0)
    assert v0.elements == [()]
    assert in_universe(v0, (), 10) is True


def test_vs_iso_examples():
    iso = vs_iso(2, [(1, 1), (0, 1)])
    assert run(iso.machine, (2, 3), 10) == Halted((2, 5), 3)
    with pytest.raises(DependentBasis):
        vs_iso(2, [(1, 1), (2, 2)])
    s2 = make_algebraic([-2, 0, 1], 1, 2)
    iso = vs_iso(1, [(s2,)])
    (y,) = run(iso.machine, (3,), 10).output
    assert compare(y * y, 18) is Sign.ZERO and compare(y, 0) is Sign.POSITIVE


def test_inverse_rejects_vectors_outside_the_span():
    iso = vs_iso(1, [(1, 1)])
    assert iso.inverse((2, 2)) == (2,)
    with pytest.raises(NotInSpan):
        iso.inverse((1, 2))


entries = st.fractions(min_value=-10, max_value=10, max_denominator=5)


@given(st.integers(1, 4), st.data())
def test_vs_iso_linear_and_invertible(n, data):
    m = data.draw(st.integers(n, 5))
    rows = data.draw(st.lists(st.lists(entries, min_size=m, max_size=m), min_size=n, max_size=n))
    if rank(rows) < n:
        with pytest.raises(DependentBasis):
            vs_iso(n, rows)
        return
    iso = vs_iso(n, rows)
    f = lambda v: run(iso.machine, v, 10).output  # noqa: E731
    lam = data.draw(st.lists(entries, min_size=n, max_size=n))
    mu = data.draw(st.lists(entries, min_size=n, max_size=n))
    c = data.draw(entries)
    assert f([a + b for a, b in zip(lam, mu)]) == tuple(a + b for a, b in zip(f(lam), f(mu)))
    assert f([c * a for a in lam]) == tuple(c * a for a in f(lam))
    assert iso.inverse(f(lam)) == tuple(lam)


@given(st.integers(1, 4), st.data())
def test_dependent_basis_iff_zero_determinant(n, data):
    small = st.integers(-2, 2)
    rows = data.draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n))
    if det(rows) == 0:
        with pytest.raises(DependentBasis):
            vs_iso(n, rows)
    else:
        vs_iso(n, rows)


# -- cycles ------------------------------------------------------------------------------


def test_cycle_examples():
    s = cycle_graph_structure({2})
    assert atomic_truth(s, "E((2,0),(2,1))", 100) is True
    assert atomic_truth(s, "E((2,0),(2,2))", 100) is False
    assert atomic_truth(s, "E((3,0),(3,6))", 100) is True
    assert atomic_truth(s, "E((2,0),(3,1))", 100) is False
    with pytest.raises(SignatureMismatch):
        atomic_truth(s, "F((2,0),(2,1))", 100)


def test_cycle_universe():
    s = cycle_graph_structure({2})
    assert in_universe(s, (2, 3), 100) is True
    assert in_universe(s, (2, 4), 100) is None
    assert in_universe(s, (3, 6), 100) is True
    assert in_universe(s, (1, 0), 100) is None


@given(st.sets(st.integers(2, 6)))
def test_cycle_degrees_and_symmetry(S):
    s = cycle_graph_structure(S, n_max=6)
    oracle = _as_oracle(S)
    verts = s.elements
    for u in verts:
        nbrs = [v for v in verts if v[0] == u[0] and atomic_truth(s, f"E(({u[0]},{u[1]}),({v[0]},{v[1]}))", 200)]
        assert len(nbrs) == 2
        for v in nbrs:
            assert cycle_adjacent(S, u, v)
    rng = random.Random(len(S))
    for _ in range(30):
        u, v = rng.choice(verts), rng.choice(verts)
        fwd = atomic_truth(s, f"E(({u[0]},{u[1]}),({v[0]},{v[1]}))", 200)
        assert fwd == atomic_truth(s, f"E(({v[0]},{v[1]}),({u[0]},{u[1]}))", 200) == cycle_adjacent(S, u, v)
    assert [w for _, w in zip(range(4), cycle_vertices(oracle))] == [(2, 0), (2, 1), (2, 2), (2, 3)]


# -- finite tables and manifests ---------------------------------------------------------


def test_finite_structure_tables():
    s = finite_structure([0, 1, 2], {"E": [(0, 1), (1, 2), (2, 0)]})
    assert atomic_truth(s, "E(0,1)", 100) is True
    assert atomic_truth(s, "E(1,0)", 100) is False
    assert in_universe(s, (2,), 100) is True
    assert in_universe(s, (5,), 100) is None


@pytest.mark.parametrize("kind", ["order", "vectorspace", "cycles", "finite"])
def test_manifest_round_trip(tmp_path, kind):
    if kind == "order":
        s, extra, probe = build_order_structure({(0, 1), (1, 2), (0, 2)}).structure, \
            {"pairs": [[0, 1], [0, 2], [1, 2]], "digit_budget": 1000}, "0 < 2"
    elif kind == "vectorspace":
        s, extra, probe = vs_make(2), {"dim": 2}, "add(b1, b2) = (1,1)"
    elif kind == "cycles":
        s, extra, probe = cycle_graph_structure({2}), {"set": [2], "n_min": 2}, "E((3,0),(3,6))"
    else:
        s, extra, probe = finite_structure([0, 1], {"E": [(0, 1)]}), {"elements": [0, 1]}, "E(0,1)"
    path = write_structure(s, kind, tmp_path / kind, extra)
    doc = json.loads(open(path).read())
    assert doc["format_version"] == 1 and doc["kind"] == kind
    again = load_structure(path)
    assert atomic_truth(again, probe, 10_000) is True
    assert again.backend == s.backend
