from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bss import corpus
from bss.dsl import ParseError, ValidationError, format_machine, parse_expr, parse_machine_dsl, parse_univariate
from bss.expr import evaluate
from bss.machine import BranchNode, Halted, run
from bss.scalar import Backend, make_algebraic, make_stream


def test_identity_has_two_nodes():
    m = parse_machine_dsl(corpus.IDENTITY)
    assert len(m.nodes) == 2 and m.backend is Backend.RATIONAL


def test_duplicate_branch_targets_are_accepted():
    m = parse_machine_dsl("machine d over rational\nnode s: input -> b\n"
                          "node b: branch x1 >= 0 ? n2 : n2\nnode n2: output")
    assert m.nodes["b"] == BranchNode(m.nodes["b"].expr, "n2", "n2")


def test_inequality_under_equational_is_a_parse_error():
    with pytest.raises(ParseError) as e:
        parse_machine_dsl("machine d over rational equational\nnode s: input -> b\n"
                          "node b: branch x1 >= 0 ? o : o\nnode o: output")
    assert (e.value.line, e.value.col) == (3, 19)


@pytest.mark.parametrize("src, line, col", [
    ("node s: input -> o", 1, 1),
    ("machine m over complex", 1, 16),
    ("machine m over rational\nnode s: input -> o\nnode o: output\nnode o: output", 4, 6),
    ("machine m over rational\nnode s: input -> o\nnode o: frobnicate", 3, 9),
    ("machine m over rational\nnode s: input -> o\nnode o: compute x1 := (x1 -> o", 3, 27),
    ("machine m over rational\nparam p = stream(q)\nnode s: input -> o\nnode o: output", 2, 18),
    ("machine m over rational\nnode s: input -> b\nnode b: branch x1 >= 1 ? o : o\nnode o: output", 3, 22),
])
def test_parse_errors_carry_positions(src, line, col):
    with pytest.raises(ParseError) as e:
        parse_machine_dsl(src)
    assert (e.value.line, e.value.col) == (line, col)


def test_validation_errors_point_at_nodes():
    with pytest.raises(ValidationError) as e:
        parse_machine_dsl("machine m over rational\nnode s: input -> x\nnode o: output")
    (line, col, v), *_ = e.value.items
    assert (line, col) == (2, 6) and v.clause == "dangling-edge"


def test_params_and_literals():
    src = ("machine m over algebraic\nparam r = alg(x^2 - 2, 1, 2)\nparam q = -5/6\n"
           "node s: input -> c\nnode c: compute x1 := r * r + q -> o\nnode o: output [x1]")
    m = parse_machine_dsl(src)
    assert m.params["r"] == make_algebraic([-2, 0, 1], 1, 2)
    assert run(m, (), 10).output == (Fraction(7, 6),)


def test_stream_parameter_binding():
    ell = make_stream(0, lambda i: 1, budget=40)
    m = parse_machine_dsl("machine m over stream\nparam l = stream(ell)\nnode s: input -> o\nnode o: output",
                          {"ell": ell})
    assert m.params["l"] is ell


def test_rational_literals_and_division():
    e = parse_expr("5/6 + x1 / 2 - x-1^2")
    got = evaluate(e, {1: Fraction(1), -1: Fraction(3)}.get, {})
    assert got == Fraction(5, 6) + Fraction(1, 2) - 9


def test_univariate_polynomials():
    assert parse_univariate("x^2 - 2") == [-2, 0, 1]
    assert parse_univariate("(x + 1)^3") == [1, 3, 3, 1]


def test_corpus_round_trips_through_the_printer():
    for name, m in corpus.all_machines().items():
        text = format_machine(m)
        again = parse_machine_dsl(text)
        assert again == m, name
        assert format_machine(again) == text


def test_round_trip_preserves_behaviour():
    m = parse_machine_dsl(format_machine(corpus.newton()))
    assert run(m, (1,), 100) == Halted((Fraction(577, 408),), 8)


names = st.sampled_from(["x1", "x2", "x-1", "x0", "3", "5/6", "7"])


@st.composite
def exprs(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(names)
    op = draw(st.sampled_from(["+", "-", "*", "^"]))
    a = draw(exprs(depth=depth - 1))
    if op == "^":
        return f"({a})^{draw(st.integers(0, 3))}"
    return f"({a} {op} {draw(exprs(depth=depth - 1))})"


@given(exprs())
def test_printed_expressions_reparse_to_equal_values(text):
    from bss.expr import to_source
    e = parse_expr(text)
    cells = {0: Fraction(2), 1: Fraction(-3, 4), 2: Fraction(5), -1: Fraction(1, 3)}
    assert parse_expr(to_source(e)) == e
    # python arithmetic as an independent evaluator
    py = text.replace("^", "**").replace("x-1", "c_1")
    env = {"x0": cells[0], "x1": cells[1], "x2": cells[2], "c_1": cells[-1]}
    py = __import__("re").sub(r"(\d+)/(\d+)", r"Fraction(\1, \2)", py)
    assert evaluate(e, lambda i: cells.get(i, 0), {}) == eval(py, {"Fraction": Fraction}, env)
