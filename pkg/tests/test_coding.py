import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bss import corpus
from bss.coding import DecodeError, UnencodableParameter, canonical, decode_machine, encode_machine
from bss.dsl import parse_machine_dsl
from bss.machine import Halted, describe_outcome, run
from bss.scalar import make_algebraic, make_stream


def test_identity_round_trip():
    m = corpus.identity()
    assert decode_machine(encode_machine(m)) == canonical(m)


def test_identity_code():
    # header, input with default placement, output with default extraction, one edge
    assert encode_machine(corpus.identity()) == (1, 1, 0, 2, 1, 0, 0, -1, 4, -1, 0, 0, 1)


def test_stream_parameter_is_unencodable():
    m = parse_machine_dsl("machine m over stream\nparam l = stream(l)\nnode s: input -> o\nnode o: output",
                          {"l": make_stream(0, lambda i: 1)})
    with pytest.raises(UnencodableParameter):
        encode_machine(m)


def test_dangling_edge_reference():
    w = list(encode_machine(corpus.identity()))
    w[-1] = 7
    with pytest.raises(DecodeError) as e:
        decode_machine(w)
    assert e.value.position == len(w) - 3 and "dangling" in e.value.reason


@pytest.mark.parametrize("mutate, reason", [
    (lambda w: w[:-1], "ends early"),
    (lambda w: w + [0], "trailing"),
    (lambda w: [2] + w[1:], "version"),
    (lambda w: w[:1] + [Fraction(1, 2)] + w[2:], "integer"),
])
def test_malformed_words(mutate, reason):
    with pytest.raises(DecodeError) as e:
        decode_machine(mutate(list(encode_machine(corpus.identity()))))
    assert reason in e.value.reason


def test_decoded_newton_runs_the_same():
    m = decode_machine(encode_machine(corpus.newton()))
    assert run(m, (1,), 1000) == Halted((Fraction(577, 408),), 8)


def test_encoding_is_deterministic_and_id_independent():
    src = corpus.SIGN_BRANCH
    renamed = src.replace("start", "a0").replace("test", "zz").replace("spin", "b").replace("done", "c")
    assert encode_machine(parse_machine_dsl(src)) == encode_machine(parse_machine_dsl(renamed))


def test_algebraic_parameters_survive():
    src = ("machine m over algebraic\nparam r = alg(x^2 - 2, 1, 2)\n"
           "node s: input -> c\nnode c: compute x1 := r * x1 -> o\nnode o: output [x1]")
    m = parse_machine_dsl(src)
    w = encode_machine(m)
    assert make_algebraic([-2, 0, 1], 1, 2) in w
    assert run(decode_machine(w), (3,), 10).output[0] * run(m, (3,), 10).output[0] == 18


def test_canonical_form_is_a_fixed_point():
    for m in corpus.all_machines().values():
        c = canonical(m)
        assert canonical(c) == c
        assert encode_machine(c) == encode_machine(m)


@given(st.sampled_from(sorted(corpus.BUILDERS)), st.integers(0, 10 ** 6))
def test_phi_round_trip(name, seed):
    m = corpus.BUILDERS[name]()
    d = decode_machine(encode_machine(m))
    rng = random.Random(seed)
    for _ in range(5):
        w = corpus.sample(name, rng, corpus.DIMENSIONS[name])
        assert describe_outcome(run(d, w, 500)) | {"node": None} == describe_outcome(run(m, w, 500)) | {"node": None}
