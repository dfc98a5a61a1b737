import json

import pytest

from bss import corpus
from bss.cli import main


@pytest.fixture
def machines(tmp_path):
    for name in corpus.BUILDERS:
        (tmp_path / f"{name}.bss").write_text(corpus.source(name))
    return tmp_path


def bss(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# -- run ---------------------------------------------------------------------------


def test_run_newton(machines, capsys):
    code, out, err = bss(capsys, "run", "--machine", machines / "newton.bss", "--input", "1", "--budget", 1000)
    assert (code, out) == (0, "577/408\n")
    assert err.startswith("halted after 8 steps")


def test_run_json_and_trace(machines, capsys, tmp_path):
    trace = tmp_path / "t.json"
    code, out, _ = bss(capsys, "run", "--machine", machines / "identity.bss", "--input", "3,5",
                       "--budget", 10, "--json", "--trace", trace)
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "halted" and doc["output"] == ["3", "5"]
    assert len(json.loads(trace.read_text())["trace"]) == 2


def test_run_out_of_budget(machines, capsys):
    code, out, err = bss(capsys, "run", "--machine", machines / "mandelbrot.bss", "--input", "0,0", "--budget", 100)
    assert code == 2 and out == "" and "out_of_budget" in err


def test_run_stuck(machines, capsys, tmp_path):
    src = tmp_path / "div.bss"
    src.write_text("machine d over rational\nnode s: input -> c\nnode c: compute x1 := 1 / x1 -> o\n"
                   "node o: output [x1]\n")
    code, _, err = bss(capsys, "run", "--machine", src, "--input", "0", "--budget", 10)
    assert code == 1 and "stuck" in err


def test_run_with_oracle(tmp_path, capsys):
    src = tmp_path / "o.bss"
    src.write_text("machine o over rational\nnode s: input -> q\nnode q: oracle [x1, x2] into x3 -> o\n"
                   "node o: output [x3]\n")
    (tmp_path / "x.json").write_text('{"name": "X", "members": ["1,2", [3]]}')
    code, out, _ = bss(capsys, "run", "--machine", src, "--input", "1,2", "--budget", 10,
                       "--oracle", tmp_path / "x.json")
    assert (code, out) == (0, "1\n")
    code, out, _ = bss(capsys, "run", "--machine", src, "--input", "2,1", "--budget", 10,
                       "--oracle", tmp_path / "x.json")
    assert (code, out) == (0, "0\n")


def test_stream_binding(tmp_path, capsys):
    src = tmp_path / "s.bss"
    src.write_text("machine m over stream\nparam l = stream(l)\nnode s: input -> t\n"
                   "node t: branch x1 - l >= 0 ? o : p\nnode o: output [x1]\nnode p: output\n")
    args = ["run", "--machine", src, "--input", "1", "--budget", 10]
    code, out, _ = bss(capsys, *args, "--stream", "l=0:5(0)")
    assert (code, out) == (0, "1\n")
    assert bss(capsys, *args, "--stream", "l")[0] == 64


# -- errors --------------------------------------------------------------------------


def test_missing_file_is_a_data_error(tmp_path, capsys):
    code, _, err = bss(capsys, "run", "--machine", tmp_path / "nope.bss", "--input", "1", "--budget", 5)
    assert code == 65 and "nope.bss:1:1" in err


def test_parse_error_is_located(tmp_path, capsys):
    src = tmp_path / "bad.bss"
    src.write_text("machine b over rational\nnode s: input -> o\nnode o: outptu\n")
    code, _, err = bss(capsys, "run", "--machine", src, "--input", "1", "--budget", 5)
    assert code == 65 and f"{src}:3:" in err


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["run", "--machine", "m.bss", "--input", "1"],
    ["run", "--machine", "m.bss", "--input", "1", "--budget", "0"],
    ["paths", "--machine", "m.bss", "--dim", "-1", "--depth", "3"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 64
    capsys.readouterr()


def test_bad_input_word(machines, capsys):
    code, _, err = bss(capsys, "run", "--machine", machines / "identity.bss", "--input", "1,x", "--budget", 5)
    assert code == 65 and "<input>:1:1" in err


# -- paths and check-cells -------------------------------------------------------------


def test_paths_json(machines, capsys):
    code, out, _ = bss(capsys, "paths", "--machine", machines / "sign_branch.bss", "--dim", 1, "--depth", 10)
    assert code == 0
    doc = json.loads(out)
    halting = [c for c in doc["cells"] if c["output"] is not None]
    assert [[(d["poly"], d["rel"]) for d in c["conditions"]] for c in halting] == [[("x1", ">=0")]]


def test_paths_text(machines, capsys, tmp_path):
    dest = tmp_path / "cells.txt"
    code, out, err = bss(capsys, "paths", "--machine", machines / "zero_test.bss", "--dim", 1, "--depth", 10,
                         "--format", "text", "--out", dest)
    assert code == 0 and out == ""
    assert dest.read_text().splitlines() == [
        "start/test/done: x1 =0 -> (x1)", "start/test" + "/spin" * 8 + "/*: x1 !=0..."]
    assert "halting" in err


def test_paths_text_shares_definitions(machines, capsys):
    code, out, _ = bss(capsys, "paths", "--machine", machines / "mandelbrot.bss", "--dim", 2, "--depth", 200,
                       "--format", "text")
    assert code == 0 and "\nwhere\n" in out


def test_check_cells(machines, capsys, tmp_path):
    report = tmp_path / "r.json"
    code, _, err = bss(capsys, "check-cells", "--machine", machines / "sign_branch.bss", "--dim", 1,
                       "--depth", 50, "--samples", 1000, "--seed", 1, "--report", report)
    assert code == 0 and "1000/1000" in err
    assert json.loads(report.read_text())["disagreements"] == []


# -- structures and eval ---------------------------------------------------------------


def formula(tmp_path, text, name="f.sexp"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_order_structure_and_eval(tmp_path, capsys):
    code, out, _ = bss(capsys, "structure", "order", "--pairs", "0<1,1<2,0<2", "--out", tmp_path / "ord")
    assert code == 0
    manifest = out.strip()
    f = formula(tmp_path, "(exists (y) (atom < x y))")
    base = ["eval", "--structure", manifest, "--formula", f, "--budget", 1000]
    assert bss(capsys, *base, "--assign", "x=0")[:2] == (0, "true\n")
    assert bss(capsys, *base, "--assign", "x=2")[:2] == (2, "unknown\n")
    assert bss(capsys, *base, "--assign", "x=2", "--bounded")[:2] == (1, "false\n")


def test_random_order_is_seeded(tmp_path, capsys):
    for d in ("a", "b"):
        assert bss(capsys, "structure", "order", "--random", 5, "--seed", 3, "--out", tmp_path / d)[0] == 0
    assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()


def test_not_an_order(tmp_path, capsys):
    assert bss(capsys, "structure", "order", "--pairs", "0<1,1<0", "--out", tmp_path)[0] == 65
    assert bss(capsys, "structure", "order", "--out", tmp_path)[0] == 64


def test_vectorspace_structure(tmp_path, capsys):
    code, out, _ = bss(capsys, "structure", "vectorspace", "--dim", 2, "--basis", "1,1;0,1", "--out", tmp_path)
    assert code == 0
    doc = json.loads(open(out.strip()).read())
    iso = tmp_path / doc["isomorphism"]
    assert bss(capsys, "run", "--machine", iso, "--input", "2,3", "--budget", 10)[:2] == (0, "2,5\n")
    assert bss(capsys, "structure", "vectorspace", "--dim", 2, "--basis", "1,1;2,2", "--out", tmp_path)[0] == 65


def test_cycles_structure(tmp_path, capsys):
    code, out, _ = bss(capsys, "structure", "cycles", "--set", "2", "--n-max", 3, "--out", tmp_path)
    assert code == 0
    f = formula(tmp_path, "(forall (u) (exists (a b) (and (atom E u a) (atom E u b) (not (= a b)))))")
    assert bss(capsys, "eval", "--structure", out.strip(), "--formula", f, "--budget", 100)[:2] == (0, "true\n")


def test_finite_structure_and_modes(tmp_path, capsys):
    code, out, _ = bss(capsys, "structure", "finite", "--elements", "0,1,2",
                       "--relation", "E=0:1;1:2;2:0", "--out", tmp_path)
    assert code == 0
    manifest = out.strip()
    f = formula(tmp_path, "(forall (y) (exists (z) (atom E y z)))")
    assert bss(capsys, "eval", "--structure", manifest, "--formula", f, "--budget", 100)[:2] == (0, "true\n")
    g = formula(tmp_path, "(exists (y) (atom E y y))", "g.sexp")
    assert bss(capsys, "eval", "--structure", manifest, "--formula", g, "--budget", 100,
               "--mode", "finite")[:2] == (1, "false\n")
    report = tmp_path / "r.json"
    bss(capsys, "eval", "--structure", manifest, "--formula", g, "--budget", 100, "--report", report)
    assert json.loads(report.read_text())["result"] == "unknown"


def test_formula_syntax_error_is_located(tmp_path, capsys):
    bss(capsys, "structure", "finite", "--elements", "0", "--out", tmp_path)
    f = formula(tmp_path, "(and\n  (atom E x y)\n  (frob))")
    code, _, err = bss(capsys, "eval", "--structure", tmp_path / "manifest.json", "--formula", f, "--budget", 5)
    assert code == 65 and f"{f}:3:3" in err


def test_level_too_high_for_budgeted_mode(tmp_path, capsys):
    bss(capsys, "structure", "finite", "--elements", "0,1", "--relation", "E=0:1", "--out", tmp_path)
    f = formula(tmp_path, "(exists (y) (forall (z) (atom E y z)))")
    code, _, _ = bss(capsys, "eval", "--structure", tmp_path / "manifest.json", "--formula", f,
                     "--budget", 5, "--mode", "budgeted")
    assert code == 65
