"""Command-line interface: ``bss run | paths | check-cells | structure | eval``.

Exit codes: 0 success or true, 1 false or disagreement, 2 unknown or out
of budget, 64 usage error, 65 data error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from typing import Optional, Sequence

from bss import corpus
from bss.dsl import ParseError, ValidationError, format_machine, parse_machine_dsl
from bss.formulas import (
    FormulaSyntaxError, LevelTooHigh, TransfiniteNotSupported, UnboundedEnumerator, classify, eval_budgeted,
    eval_finite, load_formula,
)
from bss.machine import Halted, Machine, Oracle, OutOfBudget, Stuck, describe_outcome, run
from bss.paths import FORMAT_VERSION, PathLimitExceeded, UnsupportedNode, cells_to_json, check_agreement, enumerate_paths
from bss.scalar import Backend, make_stream, parse_word, render
from bss.structures import (
    DependentBasis, NotAStrictOrder, build_order_structure, cycle_graph_structure, finite_structure,
    load_structure, random_strict_order, vs_iso, vs_make, write_structure,
)

EXIT_OK, EXIT_FALSE, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class DataError(Exception):
    """A problem with an input file or value, located at ``where`` (``file:line:col``)."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write_json(path: str, doc) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise DataError(f"{path}:1:1", e.strerror or str(e)) from None


def _stream_binding(spec: str):
    """``NAME=INT:DIGITS`` with an optional repeating tail ``(DIGITS)``."""
    name, sep, body = spec.partition("=")
    ip, sep2, digits = body.partition(":")
    if not sep or not sep2 or not name:
        raise UsageError(f"--stream expects NAME=INT:DIGITS[(REPEAT)], got {spec!r}")
    head, _, rest = digits.partition("(")
    tail = rest.rstrip(")")
    if not (head + tail).isdigit() and (head + tail) != "":
        raise UsageError(f"--stream digits must be decimal: {spec!r}")
    pre = [int(c) for c in head]
    rep = [int(c) for c in tail]

    def digit(i: int) -> int:
        if i < len(pre):
            return pre[i]
        return rep[(i - len(pre)) % len(rep)] if rep else 0
    try:
        return name, make_stream(int(ip), digit, name=name)
    except ValueError:
        raise UsageError(f"--stream integer part must be an integer: {spec!r}") from None


def _load_machine(path: str, stream_specs: Sequence[str] = ()) -> Machine:
    streams = dict(_stream_binding(s) for s in stream_specs)
    text = _read(path)
    try:
        return parse_machine_dsl(text, streams)
    except ParseError as e:
        raise DataError(f"{path}:{e.line}:{e.col}", e.message) from None
    except ValidationError as e:
        ln, col, v = e.items[0]
        rest = "".join(f"\n{path}:{a}:{b}: {w}" for a, b, w in e.items[1:])
        raise DataError(f"{path}:{ln}:{col}", f"{v}{rest}") from None


def _word(text: str, what: str = "<input>") -> tuple:
    try:
        return parse_word(text)
    except (ValueError, ZeroDivisionError, ArithmeticError) as e:
        raise DataError(f"{what}:1:1", f"bad scalar word {text!r}: {e}") from None


def _load_oracle(path: str) -> Oracle:
    """JSON: a list of member words, or ``{"name": ..., "members": [...]}``; words as strings or lists."""
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise DataError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    name = "X"
    if isinstance(doc, dict):
        name = doc.get("name", name)
        doc = doc.get("members", [])
    words = []
    for w in doc:
        if isinstance(w, str):
            words.append(_word(w, path))
        else:
            words.append(_word(",".join(str(x) for x in w), path))
    return Oracle.finite(words, name)


# -- subcommands ---------------------------------------------------------------


def cmd_run(a) -> int:
    m = _load_machine(a.machine, a.stream)
    word = _word(a.input)
    oracle = _load_oracle(a.oracle) if a.oracle else None
    trace: Optional[list] = [] if a.trace else None
    t0 = time.perf_counter()
    out = run(m, word, a.budget, oracle, trace)
    elapsed = time.perf_counter() - t0
    report = describe_outcome(out)
    if a.trace:
        _write_json(a.trace, {"format_version": FORMAT_VERSION, "machine": m.name,
                              "input": [render(v) for v in word], "budget": a.budget,
                              "outcome": report, "trace": trace})
    if a.json:
        _write_json("-", {"format_version": FORMAT_VERSION, "machine": m.name, **report})
    elif isinstance(out, Halted):
        print(",".join(render(v) for v in out.output))
    print(f"{report['status']} after {report['steps']} steps ({elapsed:.3f}s)", file=sys.stderr)
    if isinstance(out, Halted):
        return EXIT_OK
    if isinstance(out, OutOfBudget):
        return EXIT_UNKNOWN
    assert isinstance(out, Stuck)
    print(f"stuck: {out.reason.value} at node {out.at.node}", file=sys.stderr)
    return EXIT_FALSE


def cmd_paths(a) -> int:
    m = _load_machine(a.machine, a.stream)
    cells = enumerate_paths(m, a.dim, a.depth, max_cells=a.max_cells)
    if a.format == "json":
        text = cells_to_json(m, a.dim, a.depth, cells)
    else:
        lines, defs = [], {}
        for c in cells:
            doc = c.to_json(defs)
            conds = " and ".join(f"{d['poly']} {d['rel']}" for d in doc["conditions"]) or "true"
            tail = "..." if c.truncated else " -> (" + ", ".join(doc["output"]) + ")"
            lines.append(f"{'/'.join(c.path)}: {conds}{tail}")
        if defs:
            lines += ["where"] + ["  " + defs[k] for k in sorted(defs)]
        text = "\n".join(lines) + "\n"
    if a.out and a.out != "-":
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{len(cells)} cells, {sum(c.halting for c in cells)} halting", file=sys.stderr)
    return EXIT_OK


def cmd_check_cells(a) -> int:
    m = _load_machine(a.machine, a.stream)
    rng = random.Random(a.seed)
    use_corpus = m.name in corpus.SAMPLERS and corpus.DIMENSIONS.get(m.name) == a.dim
    points = [corpus.sample(m.name, rng, a.dim) if use_corpus else corpus.generic_sample(rng, a.dim)
              for _ in range(a.samples)]
    cells = enumerate_paths(m, a.dim, a.depth, max_cells=a.max_cells)
    bad = check_agreement(m, cells, a.depth, points)
    doc = {"format_version": FORMAT_VERSION, "machine": m.name, "dim": a.dim, "depth": a.depth,
           "samples": a.samples, "seed": a.seed, "cells": len(cells),
           "halting_cells": sum(c.halting for c in cells),
           "disagreements": [d.to_json() for d in bad]}
    if a.report:
        _write_json(a.report, doc)
    for d in bad[:10]:
        print(f"disagreement at ({', '.join(render(v) for v in d.point)}): {d.reason}", file=sys.stderr)
    print(f"{a.samples - len(bad)}/{a.samples} samples agree across {len(cells)} cells", file=sys.stderr)
    return EXIT_OK if not bad else EXIT_FALSE


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated integers: {text!r}") from None


def _pairs(text: str) -> list[tuple[int, int]]:
    """``0<1,1<2`` or ``0:1,1:2``."""
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        sep = "<" if "<" in item else ":"
        left, _, right = item.partition(sep)
        try:
            out.append((int(left), int(right)))
        except ValueError:
            raise UsageError(f"bad pair {item!r}") from None
    return out


def cmd_structure(a) -> int:
    if a.kind == "order":
        if a.random is not None:
            D = random_strict_order(random.Random(a.seed), a.random)
        elif a.pairs is not None:
            D = _pairs(a.pairs)
        else:
            raise UsageError("structure order needs --pairs or --random")
        try:
            pres = build_order_structure(D, a.digit_budget)
        except NotAStrictOrder as e:
            raise DataError("<pairs>:1:1", str(e)) from None
        extra = {"pairs": sorted([list(p) for p in pres.D]), "digit_budget": a.digit_budget,
                 "pairing": pres.pairing}
        path = write_structure(pres.structure, "order", a.out, extra)
    elif a.kind == "vectorspace":
        backend = Backend.parse(a.backend)
        s = vs_make(a.dim, backend)
        extra: dict = {"dim": a.dim}
        if a.basis:
            rows = [_word(r, "<basis>") for r in a.basis.split(";")]
            try:
                iso = vs_iso(a.dim, rows)
            except DependentBasis as e:
                raise DataError("<basis>:1:1", str(e)) from None
            fname = f"{iso.machine.name}.bss"
            os.makedirs(a.out, exist_ok=True)
            with open(os.path.join(a.out, fname), "w", encoding="utf-8") as fh:
                fh.write(format_machine(iso.machine))
            extra.update({"isomorphism": fname, "basis": [[render(x) for x in r] for r in rows]})
        path = write_structure(s, "vectorspace", a.out, extra)
    elif a.kind == "cycles":
        members = _int_list(a.set or "", "--set")
        s = cycle_graph_structure(members, a.n_min, a.n_max)
        path = write_structure(s, "cycles", a.out, {"set": sorted(members), "n_min": a.n_min, "n_max": a.n_max})
    else:
        elements = _int_list(a.elements or "", "--elements")
        rels = {}
        for spec in a.relation or []:
            name, _, rows = spec.partition("=")
            rels[name] = [tuple(_int_list(r.replace(":", ","), "--relation")) for r in rows.split(";") if r]
        try:
            s = finite_structure(elements, rels)
        except ValueError as e:
            raise DataError("<relation>:1:1", str(e)) from None
        path = write_structure(s, "finite", a.out, {"elements": elements})
    print(path)
    return EXIT_OK


def cmd_eval(a) -> int:
    try:
        s = load_structure(a.structure)
    except OSError as e:
        raise DataError(f"{a.structure}:1:1", e.strerror or str(e)) from None
    except (KeyError, ValueError, json.JSONDecodeError) as e:
        raise DataError(f"{a.structure}:1:1", f"bad manifest: {e}") from None
    text = _read(a.formula)
    try:
        f = load_formula(a.formula)
    except FormulaSyntaxError as e:
        line = text.count("\n", 0, e.pos) + 1
        col = e.pos - (text.rfind("\n", 0, e.pos) + 1) + 1
        raise DataError(f"{a.formula}:{line}:{col}", str(e).split(": ", 1)[-1]) from None
    asg = {}
    for spec in a.assign or []:
        k, _, v = spec.partition("=")
        asg[k] = _word(v, "<assign>")
    try:
        level = classify(f)
    except TransfiniteNotSupported as e:
        raise DataError(f"{a.formula}:1:1", str(e)) from None
    mode = a.mode
    if mode == "auto":
        mode = "budgeted" if level.n <= 1 else "finite"
    if mode == "finite":
        try:
            verdict: Optional[bool] = eval_finite(s, f, asg, a.budget)
        except UnboundedEnumerator as e:
            raise DataError(f"{a.formula}:1:1", str(e)) from None
    else:
        try:
            verdict = eval_budgeted(s, f, asg, budget=a.budget, bounded=a.bounded and s.elements is not None)
        except LevelTooHigh as e:
            raise DataError(f"{a.formula}:1:1", str(e)) from None
    word = {True: "true", False: "false", None: "unknown"}[verdict]
    if a.report:
        _write_json(a.report, {"format_version": FORMAT_VERSION, "structure": s.name, "level": str(level),
                               "mode": mode, "budget": a.budget, "result": word})
    print(word)
    print(f"level {level}, {mode} evaluation", file=sys.stderr)
    return {True: EXIT_OK, False: EXIT_FALSE, None: EXIT_UNKNOWN}[verdict]


# -- parser --------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be a natural number")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bss", description="Exact BSS machines over ordered rings.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def machine_args(q):
        q.add_argument("--machine", required=True, help="machine source file")
        q.add_argument("--stream", action="append", default=[], metavar="NAME=INT:DIGITS",
                       help="bind a stream parameter, e.g. ell=0:1(10)")

    r = sub.add_parser("run", help="run a machine on one input")
    machine_args(r)
    r.add_argument("--input", required=True, help='comma-separated scalars, e.g. "1,2/3"')
    r.add_argument("--budget", type=_positive, required=True)
    r.add_argument("--oracle", help="JSON file listing the oracle set")
    r.add_argument("--trace", help="write a JSON step trace here")
    r.add_argument("--json", action="store_true", help="print the outcome as JSON")
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("paths", help="enumerate path cells")
    machine_args(q)
    q.add_argument("--dim", type=_natural, required=True)
    q.add_argument("--depth", type=_positive, required=True)
    q.add_argument("--format", choices=("json", "text"), default="json")
    q.add_argument("--out", help="write here instead of stdout")
    q.add_argument("--max-cells", type=_positive, default=100_000)
    q.set_defaults(func=cmd_paths)

    c = sub.add_parser("check-cells", help="cross-check runs against path cells")
    machine_args(c)
    c.add_argument("--dim", type=_natural, required=True)
    c.add_argument("--depth", type=_positive, required=True)
    c.add_argument("--samples", type=_positive, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--report", help="write a JSON report here")
    c.add_argument("--max-cells", type=_positive, default=100_000)
    c.set_defaults(func=cmd_check_cells)

    s = sub.add_parser("structure", help="build a computable structure and write its machines")
    s.add_argument("kind", choices=("order", "vectorspace", "cycles", "finite"))
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--pairs", help="order: pairs a<b, comma separated")
    s.add_argument("--random", type=_positive, help="order: random order on {0..N-1}")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--digit-budget", type=_positive, default=1000)
    s.add_argument("--dim", type=_natural, default=2, help="vectorspace: dimension")
    s.add_argument("--backend", default="rational")
    s.add_argument("--basis", help="vectorspace: target basis rows, ';'-separated")
    s.add_argument("--set", help="cycles: members of S, comma separated")
    s.add_argument("--n-min", type=_natural, default=2)
    s.add_argument("--n-max", type=_natural)
    s.add_argument("--elements", help="finite: elements, comma separated")
    s.add_argument("--relation", action="append", metavar="R=a:b;c:d", help="finite: a relation table")
    s.set_defaults(func=cmd_structure)

    e = sub.add_parser("eval", help="evaluate a formula in a structure")
    e.add_argument("--structure", required=True, help="manifest.json")
    e.add_argument("--formula", required=True, help="S-expression formula file")
    e.add_argument("--budget", type=_positive, required=True)
    e.add_argument("--assign", action="append", metavar="VAR=WORD")
    e.add_argument("--mode", choices=("auto", "budgeted", "finite"), default="auto")
    e.add_argument("--bounded", action="store_true",
                   help="the witnesses are the whole (finite) universe, so exhaustion is conclusive")
    e.add_argument("--report", help="write a JSON result here")
    e.set_defaults(func=cmd_eval)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"bss: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"bss: {e}", file=sys.stderr)
        return EXIT_DATA
    except (UnsupportedNode, PathLimitExceeded, ValueError) as e:
        print(f"bss: {getattr(e, 'where', '<data>:1:1')}: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
