import csv

import pytest
from click.testing import CliRunner

from vunify.bench import BenchProblem, parse_suite, run_bench, run_problem
from vunify.cli import main
from vunify.oracle import OracleOverflow, ground_oracle, ground_terms

from conftest import DATA, pair, term

SUITE = DATA / "xor-table1.suite"


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_get_variants_listing():
    r = run("get-variants", "--module", str(DATA / "exclusive_or.maude"), "X * Y")
    assert r.exit_code == 0
    assert r.output.count("Variant #") == 7
    lines = r.output.splitlines()
    assert lines[:4] == ["Variant #1", "[EXor]: #1:[EXor] * #2:[EXor]",
                         "X --> #1:[EXor]", "Y --> #2:[EXor]"]


def test_get_variants_bound_and_ground():
    r = run("get-variants", "--module", "exclusive_or", "--bound", "3", "X * Y")
    assert r.output.count("Variant #") == 3
    r = run("get-variants", "--module", "EXCLUSIVE-OR", "a")
    assert r.output.count("Variant #") == 1


def test_unify_listing():
    r = run("unify", "--module", "exclusive_or", "X * Y =? U * V")
    assert r.exit_code == 0 and r.output.count("Unifier #") == 57
    r = run("unify", "--module", "fastvscr", "f(X,Y,Z) =? s(W)")
    blocks = r.output.split("\n\n")
    assert len(blocks) == 2 and "X --> a" in blocks[0]


def test_unify_no_unifiers():
    r = run("unify", "--module", "xor_ctor", "--algo", "cr",
            "f1(V1 * V2) =? f2(V3 * V4 * V5, f2(V4, V5))")
    assert r.output.strip() == "No unifiers."


def test_unify_trace():
    r = run("unify", "--module", "exclusive_or", "--trace", "X =? U * V")
    assert r.exit_code == 0
    assert "rule=" in r.stderr and "Unifier #7" in r.stdout


@pytest.mark.parametrize("args,code", [
    (["unify", "--module", "no-such-module", "X =? Y"], 1),
    (["unify", "--module", "exclusive_or", "X =? "], 1),
    (["get-variants", "--module", "exclusive_or", "X * "], 1),
])
def test_exit_codes(args, code):
    assert run(*args).exit_code == code


def test_bound_exit_code(tmp_path, monkeypatch):
    mod = tmp_path / "n.maude"
    mod.write_text("fmod N is sort S . ops f s : S -> S . var X : S .\n"
                   "  eq f(s(X)) = f(X) [variant] . endfm\n")
    monkeypatch.setattr("vunify.varnarrow.DEFAULT_NODE_CAP", 15)
    r = run("get-variants", "--module", str(mod), "f(X)")
    assert r.exit_code == 2


def test_timeout_exit_code():
    r = run("unify", "--module", "xor_ctor", "--timeout", "0.2",
            "f2(V1, V2 * V3 * V4) =? f2(V5 * f1(V6 * V7), V8)")
    assert r.exit_code == 4


def test_parse_suite():
    probs = parse_suite(SUITE)
    assert [p.id for p in probs] == [f"P{i}" for i in range(1, 16)]
    p3 = probs[2]
    assert p3.expected["maude"] == (57, True)
    assert p3.expected["cr"] == (41, False)
    assert p3.expected["cr-fast"] == (8, False)


def test_bench_rows_and_csv(tmp_path):
    out = tmp_path / "r.csv"
    rep = run_bench(SUITE, out, timeout=60, algos=["cr"], only={"P1", "P11"})
    assert len(rep.rows) == 2
    row = rep.row("P1", "cr")
    assert row.count == 1 and row.status == "ok" and row.verdict == "pass"
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) >= {"problem", "algo", "count", "time_ms", "status"}
    assert [r["problem"] for r in rows] == ["P1", "P11"]


def test_bench_missing_theory_is_skipped(tmp_path):
    p = BenchProblem("P16", str(tmp_path / "abelian_group.maude"), "X =? Y")
    assert run_problem(p, "maude").status == "skip"


def test_bench_timeout_recorded(tmp_path):
    probs = [p for p in parse_suite(SUITE) if p.id == "P7"]
    rep = run_bench(probs, None, timeout=0.2, algos=["maude"])
    assert rep.rows[0].status == "timeout"


def test_bench_cli(tmp_path):
    out = tmp_path / "r.csv"
    r = run("bench", "--suite", str(SUITE), "--out", str(out), "--algos", "cr",
            "--only", "P11,P12")
    assert r.exit_code == 0 and out.exists()
    assert "P11" in r.output


def test_oracle_examples(xor, fg):
    X = term(xor, "X")
    assert [dict(s) for s in ground_oracle(X, term(xor, "a"), xor, depth=0)] == \
        [{X: term(xor, "a")}]
    sols = ground_oracle(*pair(xor, "X * Y =? mt"), xor, depth=1,
                         consts=[term(xor, c) for c in ("a", "b", "c", "mt")])
    Y = term(xor, "Y")
    got = {(str(s.get(X)), str(s.get(Y))) for s in sols}
    assert ("a", "a") in got and ("mt", "mt") in got
    fX, fY = term(fg, "X"), term(fg, "Y")
    sols = ground_oracle(*pair(fg, "f(X, Y, Z) =? s(W)"), fg, depth=1,
                         consts=[term(fg, c) for c in "abc"])
    assert sols
    for s in sols:
        assert s[fX] == term(fg, "a") or (s[fX] == term(fg, "b") and s[fY] == term(fg, "c"))


def test_oracle_overflow(xor):
    with pytest.raises(OracleOverflow):
        ground_oracle(*pair(xor, "X * Y =? U * V"), xor, depth=2, cap=100)


def test_ground_terms_are_normal(xor):
    from vunify.normalize import is_normal_form
    ts = ground_terms(xor, depth=1)
    assert term(xor, "mt") in ts and term(xor, "a * b") in ts
    assert all(is_normal_form(t, xor) for t in ts)


def test_error_mapping():
    from vunify.axunify import DiophantineExplosion
    from vunify.cli import _run

    def boom():
        raise DiophantineExplosion("too many")
    with pytest.raises(SystemExit) as info:
        _run(boom)
    assert info.value.code == 3
