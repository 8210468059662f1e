import pytest

from vunify.axunify import match_pairs
from vunify.normalize import normalize
from vunify.sigterm import FreshScope, Subst, apply
from vunify.varnarrow import VariantTree, get_variants
from vunify.varunify import (UnifQuery, classify_frontier, e_subsumes, is_cr_position,
                             is_cr_unifier, is_cr_variable, is_failure_pair,
                             minimize_subsumption, solve, unify_baseline, unify_cr,
                             unify_cr_fast, unify_fast, variant_intersect)

from conftest import pair, term


def query(theory, text):
    return UnifQuery(*pair(theory, text), theory)


def assert_sound(theory, q, unifiers):
    for s in unifiers:
        assert normalize(apply(s, q.t1), theory) == normalize(apply(s, q.t2), theory)


def test_intersect_root_against_sum(xor):
    q = query(xor, "X =? U * V")
    V1 = get_variants(q.t1, xor)
    V2 = get_variants(q.t2, xor)
    assert len(V1) == 1 and len(V2) == 7
    assert len(variant_intersect(V1, V2, q)) == 7


def test_intersect_clash(xc):
    q = query(xc, "f1(X) =? f2(Y, Z)")
    assert variant_intersect(get_variants(q.t1, xc), get_variants(q.t2, xc), q) == []


@pytest.mark.parametrize("text,count", [
    ("X =? U * V", 7),
    ("X * Y =? U * V", 57),
])
def test_baseline_xor(xor, text, count):
    q = query(xor, text)
    res = unify_baseline(q)
    assert len(res) == count
    assert_sound(xor, q, res)


def test_baseline_fg(fg):
    q = query(fg, "f(X, Y, Z) =? s(W)")
    res = unify_baseline(q)
    assert len(res) == 2
    X, Y = term(fg, "X"), term(fg, "Y")
    xs = sorted(str(s.get(X)) for s in res)
    assert xs == ["a", "b"]
    assert any(s.get(X) == term(fg, "b") and s.get(Y) == term(fg, "c") for s in res)
    q2 = query(fg, "f(X, Y, Z) =? f(U:S, V:S, W)")
    assert len(unify_baseline(q2)) == 4


def test_baseline_bound(xor):
    res = unify_baseline(query(xor, "X * Y =? U * V"), bound=5)
    assert len(res) == 5 and res.status == "truncated(5)"


def test_minimize_p1(xc):
    q = query(xc, "V1 =? V2 * V3 * V4")
    res = minimize_subsumption(unify_baseline(q), q)
    assert len(res) == 1
    (s,) = res
    V1 = term(xc, "V1")
    assert len(s.get(V1).args) == 3


def test_minimize_trivial(xc):
    q = query(xc, "V1 * V2 =? V1 * V2")
    assert len(minimize_subsumption(unify_baseline(q), q)) == 1


def test_e_subsumption_uses_equations(xor):
    # {X -> U * V} covers {X -> mt, U -> #1, V -> #1} only modulo the xor rules
    q = query(xor, "X =? U * V")
    X, U, V = (term(xor, v) for v in "XUV")
    gen = Subst({X: term(xor, "U * V")})
    p = term(xor, "Z")
    inst = Subst({X: term(xor, "mt"), U: p, V: p})
    assert e_subsumes(gen, inst, q)
    assert not e_subsumes(inst, gen, q)


def test_fast_short_circuit(xor):
    res = unify_fast(query(xor, "X =? U * V"))
    assert len(res) == 1


def test_cr_positions(fg, xor):
    assert is_cr_position(term(fg, "s(W)"), (), fg)
    assert is_cr_position(term(fg, "s(W)"), (1,), fg)
    assert is_cr_position(term(xor, "U * V"), (), xor)
    X, U = term(xor, "X"), term(xor, "U")
    assert is_cr_variable(X, X, xor)
    assert not is_cr_variable(term(xor, "V * U"), U, xor)


def test_cr_unifier_clauses(xor):
    X, U, V = (term(xor, v) for v in "XUV")
    p1, p2 = term(xor, "Y"), term(xor, "Z")
    u1, u2 = X, term(xor, "V * U")
    good = Subst({X: term(xor, "Y * Z"), V: p1, U: p2})
    assert is_cr_unifier(good, u1, u2, xor)
    bad = Subst({X: term(xor, "mt"), V: p1, U: p1})
    assert not is_cr_unifier(bad, u1, u2, xor)
    renaming = Subst({X: p1})
    assert is_cr_unifier(renaming, X, p1, xor)


def test_failure_pairs(xc):
    assert is_failure_pair(term(xc, "f1(X * Y)"), term(xc, "f2(U * V, W)"), xc)
    assert is_failure_pair(term(xc, "f1(V1 * V2)"), term(xc, "f2(V3 * V4 * V5, f2(V4, V5))"), xc)
    assert not is_failure_pair(term(xc, "X * Y"), term(xc, "U * V"), xc)


def test_classify_level_zero(xor, xc, fg):
    q = query(xor, "X =? U * V")
    rep = classify_frontier(VariantTree(q.t1, xor), VariantTree(q.t2, xor), q, 0, 0)
    assert list(rep.pairs.values()) == ["cr-unifies"]
    q = query(xc, "f1(V1 * V2) =? f2(V3 * V4 * V5, f2(V4, V5))")
    rep = classify_frontier(VariantTree(q.t1, xc), VariantTree(q.t2, xc), q, 0, 0)
    assert list(rep.pairs.values()) == ["failure-pair"]
    q = query(fg, "f(X, Y, Z) =? f(U:S, V:S, W)")
    rep = classify_frontier(VariantTree(q.t1, fg), VariantTree(q.t2, fg), q, 0, 0)
    assert list(rep.pairs.values()) == ["non-cr-unifies"]


def test_cr_examples(xor, xc, fg):
    res = unify_cr(query(xor, "X =? U * V"))
    assert len(res) == 1 and res.info["depths"] == (0, 0)
    res = unify_cr(query(xc, "f1(V1 * V2) =? f2(V3 * V4 * V5, f2(V4, V5))"))
    assert len(res) == 0 and res.info["branch"] == "failure"
    q = query(fg, "f(X, Y, Z) =? s(W)")
    res = unify_cr(q)
    assert len(res) == 2
    assert_sound(fg, q, res)
    assert len(unify_cr(query(fg, "f(X, Y, Z) =? f(U:S, V:S, W)"))) == 4


@pytest.mark.parametrize("text", [
    "f1(V1 * V2) =? f2(V3 * V4 * V5, f2(V4, V5))",
    "f3(V1, V2, V3 * V4) =? f2(f1(V5 * V6 * V7), f1(f1(V8)))",
])
def test_cr_fast_failure(xc, text):
    assert len(unify_cr_fast(query(xc, text))) == 0


def test_solve_dispatch(xor):
    t1, t2 = pair(xor, "X =? U * V")
    assert [len(solve(t1, t2, xor, a)) for a in ("maude", "fast", "cr", "cr-fast")] == \
        [7, 1, 1, 1]


def _covered(theory, q, unifiers, target):
    pats = lambda s: [s.get(x, x) for x in q.order]
    subj = [target.get(x, x) for x in q.order]
    return any(any(True for _ in match_pairs(list(zip(pats(s), subj)), theory.sig))
               for s in unifiers)


def test_cr_and_baseline_cover_each_other(fg):
    q = query(fg, "f(X, Y, Z) =? s(W)")
    base, cr = unify_baseline(q), unify_cr(q)
    for s in base:
        assert _covered(fg, q, cr, s)
    for s in cr:
        assert _covered(fg, q, base, s)
