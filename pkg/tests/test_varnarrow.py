import pytest

from vunify.normalize import normalize
from vunify.sigterm import FreshScope, Subst, apply
from vunify.theoryparse import parse_module
from vunify.varnarrow import (Variant, VariantBoundExceeded, VariantTree, build_tree,
                              get_variants, narrow_steps, variant_subsumes, variants_of)

from conftest import term


def _steps(theory, text):
    return {(str(t), str(s)) for t, s, _ in narrow_steps(term(theory, text), theory,
                                                          FreshScope("#"))}


def test_narrow_steps_fg(fg):
    got = narrow_steps(term(fg, "f(X, Y, Z)"), fg, FreshScope("#"))
    X, Y, Z = (term(fg, v) for v in "XYZ")
    shapes = sorted((t.op.name, s.get(X)) for t, s, _ in got)
    assert shapes == [("g", term(fg, "b")), ("s", term(fg, "a"))]
    (t, s, _), = narrow_steps(term(fg, "g(Y, Z)"), fg, FreshScope("#"))
    assert t.op.name == "s" and s.get(Y) == term(fg, "c")
    assert narrow_steps(term(fg, "a"), fg, FreshScope("#")) == []


def test_xor_seven_variants(xor):
    vs = get_variants(term(xor, "X * Y"), xor)
    assert len(vs) == 7
    X, Y = term(xor, "X"), term(xor, "Y")
    first = vs[0]
    assert str(first.term) == "#1:[EXor] * #2:[EXor]"
    assert str(first.subst.get(X)) == "#1:[EXor]" and str(first.subst.get(Y)) == "#2:[EXor]"
    assert any(v.term == term(xor, "mt") for v in vs)


def test_variants_bound(xor):
    assert len(get_variants(term(xor, "X * Y"), xor, bound=3)) == 3


def test_variants_are_normalized_instances(xor):
    t = term(xor, "X * Y")
    for v in get_variants(t, xor):
        assert normalize(apply(v.subst, t), xor) == v.term


def test_fg_tree_keeps_both_s_leaves(fg):
    tree = build_tree(term(fg, "f(X, Y, Z)"), fg)
    assert tree.complete
    leaves = [n for n in tree.retained if n.term.op.name == "s"]
    # s(Z') under X=b, Y=c is a term instance of s(Z) under X=a, but the
    # bindings of X disagree, so folding on the whole variant keeps it
    assert sorted(n.depth for n in leaves) == [1, 2]
    assert len(tree.variants()) == 4


def test_ctor_term_has_one_variant(xc):
    tree = VariantTree(term(xc, "f1(X)"), xc).expand_all()
    assert tree.depth == 0 and len(tree.nodes) == 1
    assert [v.term for v in tree.variants()] == [term(xc, "f1(X)")]


def test_ground_and_dh(xor, dh):
    assert [(v.term, v.subst) for v in get_variants(term(xor, "a"), xor)] == \
        [(term(xor, "a"), Subst())]
    vs = get_variants(term(dh, "exp(exp(X, Y), Z)"), dh)
    assert len(vs) == 1
    assert vs[0].term.op.name == "exp"


def test_variant_subsumption(xor, fg):
    vs = get_variants(term(xor, "X * Y"), xor)
    X, Y = term(xor, "X"), term(xor, "Y")
    base = [X, Y]
    for v in vs:
        assert variant_subsumes(v, v, base, xor.sig)
    top = vs[0]
    mt = next(v for v in vs if v.term == term(xor, "mt"))
    assert not variant_subsumes(top, mt, base, xor.sig)
    # term-only instance check: s(Z) covers s(Z') even though the bindings differ
    Z, Z2 = term(fg, "Z"), term(fg, "W")
    v1 = Variant(term(fg, "s(Z)"), Subst({term(fg, "X"): term(fg, "a")}))
    v2 = Variant(term(fg, "s(W)"), Subst({term(fg, "X"): term(fg, "b"),
                                           term(fg, "Y"): term(fg, "c")}))
    assert variant_subsumes(v1, v2, [], fg.sig)
    assert not variant_subsumes(v1, v2, [term(fg, "X")], fg.sig)


@pytest.mark.parametrize("text,count", [
    ("X * Y", 7),
    ("V5 * f1(V6 * V7)", 28),
    ("X * Y * Z", 57),
])
def test_variant_counts(xc, text, count):
    assert len(variants_of(term(xc, text), xc, FreshScope("#"))) == count


def test_decomposition_agrees_with_tree(xc):
    t = term(xc, "f2(V1 * V2, f1(V2))")
    via_parts = variants_of(t, xc, FreshScope("#"))
    tree = VariantTree(t, xc).expand_all()
    assert len(via_parts) == len(tree.variants())


def test_bound_exceeded():
    # f(X) has the infinite family f(#), X -> s^n(#): no finite variant set
    th = parse_module("""fmod N is sort S . ops f s : S -> S . var X : S .
        eq f(s(X)) = f(X) [variant] . endfm""")
    with pytest.raises(VariantBoundExceeded):
        get_variants(term(th, "f(X)"), th, node_cap=20)
