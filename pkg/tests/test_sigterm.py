import pytest
from hypothesis import given, settings, strategies as st

from vunify.sigterm import (PositionError, Subst, Var, apply, combine, compose, mk,
                            replace_at, restrict, subterm_at)

from conftest import term


def test_sort_order(xor):
    sig = xor.sig
    assert sig.sort_leq("Elem", "EXor")
    assert sig.sort_leq("EXor", "EXor")
    assert not sig.sort_leq("EXor", "Elem")


def test_least_sort(xor):
    sig = xor.sig
    assert sig.least_sort(term(xor, "a")) == "Elem"
    assert sig.least_sort(term(xor, "a * b")) == "EXor"
    assert sig.least_sort(term(xor, "X")) == "[EXor]"


def test_positions(xc):
    t = term(xc, "f1(a * b)")
    assert subterm_at(t, (1,)) == term(xc, "a * b")
    assert subterm_at(t, ()) == t
    assert replace_at(term(xc, "f1(a)"), (1,), term(xc, "b")) == term(xc, "f1(b)")
    with pytest.raises(PositionError):
        subterm_at(t, (2,))


def test_apply_flattens(xor):
    X = term(xor, "X")
    assert apply({X: term(xor, "a")}, term(xor, "X * Y")) == term(xor, "a * Y")
    assert apply(Subst(), term(xor, "X * Y")) == term(xor, "X * Y")
    got = apply({X: term(xor, "a * b")}, term(xor, "X * c"))
    assert got == term(xor, "a * b * c")
    assert len(got.args) == 3


def test_subst_algebra(xor):
    X, Y = term(xor, "X"), term(xor, "Y")
    a, b = term(xor, "a"), term(xor, "b")
    assert compose(Subst({X: Y}), Subst({Y: a})) == Subst({X: a, Y: a})
    assert restrict(Subst({X: a, Y: b}), {X}) == Subst({X: a})
    assert combine(Subst({X: a}), Subst({Y: b})) == Subst({X: a, Y: b})
    with pytest.raises(ValueError):
        combine(Subst({X: a}), Subst({X: b}))


def test_subst_drops_identity_bindings():
    x = Var("X", "S")
    assert len(Subst({x: x})) == 0


def test_ac_canonical_form(xor):
    # argument order and nesting never matter
    assert term(xor, "a * b") == term(xor, "b * a")
    assert term(xor, "(a * b) * c") == term(xor, "a * (b * c)")
    assert term(xor, "a * b") != term(xor, "a * c")


LEAVES = ["a", "b", "c", "mt", "X", "Y", "Z"]


@st.composite
def xor_terms(draw, depth=2):
    if depth == 0 or draw(st.booleans()):
        return draw(st.sampled_from(LEAVES))
    parts = draw(st.lists(xor_terms(depth - 1), min_size=2, max_size=3))
    return "(" + " * ".join(parts) + ")"


@settings(max_examples=60, deadline=None)
@given(xor_terms(), xor_terms())
def test_mk_is_flat_and_sorted(xor, s1, s2):
    t = term(xor, f"{s1} * {s2}")
    star = t.op if hasattr(t, "op") else None
    if star is not None and star.assoc:
        assert all(getattr(a, "op", None) is not star for a in t.args)
        assert list(t.args) == sorted(t.args, key=lambda u: u.key)
    # commutativity of the canonical form
    assert t == term(xor, f"{s2} * {s1}")


@settings(max_examples=40, deadline=None)
@given(xor_terms(), xor_terms(), xor_terms())
def test_compose_is_sequential_application(xor, s1, s2, s3):
    X, Y = term(xor, "X"), term(xor, "Y")
    t = term(xor, s3)
    sig1 = Subst({X: term(xor, s1)}) if term(xor, s1) != X else Subst()
    sig2 = Subst({Y: term(xor, s2)}) if X not in term(xor, s2).variables and \
        Y not in term(xor, s2).variables else Subst()
    assert apply(compose(sig1, sig2), t) == apply(sig2, apply(sig1, t))
