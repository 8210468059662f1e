"""Variant-based unification: baseline, fast, constructor-root and their mix."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .axunify import Unifier, match_pairs
from .normalize import normalize
from .sigterm import (App, FreshScope, Subst, Term, Var, apply,
                      canonical_renaming, mk_tuple, occurrences, skolem)
from .varnarrow import ComponentFilter, TreeView, VariantTree, _decomposable, variant_cache

__all__ = ["UnifQuery", "UnifierSet", "FrontierReport", "variant_intersect",
           "unify_baseline", "minimize_subsumption", "is_cr_position",
           "is_cr_variable", "is_cr_unifier", "is_failure_pair",
           "classify_frontier", "unify_cr", "unify_cr_fast", "unify_fast",
           "b_subsumption_filter", "e_subsumes", "ALGORITHMS", "solve"]


@dataclass
class UnifQuery:
    t1: Term
    t2: Term
    theory: object
    scope: FreshScope = field(default_factory=lambda: FreshScope("#"))

    def __post_init__(self):
        v1, v2 = self.t1.variables, self.t2.variables
        self.w_cap = frozenset(v1 & v2)
        self.w_cup = frozenset(v1 | v2)
        self.order = sorted(self.w_cup, key=lambda v: v.key)
        self.shared = sorted(self.w_cap, key=lambda v: v.key)


@dataclass
class UnifierSet:
    unifiers: list
    status: str = "complete"
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.unifiers)

    def __iter__(self):
        return iter(self.unifiers)


@dataclass
class FrontierReport:
    pairs: dict  # (i, j) -> classification
    unifiers: dict = field(default_factory=dict)

    def all_in(self, *labels):
        return all(c in labels for c in self.pairs.values())


# ---------------------------------------------------------------------------
# Presentation and B-level bookkeeping


def present(images: dict, order) -> Subst:
    """Rename the range to ``#1, #2, ...`` in first-use order over ``order``."""
    terms = [images[x] for x in order]
    ren = canonical_renaming(terms, "#")
    return Subst({x: apply(ren, images[x]) for x in order})


def _pairs(s1, s2, order):
    return [(s1.get(x, x), s2.get(x, x)) for x in order]


def b_subsumes(s1: Subst, s2: Subst, order, sig=None) -> bool:
    """s1 is at least as general as s2 modulo B (the variables of s2 frozen)."""
    frozen = frozenset().union(*(s2.get(x, x).variables for x in order)) if order else frozenset()
    for _ in match_pairs(_pairs(s1, s2, order), sig, frozen - _range(s1, order)):
        return True
    return False


def _range(s, order):
    out = set()
    for x in order:
        out |= s.get(x, x).variables
    return out


def b_subsumption_filter(subs, order, sig=None) -> list:
    """Keep-first filtering: drop unifiers that are B-instances of kept ones."""
    subs = list(subs)
    filt = ComponentFilter(sig)
    profs = [filt.profile([s.get(x, x) for x in order]) for s in subs]

    def subsumes(i, j):
        return filt.may_match(profs[i], profs[j]) and b_subsumes(subs[i], subs[j], order, sig)

    kept = []
    for j in range(len(subs)):
        if any(subsumes(i, j) for i in kept):
            continue
        kept = [i for i in kept if not subsumes(j, i)] + [j]
    return [subs[i] for i in kept]


# ---------------------------------------------------------------------------
# Variant intersection


def _variant_pairs_unifiers(u1, th1, u2, th2, q: UnifQuery, unifier: Unifier):
    """B-unifiers of u1 = u2 compatible with the shared variables (jointly)."""
    eqs = [(u1, u2)] + [(th1.get(x, x), th2.get(x, x)) for x in q.shared]
    return unifier.unify_pairs(eqs)


def _compose_images(sigma, th1, th2, q: UnifQuery):
    theory = q.theory
    v1 = q.t1.variables
    images = {}
    for x in q.order:
        th = th1 if x in v1 else th2
        images[x] = normalize(apply(sigma, th.get(x, x)), theory)
    return images


def variant_intersect(V1, V2, q: UnifQuery, unifier: Unifier | None = None) -> list:
    """Raw variant intersection over two variant lists, B-deduplicated."""
    unifier = unifier or Unifier(q.theory.sig, FreshScope("%"))
    out = []
    seen = set()
    V1 = [(v.term, v.subst) if hasattr(v, "term") else v for v in V1]
    V2 = [(v.term, v.subst) if hasattr(v, "term") else v for v in V2]
    V2 = _apart(V1, V2, q)
    for (u1, th1), (u2, th2) in itertools.product(V1, V2):
        for sigma in _variant_pairs_unifiers(u1, th1, u2, th2, q, unifier):
            s = present(_compose_images(sigma, th1, th2, q), q.order)
            if s not in seen:
                seen.add(s)
                out.append(s)
    return out


def _vars_of(u, th):
    return u.variables.union(*(t.variables for t in th.values()))


def _apart(V1, V2, q: UnifQuery):
    """Rename V2's fresh variables away from V1's (lists built separately may clash)."""
    used = set().union(*(_vars_of(u, th) for u, th in V1)) - q.w_cup if V1 else set()
    scope = FreshScope("~")
    out = []
    for u, th in V2:
        clash = (_vars_of(u, th) - q.w_cup) & used
        if clash:
            ren = {y: scope.fresh(y.sort) for y in sorted(clash, key=lambda v: v.key)}
            u = apply(ren, u)
            th = Subst({x: apply(ren, t) for x, t in th.items()})
        out.append((u, th))
    return out


def _as_pairs(variants):
    return [(v.term, v.subst) for v in variants]


def _full_variants(t, q):
    """Variants of t, reusing a cached set for terms equal up to renaming."""
    return variant_cache(t, q.theory, q.scope)


def unify_baseline(q: UnifQuery, bound=None) -> UnifierSet:
    sig = q.theory.sig
    V1 = _full_variants(q.t1, q)
    V2 = _full_variants(q.t2, q)
    raw = variant_intersect(V1, V2, q)
    subs = b_subsumption_filter(raw, q.order, sig)
    return _finish(subs, bound, {"variants": (len(V1), len(V2)), "raw": len(raw)})


def _finish(subs, bound, info=None) -> UnifierSet:
    if bound is not None and len(subs) > bound:
        return UnifierSet(subs[:bound], f"truncated({bound})", info or {})
    return UnifierSet(list(subs), "complete", info or {})


# ---------------------------------------------------------------------------
# E-subsumption and minimization


def e_subsumes(s1: Subst, s2: Subst, q: UnifQuery, cache=None) -> bool:
    """s1 is at least as general as s2 modulo E and B.

    Images are E-matched one component at a time: every variant of a pattern
    image that B-matches the (normalized, frozen) subject image yields a
    candidate matcher, which is then pushed into the remaining components.
    """
    order = q.order
    theory = q.theory
    if b_subsumes(s1, s2, order, theory.sig):
        return True
    pats = [s1.get(x, x) for x in order]
    ren = {y: Var("&" + y.name, y.sort)
           for y in sorted(set().union(*(p.variables for p in pats)), key=lambda v: v.key)}
    pats = [apply(ren, p) for p in pats]
    subs = [normalize(s2.get(x, x), theory) for x in order]
    # freeze the subject's variables as fresh constants
    sig = theory.sig
    sk = {y: skolem(y, sig.kind_of(y.sort))
          for y in frozenset().union(*(t.variables for t in subs))}
    subs = [apply(sk, t) for t in subs]
    for _ in _e_match(list(zip(pats, subs)), {}, theory):
        return True
    return False


def _e_match(pairs, tau, theory):
    if not pairs:
        yield tau
        return
    sig = theory.sig
    cur = [(normalize(apply(tau, p), theory), s) for p, s in pairs]
    # cheapest component first: fewest open pattern variables
    k = min(range(len(cur)), key=lambda i: (len(cur[i][0].variables), cur[i][0].size()))
    p, s = cur[k]
    rest = cur[:k] + cur[k + 1:]
    open_vars = p.variables
    if not open_vars:
        if p == s:
            yield from _e_match(rest, tau, theory)
        return
    scope = FreshScope("&v")
    seen = set()
    for v in variant_cache(p, theory, scope):
        for gamma in match_pairs([(v.term, s)], sig):
            step = Subst({x: normalize(apply(gamma, v.subst.get(x, x)), theory)
                          for x in open_vars})
            if step in seen:
                continue
            seen.add(step)
            new_tau = {x: normalize(apply(step, t), theory) for x, t in tau.items()}
            new_tau.update(step)
            yield from _e_match(rest, new_tau, theory)


def minimize_subsumption(S, q: UnifQuery) -> UnifierSet:
    subs = list(S.unifiers if isinstance(S, UnifierSet) else S)
    cache = {}
    kept = []
    for s in subs:
        if any(e_subsumes(k, s, q, cache) for k in kept):
            continue
        kept = [k for k in kept if not e_subsumes(s, k, q, cache)]
        kept.append(s)
    status = S.status if isinstance(S, UnifierSet) else "complete"
    return UnifierSet(kept, status)


def _short_circuit(q: UnifQuery):
    for a, b in ((q.t1, q.t2), (q.t2, q.t1)):
        if isinstance(a, Var) and a not in b.variables:
            images = {x: x for x in q.order}
            images[a] = normalize(b, q.theory)
            return UnifierSet([present(images, q.order)], "complete", {"short-circuit": True})
    return None


def unify_fast(q: UnifQuery, bound=None) -> UnifierSet:
    hit = _short_circuit(q)
    if hit is not None:
        return hit
    base = unify_baseline(q)
    res = minimize_subsumption(base, q)
    return _finish(res.unifiers, bound, {"baseline": len(base)})


# ---------------------------------------------------------------------------
# Constructor-root notions


def _is_ctor(op):
    return op.ctor or op.name == "<>"


def is_cr_position(t: Term, p, theory=None) -> bool:
    u = t
    for i in p:
        if isinstance(u, Var) or not _is_ctor(u.op):
            return False
        u = u.args[i - 1]
    return True


def is_cr_variable(t: Term, x: Var, theory=None) -> bool:
    return all(is_cr_position(t, p, theory) for p in occurrences(t, x))


def _b_subterm(t: Term, u: Term) -> bool:
    """t occurs in u modulo B, counting AC sub-multisets as subterms."""
    if t == u:
        return True
    if not isinstance(u, App):
        return False
    if isinstance(t, App) and t.op is u.op and u.op.assoc:
        need = {}
        for a in t.args:
            need[a] = need.get(a, 0) + 1
        if all(u.args.count(a) >= n for a, n in need.items()):
            return True
    return any(_b_subterm(t, a) for a in u.args)


def full_form(sigma, vars_, scope: FreshScope) -> Subst:
    """Bind every variable in vars_ and give the range fresh names."""
    vars_ = sorted(vars_, key=lambda v: v.key)
    images = [sigma.get(x, x) for x in vars_]
    rng = sorted(set().union(*(i.variables for i in images)) if images else set(),
                 key=lambda v: v.key)
    ren = {y: scope.fresh(y.sort, "%") for y in rng}
    return Subst({x: apply(ren, i) for x, i in zip(vars_, images)})


def is_cr_unifier(sigma, u1: Term, u2: Term, theory=None) -> bool:
    items = list(sigma.items())
    cr = {x: is_cr_variable(u1, x) and is_cr_variable(u2, x) for x, _ in items}
    for x, t in items:
        others = [(y, s) for y, s in items if y != x]
        if isinstance(t, Var) and not any(t in s.variables for _, s in others):
            continue
        if cr[x]:
            continue
        holders = [y for y, s in others if _b_subterm(t, s)]
        if holders and all(cr[y] for y in holders):
            continue
        return False
    return True


def ctor_abstraction(t: Term, scope: FreshScope) -> Term:
    """Replace every maximal non-constructor subterm by a fresh variable."""
    if isinstance(t, Var) or not _is_ctor(t.op):
        sort = t.sort if isinstance(t, Var) else t.op.result_kind
        return scope.fresh(sort, "@")
    return App(t.op, tuple(ctor_abstraction(a, scope) for a in t.args)) if not t.op.comm \
        else _rebuild(t, scope)


def _rebuild(t, scope):
    from .sigterm import mk
    return mk(t.op, [ctor_abstraction(a, scope) for a in t.args])


def is_failure_pair(u1: Term, u2: Term, theory, scope=None, unifier=None) -> bool:
    scope = scope or FreshScope("@")
    unifier = unifier or Unifier(theory.sig, scope)
    if unifier.unifiable(u1, u2):
        return False
    return not unifier.unifiable(ctor_abstraction(u1, scope), ctor_abstraction(u2, scope))


# ---------------------------------------------------------------------------
# Constructor-root search


def _frontier(tree: VariantTree, d: int):
    """Leaves of the tree cut at depth d: (node, open?)."""
    out = []
    for n in tree.retained_at(d):
        if n.closed:
            out.append((n, False))
        elif n.depth == d:
            out.append((n, True))
    return out


def classify_frontier(T1: VariantTree, T2: VariantTree, q: UnifQuery, d1=None, d2=None,
                      unifier=None) -> FrontierReport:
    d1 = T1.depth if d1 is None else d1
    d2 = T2.depth if d2 is None else d2
    theory = q.theory
    unifier = unifier or Unifier(theory.sig, FreshScope("%"))
    scope = FreshScope("@")
    report = FrontierReport({})
    F1, F2 = _frontier(T1, d1), _frontier(T2, d2)
    for (i, (n1, open1)), (j, (n2, open2)) in itertools.product(enumerate(F1), enumerate(F2)):
        u1, u2 = n1.term, n2.term
        sols = _variant_pairs_unifiers(u1, n1.subst, u2, n2.subst, q, unifier)
        if sols:
            vars_ = u1.variables | u2.variables
            ok = all(is_cr_unifier(full_form(s, vars_, scope), u1, u2, theory) for s in sols)
            report.pairs[i, j] = "cr-unifies" if ok else "non-cr-unifies"
            report.unifiers[i, j] = sols
            continue
        a1 = ctor_abstraction(u1, scope) if open1 else u1
        a2 = ctor_abstraction(u2, scope) if open2 else u2
        fail = not unifier.unifiable(a1, a2)
        report.pairs[i, j] = "failure-pair" if fail else "no-unify-non-failure"
    return report


def unify_cr(q: UnifQuery, bound=None, fast=False) -> UnifierSet:
    theory = q.theory
    sig = theory.sig
    unifier = Unifier(sig, FreshScope("%"))
    T1 = TreeView(q.t1, theory, q.scope)
    T2 = TreeView(q.t2, theory, q.scope)
    total = 0
    while True:
        for d1 in range(total, -1, -1):
            d2 = total - d1
            if (d1 > T1.depth and T1.complete) or (d2 > T2.depth and T2.complete):
                continue
            T1.expand_to(d1)
            T2.expand_to(d2)
            if T1.depth < d1 or T2.depth < d2:
                continue
            rep = classify_frontier(T1, T2, q, d1, d2, unifier)
            if rep.all_in("failure-pair"):
                return UnifierSet([], "complete", {"branch": "failure", "depths": (d1, d2)})
            if rep.all_in("failure-pair", "cr-unifies"):
                V1 = _as_pairs(T1.variants_at(d1))
                V2 = _as_pairs(T2.variants_at(d2))
                raw = variant_intersect(V1, V2, q, unifier)
                subs = b_subsumption_filter(raw, q.order, sig)
                if fast:
                    subs = minimize_subsumption(subs, q).unifiers
                return _finish(subs, bound, {"branch": "cr", "depths": (d1, d2)})
        if T1.complete and T2.complete and total >= T1.depth + T2.depth:
            if not (_decomposable(q.t1, theory) or _decomposable(q.t2, theory)):
                # the finished trees already hold the full variant sets
                raw = variant_intersect(_as_pairs(T1.variants()), _as_pairs(T2.variants()),
                                        q, unifier)
                subs = b_subsumption_filter(raw, q.order, sig)
                if fast:
                    subs = minimize_subsumption(subs, q).unifiers
                return _finish(subs, bound, {"branch": "fallback", "raw": len(raw)})
            res = unify_fast(q) if fast else unify_baseline(q)
            res.info["branch"] = "fallback"
            return _finish(res.unifiers, bound, res.info)
        total += 1


def unify_cr_fast(q: UnifQuery, bound=None) -> UnifierSet:
    return unify_cr(q, bound, fast=True)


ALGORITHMS = {
    "maude": unify_baseline,
    "fast": unify_fast,
    "cr": unify_cr,
    "cr-fast": unify_cr_fast,
}


def solve(t1: Term, t2: Term, theory, algo: str = "maude", bound=None) -> UnifierSet:
    q = UnifQuery(t1, t2, theory)
    return ALGORITHMS[algo](q, bound)

