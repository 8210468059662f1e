"""Folding variant narrowing: variant trees, variant generation and subsumption."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .axunify import Unifier, match_pairs
from .normalize import normalize
from .sigterm import (App, FreshScope, Subst, Term, apply, canonical_renaming,
                      mk_tuple, positions, replace_at, subterm_at)

__all__ = ["Variant", "VariantNode", "VariantTree", "VariantBoundExceeded",
           "narrow_steps", "expand_layer", "get_variants", "variant_subsumes",
           "build_tree", "variant_cache", "variants_of", "decomposed_variants",
           "ComponentFilter", "TreeView"]

DEFAULT_NODE_CAP = 10**4


class VariantBoundExceeded(Exception):
    """Too many retained variants; the theory may lack the finite variant property."""


@dataclass(frozen=True)
class Variant:
    term: Term
    subst: Subst

    def tuple_term(self, base_vars):
        return mk_tuple([self.term] + [self.subst.get(x, x) for x in base_vars])

    def renamed(self, base_vars, prefix="#"):
        """Canonical presentation: fresh variables numbered in first-use order."""
        images = [self.subst.get(x, x) for x in base_vars]
        ren = canonical_renaming([self.term] + images, prefix)
        return Variant(apply(ren, self.term),
                       Subst({x: apply(ren, u) for x, u in zip(base_vars, images)}))


@dataclass(eq=False)
class VariantNode:
    variant: Variant
    parent: "VariantNode | None" = None
    depth: int = 0
    status: str = "frontier"  # frontier | expanded | folded
    children: list = field(default_factory=list)
    step: tuple | None = None  # (position, rule label) that produced the node
    folded_at: int | None = None  # layer at which the node stopped being retained
    expanded: bool = False

    @property
    def term(self):
        return self.variant.term

    @property
    def subst(self):
        return self.variant.subst

    @property
    def closed(self):
        """Expanded, and every child was folded on arrival: a final leaf."""
        return self.status != "frontier" and self.expanded and \
            all(c.folded_at == c.depth for c in self.children)


def _symbols(t, acc):
    """Count binary applications of each symbol; monotone under instantiation."""
    if isinstance(t, App):
        acc[t.op.ident] += len(t.args) - 1 if t.op.assoc else 1
        for a in t.args:
            _symbols(a, acc)
    return acc


def fingerprint(v: Variant, base_vars) -> tuple:
    comps = [v.term] + [v.subst.get(x, x) for x in base_vars]
    return tuple(_symbols(c, Counter()) for c in comps)


def _may_match(fp1, fp2):
    for c1, c2 in zip(fp1, fp2):
        for k, n in c1.items():
            if c2.get(k, 0) < n:
                return False
    return True


def variant_subsumes(v1: Variant, v2: Variant, base_vars, sig=None, fps=None) -> bool:
    """Whether v1 is at least as general as v2 (term and substitution)."""
    base_vars = sorted(base_vars, key=lambda v: v.key)
    if fps is not None and not _may_match(*fps):
        return False
    pairs = [(v1.term, v2.term)] + [(v1.subst.get(x, x), v2.subst.get(x, x)) for x in base_vars]
    for _ in match_pairs(pairs, sig):
        return True
    return False


def narrow_steps(t: Term, theory, scope: FreshScope, unifier: Unifier | None = None):
    """All one-step narrowings of t: list of (normalized term, narrowing substitution)."""
    unifier = unifier or Unifier(theory.sig, scope)
    out = []
    tv = t.variables
    for p in positions(t, nonvar=True):
        sub = subterm_at(t, p)
        for rule in theory.rules_for(sub.op):
            lhs, ren = scope.rename(rule.lhs)
            rhs = apply(ren, rule.rhs)
            for sigma in unifier.unify(sub, lhs):
                new = normalize(apply(sigma, replace_at(t, p, rhs)), theory)
                theta = Subst({x: u for x, u in sigma.items() if x in tv})
                out.append((new, theta, (p, rule.label)))
    return out


class VariantTree:
    """Folding narrowing tree grown one layer at a time."""

    def __init__(self, t: Term, theory, scope: FreshScope | None = None,
                 node_cap: int = DEFAULT_NODE_CAP):
        self.theory = theory
        self.scope = scope or FreshScope("#")
        self.unifier = Unifier(theory.sig, self.scope)
        self.node_cap = node_cap
        self.filter = ComponentFilter(theory.sig)
        self.base_vars = sorted(t.variables, key=lambda v: v.key)
        self.start = t
        self.root = VariantNode(Variant(normalize(t, theory), Subst()))
        self.nodes = [self.root]
        self.depth = 0

    @property
    def retained(self):
        return [n for n in self.nodes if n.status != "folded"]

    @property
    def frontier(self):
        return [n for n in self.nodes if n.status == "frontier"]

    @property
    def complete(self):
        return not any(n.status == "frontier" for n in self.nodes)

    def variants(self, max_depth=None):
        return [n.variant for n in self.retained if max_depth is None or n.depth <= max_depth]

    def retained_at(self, d: int):
        """Nodes retained when the tree is cut at depth d."""
        return [n for n in self.nodes
                if n.depth <= d and (n.folded_at is None or n.folded_at > d)]

    def variants_at(self, d: int):
        return [n.variant for n in self.retained_at(d)]

    def _prof(self, node):
        prof = node.__dict__.get("_prof")
        if prof is None:
            v = node.variant
            prof = node._prof = self.filter.profile(
                [v.term] + [v.subst.get(x, x) for x in self.base_vars])
        return prof

    def _subsumes(self, n1, n2):
        return self.filter.may_match(self._prof(n1), self._prof(n2)) and \
            variant_subsumes(n1.variant, n2.variant, self.base_vars, self.theory.sig)

    def _subsumed(self, node, pool):
        return any(self._subsumes(n, node) for n in pool)

    def expand(self):
        """Narrow every frontier node once and fold the new nodes."""
        theory = self.theory
        layer = self.frontier
        if not layer:
            return self
        depth = self.depth + 1
        pool = self.retained
        fresh = []
        for node in layer:
            node.status = "expanded"
            node.expanded = True
            for term, sigma, step in narrow_steps(node.term, theory, self.scope, self.unifier):
                theta = Subst({x: normalize(apply(sigma, node.subst.get(x, x)), theory)
                               for x in self.base_vars})
                child = VariantNode(Variant(term, theta), node, depth, step=step)
                node.children.append(child)
                fresh.append(child)
        if fresh:
            self.depth = depth
        # fold new nodes against everything retained so far, in generation
        # order; a new node that is more general evicts the nodes it subsumes
        # renaming-canonical keys of retained nodes fold exact repeats cheaply
        keys = self.__dict__.setdefault("_keys", {})
        for child in fresh:
            self.nodes.append(child)
            key = child.variant.renamed(self.base_vars).tuple_term(self.base_vars)
            if key in keys or self._subsumed(child, pool):
                child.status = "folded"
                child.folded_at = self.depth
                continue
            for n in [n for n in pool if self._subsumes(child, n)]:
                n.status = "folded"
                n.folded_at = self.depth
                pool.remove(n)
                keys.pop(getattr(n, "_key", None), None)
            child._key = key
            keys[key] = child
            pool.append(child)
        if len(pool) > self.node_cap:
            raise VariantBoundExceeded(f"more than {self.node_cap} variants retained")
        return self

    def expand_to(self, depth: int):
        while self.depth < depth and not self.complete:
            self.expand()
        return self

    def expand_all(self):
        while not self.complete:
            self.expand()
        return self


def expand_layer(tree: VariantTree, theory=None, scope=None) -> VariantTree:
    return tree.expand()


def build_tree(t: Term, theory, scope=None, node_cap=DEFAULT_NODE_CAP) -> VariantTree:
    return VariantTree(t, theory, scope, node_cap).expand_all()


class ComponentFilter:
    """Cheap necessary conditions for a joint B-match of component tuples.

    Symbol counts must be dominated, and every component must match on its
    own; single-component results are memoized on renaming-canonical forms.
    """

    def __init__(self, sig):
        self.sig = sig
        self._canon = {}
        self._memo = {}

    def profile(self, comps):
        fp = tuple(_symbols(c, Counter()) for c in comps)
        return fp, tuple(self._canonical(c) for c in comps)

    def _canonical(self, c):
        k = self._canon.get(c)
        if k is None:
            k = self._canon[c] = apply(canonical_renaming([c], "$"), c)
        return k

    def may_match(self, prof1, prof2) -> bool:
        if not _may_match(prof1[0], prof2[0]):
            return False
        memo = self._memo
        for a, b in zip(prof1[1], prof2[1]):
            r = memo.get((a, b))
            if r is None:
                r = memo[a, b] = any(True for _ in match_pairs([(a, b)], self.sig))
            if not r:
                return False
        return True


def _fold_list(variants, base_vars, sig):
    """Keep-first variant-subsumption filtering with eviction."""
    filt = ComponentFilter(sig)
    pool = list(variants)
    profs = [filt.profile([v.term] + [v.subst.get(x, x) for x in base_vars]) for v in pool]

    def subsumes(i, j):
        return filt.may_match(profs[i], profs[j]) and \
            variant_subsumes(pool[i], pool[j], base_vars, sig)

    kept = []
    for j in range(len(pool)):
        if any(subsumes(i, j) for i in kept):
            continue
        kept = [i for i in kept if not subsumes(j, i)] + [j]
    return [pool[i] for i in kept]


def _decomposable(t, theory):
    return isinstance(t, App) and t.args and t.op.ctor and not t.op.comm and \
        not theory.rules_for(t.op)


def decomposed_variants(t: Term, theory, scope: FreshScope) -> list:
    """Variants of a term rooted by a free constructor, built from its arguments.

    Argument variant sets are combined left to right; images of variables
    shared between arguments are B-unified, and every combination step is
    followed by variant-subsumption folding.
    """
    sig = theory.sig
    unifier = Unifier(sig, scope)
    acc = [((), Subst())]
    seen_vars = set()
    for arg in t.args:
        arg_vars = arg.variables
        shared = sorted(seen_vars & arg_vars, key=lambda v: v.key)
        parts = variants_of(arg, theory, scope)
        if len(parts) == 1 and parts[0].term == arg and not parts[0].subst:
            # only the identity variant: instantiate, no new overlaps to fold
            acc = [(terms + (normalize(apply(th, arg), theory),), th) for terms, th in acc]
            seen_vars |= arg_vars
            continue
        nxt = []
        for terms, th in acc:
            for v in parts:
                if shared:
                    sols = unifier.unify_pairs([(th.get(x, x), v.subst.get(x, x)) for x in shared])
                else:
                    sols = [Subst()]
                for sigma in sols:
                    new_terms = tuple(normalize(apply(sigma, u), theory) for u in terms) + \
                        (normalize(apply(sigma, v.term), theory),)
                    images = {x: normalize(apply(sigma, th.get(x, x)), theory) for x in seen_vars}
                    for x in arg_vars:
                        if x not in images:
                            images[x] = normalize(apply(sigma, v.subst.get(x, x)), theory)
                    nxt.append((new_terms, Subst(images)))
        seen_vars |= arg_vars
        base = sorted(seen_vars, key=lambda v: v.key)
        if shared:
            wrapped = [Variant(mk_tuple(terms), th) for terms, th in nxt]
            mode = theory.__dict__.get("fold_shared", "dedup")
            if mode == "fold":
                wrapped = _fold_list(wrapped, base, sig)
            elif mode == "dedup":
                keys = set()
                uniq = []
                for w in wrapped:
                    k = w.renamed(base).tuple_term(base)
                    if k not in keys:
                        keys.add(k)
                        uniq.append(w)
                wrapped = uniq
            nxt = [(w.term.args, w.subst) for w in wrapped]
        acc = nxt
    return [Variant(App(t.op, terms), th) for terms, th in acc]


def variants_of(t: Term, theory, scope: FreshScope) -> list:
    """Full variant list of t (decomposing free constructors), freshly renamed."""
    return variant_cache(t, theory, scope)


def variant_cache(t: Term, theory, scope: FreshScope) -> list:
    """Full variant list of t, computed once per term up to renaming.

    The returned variants use t's own variables for the substitution domain
    and fresh variables from ``scope`` everywhere else.
    """
    to_canon = canonical_renaming([t], "$")
    canon = apply(to_canon, t)
    cache = theory.__dict__.setdefault("_variant_cache", {})
    got = cache.get(canon)
    if got is None:
        if _decomposable(canon, theory) and theory.__dict__.get("decompose", True):
            got = decomposed_variants(canon, theory, FreshScope("#"))
        else:
            got = _shared_tree(canon, theory).expand_all().variants()
        cache[canon] = got
    back = {c: x for x, c in to_canon.items()}
    out = []
    for v in got:
        ren = dict(back)
        for y in sorted(v.term.variables.union(*(u.variables for u in v.subst.values())),
                        key=lambda z: z.key):
            if y not in ren:
                ren[y] = scope.fresh(y.sort)
        out.append(Variant(apply(ren, v.term),
                           Subst({back[c]: apply(ren, u) for c, u in v.subst.items()})))
    return out


def _shared_tree(canon: Term, theory) -> VariantTree:
    """The theory's one tree for a canonically renamed term."""
    cache = theory.__dict__.setdefault("_tree_cache", {})
    tree = cache.get(canon)
    if tree is None:
        tree = cache[canon] = VariantTree(canon, theory)
    return tree


@dataclass(eq=False)
class _NodeView:
    node: VariantNode
    variant: Variant

    term = property(lambda self: self.variant.term)
    subst = property(lambda self: self.variant.subst)
    depth = property(lambda self: self.node.depth)
    closed = property(lambda self: self.node.closed)


class TreeView:
    """A variant tree shared by all terms equal up to renaming.

    The tree itself is grown on the canonical form and cached on the theory;
    the view presents its nodes in the caller's variables, with every other
    variable renamed from ``scope`` so that two views never clash.
    """

    def __init__(self, t: Term, theory, scope: FreshScope):
        to_canon = canonical_renaming([t], "$")
        canon = apply(to_canon, t)
        self.tree = _shared_tree(canon, theory)
        self.scope = scope
        self._back = {c: x for x, c in to_canon.items()}
        self._views = {}

    depth = property(lambda self: self.tree.depth)
    complete = property(lambda self: self.tree.complete)

    def expand_to(self, depth: int):
        self.tree.expand_to(depth)
        return self

    def _view(self, n):
        got = self._views.get(id(n))
        if got is None:
            v = n.variant
            ren = dict(self._back)
            for y in sorted(v.term.variables.union(*(u.variables for u in v.subst.values())),
                            key=lambda z: z.key):
                if y not in ren:
                    ren[y] = self.scope.fresh(y.sort)
            var = Variant(apply(ren, v.term),
                          Subst({self._back[c]: apply(ren, u) for c, u in v.subst.items()}))
            got = self._views[id(n)] = _NodeView(n, var)
        return got

    def retained_at(self, d: int):
        return [self._view(n) for n in self.tree.retained_at(d)]

    def variants_at(self, d: int):
        return [n.variant for n in self.retained_at(d)]

    def variants(self):
        return [self._view(n).variant for n in self.tree.retained]


def get_variants(t: Term, theory, bound: int | None = None,
                 node_cap: int | None = None) -> list:
    """Retained variants of the fully expanded tree, canonically renamed."""
    cap = DEFAULT_NODE_CAP if node_cap is None else node_cap
    tree = VariantTree(t, theory, node_cap=cap)
    tree.expand_all()
    out = [v.renamed(tree.base_vars) for v in tree.variants()]
    return out if bound is None else out[:bound]
