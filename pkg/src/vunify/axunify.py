"""Equality, matching and unification modulo the structural axioms.

Operators are either free, commutative, or associative-commutative.  AC
unification follows the classical construction: cancel common arguments,
abstract every distinct argument as a coordinate of a linear Diophantine
equation, then combine basis solutions.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterator

from .diophantine import DiophantineExplosion, basis, system_basis
from .sigterm import (App, FreshScope, Signature, Subst, Term, Var, apply,
                      mk, mk_tuple)

__all__ = ["b_equal", "b_match", "b_matches", "b_unify", "b_unify_compatible",
           "DiophantineExplosion", "Unifier", "match_pairs"]

DEFAULT_CAP = 10**6


def b_equal(t1: Term, t2: Term) -> bool:
    return t1 == t2


# ---------------------------------------------------------------------------
# Matching


def b_matches(p: Term, s: Term, sig: Signature | None = None,
              protected=frozenset(), sub=None) -> Iterator[dict]:
    """Lazily enumerate matchers of pattern ``p`` onto subject ``s``."""
    return _match(p, s, dict(sub or {}), sig, protected)


def b_match(p: Term, s: Term, protected=frozenset(), sig: Signature | None = None) -> list:
    seen = []
    out = []
    for m in b_matches(p, s, sig, protected):
        sub = Subst(m)
        if sub not in seen:
            seen.append(sub)
            out.append(sub)
    out.sort(key=str)
    return out


def _bind_ok(sig, x, t):
    return sig is None or x.sort.startswith("[") or sig.has_sort(t, x.sort)


def _match(p, s, sub, sig, protected):
    if isinstance(p, Var):
        if p in protected:
            if p == s:
                yield sub
            return
        bound = sub.get(p)
        if bound is not None:
            if bound == s:
                yield sub
            return
        if _bind_ok(sig, p, s):
            sub2 = dict(sub)
            sub2[p] = s
            yield sub2
        return
    if not isinstance(s, App) or s.op is not p.op:
        return
    if not p.variables - protected and not p.variables.intersection(sub):
        if p == s:
            yield sub
        return
    op = p.op
    if op.assoc:
        yield from _ac_match(op, list(p.args), Counter(s.args), sub, sig, protected)
    elif op.comm:
        seen = []
        for q in ((s.args[0], s.args[1]), (s.args[1], s.args[0])):
            for m in _match_args(p.args, q, sub, sig, protected):
                if m not in seen:
                    seen.append(m)
                    yield m
    else:
        yield from _match_args(p.args, s.args, sub, sig, protected)


def _match_args(ps, ss, sub, sig, protected, i=0):
    if i == len(ps):
        yield sub
        return
    for m in _match(ps[i], ss[i], sub, sig, protected):
        yield from _match_args(ps, ss, m, sig, protected, i + 1)


def _ac_parts(op, t):
    if isinstance(t, App) and t.op is op:
        return t.args
    return (t,)


def _ac_match(op, pats, subj: Counter, sub, sig, protected):
    if not pats:
        if not subj:
            yield sub
        return
    if not subj:
        return
    # 1. pattern variables already bound remove their value from the subject
    for i, p in enumerate(pats):
        if isinstance(p, Var) and (p in sub or p in protected):
            v = sub.get(p, p)
            need = Counter(_ac_parts(op, v))
            if any(subj[k] < c for k, c in need.items()):
                return
            yield from _ac_match(op, pats[:i] + pats[i + 1:], subj - need, sub, sig, protected)
            return
    # 2. non-variable pattern arguments each take one subject argument
    for i, p in enumerate(pats):
        if isinstance(p, App):
            rest = pats[:i] + pats[i + 1:]
            for e in list(subj):
                for m in _match(p, e, sub, sig, protected):
                    left = subj.copy()
                    left[e] -= 1
                    if not left[e]:
                        del left[e]
                    yield from _ac_match(op, rest, left, m, sig, protected)
            return
    # 3. only unbound variables remain: distribute the multiset
    mult = Counter(pats)
    yield from _distribute(op, list(mult.items()), subj, sub, sig)


def _distribute(op, items, subj: Counter, sub, sig):
    if not items:
        if not subj:
            yield sub
        return
    (x, k), rest = items[0], items[1:]
    if sum(subj.values()) < k + sum(kk for _, kk in rest):
        return
    elems = sorted(subj, key=lambda t: t.key)
    caps = [subj[e] // k for e in elems]
    if not rest:
        if all(subj[e] % k == 0 for e in elems):
            share = Counter({e: subj[e] // k for e in elems})
            yield from _bind_share(op, x, share, Counter(), rest, sub, sig)
        return
    vec = [0] * len(elems)

    def rec(j):
        if j == len(elems):
            if any(vec):
                share = Counter({e: v for e, v in zip(elems, vec) if v})
                left = subj.copy()
                for e, v in share.items():
                    left[e] -= v * k
                    if not left[e]:
                        del left[e]
                yield from _bind_share(op, x, share, left, rest, sub, sig)
            return
        for v in range(caps[j] + 1):
            vec[j] = v
            yield from rec(j + 1)
        vec[j] = 0

    yield from rec(0)


def _bind_share(op, x, share, left, rest, sub, sig):
    parts = list(share.elements())
    if not parts:
        return
    val = parts[0] if len(parts) == 1 else mk(op, parts)
    if not _bind_ok(sig, x, val):
        return
    sub2 = dict(sub)
    sub2[x] = val
    yield from _distribute(op, rest, left, sub2, sig)


# ---------------------------------------------------------------------------
# Unification


class Unifier:
    """Unification modulo B for one query; owns the fresh-variable scope."""

    def __init__(self, sig: Signature, scope: FreshScope | None = None,
                 cap: int = DEFAULT_CAP):
        self.sig = sig
        self.scope = scope if scope is not None else FreshScope("%")
        self.cap = cap

    # -- public -------------------------------------------------------------

    def unify(self, t1: Term, t2: Term, avoid=frozenset()) -> list:
        return self.unify_pairs([(t1, t2)], avoid)

    def unify_pairs(self, pairs, avoid=frozenset()) -> list:
        pairs = list(pairs)
        in_vars = set()
        for s, t in pairs:
            in_vars |= s.variables | t.variables
        out = []
        seen = set()
        for sol in self._solve(list(reversed(pairs)), {}):
            sub = self._finish(sol, in_vars, avoid)
            if sub is None or sub in seen:
                continue
            seen.add(sub)
            out.append(sub)
        return out

    def unifiable(self, t1: Term, t2: Term) -> bool:
        for _ in self._solve([(t1, t2)], {}):
            return True
        return False

    # -- internals ----------------------------------------------------------

    def _finish(self, sol, in_vars, avoid):
        sig = self.sig
        res = {x: t for x, t in sol.items() if x in in_vars}
        if avoid:
            clash = set()
            for t in res.values():
                clash |= t.variables & in_vars
            clash |= (in_vars - set(res)) & set(avoid)
            clash &= in_vars
            if clash:
                ren = {y: self.scope.fresh(y.sort) for y in sorted(clash, key=lambda v: v.key)}
                res = {x: apply(ren, t) for x, t in res.items()}
                for y, z in ren.items():
                    if y not in res:
                        res[y] = z
        for x, t in res.items():
            if not x.sort.startswith("[") and not sig.has_sort(t, x.sort):
                return None
        return Subst(res)

    def _bind(self, sub, x, t):
        if x in t.variables:
            return None
        single = {x: t}
        new = {y: apply(single, u) for y, u in sub.items()}
        new[x] = t
        return new

    def _bind_vars(self, sub, x, y):
        sig = self.sig
        if sig.sort_leq(y.sort, x.sort):
            return self._bind(sub, x, y)
        if sig.sort_leq(x.sort, y.sort):
            return self._bind(sub, y, x)
        g = sig.glb(x.sort, y.sort)
        if g is None:
            return None
        z = self.scope.fresh(g)
        sub = self._bind(sub, x, z)
        return None if sub is None else self._bind(sub, y, z)

    def _solve(self, eqs, sub):
        eqs = [(apply(sub, s), apply(sub, t)) for s, t in eqs]
        while eqs:
            s, t = eqs.pop(self._pick(eqs))
            s = apply(sub, s)
            t = apply(sub, t)
            if s == t:
                continue
            if isinstance(s, Var) and isinstance(t, Var):
                sub = self._bind_vars(sub, s, t)
            elif isinstance(s, Var):
                sub = self._bind(sub, s, t)
            elif isinstance(t, Var):
                sub = self._bind(sub, t, s)
            elif s.op is not t.op:
                return
            elif s.op.assoc:
                pending = [(s, t)] + [(apply(sub, a), apply(sub, b)) for a, b in eqs]
                group = self._var_group(s.op, pending)
                if len(group) > 1:
                    rest = [e for k, e in enumerate(pending) if k and k not in group]
                    system = [pending[k] for k in group]
                    for new_eqs in self._ac_system(s.op, system):
                        yield from self._solve(rest + new_eqs, sub)
                    return
                for new_eqs in self._ac_step(s.op, s.args, t.args):
                    yield from self._solve(eqs + new_eqs, sub)
                return
            elif s.op.comm:
                a, b = s.args
                c, d = t.args
                yield from self._solve(eqs + [(b, d), (a, c)], sub)
                yield from self._solve(eqs + [(b, c), (a, d)], sub)
                return
            else:
                eqs.extend(reversed(list(zip(s.args, t.args))))
                continue
            if sub is None:
                return
        yield sub

    @staticmethod
    def _pick(eqs):
        """Index of the cheapest pending equation: bindings first, AC last."""
        best, cost = len(eqs) - 1, None
        for i in range(len(eqs) - 1, -1, -1):
            s, t = eqs[i]
            if isinstance(s, Var) or isinstance(t, Var) or s == t:
                return i
            if s.op is not t.op:
                return i
            c = len(s.args) + len(t.args) if s.op.assoc else 0
            if cost is None or c < cost:
                best, cost = i, c
        return best

    @staticmethod
    def _var_group(op, eqs):
        """Indices of equations that are op-sums of variables on both sides."""
        out = []
        for k, (a, b) in enumerate(eqs):
            if isinstance(a, Var) or isinstance(b, Var) or a.op is not op or b.op is not op:
                continue
            if all(isinstance(x, Var) for x in a.args) and all(isinstance(x, Var) for x in b.args):
                out.append(k)
        return out if out and out[0] == 0 else []

    def _ac_system(self, op, system):
        """Yield binding lists solving several variable-only op-equations at once."""
        rows = []
        for a, b in system:
            row = Counter(a.args)
            row.subtract(Counter(b.args))
            rows.append(row)
        coords = sorted({x for r in rows for x, c in r.items() if c}, key=lambda v: v.key)
        if not coords:
            yield []
            return
        n = len(coords)
        mat = [[r[x] for x in coords] for r in rows]
        sols = system_basis(mat, n, self.cap)
        covering = [[k for k, v in enumerate(sols) if v[i]] for i in range(n)]
        if any(not c for c in covering):
            return
        kind = op.result_kind
        budget = [self.cap]

        def rec(k, totals, chosen):
            if k == len(sols):
                if all(totals):
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise DiophantineExplosion("too many AC basis combinations")
                    yield list(chosen)
                return
            for i in range(n):
                if totals[i] == 0 and all(kk < k for kk in covering[i]):
                    return
            v = sols[k]
            chosen.append(k)
            yield from rec(k + 1, [totals[i] + v[i] for i in range(n)], chosen)
            chosen.pop()
            yield from rec(k + 1, totals, chosen)

        for chosen in rec(0, [0] * n, []):
            zs = {k: self.scope.fresh(kind) for k in chosen}
            eqs = []
            for i, x in enumerate(coords):
                parts = []
                for k in chosen:
                    parts.extend([zs[k]] * sols[k][i])
                eqs.append((x, parts[0] if len(parts) == 1 else mk(op, parts)))
            yield eqs

    def _ac_step(self, op, largs, rargs):
        """Yield lists of equations, one per AC solution of largs = rargs."""
        lc = Counter(largs)
        rc = Counter(rargs)
        common = lc & rc
        lc -= common
        rc -= common
        if not lc and not rc:
            yield []
            return
        if not lc or not rc:
            return
        # a lone variable on one side is bound to the whole other side
        for side, other in ((lc, rc), (rc, lc)):
            if len(side) == 1:
                (x, n), = side.items()
                if n == 1 and isinstance(x, Var):
                    yield [(x, mk(op, list(other.elements())))]
                    return
        lterms = sorted(lc, key=lambda t: t.key)
        rterms = sorted(rc, key=lambda t: t.key)
        # two non-variable terms on one side with no variable anywhere: quick fail
        a = [lc[t] for t in lterms]
        b = [rc[t] for t in rterms]
        cap_a = [None if isinstance(t, Var) else 1 for t in lterms]
        cap_b = [None if isinstance(t, Var) else 1 for t in rterms]
        sols = basis(a, b, cap_a, cap_b, self.cap)
        coords = lterms + rterms
        nonvar = [i for i, t in enumerate(coords) if not isinstance(t, Var)]
        n = len(coords)
        # every coordinate must be covered; non-variable coordinates exactly once
        covering = [[k for k, s in enumerate(sols) if s[i]] for i in range(n)]
        if any(not c for c in covering):
            return
        kind = op.result_kind
        budget = [self.cap]

        def rec(k, totals, chosen):
            if k == len(sols):
                if all(totals[i] >= 1 for i in range(n)) and \
                        all(totals[i] == 1 for i in nonvar):
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise DiophantineExplosion("too many AC basis combinations")
                    yield list(chosen)
                return
            s = sols[k]
            # prune: a coordinate that is still zero must be reachable later
            for i in range(n):
                if totals[i] == 0 and all(kk < k for kk in covering[i]):
                    return
            # take s
            if all(totals[i] + s[i] <= 1 for i in nonvar):
                new = [totals[i] + s[i] for i in range(n)]
                chosen.append(k)
                yield from rec(k + 1, new, chosen)
                chosen.pop()
            yield from rec(k + 1, totals, chosen)

        for chosen in rec(0, [0] * n, []):
            zs = {k: self.scope.fresh(kind) for k in chosen}
            eqs = []
            for i, t in enumerate(coords):
                parts = []
                for k in chosen:
                    parts.extend([zs[k]] * sols[k][i])
                val = parts[0] if len(parts) == 1 else mk(op, parts)
                eqs.append((t, val))
            # bind variables first so that aliens meet the final images
            eqs.sort(key=lambda e: 0 if isinstance(e[0], Var) else 1, reverse=True)
            yield eqs


def b_unify(t1: Term, t2: Term, sig: Signature, avoid=frozenset(),
            scope: FreshScope | None = None, cap: int = DEFAULT_CAP) -> list:
    """Complete set of B-unifiers, sorted by canonical serialization."""
    u = Unifier(sig, scope, cap)
    res = u.unify(t1, t2, avoid)
    res.sort(key=str)
    return res


def b_unify_compatible(sigma, theta1, theta2, shared) -> bool:
    for x in shared:
        a = apply(sigma, theta1.get(x, x))
        b = apply(sigma, theta2.get(x, x))
        if a != b:
            return False
    return True


def match_pairs(pairs, sig=None, protected=frozenset(), sub=None):
    """Enumerate joint matchers for several (pattern, subject) pairs.

    The next pair is chosen dynamically: the one whose pattern has the fewest
    still-unbound variables, so that cheap and deterministic bindings prune
    the AC distributions of the others.
    """
    return _match_pairs(list(pairs), dict(sub or {}), sig, protected)


def _match_pairs(pairs, sub, sig, protected):
    if not pairs:
        yield sub
        return
    best = None
    best_cost = None
    for i, (p, s) in enumerate(pairs):
        if not isinstance(p, App):
            best = i
            break
        free = len(p.variables - protected - sub.keys())
        if free == 0:
            best = i
            break
        # rough branching estimate of an AC distribution
        cost = free ** len(s.args) if p.op.assoc and isinstance(s, App) else free
        if best_cost is None or cost < best_cost:
            best, best_cost = i, cost
    p, s = pairs[best]
    rest = pairs[:best] + pairs[best + 1:]
    for m in _match(p, s, sub, sig, protected):
        yield from _match_pairs(rest, m, sig, protected)


def tuple_match(pats, subs, sig=None, protected=frozenset()):
    """First matcher of a tuple of patterns onto a tuple of subjects, or None."""
    for m in b_matches(mk_tuple(pats), mk_tuple(subs), sig, protected):
        return m
    return None
