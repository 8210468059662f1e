"""Brute-force ground oracle used by the property tests."""

from __future__ import annotations

import itertools

from .normalize import normalize
from .sigterm import Subst, Term, apply, mk

__all__ = ["OracleOverflow", "ground_terms", "ground_oracle"]


class OracleOverflow(Exception):
    """The enumeration would exceed its cap; callers should skip, not pass."""


def ground_terms(theory, depth: int = 2, consts=None, width: int = 3) -> list:
    """Normalized ground terms built from constants and AC combinations.

    Level 0 holds the constants; level d+1 adds every AC product of 2..width
    level-d terms.  Results are normalized and deduplicated.
    """
    sig = theory.sig
    if consts is None:
        consts = theory.constants()
    level = sorted({normalize(c, theory) for c in consts}, key=lambda t: t.key)
    ac_ops = [op for op in sig.ops() if op.assoc]
    for _ in range(depth):
        found = set(level)
        for op in ac_ops:
            kind = op.result_kind
            pool = [t for t in level if sig.kind_of(sig.least_sort(t)) == kind]
            for n in range(2, width + 1):
                for combo in itertools.combinations_with_replacement(pool, n):
                    found.add(normalize(mk(op, combo), theory))
        new = sorted(found, key=lambda t: t.key)
        if new == level:
            break
        level = new
    return level


def ground_oracle(t1: Term, t2: Term, theory, depth: int = 2, consts=None,
                  cap: int = 200_000) -> list:
    """All ground substitutions (over the enumerated domain) unifying t1, t2."""
    sig = theory.sig
    vs = sorted(t1.variables | t2.variables, key=lambda v: v.key)
    domain = ground_terms(theory, depth, consts)
    choices = []
    total = 1
    for x in vs:
        ok = [g for g in domain if sig.has_sort(g, x.sort)]
        choices.append(ok)
        total *= max(1, len(ok))
    if total > cap:
        raise OracleOverflow(f"{total} assignments exceed the oracle cap {cap}")
    out = []
    for combo in itertools.product(*choices):
        rho = dict(zip(vs, combo))
        if normalize(apply(rho, t1), theory) == normalize(apply(rho, t2), theory):
            out.append(Subst(rho))
    return out

