"""Rewriting with the oriented variant equations modulo B."""

from __future__ import annotations

from dataclasses import dataclass, field

from .axunify import b_matches
from .sigterm import App, Subst, Term, Var, apply, mk, replace_at

__all__ = ["StepBudgetExceeded", "RewriteTrace", "rewrite_step", "normalize",
           "is_normal_form", "normalize_subst"]

DEFAULT_BUDGET = 10**5


class StepBudgetExceeded(Exception):
    """Normalization ran past its step budget; the theory may not terminate."""


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)  # (position, label, matcher)
    result: Term | None = None

    def lines(self):
        for pos, label, matcher in self.steps:
            path = ".".join(map(str, pos)) or "root"
            yield f"pos={path} rule={label} matcher={matcher}"


def _root_step(t, theory):
    if isinstance(t, Var):
        return None
    sig = theory.sig
    for rule in theory.rules_for(t.op):
        for m in b_matches(rule.lhs, t, sig):
            return apply(m, rule.rhs), rule.label, Subst(m)
    return None


def rewrite_step(t: Term, theory):
    """One innermost-leftmost step: ``(term, (position, label, matcher))`` or None."""
    def walk(u, p):
        if isinstance(u, Var):
            return None
        for i, a in enumerate(u.args, 1):
            hit = walk(a, p + (i,))
            if hit is not None:
                return hit
        got = _root_step(u, theory)
        if got is None:
            return None
        return p, got

    hit = walk(t, ())
    if hit is None:
        return None
    p, (new, label, m) = hit
    return replace_at(t, p, new), (p, label, m)


def _memo(theory):
    return theory.__dict__.setdefault("_nf_memo", {})


def normalize(t: Term, theory, budget: int = DEFAULT_BUDGET, trace: RewriteTrace | None = None) -> Term:
    if trace is not None:
        cur = t
        for _ in range(budget):
            got = rewrite_step(cur, theory)
            if got is None:
                trace.result = cur
                return cur
            cur, info = got
            trace.steps.append(info)
        raise StepBudgetExceeded(f"no normal form within {budget} steps")
    counter = [budget]
    return _nf(t, theory, _memo(theory), counter)


def _nf(t, theory, memo, counter):
    if isinstance(t, Var):
        return t
    hit = memo.get(t)
    if hit is not None:
        return hit
    args = tuple(_nf(a, theory, memo, counter) for a in t.args)
    u = t if args == t.args else mk(t.op, args)
    while isinstance(u, App):
        got = _root_step(u, theory)
        if got is None:
            break
        counter[0] -= 1
        if counter[0] < 0:
            raise StepBudgetExceeded("normalization step budget exhausted")
        u = _nf(got[0], theory, memo, counter)
    if len(memo) > 500_000:
        memo.clear()
    memo[t] = u
    return u


def is_normal_form(t: Term, theory) -> bool:
    return rewrite_step(t, theory) is None


def normalize_subst(s, theory) -> Subst:
    return Subst({x: normalize(u, theory) for x, u in s.items()})


