"""Exclusive-or terms as vectors over GF(2): an oracle that shares no code with
the rewriting engine.  A pure XOR term denotes the set of generators (variables
and the constants a, b, c) that occur an odd number of times."""

from vunify.sigterm import App, Var, apply

CONSTS = {"a", "b", "c"}


def vec(t) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t])
    if not t.args:
        if t.op.name == "mt":
            return frozenset()
        if t.op.name in CONSTS:
            return frozenset([t.op.name])
        raise ValueError(f"not a pure xor term: {t}")
    if t.op.name != "_*_":
        raise ValueError(f"not a pure xor term: {t}")
    out = frozenset()
    for a in t.args:
        out = out ^ vec(a)
    return out


def sound(s, t1, t2) -> bool:
    return vec(apply(s, t1)) == vec(apply(s, t2))


def _solvable(rows, rhs) -> bool:
    """Is A t = b solvable over GF(2)?  Rows are sets of unknown indices."""
    eqs = [(set(r), b) for r, b in zip(rows, rhs)]
    pivots = []
    for r, b in eqs:
        for p, (pr, pb) in pivots:
            if p in r:
                r ^= pr
                b ^= pb
        if r:
            p = min(r, key=str)
            new = []
            for q, (qr, qb) in pivots:
                if p in qr:
                    qr = qr ^ r
                    qb = qb ^ b
                new.append((q, (qr, qb)))
            pivots = new + [(p, (r, b))]
        elif b:
            return False
    return True


def subsumes(s1, s2, order) -> bool:
    """Is there tau with s1(x)tau =E s2(x) for every x in order?"""
    rows, targets = [], []
    for x in order:
        v1 = vec(s1.get(x, x))
        unknowns = {g for g in v1 if isinstance(g, Var)}
        fixed = frozenset(g for g in v1 if not isinstance(g, Var))
        rows.append(unknowns)
        targets.append(vec(s2.get(x, x)) ^ fixed)
    gens = set().union(*targets) if targets else set()
    for g in gens:
        if not _solvable(rows, [int(g in t) for t in targets]):
            return False
    return True
