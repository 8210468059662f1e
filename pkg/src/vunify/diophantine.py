"""Minimal non-negative solutions of one homogeneous linear Diophantine equation.

Solves ``sum(a[i] * x[i]) == sum(b[j] * y[j])``.  Every minimal solution
satisfies ``x[i] <= max(b)`` and ``y[j] <= max(a)``, so a bounded
enumeration followed by a minimality filter yields the full basis.
"""

from __future__ import annotations

import itertools


class DiophantineExplosion(Exception):
    """The basis or its subset combinations exceed the configured cap."""


def _compositions(coeffs, caps, total):
    """All vectors v with v[j] <= caps[j] and sum(coeffs[j] * v[j]) == total."""
    n = len(coeffs)
    out = []
    vec = [0] * n

    def rec(j, rest):
        if j == n:
            if rest == 0:
                out.append(tuple(vec))
            return
        c = coeffs[j]
        hi = min(caps[j], rest // c)
        for v in range(hi + 1):
            vec[j] = v
            rec(j + 1, rest - c * v)
        vec[j] = 0

    rec(0, total)
    return out


def basis(a, b, cap_a=None, cap_b=None, limit=10**6):
    """Minimal solutions as tuples ``x + y`` (concatenated).

    ``cap_a``/``cap_b`` give optional per-coordinate upper bounds; solutions
    exceeding a bound are dropped before minimality filtering, which is what
    the AC unifier needs for coordinates standing for non-variable terms.
    """
    a = list(a)
    b = list(b)
    if not a or not b:
        return []
    ma, mb = max(a), max(b)
    cap_a = [mb if c is None else min(c, mb) for c in (cap_a or [None] * len(a))]
    cap_b = [ma if c is None else min(c, ma) for c in (cap_b or [None] * len(b))]
    sols = []
    count = 0
    for xs in itertools.product(*(range(c + 1) for c in cap_a)):
        total = sum(ai * xi for ai, xi in zip(a, xs))
        if total == 0:
            continue
        for ys in _compositions(b, cap_b, total):
            sols.append(xs + ys)
            count += 1
            if count > limit:
                raise DiophantineExplosion(f"more than {limit} candidate solutions")
    sols.sort(key=sum)
    minimal = []
    for s in sols:
        if not any(all(m[k] <= s[k] for k in range(len(s))) for m in minimal):
            minimal.append(s)
    return minimal


def is_solution(a, b, sol) -> bool:
    n = len(a)
    return sum(ai * x for ai, x in zip(a, sol[:n])) == sum(bj * y for bj, y in zip(b, sol[n:]))


def system_basis(rows, n, limit=10**6):
    """Minimal non-negative non-zero solutions of ``M x = 0`` for integer rows.

    Contejean-Devie completion: grow vectors one unit at a time along
    directions that move ``M x`` back toward the origin, dropping any vector
    that already dominates a solution.
    """
    rows = [list(r) for r in rows]
    cols = [tuple(r[j] for r in rows) for j in range(n)]

    def image(v):
        return tuple(sum(r[j] * v[j] for j in range(n)) for r in rows)

    sols = []
    frontier = {tuple(1 if k == j else 0 for k in range(n)) for j in range(n)}
    seen = 0
    while frontier:
        level = sorted(frontier)
        for v in level:
            if not any(image(v)) and not any(all(s[k] <= v[k] for k in range(n)) for s in sols):
                sols.append(v)
        frontier = set()
        for v in level:
            mv = image(v)
            if not any(mv):
                continue
            for j in range(n):
                if sum(a * b for a, b in zip(mv, cols[j])) >= 0:
                    continue
                w = v[:j] + (v[j] + 1,) + v[j + 1:]
                if any(all(s[k] <= w[k] for k in range(n)) for s in sols):
                    continue
                frontier.add(w)
                seen += 1
                if seen > limit:
                    raise DiophantineExplosion(f"more than {limit} candidate vectors")
    return sols
