"""Order-sorted signatures, terms, positions and substitutions.

Terms are immutable.  Associative-commutative nodes are stored flattened,
with their arguments sorted by canonical key, so that equality modulo the
structural axioms is plain structural equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


class SortError(Exception):
    pass


class SignatureError(Exception):
    pass


class PositionError(Exception):
    pass


def is_kind(sort: str) -> bool:
    return sort.startswith("[") and sort.endswith("]")


@dataclass(frozen=True)
class OpDecl:
    name: str
    arg_sorts: tuple
    result_sort: str
    attrs: frozenset = frozenset()


class Op:
    """An operator family: all declarations sharing name and argument kinds.

    Subsort-overloaded declarations live in one family; ``exp : Gen ElemSet``
    and ``exp : Exp ElemSet`` are different families because their argument
    kinds differ.
    """

    __slots__ = ("name", "arity", "kinds", "decls", "assoc", "comm", "ctor",
                 "ident", "infix", "display")

    def __init__(self, name, arity, kinds, ident=None):
        self.name = name
        self.arity = arity
        self.kinds = kinds  # (arg kinds..., result kind)
        self.decls = []
        self.assoc = False
        self.comm = False
        self.ctor = False
        self.ident = ident or name
        self.infix = arity == 2 and name.startswith("_") and name.endswith("_") \
            and name.count("_") == 2
        self.display = name.strip("_") if self.infix else name

    @property
    def is_ac(self):
        return self.assoc and self.comm

    @property
    def result_kind(self):
        return self.kinds[-1]

    def __repr__(self):
        return f"Op({self.ident})"


class Term:
    __slots__ = ("_key", "_hash", "_vars")

    def __eq__(self, other):
        return self is other or (isinstance(other, Term) and self._key == other._key)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    @property
    def key(self) -> str:
        return self._key

    def __repr__(self):
        return f"<{self}>"


class Var(Term):
    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: str):
        self.name = name
        self.sort = sort
        self._key = f"{name}:{sort}"
        self._hash = hash(self._key)
        self._vars = None

    @property
    def variables(self) -> frozenset:
        if self._vars is None:
            self._vars = frozenset((self,))
        return self._vars

    def size(self):
        return 1

    def __str__(self):
        return self._key


class App(Term):
    __slots__ = ("op", "args")

    def __init__(self, op: Op, args: tuple):
        self.op = op
        self.args = args
        if args:
            self._key = op.ident + "(" + ",".join(a._key for a in args) + ")"
        else:
            self._key = op.ident
        self._hash = hash(self._key)
        self._vars = None

    @property
    def variables(self) -> frozenset:
        if self._vars is None:
            if not self.args:
                self._vars = frozenset()
            elif len(self.args) == 1:
                self._vars = self.args[0].variables
            else:
                self._vars = frozenset().union(*(a.variables for a in self.args))
        return self._vars

    def size(self):
        return 1 + sum(a.size() for a in self.args)

    def __str__(self):
        return render(self)


def render(t: Term, with_sorts: bool = True) -> str:
    if isinstance(t, Var):
        return str(t) if with_sorts else t.name
    op = t.op
    if not t.args:
        return op.display
    if op.infix:
        parts = []
        for a in t.args:
            s = render(a, with_sorts)
            if isinstance(a, App) and a.op.infix and a.args:
                s = f"({s})"
            parts.append(s)
        return f" {op.display} ".join(parts)
    return op.display + "(" + ", ".join(render(a, with_sorts) for a in t.args) + ")"


def mk(op: Op, args) -> App:
    """Build an application, flattening and ordering AC/C arguments."""
    args = tuple(args)
    if op.assoc:
        if any(isinstance(a, App) and a.op is op for a in args):
            flat = []
            for a in args:
                if isinstance(a, App) and a.op is op:
                    flat.extend(a.args)
                else:
                    flat.append(a)
            args = tuple(flat)
        if len(args) == 1:
            return args[0]
        args = tuple(sorted(args, key=_keyof))
    elif op.comm and args[1]._key < args[0]._key:
        args = (args[1], args[0])
    return App(op, args)


def _keyof(t):
    return t._key


def is_var(t: Term) -> bool:
    return isinstance(t, Var)


def root(t: Term):
    """Root symbol: the Op for applications, the Var itself otherwise."""
    return t.op if isinstance(t, App) else t


# ---------------------------------------------------------------------------
# Signature


class Signature:
    def __init__(self):
        self.sorts: list = []
        self._declared_sub: set = set()
        self._leq: dict = {}
        self.component: dict = {}
        self.top: dict = {}
        self.families: dict = {}  # name -> [Op]

    # -- sorts --------------------------------------------------------------

    def add_sort(self, name):
        if name not in self.sorts:
            self.sorts.append(name)

    def add_subsort(self, lo, hi):
        for s in (lo, hi):
            if s not in self.sorts:
                raise SignatureError(f"undeclared sort {s}")
        self._declared_sub.add((lo, hi))

    def close_sorts(self):
        """Compute the subsort closure, connected components and kinds."""
        up = {s: {s} for s in self.sorts}
        changed = True
        while changed:
            changed = False
            for lo, hi in self._declared_sub:
                new = up[hi] - up[lo]
                if new:
                    up[lo] |= new
                    changed = True
        for s in self.sorts:
            for t in up[s]:
                if t != s and s in up[t]:
                    raise SignatureError(f"subsort cycle between {s} and {t}")
        self._leq = up
        parent = {s: s for s in self.sorts}

        def find(s):
            while parent[s] != s:
                parent[s] = parent[parent[s]]
                s = parent[s]
            return s

        for lo, hi in self._declared_sub:
            parent[find(lo)] = find(hi)
        comps: dict = {}
        for s in self.sorts:
            comps.setdefault(find(s), []).append(s)
        self.component = {}
        self.top = {}
        for members in comps.values():
            tops = [s for s in members if all(s in up[m] for m in members)]
            if len(tops) != 1:
                raise SignatureError(
                    f"connected component {sorted(members)} has no top sort")
            for m in members:
                self.component[m] = tops[0]
            self.top[tops[0]] = tops[0]

    def kind_of(self, sort: str) -> str:
        if is_kind(sort):
            inner = sort[1:-1].split(",")[0]
            return f"[{self.component[inner]}]"
        if sort not in self.component:
            raise SortError(f"undeclared sort {sort}")
        return f"[{self.component[sort]}]"

    def check_sort(self, sort: str):
        if is_kind(sort):
            inner = sort[1:-1]
            if inner not in self.component:
                raise SortError(f"undeclared sort {inner}")
            return
        if sort not in self.component:
            raise SortError(f"undeclared sort {sort}")

    def canonical_sort(self, sort: str) -> str:
        """Kinds are written ``[S]`` for any S of the component; normalize."""
        if is_kind(sort):
            return self.kind_of(sort)
        self.check_sort(sort)
        return sort

    def sort_leq(self, s1: str, s2: str) -> bool:
        self.check_sort(s1)
        self.check_sort(s2)
        if s1 == s2:
            return True
        if is_kind(s2):
            return self.kind_of(s1) == self.kind_of(s2)
        if is_kind(s1):
            return False
        return s2 in self._leq[s1]

    def glb(self, s1: str, s2: str):
        """Greatest common lower bound of two sorts, or None."""
        if self.sort_leq(s1, s2):
            return s1
        if self.sort_leq(s2, s1):
            return s2
        if self.kind_of(s1) != self.kind_of(s2):
            return None
        lower = [s for s in self.sorts
                 if self.sort_leq(s, s1) and self.sort_leq(s, s2)]
        best = [s for s in lower if all(self.sort_leq(t, s) for t in lower)]
        return best[0] if best else None

    # -- operators ----------------------------------------------------------

    def add_op(self, decl: OpDecl) -> Op:
        sorts = [self.canonical_sort(s) for s in decl.arg_sorts]
        result = self.canonical_sort(decl.result_sort)
        kinds = tuple(self.kind_of(s) for s in sorts) + (self.kind_of(result),)
        fams = self.families.setdefault(decl.name, [])
        for op in fams:
            if op.kinds == kinds:
                break
        else:
            ident = decl.name if not fams else f"{decl.name}/{len(fams)}"
            op = Op(decl.name, len(sorts), kinds, ident)
            fams.append(op)
        attrs = decl.attrs
        if "assoc" in attrs and "comm" not in attrs:
            raise SignatureError(f"operator {decl.name}: assoc without comm is not supported")
        if "assoc" in attrs:
            if len(sorts) != 2 or len(set(kinds)) != 1:
                raise SignatureError(
                    f"operator {decl.name}: assoc requires two arguments of the result kind")
        if "comm" in attrs and len(sorts) != 2:
            raise SignatureError(f"operator {decl.name}: comm requires two arguments")
        if op.decls:
            if ("assoc" in attrs) != op.assoc or ("comm" in attrs) != op.comm:
                raise SignatureError(
                    f"operator {decl.name}: inconsistent axiom attributes")
            if ("ctor" in attrs) != op.ctor:
                raise SignatureError(
                    f"operator {decl.name}: inconsistent ctor attribute")
        op.assoc = "assoc" in attrs
        op.comm = "comm" in attrs
        op.ctor = "ctor" in attrs
        op.decls.append(OpDecl(decl.name, tuple(sorts), result, attrs))
        return op

    def ops(self) -> Iterator[Op]:
        for fams in self.families.values():
            yield from fams

    def resolve(self, name: str, args) -> Op:
        fams = self.families.get(name)
        if not fams:
            raise SignatureError(f"unknown operator {name}")
        arity_ok = [op for op in fams if op.arity == len(args)]
        if not arity_ok:
            raise SortError(
                f"operator {name} expects {fams[0].arity} argument(s), got {len(args)}")
        kinds = tuple(self.kind_of(self.least_sort(a)) for a in args)
        for op in arity_ok:
            if op.kinds[:-1] == kinds:
                return op
        raise SortError(f"no declaration of {name} accepts argument kinds {kinds}")

    def least_sort(self, t: Term) -> str:
        if isinstance(t, Var):
            return t.sort
        op = t.op
        if op.assoc and len(t.args) > 2:
            # fold left over the flattened argument list
            cur = self.least_sort(t.args[0])
            for a in t.args[1:]:
                cur = self._result_sort(op, (cur, self.least_sort(a)))
            return cur
        return self._result_sort(op, tuple(self.least_sort(a) for a in t.args))

    def _result_sort(self, op: Op, arg_sorts) -> str:
        candidates = [d.result_sort for d in op.decls
                      if all(self.sort_leq(s, ds) for s, ds in zip(arg_sorts, d.arg_sorts))]
        if not candidates:
            return op.result_kind
        least = [c for c in candidates if all(self.sort_leq(c, o) for o in candidates)]
        return least[0] if least else op.result_kind

    def check_preregular(self):
        """Every argument-sort combination must have a least result sort."""
        for op in self.ops():
            pools = []
            for k in op.kinds[:-1]:
                top = k[1:-1]
                pools.append([s for s in self.sorts if self.component[s] == top])
            for combo in itertools.product(*pools):
                cands = [d.result_sort for d in op.decls
                         if all(self.sort_leq(s, ds) for s, ds in zip(combo, d.arg_sorts))]
                if cands and not any(all(self.sort_leq(c, o) for o in cands) for c in cands):
                    raise SignatureError(
                        f"signature is not preregular: {op.name} on {combo}")

    def has_sort(self, t: Term, sort: str) -> bool:
        return self.sort_leq(self.least_sort(t), sort)


# ---------------------------------------------------------------------------
# Tupling, used to compare substitutions as single terms.

_TUPLES: dict = {}


def tuple_op(n: int) -> Op:
    op = _TUPLES.get(n)
    if op is None:
        op = Op("<>", n, ("[Tuple]",) * (n + 1), ident=f"<>{n}")
        _TUPLES[n] = op
    return op


_SKOLEMS: dict = {}


def skolem(x: Var, kind: str) -> App:
    """A constant standing for the frozen variable x (outside any signature)."""
    key = (x.name, x.sort)
    op = _SKOLEMS.get(key)
    if op is None:
        op = Op(f"!{x.name}", 0, (kind,), ident=f"!{x.name}:{x.sort}")
        op.decls.append(OpDecl(op.name, (), x.sort))
        op.ctor = True
        _SKOLEMS[key] = op
    return App(op, ())


def mk_tuple(args) -> App:
    args = tuple(args)
    return App(tuple_op(len(args)), args)


# ---------------------------------------------------------------------------
# Positions

Position = tuple  # () is the root position


def positions(t: Term, nonvar: bool = False) -> list:
    out = []

    def walk(u, p):
        if isinstance(u, Var):
            if not nonvar:
                out.append(p)
            return
        out.append(p)
        for i, a in enumerate(u.args, 1):
            walk(a, p + (i,))

    walk(t, ())
    return out


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if isinstance(t, Var) or not 1 <= i <= len(t.args):
            raise PositionError(f"position {p} not in term")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, u: Term, sig: Signature | None = None) -> Term:
    if not p:
        return u
    if isinstance(t, Var) or not 1 <= p[0] <= len(t.args):
        raise PositionError(f"position {p} not in term")
    i = p[0] - 1
    new = replace_at(t.args[i], p[1:], u, sig)
    if sig is not None and sig.kind_of(sig.least_sort(new)) != t.op.kinds[i]:
        raise SortError(f"replacement {new} has the wrong kind for {t.op.name}")
    return mk(t.op, t.args[:i] + (new,) + t.args[i + 1:])


def occurrences(t: Term, x: Var) -> list:
    return [p for p in positions(t) if subterm_at(t, p) == x]


# ---------------------------------------------------------------------------
# Substitutions


def apply(s: Mapping, t: Term) -> Term:
    """Apply a substitution given as a mapping ``Var -> Term``."""
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t, t)
    if not t.args:
        return t
    vs = t.variables
    if len(s) < len(vs):
        if not any(x in vs for x in s):
            return t
    elif vs.isdisjoint(s):
        return t
    return mk(t.op, [apply(s, a) for a in t.args])


class Subst(Mapping):
    """A finite map from variables to terms."""

    __slots__ = ("_m", "_hash")

    def __init__(self, bindings=None):
        m = {}
        if bindings:
            for x, t in dict(bindings).items():
                if x != t:
                    m[x] = t
        self._m = m
        self._hash = None

    def __getitem__(self, x):
        return self._m[x]

    def __iter__(self):
        return iter(self._m)

    def __len__(self):
        return len(self._m)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._m.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Subst):
            return self._m == other._m
        return NotImplemented

    def get(self, x, default=None):
        return self._m.get(x, default)

    @property
    def domain(self) -> frozenset:
        return frozenset(self._m)

    @property
    def range_vars(self) -> frozenset:
        out = set()
        for t in self._m.values():
            out |= t.variables
        return frozenset(out)

    def __call__(self, t: Term) -> Term:
        return apply(self._m, t)

    def is_idempotent(self) -> bool:
        return self.domain.isdisjoint(self.range_vars)

    def is_renaming(self) -> bool:
        vals = list(self._m.values())
        return all(isinstance(v, Var) for v in vals) and len(set(vals)) == len(vals)

    def items_sorted(self):
        return sorted(self._m.items(), key=lambda kv: kv[0].key)

    def __str__(self):
        body = ", ".join(f"{x} |-> {t}" for x, t in self.items_sorted())
        return "{" + body + "}"

    __repr__ = __str__


IDENTITY = Subst()


def compose(s1: Mapping, s2: Mapping) -> Subst:
    """``compose(s1, s2)`` applies s1 first, then s2 (that is, t s1 s2)."""
    out = {x: apply(s2, t) for x, t in s1.items()}
    for x, t in s2.items():
        if x not in out:
            out[x] = t
    return Subst(out)


def restrict(s: Mapping, vs: Iterable) -> Subst:
    vs = set(vs)
    return Subst({x: t for x, t in s.items() if x in vs})


def combine(s1: Mapping, s2: Mapping) -> Subst:
    if set(s1) & set(s2):
        raise ValueError("combine requires disjoint domains")
    out = dict(s1)
    out.update(s2)
    return Subst(out)


def inverse_renaming(s: Subst) -> Subst:
    if not s.is_renaming():
        raise ValueError("not a renaming")
    return Subst({t: x for x, t in s.items()})


@dataclass
class FreshScope:
    """Per-query supply of fresh variables named ``#n`` or ``%n``."""

    prefix: str = "#"
    counter: int = 0
    used: set = field(default_factory=set)

    def fresh(self, sort: str, prefix: str | None = None) -> Var:
        self.counter += 1
        return Var(f"{prefix or self.prefix}{self.counter}", sort)

    def rename(self, t: Term, sig=None) -> tuple:
        """Rename every variable of t to a fresh one; returns (term, renaming)."""
        ren = {x: self.fresh(x.sort) for x in sorted(t.variables, key=_keyof)}
        return apply(ren, t), Subst(ren)


def canonical_renaming(terms, prefix="#", sort_of=None) -> dict:
    """Map the variables of ``terms`` to ``#1, #2, ...`` in first-use order."""
    ren = {}
    n = 0

    def walk(u):
        nonlocal n
        if isinstance(u, Var):
            if u not in ren:
                n += 1
                ren[u] = Var(f"{prefix}{n}", u.sort)
            return
        for a in u.args:
            walk(a)

    for t in terms:
        walk(t)
    return ren
