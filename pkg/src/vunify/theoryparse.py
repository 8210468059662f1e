"""Parser for a small subset of Maude functional modules and problems."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .sigterm import (App, OpDecl, Signature, SignatureError, SortError, Term,
                      Var, mk, mk_tuple, tuple_op)

__all__ = ["Theory", "OrientedEquation", "Problem", "ParseError", "LoadError",
           "parse_module", "parse_term", "parse_problem", "load_module"]


class ParseError(Exception):
    def __init__(self, msg, line=None, col=None):
        loc = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(msg + loc)
        self.line = line
        self.col = col


class LoadError(Exception):
    """The module parsed but violates a theory invariant."""


@dataclass(frozen=True)
class OrientedEquation:
    label: str
    lhs: Term
    rhs: Term


@dataclass
class Theory:
    name: str
    sig: Signature
    rules: list
    vars: dict = field(default_factory=dict)

    @property
    def ctor_symbols(self) -> set:
        return {op for op in self.sig.ops() if op.ctor}

    def is_ctor(self, op) -> bool:
        return op.ctor or op.name == "<>"

    def rules_for(self, op) -> list:
        cache = self.__dict__.setdefault("_by_root", {})
        got = cache.get(op)
        if got is None:
            got = [r for r in self.rules if r.lhs.op is op]
            cache[op] = got
        return got

    def constants(self) -> list:
        return [App(op, ()) for op in self.sig.ops() if op.arity == 0]


_TOKEN = re.compile(r"\s+|(\(|\)|,|\[|\]|[^\s(),\[\]]+)")


def _tokens(text, line0=1):
    """Yield (token, line, col) skipping whitespace and comments."""
    out = []
    for lineno, line in enumerate(text.splitlines(), line0):
        cut = len(line)
        for marker in ("***", "---"):
            k = line.find(marker)
            if k != -1:
                cut = min(cut, k)
        line = line[:cut]
        pos = 0
        while pos < len(line):
            m = _TOKEN.match(line, pos)
            if m.group(1):
                out.append((m.group(1), lineno, m.start() + 1))
            pos = m.end()
    return out


def _split_statements(toks):
    stmts = []
    cur = []
    for tok in toks:
        if tok[0] == ".":
            stmts.append(cur)
            cur = []
        else:
            cur.append(tok)
    if cur:
        stmts.append(cur)
    return stmts


def _join_sort(toks):
    """Read a sort or kind name from a token list: ``S`` or ``[ S ]``."""
    if toks and toks[0][0] == "[":
        if len(toks) < 3 or toks[2][0] != "]":
            raise ParseError("malformed kind", toks[0][1], toks[0][2])
        return "[" + toks[1][0] + "]", toks[3:]
    if not toks:
        raise ParseError("expected a sort")
    return toks[0][0], toks[1:]


def _sort_list(toks):
    sorts = []
    while toks:
        s, toks = _join_sort(toks)
        sorts.append(s)
    return sorts


def _attrs(toks):
    if toks and toks[-1][0] == "]":
        for i in range(len(toks) - 1, -1, -1):
            if toks[i][0] == "[":
                return toks[:i], [t[0] for t in toks[i + 1:-1]]
    return toks, []


_OP_ATTRS = {"assoc", "comm", "ctor"}


def parse_module(text: str) -> Theory:
    toks = _tokens(text)
    if not toks or toks[0][0] != "fmod":
        where = toks[0] if toks else ("", 1, 1)
        raise ParseError("expected 'fmod'", where[1], where[2])
    if len(toks) < 3 or toks[2][0] != "is":
        raise ParseError("expected 'fmod NAME is'", toks[0][1], toks[0][2])
    name = toks[1][0]
    body = toks[3:]
    if not body or body[-1][0] != "endfm":
        raise ParseError("expected 'endfm' at end of module",
                         body[-1][1] if body else None, body[-1][2] if body else None)
    body = body[:-1]
    sig = Signature()
    var_decls = {}
    eq_stmts = []
    op_stmts = []
    for stmt in _split_statements(body):
        if not stmt:
            continue
        kw, line, col = stmt[0]
        rest = stmt[1:]
        if kw in ("sort", "sorts"):
            for t in rest:
                sig.add_sort(t[0])
        elif kw in ("subsort", "subsorts"):
            chain = [[]]
            for t in rest:
                if t[0] == "<":
                    chain.append([])
                else:
                    chain[-1].append(t[0])
            if len(chain) < 2 or any(not c for c in chain):
                raise ParseError("malformed subsort declaration", line, col)
            for lo_group, hi_group in zip(chain, chain[1:]):
                for lo in lo_group:
                    for hi in hi_group:
                        try:
                            sig.add_subsort(lo, hi)
                        except SignatureError as e:
                            raise ParseError(str(e), line, col) from None
        elif kw in ("op", "ops"):
            op_stmts.append((kw, rest, line, col))
        elif kw in ("var", "vars"):
            k = next((i for i, t in enumerate(rest) if t[0] == ":"), None)
            if k is None or k == 0:
                raise ParseError("malformed variable declaration", line, col)
            sort, tail = _join_sort(rest[k + 1:])
            if tail:
                raise ParseError("malformed variable declaration", line, col)
            for t in rest[:k]:
                var_decls[t[0]] = (sort, line, col)
        elif kw == "eq":
            eq_stmts.append((rest, line, col))
        else:
            raise ParseError(f"unsupported declaration '{kw}'", line, col)
    try:
        sig.close_sorts()
    except SignatureError as e:
        raise LoadError(str(e)) from None
    for kw, rest, line, col in op_stmts:
        k = next((i for i, t in enumerate(rest) if t[0] == ":"), None)
        if k is None or k == 0:
            raise ParseError("malformed operator declaration", line, col)
        names = [t[0] for t in rest[:k]]
        if kw == "op" and len(names) != 1:
            raise ParseError("'op' declares exactly one operator", line, col)
        sig_part, attrs = _attrs(rest[k + 1:])
        arrow = next((i for i, t in enumerate(sig_part) if t[0] == "->"), None)
        if arrow is None:
            raise ParseError("expected '->' in operator declaration", line, col)
        try:
            args = _sort_list(sig_part[:arrow])
            result, tail = _join_sort(sig_part[arrow + 1:])
        except ParseError as e:
            raise ParseError(str(e), line, col) from None
        if tail:
            raise ParseError("malformed operator result sort", line, col)
        bad = [a for a in attrs if a not in _OP_ATTRS]
        if bad:
            raise ParseError(f"unsupported operator attribute(s) {bad}", line, col)
        for nm in names:
            if "_" in nm and nm.count("_") != len(args):
                raise ParseError(f"mixfix operator {nm} does not match its arity", line, col)
            try:
                sig.add_op(OpDecl(nm, tuple(args), result, frozenset(attrs)))
            except SortError as e:
                raise ParseError(str(e), line, col) from None
            except SignatureError as e:
                raise LoadError(str(e)) from None
    try:
        sig.check_preregular()
    except SignatureError as e:
        raise LoadError(str(e)) from None
    variables = {}
    for vname, (sort, line, col) in var_decls.items():
        try:
            variables[vname] = Var(vname, sig.canonical_sort(sort))
        except SortError as e:
            raise ParseError(str(e), line, col) from None
    theory = Theory(name, sig, [], variables)
    for n, (rest, line, col) in enumerate(eq_stmts, 1):
        rest, attrs = _attrs(rest)
        if "variant" not in attrs:
            raise LoadError(f"equation at line {line} lacks the 'variant' attribute")
        if any(a != "variant" for a in attrs):
            raise ParseError(f"unsupported equation attribute(s) {attrs}", line, col)
        label = f"eq{n}"
        if rest and rest[0][0] == "[":
            if len(rest) < 4 or rest[2][0] != "]" or rest[3][0] != ":":
                raise ParseError("malformed equation label", line, col)
            label = rest[1][0]
            rest = rest[4:]
        eqpos = [i for i, t in enumerate(rest) if t[0] == "="]
        if len(eqpos) != 1:
            raise ParseError("equation needs exactly one '='", line, col)
        k = eqpos[0]
        lhs = _parse_tokens(rest[:k], sig, variables)
        rhs = _parse_tokens(rest[k + 1:], sig, variables)
        if isinstance(lhs, Var):
            raise LoadError(f"equation {label}: left-hand side is a variable")
        if lhs.op.ctor:
            raise LoadError(
                f"equation {label}: constructor {lhs.op.name} at the root of a left-hand side")
        if not rhs.variables <= lhs.variables:
            raise LoadError(f"equation {label}: right-hand side has extra variables")
        if sig.kind_of(sig.least_sort(lhs)) != sig.kind_of(sig.least_sort(rhs)):
            raise LoadError(f"equation {label}: sides have different kinds")
        theory.rules.append(OrientedEquation(label, lhs, rhs))
    return theory


def load_module(path) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return parse_module(fh.read())


# ---------------------------------------------------------------------------
# Terms


def _infix_table(sig):
    table = {}
    for op in sig.ops():
        if op.infix:
            table.setdefault(op.display, []).append(op)
    return table


def parse_term(text: str, sig: Signature, variables=None) -> Term:
    toks = _tokens(text)
    if not toks:
        raise ParseError("empty term")
    return _parse_tokens(toks, sig, variables or {})


def _parse_tokens(toks, sig, variables):
    p = _TermParser(toks, sig, variables)
    t = p.expr()
    if p.i != len(p.toks):
        tok = p.toks[p.i]
        raise ParseError(f"unexpected token '{tok[0]}'", tok[1], tok[2])
    return t


class _TermParser:
    def __init__(self, toks, sig, variables):
        self.sig = sig
        self.variables = variables
        self.infix = _infix_table(sig)
        self.toks = self._split_infix(toks)
        self.i = 0

    def _split_infix(self, toks):
        syms = sorted(self.infix, key=len, reverse=True)
        out = []
        for tok, line, col in toks:
            if tok in self.infix or not syms or ":" in tok:
                out.append((tok, line, col))
                continue
            pieces = [tok]
            for s in syms:
                nxt = []
                for pc in pieces:
                    if pc in self.infix or s not in pc:
                        nxt.append(pc)
                        continue
                    parts = pc.split(s)
                    for j, part in enumerate(parts):
                        if j:
                            nxt.append(s)
                        if part:
                            nxt.append(part)
                pieces = nxt
            for pc in pieces:
                out.append((pc, line, col))
        return out

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, expected=None):
        if self.i >= len(self.toks):
            last = self.toks[-1] if self.toks else ("", None, None)
            raise ParseError("unexpected end of term", last[1], last[2])
        tok = self.toks[self.i]
        if expected is not None and tok[0] != expected:
            raise ParseError(f"expected '{expected}', found '{tok[0]}'", tok[1], tok[2])
        self.i += 1
        return tok

    def expr(self):
        first_tok = self.toks[self.i] if self.i < len(self.toks) else None
        items = [self.primary()]
        ops = []
        while self.peek() in self.infix:
            ops.append(self.take())
            items.append(self.primary())
        if not ops:
            return items[0]
        names = {o[0] for o in ops}
        if len(names) > 1:
            o = ops[0]
            raise ParseError("ambiguous mix of infix operators; add parentheses", o[1], o[2])
        sym = ops[0][0]
        acc = items[0]
        for nxt in items[1:]:
            acc = self._apply_infix(sym, acc, nxt, ops[0] if ops else first_tok)
        return acc

    def _apply_infix(self, sym, a, b, where):
        kinds = (self.sig.kind_of(self.sig.least_sort(a)), self.sig.kind_of(self.sig.least_sort(b)))
        for op in self.infix[sym]:
            if op.kinds[:-1] == kinds:
                return mk(op, (a, b))
        raise ParseError(f"no declaration of _{sym}_ accepts kinds {kinds}", where[1], where[2])

    def primary(self):
        tok, line, col = self.take()
        if tok == "(":
            t = self.expr()
            self.take(")")
            return t
        if tok in (")", ",", "[", "]"):
            raise ParseError(f"unexpected token '{tok}'", line, col)
        if self.peek() == "(":
            self.take("(")
            args = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.expr())
            self.take(")")
            try:
                op = self.sig.resolve(tok, args)
            except (SortError, SignatureError) as e:
                raise ParseError(str(e), line, col) from None
            return mk(op, args)
        if ":" in tok and not tok.startswith(":"):
            name, sort = tok.split(":", 1)
            try:
                return Var(name, self.sig.canonical_sort(sort))
            except SortError as e:
                raise ParseError(str(e), line, col) from None
        if tok in self.variables:
            return self.variables[tok]
        fams = self.sig.families.get(tok)
        if fams:
            consts = [op for op in fams if op.arity == 0]
            if not consts:
                raise ParseError(f"operator {tok} expects {fams[0].arity} argument(s)", line, col)
            if len(consts) > 1:
                raise ParseError(f"ambiguous constant {tok}", line, col)
            return App(consts[0], ())
        raise ParseError(f"unknown symbol '{tok}'", line, col)


# ---------------------------------------------------------------------------
# Problems


@dataclass
class Problem:
    module_name: str
    pairs: list
    bound: int | None = None

    def as_pair(self):
        """Conjunctions are encoded as one equation over a free tupling symbol."""
        if len(self.pairs) == 1:
            return self.pairs[0]
        return (mk_tuple([l for l, _ in self.pairs]), mk_tuple([r for _, r in self.pairs]))


_HEADER = re.compile(
    r"^\s*(?:variant\s+unify|unify:?)\s*(?:\[\s*(\d+)\s*\])?\s*(?:in\s+([\w-]+)\s*:)?", re.I)


def parse_problem(text: str, theory: Theory) -> Problem:
    body = text.strip()
    bound = None
    module = theory.name
    m = _HEADER.match(body)
    if m and m.group(0).strip():
        if m.group(1):
            bound = int(m.group(1))
        if m.group(2):
            module = m.group(2)
        body = body[m.end():]
    body = body.strip()
    if body.endswith(" ."):
        body = body[:-2]
    body = body.strip()
    if not body:
        raise ParseError("at least one equation required")
    pairs = []
    for conj in body.split("/\\"):
        if "=?" not in conj:
            raise ParseError(f"expected 'T =? T' in '{conj.strip()}'")
        lhs, rhs = conj.split("=?", 1)
        pairs.append((parse_term(lhs, theory.sig, theory.vars),
                      parse_term(rhs, theory.sig, theory.vars)))
    for l, r in pairs:
        sig = theory.sig
        if sig.kind_of(sig.least_sort(l)) != sig.kind_of(sig.least_sort(r)):
            raise ParseError(f"sides of {l} =? {r} have different kinds")
    return Problem(module, pairs, bound)


def parse_problem_file(text: str, theory: Theory) -> list:
    """Problem files hold one command per line: ``unify: ...`` or ``variants: T``."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(("***", "---", "#")):
            continue
        if line.startswith("variants:"):
            out.append(("variants", parse_term(line[len("variants:"):], theory.sig, theory.vars)))
        elif line.startswith("unify:"):
            out.append(("unify", parse_problem(line[len("unify:"):], theory)))
        else:
            raise ParseError(f"unrecognized command: {line}")
    return out


_ = tuple_op  # tupling symbol is shared with sigterm
