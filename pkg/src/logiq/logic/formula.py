"""Formula AST, DSL parser and canonical printer for the FO/MSO constraint language.

Grammar (whitespace-insensitive)::

    toplevel := ("free" var+ ";")? formula
    formula := quant | impl
    quant   := ("exists" | "forall") var "." formula
    impl    := or ("->" impl)?
    or      := and ("|" and)*
    and     := not ("&" not)*
    not     := "!" not | atom | quant | "(" formula ")"
    atom    := "adj(" var "," var ")" | var "=" var | var "!=" var
             | var "in" SETVAR | "dist(" var "," var ")<=" INT | "true" | "false"

Vertex variables start with a lowercase letter, set variables with an
uppercase letter.  A quantifier body extends as far to the right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from ..errors import FormatError

__all__ = [
    "Const",
    "Adj",
    "Eq",
    "Neq",
    "In",
    "Dist",
    "Not",
    "And",
    "Or",
    "Implies",
    "Exists",
    "Forall",
    "Formula",
    "parse_formula",
    "to_text",
    "syntactic_radius",
    "vertex_vars",
]


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Adj:
    a: str
    b: str


@dataclass(frozen=True)
class Eq:
    a: str
    b: str


@dataclass(frozen=True)
class Neq:
    a: str
    b: str


@dataclass(frozen=True)
class In:
    var: str
    setvar: str


@dataclass(frozen=True)
class Dist:
    a: str
    b: str
    bound: int


@dataclass(frozen=True)
class Not:
    sub: object


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


ATOMS = (Const, Adj, Eq, Neq, In, Dist)
QUANTS = (Exists, Forall)


def _children(node):
    if isinstance(node, Not):
        return (node.sub,)
    if isinstance(node, (And, Or)):
        return node.parts
    if isinstance(node, Implies):
        return (node.left, node.right)
    if isinstance(node, QUANTS):
        return (node.body,)
    return ()


def _atom_vars(node):
    if isinstance(node, (Adj, Eq, Neq, Dist)):
        return (node.a, node.b)
    if isinstance(node, In):
        return (node.var,)
    return ()


def vertex_vars(node) -> frozenset[str]:
    """Free vertex variables of an AST node."""
    if isinstance(node, ATOMS):
        return frozenset(_atom_vars(node))
    if isinstance(node, QUANTS):
        return vertex_vars(node.body) - {node.var}
    out = frozenset()
    for c in _children(node):
        out |= vertex_vars(c)
    return out


def _set_vars(node, acc):
    if isinstance(node, In):
        acc.add(node.setvar)
    for c in _children(node):
        _set_vars(c, acc)
    return acc


@dataclass(frozen=True)
class Formula:
    """A well-scoped formula with its declared free variables.

    ``free`` lists the free vertex variables in tuple order; ``set_var`` is
    the single free set variable of an MSO constraint (or ``None``).
    """

    body: object
    free: tuple[str, ...] = ()
    set_var: str | None = None

    @property
    def k(self) -> int:
        return len(self.free)

    @property
    def is_mso(self) -> bool:
        return self.set_var is not None

    def with_free(self, free: Iterable[str]) -> "Formula":
        free = tuple(free)
        missing = vertex_vars(self.body) - set(free)
        if missing:
            raise ValueError(f"unbound variable(s) {sorted(missing)}")
        return Formula(self.body, free, self.set_var)

    def __str__(self):
        return to_text(self)


# --- lexer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>->|<=|!=|[()!&|=.,;]))"
)
_KEYWORDS = {"free", "exists", "forall", "in", "adj", "dist", "true", "false"}


def _tokenize(text):
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormatError(f"unexpected character {text[pos]!r}", pos=pos + 1)
        kind = m.lastgroup
        val = m.group(kind)
        toks.append((kind, val, m.start(kind) + 1))
        pos = m.end()
    toks.append(("eof", "", len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, off=0):
        return self.toks[min(self.i + off, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, val):
        tok = self.next()
        if tok[1] != val:
            raise FormatError(f"expected {val!r}, found {tok[1] or 'end of input'!r}", pos=tok[2])
        return tok

    def var(self, kind="vertex"):
        tok = self.next()
        if tok[0] != "name" or tok[1] in _KEYWORDS:
            raise FormatError(f"expected a variable, found {tok[1] or 'end of input'!r}", pos=tok[2])
        is_set = tok[1][0].isupper()
        if kind == "vertex" and is_set:
            raise FormatError(f"set variable {tok[1]} used where a vertex variable is expected", pos=tok[2])
        if kind == "set" and not is_set:
            raise FormatError(f"vertex variable {tok[1]} used where a set variable is expected", pos=tok[2])
        return tok[1]

    def toplevel(self):
        free = None
        if self.peek()[1] == "free":
            self.next()
            free = []
            while self.peek()[1] != ";":
                free.append(self.var())
            self.expect(";")
            if len(set(free)) != len(free):
                raise FormatError("duplicate free variable")
        body = self.formula()
        tok = self.peek()
        if tok[0] != "eof":
            raise FormatError(f"unexpected {tok[1]!r}", pos=tok[2])
        return free, body

    def formula(self):
        if self.peek()[1] in ("exists", "forall"):
            return self.quant()
        return self.impl()

    def quant(self):
        q = self.next()[1]
        v = self.var()
        self.expect(".")
        body = self.formula()
        return Exists(v, body) if q == "exists" else Forall(v, body)

    def impl(self):
        left = self.disj()
        if self.peek()[1] == "->":
            self.next()
            return Implies(left, self.impl_or_quant())
        return left

    def impl_or_quant(self):
        if self.peek()[1] in ("exists", "forall"):
            return self.quant()
        return self.impl()

    def disj(self):
        parts = [self.conj()]
        while self.peek()[1] == "|":
            self.next()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self):
        parts = [self.neg()]
        while self.peek()[1] == "&":
            self.next()
            parts.append(self.neg())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def neg(self):
        tok = self.peek()
        if tok[1] == "!":
            self.next()
            return Not(self.neg())
        if tok[1] in ("exists", "forall"):
            return self.quant()
        if tok[1] == "(":
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok[1] == "true" or tok[1] == "false":
            self.next()
            return Const(tok[1] == "true")
        if tok[1] == "adj":
            self.next()
            self.expect("(")
            a = self.var()
            self.expect(",")
            b = self.var()
            self.expect(")")
            return Adj(a, b)
        if tok[1] == "dist":
            self.next()
            self.expect("(")
            a = self.var()
            self.expect(",")
            b = self.var()
            self.expect(")")
            self.expect("<=")
            num = self.next()
            if num[0] != "num":
                raise FormatError("expected a distance bound", pos=num[2])
            return Dist(a, b, int(num[1]))
        a = self.var()
        op = self.next()
        if op[1] == "=":
            return Eq(a, self.var())
        if op[1] == "!=":
            return Neq(a, self.var())
        if op[1] == "in":
            return In(a, self.var("set"))
        raise FormatError(f"expected '=', '!=' or 'in' after {a}, found {op[1] or 'end of input'!r}", pos=op[2])


def _check_scope(node, bound, positions):
    if isinstance(node, ATOMS):
        for v in _atom_vars(node):
            if v not in bound:
                raise FormatError(f"unbound variable {v}", pos=positions.get(v))
        return
    if isinstance(node, QUANTS):
        _check_scope(node.body, bound | {node.var}, positions)
        return
    for c in _children(node):
        _check_scope(c, bound, positions)


def parse_formula(text: str, free: Iterable[str] | None = None) -> Formula:
    """Parse DSL text into a well-scoped :class:`Formula`.

    ``free`` declares free vertex variables when the text has no ``free``
    prefix (used for block formulas whose variables are declared elsewhere).
    """
    p = _Parser(text)
    declared, body = p.toplevel()
    if declared is None:
        declared = list(free) if free is not None else []
    positions = {}
    for kind, val, pos in p.toks:
        if kind == "name":
            positions.setdefault(val, pos)
    _check_scope(body, frozenset(declared), positions)
    sets = _set_vars(body, set())
    if len(sets) > 1:
        raise FormatError(f"at most one set variable is supported, found {sorted(sets)}")
    return Formula(body, tuple(declared), next(iter(sets), None))


# --- canonical printer -----------------------------------------------------


def _wrap(node):
    s = _node_text(node)
    if isinstance(node, ATOMS) or isinstance(node, Not):
        return s
    return f"({s})"


def _node_text(node) -> str:
    if isinstance(node, Const):
        return "true" if node.value else "false"
    if isinstance(node, Adj):
        return f"adj({node.a},{node.b})"
    if isinstance(node, Eq):
        return f"{node.a}={node.b}"
    if isinstance(node, Neq):
        return f"{node.a}!={node.b}"
    if isinstance(node, In):
        return f"{node.var} in {node.setvar}"
    if isinstance(node, Dist):
        return f"dist({node.a},{node.b})<={node.bound}"
    if isinstance(node, Not):
        return "!" + _wrap(node.sub)
    if isinstance(node, And):
        return " & ".join(_wrap(p) for p in node.parts)
    if isinstance(node, Or):
        return " | ".join(_wrap(p) for p in node.parts)
    if isinstance(node, Implies):
        return f"{_wrap(node.left)} -> {_wrap(node.right)}"
    if isinstance(node, Exists):
        return f"exists {node.var}. {_node_text(node.body)}"
    if isinstance(node, Forall):
        return f"forall {node.var}. {_node_text(node.body)}"
    raise TypeError(f"not a formula node: {node!r}")


def to_text(phi) -> str:
    """Canonical text; ``parse_formula(to_text(phi))`` reproduces ``phi``."""
    if isinstance(phi, Formula):
        head = f"free {' '.join(phi.free)}; " if phi.free else ""
        return head + _node_text(phi.body)
    return _node_text(phi)


# --- syntactic locality ----------------------------------------------------


def _guard_bound(var, guard, bounds):
    """Distance bound for ``var`` implied by one guard atom, or None."""
    if isinstance(guard, (Adj, Eq, Dist)):
        a, b = guard.a, guard.b
        other = b if a == var else a if b == var else None
        if other is None or other == var or other not in bounds:
            return None
        step = 1 if isinstance(guard, Adj) else 0 if isinstance(guard, Eq) else guard.bound
        return bounds[other] + step
    return None


def _best_guard(var, conj, bounds):
    parts = conj.parts if isinstance(conj, And) else (conj,)
    found = [b for b in (_guard_bound(var, p, bounds) for p in parts) if b is not None]
    return min(found) if found else None


def _radius(node, bounds):
    if isinstance(node, Const):
        return 0
    if isinstance(node, (Adj, Eq, Neq)):
        return max(bounds[node.a], bounds[node.b])
    if isinstance(node, In):
        return bounds[node.var]
    if isinstance(node, Dist):
        # every vertex on a path of length <= d between a and b lies within
        # (b_a + b_b + d) / 2 of the free tuple
        return (bounds[node.a] + bounds[node.b] + node.bound) // 2
    if isinstance(node, Exists):
        b = _best_guard(node.var, node.body, bounds)
        if b is None:
            return None
        inner = _radius(node.body, {**bounds, node.var: b})
        return None if inner is None else max(inner, b)
    if isinstance(node, Forall):
        if not isinstance(node.body, Implies):
            return None
        b = _best_guard(node.var, node.body.left, bounds)
        if b is None:
            return None
        inner = _radius(node.body, {**bounds, node.var: b})
        return None if inner is None else max(inner, b)
    out = 0
    for c in _children(node):
        r = _radius(c, bounds)
        if r is None:
            return None
        out = max(out, r)
    return out


def syntactic_radius(phi: Formula) -> int | None:
    """Smallest r for which the syntax certifies r-locality, else ``None``.

    Atoms over free variables are 0-local.  Quantified variables must be
    guarded (``exists y. adj(z,y) & ...``, ``forall y. dist(z,y)<=d -> ...``
    or an equality), which bounds their distance from the free tuple.
    """
    return _radius(phi.body, {v: 0 for v in phi.free})
