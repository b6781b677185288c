"""Compile built-in set predicates over a nice tree decomposition into a structured DNNF.

Each predicate is a small deterministic tree automaton that reads the
decomposition bottom-up.  The membership bit of a vertex is an input at the
INTRODUCE and FORGET steps; automata that use it when the vertex enters the
bag remember it in their state and check it again when the vertex leaves.
The vertex's Boolean variable is placed in the circuit at its FORGET node, so
the vtree mirrors the decomposition tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .dnnf import Builder, Circuit, Vtree
from .errors import CapExceededError, FormatError, ValidationError
from .graph import Graph
from .treedecomp import (
    FORGET, INTRODUCE, LEAF, NiceTreeDecomposition, make_nice, min_fill_decomposition, validate,
)

__all__ = [
    "PREDICATES",
    "CONNECTED_BAG_CAP",
    "parse_predicate",
    "predicate_text",
    "build_automaton",
    "compile_predicate",
    "list_predicates",
    "CompileResult",
]

CONNECTED_BAG_CAP = 8


# --- predicate expressions -------------------------------------------------

PREDICATES = ("indset", "vcover", "domset", "connected", "nonempty", "edge_in", "all", "true")

_PTOK = re.compile(r"\s*(?:(?P<name>[a-z_]+)\s*\(\s*(?P<var>[A-Z][A-Za-z0-9_]*)\s*\)|(?P<kw>true)|(?P<op>[&|()]))")


def parse_predicate(text: str):
    """Parse ``indset(X) & (domset(X) | true)`` into a nested tuple expression.

    Nodes are ``("pred", name)``, ``("and", parts)`` and ``("or", parts)``.
    """
    toks = []
    pos = 0
    setvar = None
    text = text.strip()
    while pos < len(text):
        m = _PTOK.match(text, pos)
        if not m:
            raise FormatError(f"unexpected input {text[pos:pos + 12]!r}", pos=pos + 1)
        if m.group("name"):
            name = m.group("name")
            if name not in PREDICATES:
                raise FormatError(f"unsupported predicate {name!r}", pos=m.start("name") + 1)
            if setvar is not None and m.group("var") != setvar:
                raise FormatError("all predicates must use the same set variable", pos=m.start("var") + 1)
            setvar = m.group("var")
            toks.append(("pred", name))
        elif m.group("kw"):
            toks.append(("pred", "true"))
        else:
            toks.append(("op", m.group("op")))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    toks.append(("eof", None))
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def disj():
        parts = [conj()]
        while peek() == ("op", "|"):
            take()
            parts.append(conj())
        return parts[0] if len(parts) == 1 else ("or", tuple(parts))

    def conj():
        parts = [atom()]
        while peek() == ("op", "&"):
            take()
            parts.append(atom())
        return parts[0] if len(parts) == 1 else ("and", tuple(parts))

    def atom():
        tok = take()
        if tok[0] == "pred":
            return tok
        if tok == ("op", "("):
            inner = disj()
            if take() != ("op", ")"):
                raise FormatError("missing ')'")
            return inner
        raise FormatError(f"unexpected {tok[1]!r} in predicate expression")

    if len(toks) == 1:
        raise FormatError("empty predicate expression")
    expr = disj()
    if peek()[0] != "eof":
        raise FormatError("trailing input in predicate expression")
    return expr


def predicate_text(expr) -> str:
    if expr[0] == "pred":
        return "true" if expr[1] == "true" else f"{expr[1]}(X)"
    sep = " & " if expr[0] == "and" else " | "
    return sep.join(p if q[0] == "pred" else f"({p})" for q, p in ((q, predicate_text(q)) for q in expr[1]))


# --- automata --------------------------------------------------------------
#
# introduce(state, v, bit, bag, g) -> state or None   (bag includes v)
# forget(state, v, bit, bag, g)    -> state or None   (bag excludes v)
# join(s1, s2)                     -> state or None
# accept(state)                    -> bool


class _True:
    name = "true"

    def leaf(self):
        return ()

    def introduce(self, s, v, bit, bag, g):
        return s

    def forget(self, s, v, bit, bag, g):
        return s

    def join(self, a, b):
        return a

    def accept(self, s):
        return True


class _All(_True):
    name = "all"

    def forget(self, s, v, bit, bag, g):
        return s if bit else None


class _NonEmpty:
    name = "nonempty"

    def leaf(self):
        return False

    def introduce(self, s, v, bit, bag, g):
        return s

    def forget(self, s, v, bit, bag, g):
        return s or bit

    def join(self, a, b):
        return a or b

    def accept(self, s):
        return s


class _Masked:
    """Automata whose state starts with the set of bag vertices in X."""

    def _mask_forget(self, mask, v, bit):
        if (v in mask) != bit:
            return None
        return mask - {v}


class _IndSet(_Masked):
    name = "indset"

    def leaf(self):
        return frozenset()

    def introduce(self, s, v, bit, bag, g):
        if bit:
            if s & g.neighbor_set(v):
                return None
            return s | {v}
        return s

    def forget(self, s, v, bit, bag, g):
        return self._mask_forget(s, v, bit)

    def join(self, a, b):
        return a if a == b else None

    def accept(self, s):
        return True


class _VCover(_Masked):
    name = "vcover"

    def leaf(self):
        return frozenset()

    def introduce(self, s, v, bit, bag, g):
        if bit:
            return s | {v}
        nb = g.neighbor_set(v)
        for u in bag:
            if u != v and u in nb and u not in s:
                return None
        return s

    def forget(self, s, v, bit, bag, g):
        return self._mask_forget(s, v, bit)

    def join(self, a, b):
        return a if a == b else None

    def accept(self, s):
        return True


class _EdgeIn(_Masked):
    name = "edge_in"

    def leaf(self):
        return (frozenset(), False)

    def introduce(self, s, v, bit, bag, g):
        mask, found = s
        if bit:
            return (mask | {v}, found or bool(mask & g.neighbor_set(v)))
        return s

    def forget(self, s, v, bit, bag, g):
        mask = self._mask_forget(s[0], v, bit)
        return None if mask is None else (mask, s[1])

    def join(self, a, b):
        if a[0] != b[0]:
            return None
        return (a[0], a[1] or b[1])

    def accept(self, s):
        return s[1]


class _DomSet(_Masked):
    """State: (bag vertices in X, bag vertices outside X already dominated)."""

    name = "domset"

    def leaf(self):
        return (frozenset(), frozenset())

    def introduce(self, s, v, bit, bag, g):
        mask, dom = s
        nb = g.neighbor_set(v)
        if bit:
            return (mask | {v}, dom | {u for u in bag if u in nb and u not in mask})
        if mask & nb:
            return (mask, dom | {v})
        return s

    def forget(self, s, v, bit, bag, g):
        mask, dom = s
        new_mask = self._mask_forget(mask, v, bit)
        if new_mask is None:
            return None
        if not bit and v not in dom:
            return None
        return (new_mask, dom - {v})

    def join(self, a, b):
        if a[0] != b[0]:
            return None
        return (a[0], a[1] | b[1])

    def accept(self, s):
        return True


class _Connected:
    """State: (partition of bag vertices in X into components, closed flag).

    ``closed`` means a whole component has already left the bag, so no
    further vertex of X may appear.
    """

    name = "connected"

    def leaf(self):
        return (frozenset(), False)

    def introduce(self, s, v, bit, bag, g):
        parts, closed = s
        if not bit:
            return s
        if closed:
            return None
        nb = g.neighbor_set(v)
        merged = {v}
        rest = []
        for comp in parts:
            if comp & nb:
                merged |= comp
            else:
                rest.append(comp)
        return (frozenset(rest) | {frozenset(merged)}, False)

    def forget(self, s, v, bit, bag, g):
        parts, closed = s
        comp = next((c for c in parts if v in c), None)
        if (comp is not None) != bit:
            return None
        if comp is None:
            return s
        others = parts - {comp}
        if len(comp) > 1:
            return (others | {comp - {v}}, closed)
        if others:
            return None
        return (frozenset(), True)

    def join(self, a, b):
        pa, ca = a
        pb, cb = b
        va = frozenset().union(*pa) if pa else frozenset()
        vb = frozenset().union(*pb) if pb else frozenset()
        if va != vb:
            return None
        if ca and cb:
            return None
        comps = [set(c) for c in pa]
        for c in pb:
            hit = [x for x in comps if x & c]
            new = set(c)
            for x in hit:
                new |= x
                comps.remove(x)
            comps.append(new)
        return (frozenset(frozenset(c) for c in comps), ca or cb)

    def accept(self, s):
        return True


_AUTOMATA = {
    "true": _True,
    "all": _All,
    "nonempty": _NonEmpty,
    "indset": _IndSet,
    "vcover": _VCover,
    "edge_in": _EdgeIn,
    "domset": _DomSet,
    "connected": _Connected,
}


class _Product:
    """Conjunction: run every part on the same input bits."""

    def __init__(self, parts):
        self.parts = parts

    def leaf(self):
        return tuple(p.leaf() for p in self.parts)

    def _step(self, fn_name, s, *args):
        out = []
        for p, x in zip(self.parts, s):
            y = getattr(p, fn_name)(x, *args)
            if y is None:
                return None
            out.append(y)
        return tuple(out)

    def introduce(self, s, v, bit, bag, g):
        return self._step("introduce", s, v, bit, bag, g)

    def forget(self, s, v, bit, bag, g):
        return self._step("forget", s, v, bit, bag, g)

    def join(self, a, b):
        out = []
        for p, x, y in zip(self.parts, a, b):
            z = p.join(x, y)
            if z is None:
                return None
            out.append(z)
        return tuple(out)

    def accept(self, s):
        return all(p.accept(x) for p, x in zip(self.parts, s))


class _Union:
    """Disjunction: parts run side by side; a rejected part stays dead (None)."""

    def __init__(self, parts):
        self.parts = parts

    def leaf(self):
        return tuple(p.leaf() for p in self.parts)

    def _live(self, out):
        out = tuple(out)
        return out if any(x is not None for x in out) else None

    def introduce(self, s, v, bit, bag, g):
        return self._live(None if x is None else p.introduce(x, v, bit, bag, g) for p, x in zip(self.parts, s))

    def forget(self, s, v, bit, bag, g):
        return self._live(None if x is None else p.forget(x, v, bit, bag, g) for p, x in zip(self.parts, s))

    def join(self, a, b):
        return self._live(
            None if x is None or y is None else p.join(x, y) for p, x, y in zip(self.parts, a, b)
        )

    def accept(self, s):
        return any(x is not None and p.accept(x) for p, x in zip(self.parts, s))


def build_automaton(expr):
    kind = expr[0]
    if kind == "pred":
        try:
            return _AUTOMATA[expr[1]]()
        except KeyError:
            raise ValueError(f"unsupported predicate {expr[1]!r}") from None
    parts = [build_automaton(e) for e in expr[1]]
    return _Product(parts) if kind == "and" else _Union(parts)


def _uses(expr, name):
    if expr[0] == "pred":
        return expr[1] == name
    return any(_uses(e, name) for e in expr[1])


# --- catalog ---------------------------------------------------------------


def _bell(m):
    row = [1]
    for _ in range(m):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _connected_states(b):
    return sum(math.comb(b, j) * _bell(j) for j in range(b + 1)) + 1


_CATALOG = {
    "indset": ("X is an independent set", "2^b", lambda b: 2 ** b),
    "vcover": ("X covers every edge", "2^b", lambda b: 2 ** b),
    "domset": ("every vertex is in X or adjacent to X", "3^b", lambda b: 3 ** b),
    "connected": (
        "X induces a connected subgraph (the empty set counts as connected)",
        "sum_j C(b,j) Bell(j) + 1",
        _connected_states,
    ),
    "nonempty": ("X is not empty", "2", lambda b: 2),
    "edge_in": ("X contains both endpoints of some edge", "2^(b+1)", lambda b: 2 ** (b + 1)),
    "all": ("X is the whole vertex set", "1", lambda b: 1),
    "true": ("no constraint", "1", lambda b: 1),
}


def list_predicates() -> list[dict]:
    """Machine-readable catalog: id, description, state-count formula in bag size b."""
    return [
        {"id": name, "description": desc, "states": formula}
        for name, (desc, formula, _) in sorted(_CATALOG.items())
    ]


def state_bound(expr, bag_size: int) -> int:
    """Upper bound on DP states per bag of the given size."""
    if expr[0] == "pred":
        return _CATALOG[expr[1]][2](bag_size)
    out = 1
    for e in expr[1]:
        out *= state_bound(e, bag_size)
    return out


# --- compilation -----------------------------------------------------------


@dataclass(frozen=True)
class CompileResult:
    vtree: Vtree
    circuit: Circuit
    max_states: int  # most DP states seen at one decomposition node
    decomposition_width: int


def _vtree_for(ntd: NiceTreeDecomposition):
    """Vtree mirroring the decomposition; returns (vtree, node -> vtree id or None)."""
    left, right, var = [], [], []
    at = {}

    def new(l, r, x):
        left.append(l)
        right.append(r)
        var.append(x)
        return len(var) - 1

    for i, nd in enumerate(ntd.nodes):
        if nd.kind == LEAF:
            at[i] = None
        elif nd.kind == INTRODUCE:
            at[i] = at[nd.children[0]]
        elif nd.kind == FORGET:
            below = at[nd.children[0]]
            leaf = new(-1, -1, nd.vertex)
            at[i] = leaf if below is None else new(below, leaf, -1)
        else:
            a, b = (at[c] for c in nd.children)
            at[i] = a if b is None else b if a is None else new(a, b, -1)
    return Vtree(left, right, var), at


def compile_predicate(
    g: Graph,
    expr,
    ntd: NiceTreeDecomposition | None = None,
    state_cap: int = 1 << 16,
) -> CompileResult:
    """Structured DNNF for ``{U : g satisfies expr(U)}``.

    ``expr`` is predicate text or a parsed expression.  Without ``ntd`` a
    min-fill decomposition is used.
    """
    if isinstance(expr, str):
        expr = parse_predicate(expr)
    if g.n == 0:
        raise ValueError("cannot compile over an empty vertex set")
    if ntd is None:
        ntd = make_nice(min_fill_decomposition(g), g)
    else:
        errs = ntd.check()
        plain = ntd.to_plain()

        errs += [str(v) for v in validate(g, plain)]
        if errs:
            raise ValidationError("invalid nice tree decomposition", errs)
    if _uses(expr, "connected") and ntd.width + 1 > CONNECTED_BAG_CAP:
        raise CapExceededError(
            f"connected(X) needs bags of at most {CONNECTED_BAG_CAP} vertices, got {ntd.width + 1}"
        )
    auto = build_automaton(expr)
    vt, at = _vtree_for(ntd)
    b = Builder(vt)
    TRUE = -1  # constant true while no variable has been placed yet
    tables = {}
    max_states = 1
    for i, nd in enumerate(ntd.nodes):
        if nd.kind == LEAF:
            table = {auto.leaf(): TRUE}
        elif nd.kind == INTRODUCE:
            child = tables.pop(nd.children[0])
            groups = {}
            for s, gate in child.items():
                for bit in (False, True):
                    s2 = auto.introduce(s, nd.vertex, bit, nd.bag, g)
                    if s2 is not None:
                        groups.setdefault(s2, set()).add(gate)
            table = {}
            for s2, gates in groups.items():
                table[s2] = TRUE if TRUE in gates else b.or_(at[i], gates)
        elif nd.kind == FORGET:
            child = tables.pop(nd.children[0])
            v = nd.vertex
            leaf = vt.leaf_of(v)
            groups = {}
            for s, gate in child.items():
                for bit in (False, True):
                    s2 = auto.forget(s, v, bit, nd.bag, g)
                    if s2 is not None:
                        groups.setdefault(s2, {}).setdefault(gate, [False, False])[bit] = True
            table = {}
            for s2, by_gate in groups.items():
                terms = []
                for gate, (t0, t1) in sorted(by_gate.items()):
                    lg = b.leaf_gate(leaf, t0, t1)
                    terms.append(lg if gate == TRUE else b.and_(at[i], gate, lg))
                table[s2] = b.or_(at[i], terms)
        else:
            c1, c2 = nd.children
            t1, t2 = tables.pop(c1), tables.pop(c2)
            # s -> {gate1 -> set of gate2}; the inner OR keeps fan-in per state
            groups = {}
            for s1, g1 in t1.items():
                for s2, g2 in t2.items():
                    s = auto.join(s1, s2)
                    if s is not None:
                        groups.setdefault(s, {}).setdefault(g1, set()).add(g2)
            a1, a2 = at[c1], at[c2]
            table = {}
            for s, by_g1 in groups.items():
                terms = []
                for g1, g2s in sorted(by_g1.items()):
                    if a2 is None:
                        terms.append(g1)
                        continue
                    inner = b.or_(a2, g2s)
                    terms.append(inner if a1 is None else b.and_(at[i], g1, inner))
                if a1 is None and a2 is None:
                    table[s] = TRUE
                else:
                    table[s] = b.or_(at[i], terms)
        if len(table) > state_cap:
            raise CapExceededError(f"DP state count {len(table)} exceeds cap {state_cap}")
        max_states = max(max_states, len(table))
        tables[i] = table
    final = tables[ntd.root]
    accepting = [gate for s, gate in final.items() if auto.accept(s)]
    root = b.or_(vt.root, accepting)
    circuit = b.circuit(root)
    return CompileResult(vt, circuit, max_states, ntd.width)
