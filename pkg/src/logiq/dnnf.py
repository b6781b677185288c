"""Structured DNNF circuits over vtrees.

A circuit is a list of gates in topological order (children before parents).
Gates carry an optional vtree node (``vnode``).  Circuits produced by the
compiler, by :func:`normalize`, :func:`apply` and :func:`split` are in
*normal form*:

* an AND gate at internal node ``v`` has exactly two children, the first at
  ``v.left`` and the second at ``v.right``;
* an OR gate at ``v`` has children at ``v`` (ANDs, or nested ORs);
* gates at a leaf are a single literal or ``T`` (true for either value);
* ``T`` over an internal node is spelled out as an AND chain of leaf ``T``s;
* ``F`` only appears as the root of an unsatisfiable circuit.

Every non-``F`` normal-form gate is satisfiable, and every vtree node carries
at least one gate, so a split along any vtree edge is well defined.
"""

from __future__ import annotations

import random as _random
import re
from dataclasses import dataclass
from itertools import product as _product
from typing import Iterable, NamedTuple

from .errors import CapExceededError, FormatError, ValidationError

__all__ = [
    "Vtree",
    "Gate",
    "Circuit",
    "SeparatorSplit",
    "Builder",
    "normalize",
    "evaluate",
    "width",
    "leaf_separator",
    "split",
    "enumerate_models",
    "apply",
    "check_structured",
    "is_normal",
    "is_satisfiable",
    "dump_circuit",
    "load_circuit",
    "example_circuit",
    "true_circuit",
    "false_circuit",
    "literal_circuit",
]


# --- vtrees ----------------------------------------------------------------


class Vtree:
    """Rooted full binary tree whose leaves are variables (vertex ids).

    Nodes are ``0..size-1`` with every child id smaller than its parent id,
    so the root is ``size - 1``.
    """

    __slots__ = ("left", "right", "var", "parent", "root", "count", "_leaf_of", "_leaves")

    def __init__(self, left, right, var):
        size = len(var)
        if not (len(left) == len(right) == size) or size == 0:
            raise ValueError("vtree arrays must be nonempty and of equal length")
        parent = [-1] * size
        for v in range(size):
            l, r = left[v], right[v]
            if (l < 0) != (r < 0):
                raise ValueError(f"vtree node {v} has exactly one child")
            if l < 0:
                if var[v] is None or var[v] < 0:
                    raise ValueError(f"vtree leaf {v} has no variable")
                continue
            if not (0 <= l < v and 0 <= r < v):
                raise ValueError(f"vtree node {v}: children must precede their parent")
            for c in (l, r):
                if parent[c] != -1:
                    raise ValueError(f"vtree node {c} has two parents")
                parent[c] = v
        roots = [v for v in range(size) if parent[v] == -1]
        if roots != [size - 1]:
            raise ValueError("vtree must be a single tree rooted at the last node")
        count = [0] * size
        leaf_of = {}
        for v in range(size):
            if left[v] < 0:
                if var[v] in leaf_of:
                    raise ValueError(f"variable {var[v]} labels two leaves")
                leaf_of[var[v]] = v
                count[v] = 1
            else:
                count[v] = count[left[v]] + count[right[v]]
        self.left = tuple(left)
        self.right = tuple(right)
        self.var = tuple(var[v] if left[v] < 0 else -1 for v in range(size))
        self.parent = tuple(parent)
        self.root = size - 1
        self.count = tuple(count)
        self._leaf_of = leaf_of
        self._leaves = {}

    # construction helpers
    @classmethod
    def from_nested(cls, nested) -> "Vtree":
        """Build from nested pairs, e.g. ``((0, 1), (2, 3))``."""
        left, right, var = [], [], []
        stack = [(nested, False)]
        out = []
        while stack:
            obj, done = stack.pop()
            if isinstance(obj, int):
                left.append(-1)
                right.append(-1)
                var.append(obj)
                out.append(len(var) - 1)
            elif done:
                r = out.pop()
                l = out.pop()
                left.append(l)
                right.append(r)
                var.append(-1)
                out.append(len(var) - 1)
            else:
                if len(obj) != 2:
                    raise ValueError("vtree internal nodes need exactly two children")
                stack.append((obj, True))
                stack.append((obj[1], False))
                stack.append((obj[0], False))
        return cls(left, right, var)

    @classmethod
    def right_linear(cls, variables) -> "Vtree":
        variables = list(variables)
        nested = variables[-1]
        for v in reversed(variables[:-1]):
            nested = (v, nested)
        return cls.from_nested(nested)

    @classmethod
    def left_linear(cls, variables) -> "Vtree":
        variables = list(variables)
        nested = variables[0]
        for v in variables[1:]:
            nested = (nested, v)
        return cls.from_nested(nested)

    @classmethod
    def balanced(cls, variables) -> "Vtree":
        variables = list(variables)

        def build(lo, hi):
            if hi - lo == 1:
                return variables[lo]
            mid = (lo + hi) // 2
            return (build(lo, mid), build(mid, hi))

        return cls.from_nested(build(0, len(variables)))

    @classmethod
    def random(cls, leaves: int, rng: _random.Random | None = None) -> "Vtree":
        """Random full binary tree obtained by repeatedly splitting a random leaf."""
        rng = rng or _random.Random()
        # grow top-down as child lists, then renumber children-first
        kids = [None]
        frontier = [0]
        while len(frontier) < leaves:
            i = rng.randrange(len(frontier))
            node = frontier[i]
            a, b = len(kids), len(kids) + 1
            kids.append(None)
            kids.append(None)
            kids[node] = (a, b)
            frontier[i] = a
            frontier.append(b)
        order = []
        stack = [0]
        while stack:
            x = stack.pop()
            order.append(x)
            if kids[x] is not None:
                stack.extend(kids[x])
        order.reverse()  # children before parents
        new = {x: i for i, x in enumerate(order)}
        left, right, var = [], [], []
        label = 0
        # label leaves left to right
        leaf_label = {}
        stack = [0]
        while stack:
            x = stack.pop()
            if kids[x] is None:
                leaf_label[x] = label
                label += 1
            else:
                stack.append(kids[x][1])
                stack.append(kids[x][0])
        for x in order:
            if kids[x] is None:
                left.append(-1)
                right.append(-1)
                var.append(leaf_label[x])
            else:
                left.append(new[kids[x][0]])
                right.append(new[kids[x][1]])
                var.append(-1)
        return cls(left, right, var)

    # queries
    @property
    def size(self) -> int:
        return len(self.var)

    def is_leaf(self, v: int) -> bool:
        return self.left[v] < 0

    def leaf_of(self, var: int) -> int:
        return self._leaf_of[var]

    @property
    def variables(self) -> frozenset:
        return frozenset(self._leaf_of)

    def leaves(self, v: int | None = None) -> tuple:
        """Variables under ``v`` (default root), left to right."""
        v = self.root if v is None else v
        got = self._leaves.get(v)
        if got is None:
            out = []
            stack = [v]
            while stack:
                x = stack.pop()
                if self.left[x] < 0:
                    out.append(self.var[x])
                else:
                    stack.append(self.right[x])
                    stack.append(self.left[x])
            got = tuple(out)
            self._leaves[v] = got
        return got

    def preorder(self, v: int | None = None) -> list[int]:
        out = []
        stack = [self.root if v is None else v]
        while stack:
            x = stack.pop()
            out.append(x)
            if self.left[x] >= 0:
                stack.append(self.right[x])
                stack.append(self.left[x])
        return out

    def depths(self) -> list[int]:
        depth = [0] * self.size
        for v in reversed(range(self.size)):
            if self.left[v] >= 0:
                depth[self.left[v]] = depth[self.right[v]] = depth[v] + 1
        return depth

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when ``a`` is ``b`` or above it."""
        while b != -1 and b <= a:
            if b == a:
                return True
            b = self.parent[b]
        return False

    def to_nested(self, v: int | None = None):
        v = self.root if v is None else v
        done = {}
        for x in range(v + 1):
            if self.left[x] < 0:
                done[x] = self.var[x]
            elif self.left[x] in done and self.right[x] in done:
                done[x] = (done[self.left[x]], done[self.right[x]])
        return done[v]

    def to_text(self) -> str:
        """Parenthesized 1-based leaf labels, e.g. ``((1 2) (3 4))``."""
        parts = {}
        for x in range(self.size):
            if self.left[x] < 0:
                parts[x] = str(self.var[x] + 1)
            else:
                parts[x] = f"({parts[self.left[x]]} {parts[self.right[x]]})"
        return parts[self.root]

    @classmethod
    def from_text(cls, text: str) -> "Vtree":
        toks = re.findall(r"\(|\)|-?\d+", text)
        stack = [[]]
        for tok in toks:
            if tok == "(":
                stack.append([])
            elif tok == ")":
                items = stack.pop()
                if len(items) != 2 or not stack:
                    raise FormatError("vtree groups must have exactly two members")
                stack[-1].append(tuple(items))
            else:
                stack[-1].append(int(tok) - 1)
        if len(stack) != 1 or len(stack[0]) != 1:
            raise FormatError("unbalanced vtree text")
        return cls.from_nested(stack[0][0])

    def subtree(self, t: int) -> tuple["Vtree", dict[int, int]]:
        """The subtree under ``t`` and the old-to-new node id map."""
        nodes = sorted(self.preorder(t))
        new = {x: i for i, x in enumerate(nodes)}
        left = [new[self.left[x]] if self.left[x] >= 0 else -1 for x in nodes]
        right = [new[self.right[x]] if self.right[x] >= 0 else -1 for x in nodes]
        var = [self.var[x] for x in nodes]
        return Vtree(left, right, var), new

    def contract(self, t: int) -> tuple["Vtree", dict[int, int]]:
        """Drop the subtree under ``t``; its sibling takes the parent's place.

        The map sends surviving old ids to new ids and the parent ``s`` to the
        new id of the sibling.
        """
        s = self.parent[t]
        if s < 0:
            raise ValueError("cannot contract the root")
        c = self.left[s] if self.right[s] == t else self.right[s]
        drop = set(self.preorder(t)) | {s}
        keep = [x for x in range(self.size) if x not in drop]
        new = {x: i for i, x in enumerate(keep)}

        def ref(x):
            return new[c] if x == s else new[x]

        left = [ref(self.left[x]) if self.left[x] >= 0 else -1 for x in keep]
        right = [ref(self.right[x]) if self.right[x] >= 0 else -1 for x in keep]
        var = [self.var[x] for x in keep]
        # the sibling may now sit after its new parent in id order; renumber
        tree_new, renum = _renumber(left, right, var)
        out = {x: renum[new[x]] for x in keep}
        out[s] = renum[new[c]]
        return tree_new, out

    def __eq__(self, other):
        return isinstance(other, Vtree) and self.to_nested() == other.to_nested()

    def __hash__(self):
        return hash(self.to_text())

    def __repr__(self):
        return f"Vtree({self.to_text()})"


def _renumber(left, right, var):
    """Re-emit a tree given by arrays so children precede parents."""
    size = len(var)
    has_parent = [False] * size
    for x in range(size):
        if left[x] >= 0:
            has_parent[left[x]] = has_parent[right[x]] = True
    root = next(x for x in range(size) if not has_parent[x])
    order = []
    stack = [root]
    while stack:
        x = stack.pop()
        order.append(x)
        if left[x] >= 0:
            stack.append(left[x])
            stack.append(right[x])
    order.reverse()
    # stable: postorder by (left, right) so ids grow bottom-up
    post = []
    stack = [(root, False)]
    while stack:
        x, done = stack.pop()
        if done or left[x] < 0:
            post.append(x)
        else:
            stack.append((x, True))
            stack.append((right[x], False))
            stack.append((left[x], False))
    new = {x: i for i, x in enumerate(post)}
    L = [new[left[x]] if left[x] >= 0 else -1 for x in post]
    R = [new[right[x]] if right[x] >= 0 else -1 for x in post]
    V = [var[x] for x in post]
    return Vtree(L, R, V), new


# --- gates and circuits ----------------------------------------------------


class Gate(NamedTuple):
    kind: str  # "T", "F", "L", "A", "O"
    children: tuple = ()
    var: int | None = None
    positive: bool = True
    vnode: int | None = None


@dataclass(frozen=True)
class Circuit:
    vtree: Vtree
    gates: tuple
    root: int

    @property
    def variables(self) -> frozenset:
        return self.vtree.variables

    @property
    def root_gate(self) -> Gate:
        return self.gates[self.root]

    def is_false(self) -> bool:
        return self.gates[self.root].kind == "F"

    def reachable(self) -> list[int]:
        seen = {self.root}
        stack = [self.root]
        while stack:
            for c in self.gates[stack.pop()].children:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return sorted(seen)

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return f"Circuit(gates={len(self.gates)}, vtree={self.vtree.to_text()})"


class Builder:
    """Hash-consing constructor for normal-form gates over one vtree."""

    def __init__(self, vtree: Vtree):
        self.vtree = vtree
        self.gates: list[Gate] = []
        self._index = {}
        self._top = {}

    def _add(self, key, gate):
        got = self._index.get(key)
        if got is None:
            got = len(self.gates)
            self.gates.append(gate)
            self._index[key] = got
        return got

    def false(self) -> int:
        return self._add(("F",), Gate("F"))

    def top(self, v: int) -> int:
        got = self._top.get(v)
        if got is None:
            vt = self.vtree
            if vt.is_leaf(v):
                got = self._add(("T", v), Gate("T", vnode=v))
            else:
                got = self.and_(v, self.top(vt.left[v]), self.top(vt.right[v]))
            self._top[v] = got
        return got

    def lit(self, var: int, positive: bool = True) -> int:
        v = self.vtree.leaf_of(var)
        return self._add(("L", var, positive), Gate("L", (), var, positive, v))

    def leaf_gate(self, v: int, when0: bool, when1: bool) -> int:
        """The gate at leaf ``v`` with the given truth table."""
        var = self.vtree.var[v]
        if when0 and when1:
            return self.top(v)
        if when1:
            return self.lit(var, True)
        if when0:
            return self.lit(var, False)
        return self.false()

    def and_(self, v: int, a: int, b: int) -> int:
        ga, gb = self.gates[a], self.gates[b]
        if ga.kind == "F" or gb.kind == "F":
            return self.false()
        return self._add(("A", v, a, b), Gate("A", (a, b), vnode=v))

    def or_(self, v: int, children: Iterable[int]) -> int:
        kids = sorted({c for c in children if self.gates[c].kind != "F"})
        if not kids:
            return self.false()
        if self.vtree.is_leaf(v):
            t0 = t1 = False
            for c in kids:
                g = self.gates[c]
                if g.kind == "T":
                    return self.top(v)
                if g.positive:
                    t1 = True
                else:
                    t0 = True
            return self.leaf_gate(v, t0, t1)
        if len(kids) == 1:
            return kids[0]
        return self._add(("O", v, tuple(kids)), Gate("O", tuple(kids), vnode=v))

    def circuit(self, root: int) -> Circuit:
        return _compact(self.vtree, self.gates, root)


def _compact(vtree, gates, root) -> Circuit:
    """Keep only gates reachable from ``root``, renumbered in topological order."""
    seen = set()
    stack = [root]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(gates[x].children)
    order = sorted(seen)
    new = {x: i for i, x in enumerate(order)}
    out = [gates[x]._replace(children=tuple(new[c] for c in gates[x].children)) for x in order]
    return Circuit(vtree, tuple(out), new[root])


def true_circuit(vtree: Vtree) -> Circuit:
    b = Builder(vtree)
    return b.circuit(b.top(vtree.root))


def false_circuit(vtree: Vtree) -> Circuit:
    b = Builder(vtree)
    return b.circuit(b.false())


def literal_circuit(vtree: Vtree, var: int, positive: bool = True) -> Circuit:
    return normalize(Circuit(vtree, (Gate("L", (), var, positive),), 0))


# --- supports and structuredness -------------------------------------------


def _supports(c: Circuit) -> list[frozenset]:
    sup = []
    for g in c.gates:
        if g.kind == "L":
            sup.append(frozenset((g.var,)))
        elif g.kind in ("T", "F"):
            sup.append(frozenset())
        else:
            s = frozenset()
            for ch in g.children:
                s |= sup[ch]
            sup.append(s)
    return sup


def _lca_split(vt: Vtree, a: frozenset, b: frozenset):
    """Vtree node separating supports ``a`` (left) and ``b`` (right), else None."""
    both = a | b
    v = vt.leaf_of(next(iter(both)))
    while not set(both) <= set(vt.leaves(v)):
        v = vt.parent[v]
    if vt.is_leaf(v):
        return None
    L = set(vt.leaves(vt.left[v]))
    R = set(vt.leaves(vt.right[v]))
    if a <= L and b <= R:
        return v, False
    if a <= R and b <= L:
        return v, True
    return None


def check_structured(c: Circuit) -> list[str]:
    """Decomposability and vtree-respect violations (empty = structured)."""
    out = []
    sup = _supports(c)
    universe = c.variables
    for i, g in enumerate(c.gates):
        if any(ch >= i for ch in g.children):
            out.append(f"gate {i}: child does not precede parent")
        if g.kind == "L" and g.var not in universe:
            out.append(f"gate {i}: variable {g.var} not in the vtree")
        if g.kind == "A":
            if len(g.children) != 2:
                out.append(f"gate {i}: AND must be binary")
                continue
            a, b = (sup[ch] for ch in g.children)
            if a & b:
                out.append(f"gate {i}: AND inputs share variables {sorted(a & b)}")
                continue
            if a and b and _lca_split(c.vtree, a, b) is None:
                out.append(f"gate {i}: AND split does not match any vtree node")
            if g.vnode is not None and a and b:
                vt = c.vtree
                v = g.vnode
                if vt.is_leaf(v) or not (
                    a <= set(vt.leaves(vt.left[v])) and b <= set(vt.leaves(vt.right[v]))
                ):
                    out.append(f"gate {i}: AND inputs do not match its vtree node {v}")
    return out


def _const_value(c: Circuit, i: int, sup) -> bool:
    """Value of a gate whose support is empty."""
    vals = {}
    for x in range(i + 1):
        g = c.gates[x]
        if sup[x]:
            continue
        if g.kind in ("T", "F"):
            vals[x] = g.kind == "T"
        elif g.kind == "A":
            vals[x] = all(vals[ch] for ch in g.children)
        elif g.kind == "O":
            vals[x] = any(vals[ch] for ch in g.children)
    return vals[i]


def normalize(c: Circuit) -> Circuit:
    """Re-express any structured circuit in normal form over the same vtree."""
    problems = check_structured(c)
    if problems:
        raise ValidationError("circuit does not respect its vtree", problems)
    vt = c.vtree
    sup = _supports(c)
    b = Builder(vt)
    memo = {}
    leaves_of = {v: frozenset(vt.leaves(v)) for v in range(vt.size)}

    def norm(i, v):
        key = (i, v)
        got = memo.get(key)
        if got is not None:
            return got
        g = c.gates[i]
        if not sup[i]:
            got = b.top(v) if _const_value(c, i, sup) else b.false()
        elif g.kind == "L":
            if vt.is_leaf(v):
                got = b.lit(g.var, g.positive)
            elif g.var in leaves_of[vt.left[v]]:
                got = b.and_(v, norm(i, vt.left[v]), b.top(vt.right[v]))
            else:
                got = b.and_(v, b.top(vt.left[v]), norm(i, vt.right[v]))
        elif g.kind == "O":
            got = b.or_(v, [norm(ch, v) for ch in g.children])
        else:
            x, y = g.children
            if not sup[x] or not sup[y]:
                const, rest = (x, y) if not sup[x] else (y, x)
                got = norm(rest, v) if _const_value(c, const, sup) else b.false()
            else:
                w, swapped = _lca_split(vt, sup[x], sup[y])
                if w == v:
                    lx, rx = (y, x) if swapped else (x, y)
                    got = b.and_(v, norm(lx, vt.left[v]), norm(rx, vt.right[v]))
                elif sup[i] <= leaves_of[vt.left[v]]:
                    got = b.and_(v, norm(i, vt.left[v]), b.top(vt.right[v]))
                else:
                    got = b.and_(v, b.top(vt.left[v]), norm(i, vt.right[v]))
        memo[key] = got
        return got

    return b.circuit(_norm_iter(norm, c.root, vt.root))


def _norm_iter(fn, i, v):
    # deep circuits can exceed the default recursion limit
    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    try:
        return fn(i, v)
    finally:
        sys.setrecursionlimit(old)


def is_normal(c: Circuit) -> bool:
    vt = c.vtree
    if c.is_false():
        return len(c.gates) == 1
    if c.gates[c.root].vnode != vt.root:
        return False
    for g in c.gates:
        v = g.vnode
        if g.kind == "F" or v is None:
            return False
        kids = [c.gates[ch] for ch in g.children]
        if g.kind == "A":
            if vt.is_leaf(v) or len(kids) != 2:
                return False
            if kids[0].vnode != vt.left[v] or kids[1].vnode != vt.right[v]:
                return False
        elif g.kind == "O":
            if any(k.vnode != v for k in kids) or len(kids) < 2:
                return False
        elif g.kind == "L":
            if vt.var[v] != g.var:
                return False
        elif not vt.is_leaf(v):
            return False
    return True


# --- evaluation ------------------------------------------------------------


def evaluate(c: Circuit, U: Iterable[int]) -> bool:
    """Circuit value under the indicator assignment of ``U``."""
    U = frozenset(U)
    stray = U - c.variables
    if stray:
        raise ValueError(f"unknown variable(s) {sorted(stray)}")
    val = []
    for g in c.gates:
        k = g.kind
        if k == "T":
            val.append(True)
        elif k == "F":
            val.append(False)
        elif k == "L":
            val.append((g.var in U) == g.positive)
        elif k == "A":
            val.append(all(val[ch] for ch in g.children))
        else:
            val.append(any(val[ch] for ch in g.children))
    return val[c.root]


def width(c: Circuit) -> int:
    """Maximum OR fan-in; circuits without OR gates have width 1."""
    return max([len(g.children) for g in c.gates if g.kind == "O"] + [1])


def is_satisfiable(c: Circuit) -> bool:
    """One bottom-up sweep (constant time for normal-form circuits)."""
    sat = []
    for g in c.gates:
        if g.kind == "F":
            sat.append(False)
        elif g.kind in ("T", "L"):
            sat.append(True)
        elif g.kind == "A":
            sat.append(all(sat[ch] for ch in g.children))
        else:
            sat.append(any(sat[ch] for ch in g.children))
    return sat[c.root]


def enumerate_models(c: Circuit, cap: int = 1 << 16) -> set[frozenset]:
    """All models as vertex sets; raises CapExceededError past ``cap`` sets."""
    order = sorted(c.variables)
    bit = {v: 1 << i for i, v in enumerate(order)}
    full = (1 << len(order)) - 1

    def expand(masks, scope, target):
        missing = [b for b in (1 << i for i in range(len(order))) if target & b and not scope & b]
        if not missing:
            return masks
        out = set()
        for m in masks:
            for choice in _product((0, 1), repeat=len(missing)):
                x = m
                for b, on in zip(missing, choice):
                    if on:
                        x |= b
                out.add(x)
        if len(out) > cap:
            raise CapExceededError(f"model enumeration exceeded cap {cap}")
        return out

    table = []  # (scope mask, set of masks within scope)
    for g in c.gates:
        if g.kind == "T":
            table.append((0, {0}))
        elif g.kind == "F":
            table.append((0, set()))
        elif g.kind == "L":
            b = bit[g.var]
            table.append((b, {b} if g.positive else {0}))
        elif g.kind == "O":
            scope = 0
            for ch in g.children:
                scope |= table[ch][0]
            ms = set()
            for ch in g.children:
                ms |= expand(table[ch][1], table[ch][0], scope)
            if len(ms) > cap:
                raise CapExceededError(f"model enumeration exceeded cap {cap}")
            table.append((scope, ms))
        else:
            scope, ms = 0, {0}
            for ch in g.children:
                cs, cm = table[ch]
                shared = scope & cs
                nxt = set()
                for a in ms:
                    for b in cm:
                        if a & shared == b & shared:
                            nxt.add(a | b)
                if len(nxt) > cap:
                    raise CapExceededError(f"model enumeration exceeded cap {cap}")
                scope |= cs
                ms = nxt
            table.append((scope, ms))
    scope, ms = table[c.root]
    ms = expand(ms, scope, full)
    return {frozenset(v for v in order if m & bit[v]) for m in ms}


# --- leaf separator and split ----------------------------------------------


def leaf_separator(vt: Vtree) -> tuple[int, int]:
    """Edge ``(s, t)`` (``t`` child of ``s``) with the most balanced leaf split.

    Ties go to the deepest ``t``, then to the first in preorder.
    """
    n = vt.count[vt.root]
    if n < 2:
        raise ValueError("a vtree with a single leaf has no separator")
    best = None
    depth = {vt.root: 0}
    rank = 0
    stack = [vt.root]
    while stack:
        x = stack.pop()
        if x != vt.root:
            key = (abs(n - 2 * vt.count[x]), -depth[x], rank)
            if best is None or key < best[0]:
                best = (key, x)
        rank += 1
        if vt.left[x] >= 0:
            d = depth[x] + 1
            depth[vt.left[x]] = depth[vt.right[x]] = d
            stack.append(vt.right[x])
            stack.append(vt.left[x])
    t = best[1]
    return vt.parent[t], t


@dataclass(frozen=True)
class SeparatorSplit:
    edge: tuple[int, int]
    V1: frozenset
    V2: frozenset
    pairs: tuple  # ((D1, D2), ...)

    @property
    def W(self) -> int:
        return len(self.pairs)


def _extract(c: Circuit, gate: int, vt_new: Vtree, remap: dict) -> Circuit:
    b = Builder(vt_new)
    done = {}
    for x in _reach(c, gate):
        g = c.gates[x]
        kids = [done[ch] for ch in g.children]
        v = remap[g.vnode]
        if g.kind == "T":
            done[x] = b.top(v)
        elif g.kind == "L":
            done[x] = b.lit(g.var, g.positive)
        elif g.kind == "A":
            done[x] = b.and_(v, kids[0], kids[1])
        else:
            done[x] = b.or_(v, kids)
    return b.circuit(done[gate])


def _reach(c: Circuit, start: int) -> list[int]:
    seen = {start}
    stack = [start]
    while stack:
        for ch in c.gates[stack.pop()].children:
            if ch not in seen:
                seen.add(ch)
                stack.append(ch)
    return sorted(seen)


def _alphas(c: Circuit, s: int, t: int) -> list[int]:
    vt = c.vtree
    slot = 0 if vt.left[s] == t else 1
    return sorted({g.children[slot] for g in c.gates if g.kind == "A" and g.vnode == s})


def split(c: Circuit, edge: tuple[int, int] | None = None) -> SeparatorSplit:
    """Factor pairs along vtree edge ``(s, t)`` (default: the leaf separator).

    The factors are the distinct gates ``alpha_j`` that AND gates at ``s``
    take from the ``t`` side.  ``D1`` is the subcircuit under ``alpha_j``;
    ``D2`` replaces ``alpha_j`` by true and every other ``alpha`` by false.
    """
    if not is_normal(c):
        c = normalize(c)
    vt = c.vtree
    s, t = edge if edge is not None else leaf_separator(vt)
    if not (0 <= t < vt.size) or vt.parent[t] != s:
        raise ValueError(f"({s}, {t}) is not a vtree edge")
    V1 = frozenset(vt.leaves(t))
    V2 = c.variables - V1
    if c.is_false():
        return SeparatorSplit((s, t), V1, V2, ())
    sub_vt, sub_map = vt.subtree(t)
    rest_vt, rest_map = vt.contract(t)
    slot = 0 if vt.left[s] == t else 1
    under_t = set(vt.preorder(t))
    pairs = []
    for alpha in _alphas(c, s, t):
        d1 = _extract(c, alpha, sub_vt, sub_map)
        b = Builder(rest_vt)
        done = {}
        for x in c.reachable():
            g = c.gates[x]
            if g.vnode in under_t:
                continue
            v = rest_map[g.vnode]
            if g.kind == "A" and g.vnode == s:
                keep, other = g.children[slot], g.children[1 - slot]
                done[x] = done[other] if keep == alpha else b.false()
                continue
            kids = [done[ch] for ch in g.children]
            if g.kind == "T":
                done[x] = b.top(v)
            elif g.kind == "L":
                done[x] = b.lit(g.var, g.positive)
            elif g.kind == "A":
                done[x] = b.and_(v, kids[0], kids[1])
            else:
                done[x] = b.or_(v, kids)
        pairs.append((d1, b.circuit(done[c.root])))
    return SeparatorSplit((s, t), V1, V2, tuple(pairs))


# --- apply -----------------------------------------------------------------


def _copy_into(b: Builder, c: Circuit) -> int:
    done = {}
    for x, g in enumerate(c.gates):
        kids = [done[ch] for ch in g.children]
        if g.kind == "F":
            done[x] = b.false()
        elif g.kind == "T":
            done[x] = b.top(g.vnode)
        elif g.kind == "L":
            done[x] = b.lit(g.var, g.positive)
        elif g.kind == "A":
            done[x] = b.and_(g.vnode, kids[0], kids[1])
        else:
            done[x] = b.or_(g.vnode, kids)
    return done[c.root]


def apply(op: str, c1: Circuit, c2: Circuit) -> Circuit:
    """Conjunction (``"and"``) or disjunction (``"or"``) of two circuits on one vtree."""
    op = op.lower()
    if op not in ("and", "or"):
        raise ValueError(f"unsupported operation {op!r}; only 'and' and 'or' are available")
    if c1.vtree != c2.vtree:
        raise ValueError("apply needs circuits over the same vtree")
    c1 = c1 if is_normal(c1) else normalize(c1)
    c2 = c2 if is_normal(c2) else normalize(c2)
    vt = c1.vtree
    b = Builder(vt)
    r1 = _copy_into(b, c1)
    r2 = _copy_into(b, c2)
    if op == "or":
        return b.circuit(b.or_(vt.root, [r1, r2]))
    memo = {}

    def prod(x, y):
        key = (x, y) if x <= y else (y, x)
        got = memo.get(key)
        if got is not None:
            return got
        gx, gy = b.gates[x], b.gates[y]
        if gx.kind == "F" or gy.kind == "F":
            got = b.false()
        elif vt.is_leaf(gx.vnode):
            def table(g):
                if g.kind == "T":
                    return (True, True)
                return (not g.positive, g.positive)

            tx, ty = table(gx), table(gy)
            got = b.leaf_gate(gx.vnode, tx[0] and ty[0], tx[1] and ty[1])
        elif gx.kind == "O":
            got = b.or_(gx.vnode, [prod(ch, y) for ch in gx.children])
        elif gy.kind == "O":
            got = b.or_(gy.vnode, [prod(x, ch) for ch in gy.children])
        else:
            got = b.and_(
                gx.vnode,
                prod(gx.children[0], gy.children[0]),
                prod(gx.children[1], gy.children[1]),
            )
        memo[key] = got
        return got

    return b.circuit(_norm_iter(prod, r1, r2))


# --- text format -----------------------------------------------------------


def dump_circuit(c: Circuit) -> str:
    """Line format: ``V <vtree>``, then one gate per line, the root last.

    Gates are ``T``, ``F``, ``L <+-var>``, ``A <k> <ids>``, ``O <k> <ids>``
    with 0-based gate ids and 1-based variables; a trailing ``@<node>``
    records the vtree association.
    """
    reach = set(c.reachable())
    order = [x for x in range(len(c.gates)) if x in reach]
    new = {x: i for i, x in enumerate(order)}
    lines = [f"V {c.vtree.to_text()}"]
    for x in order:
        g = c.gates[x]
        if g.kind in ("T", "F"):
            body = g.kind
        elif g.kind == "L":
            body = f"L {'' if g.positive else '-'}{g.var + 1}"
        else:
            body = f"{g.kind} {len(g.children)} " + " ".join(str(new[ch]) for ch in g.children)
        if g.vnode is not None:
            body += f" @{g.vnode}"
        lines.append(body)
    if order[-1] != c.root:
        lines.append(f"R {new[c.root]}")
    return "\n".join(lines) + "\n"


def load_circuit(text: str) -> Circuit:
    vt = None
    gates = []
    root = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        vnode = None
        if "@" in line:
            line, _, tail = line.partition("@")
            line = line.strip()
            try:
                vnode = int(tail)
            except ValueError:
                raise FormatError("bad vtree association", line=lineno) from None
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "V":
                vt = Vtree.from_text(line[1:])
                continue
            if vt is None:
                raise FormatError("gate before the vtree line", line=lineno)
            if vnode is not None and not 0 <= vnode < vt.size:
                raise FormatError(f"vtree node {vnode} out of range", line=lineno)
            if kind in ("T", "F"):
                if len(parts) != 1:
                    raise FormatError("constants take no arguments", line=lineno)
                gates.append(Gate(kind, vnode=vnode))
            elif kind == "L":
                lit = int(parts[1])
                var = abs(lit) - 1
                if lit == 0 or var not in vt.variables or len(parts) != 2:
                    raise FormatError(f"bad literal {parts[1]}", line=lineno)
                gates.append(Gate("L", (), var, lit > 0, vnode))
            elif kind in ("A", "O"):
                k = int(parts[1])
                ids = tuple(int(x) for x in parts[2:])
                if len(ids) != k or any(not 0 <= i < len(gates) for i in ids):
                    raise FormatError("gate inputs must reference earlier gates", line=lineno)
                gates.append(Gate(kind, ids, vnode=vnode))
            elif kind == "R":
                root = int(parts[1])
            else:
                raise FormatError(f"unknown line type {kind!r}", line=lineno)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError("malformed line", line=lineno) from None
    if vt is None or not gates:
        raise FormatError("circuit needs a vtree line and at least one gate")
    return Circuit(vt, tuple(gates), len(gates) - 1 if root is None else root)


# --- the four-variable running example -------------------------------------


def example_circuit() -> Circuit:
    """Hand-built circuit for ``(b1 & b2) | (b2 & b3) | (b3 & b4)``.

    Variables ``b1..b4`` are vertices ``0..3``; the vtree is ``((b1 b2) (b3 b4))``
    and the root OR has one AND per disjunct, with explicit true factors.
    """
    vt = Vtree.from_nested(((0, 1), (2, 3)))
    # vtree ids: 0=b1 1=b2 2=(b1 b2) 3=b3 4=b4 5=(b3 b4) 6=root
    g = [
        Gate("L", (), 0, True, 0),   # 0  b1
        Gate("L", (), 1, True, 1),   # 1  b2
        Gate("A", (0, 1), vnode=2),  # 2  b1 & b2
        Gate("O", (2,), vnode=2),    # 3  single-input OR over it
        Gate("T"),                   # 4
        Gate("A", (3, 4), vnode=6),  # 5  (b1 & b2) & T
        Gate("L", (), 1, True, 1),   # 6  b2
        Gate("L", (), 2, True, 3),   # 7  b3
        Gate("A", (6, 7), vnode=6),  # 8  b2 & b3
        Gate("T"),                   # 9
        Gate("L", (), 2, True, 3),   # 10 b3
        Gate("L", (), 3, True, 4),   # 11 b4
        Gate("A", (10, 11), vnode=5),  # 12 b3 & b4
        Gate("O", (12,), vnode=5),   # 13
        Gate("A", (9, 13), vnode=6),  # 14 T & (b3 & b4)
        Gate("O", (5, 8, 14), vnode=6),  # 15 root
    ]
    return Circuit(vt, tuple(g), 15)
