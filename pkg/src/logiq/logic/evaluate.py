"""Brute-force model checking by direct recursive evaluation.

These evaluators are exponential in the quantifier depth and are meant as
ground truth at desk scale; size caps make misuse fail loudly.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..errors import CapExceededError
from ..graph import Graph, INFINITE, induced_subgraph, neighborhood
from .formula import (
    Adj, And, Const, Dist, Eq, Exists, Forall, Formula, Implies, In, Neq, Not, Or,
)

__all__ = ["FO_CAP", "MSO_CAP", "Evaluator", "model_check_fo", "model_check_mso", "eval_local"]

FO_CAP = 14
MSO_CAP = 12


class _Scope:
    """Quantifier domain and distance function; swapped for local evaluation."""

    def __init__(self, g: Graph):
        self.g = g
        self.domain = range(g.n)
        self.inside = None
        self._dist = {}

    def restrict(self, vertices):
        self.domain = sorted(vertices)
        self.inside = frozenset(vertices)
        self._dist = {}

    def reset(self):
        self.domain = range(self.g.n)
        self.inside = None
        self._dist = {}

    def dist_le(self, a, b, d):
        if self.inside is None:
            x = self.g.distances_from(a)[b]
            return x is not INFINITE and x <= d
        row = self._dist.get(a)
        if row is None:
            # BFS inside the induced subgraph
            row = {a: 0}
            frontier = [a]
            while frontier:
                nxt = []
                for x in frontier:
                    for y in self.g.neighbors(x):
                        if y in self.inside and y not in row:
                            row[y] = row[x] + 1
                            nxt.append(y)
                frontier = nxt
            self._dist[a] = row
        x = row.get(b)
        return x is not None and x <= d


def _compile(node, slots, sc: _Scope):
    """Turn an AST into a closure over an assignment list ``asg`` and set ``X``."""
    g = sc.g
    if isinstance(node, Const):
        val = node.value
        return lambda asg, X: val
    if isinstance(node, Adj):
        a, b = slots[node.a], slots[node.b]
        adj = [g.neighbor_set(v) for v in range(g.n)]
        return lambda asg, X: asg[b] in adj[asg[a]]
    if isinstance(node, Eq):
        a, b = slots[node.a], slots[node.b]
        return lambda asg, X: asg[a] == asg[b]
    if isinstance(node, Neq):
        a, b = slots[node.a], slots[node.b]
        return lambda asg, X: asg[a] != asg[b]
    if isinstance(node, In):
        a = slots[node.var]
        return lambda asg, X: asg[a] in X
    if isinstance(node, Dist):
        a, b, d = slots[node.a], slots[node.b], node.bound
        return lambda asg, X: sc.dist_le(asg[a], asg[b], d)
    if isinstance(node, Not):
        sub = _compile(node.sub, slots, sc)
        return lambda asg, X: not sub(asg, X)
    if isinstance(node, And):
        parts = [_compile(p, slots, sc) for p in node.parts]
        return lambda asg, X: all(p(asg, X) for p in parts)
    if isinstance(node, Or):
        parts = [_compile(p, slots, sc) for p in node.parts]
        return lambda asg, X: any(p(asg, X) for p in parts)
    if isinstance(node, Implies):
        left = _compile(node.left, slots, sc)
        right = _compile(node.right, slots, sc)
        return lambda asg, X: (not left(asg, X)) or right(asg, X)
    if isinstance(node, (Exists, Forall)):
        slot = len(slots)
        body = _compile(node.body, {**slots, node.var: slot}, sc)
        want = isinstance(node, Exists)

        def quant(asg, X):
            asg.append(None)
            try:
                for v in sc.domain:
                    asg[slot] = v
                    if body(asg, X) == want:
                        return want
                return not want
            finally:
                asg.pop()

        return quant
    raise TypeError(f"not a formula node: {node!r}")


class Evaluator:
    """A formula compiled against one graph; call with a tuple (FO) or set (MSO).

    Not safe for concurrent use (the local-evaluation scope is shared state);
    create one evaluator per worker.
    """

    def __init__(self, g: Graph, phi: Formula, cap: int | None = None):
        limit = cap if cap is not None else (MSO_CAP if phi.is_mso else FO_CAP)
        if g.n > limit:
            raise CapExceededError(f"brute-force evaluation capped at n <= {limit}, got n = {g.n}")
        self.g = g
        self.phi = phi
        self._scope = _Scope(g)
        self._fn = _compile(phi.body, {v: i for i, v in enumerate(phi.free)}, self._scope)

    def _check_tuple(self, tup):
        if len(tup) != self.phi.k:
            raise ValueError(f"expected a {self.phi.k}-tuple, got {len(tup)} entries")
        for v in tup:
            if not 0 <= v < self.g.n:
                raise ValueError(f"vertex id {v} out of range")

    def fo(self, tup: Sequence[int]) -> bool:
        self._check_tuple(tup)
        return bool(self._fn(list(tup), frozenset()))

    def local(self, tup: Sequence[int], r: int) -> bool:
        """Truth in the subgraph induced by ``N(tup, r)``."""
        self._check_tuple(tup)
        self._scope.restrict(neighborhood(self.g, tup, r))
        try:
            return bool(self._fn(list(tup), frozenset()))
        finally:
            self._scope.reset()

    def mso(self, U: Iterable[int]) -> bool:
        U = frozenset(U)
        if any(not 0 <= v < self.g.n for v in U):
            raise ValueError("set mentions an unknown vertex")
        return bool(self._fn([], U))


def model_check_mso(g: Graph, phi: Formula, U: Iterable[int], cap: int | None = None) -> bool:
    """``g |= phi(U)`` for a formula whose only free variable is a set variable."""
    if phi.free:
        raise ValueError("MSO check expects no free vertex variables")
    return Evaluator(g, phi, cap).mso(U)


def model_check_fo(g: Graph, phi: Formula, tup: Sequence[int], cap: int | None = None) -> bool:
    """``g |= phi(u1..uk)`` for a formula with k free vertex variables."""
    if phi.is_mso:
        raise ValueError("FO check does not accept a set variable")
    return Evaluator(g, phi, cap).fo(tup)


def eval_local(g: Graph, phi: Formula, tup: Sequence[int], r: int, cap: int | None = None) -> bool:
    """Evaluate ``phi`` on the subgraph induced by ``N(tup, r)``."""
    sub = induced_subgraph(g, neighborhood(g, tup, r))
    return model_check_fo(sub.graph, phi, [sub.new_of_old[v] for v in tup], cap)
