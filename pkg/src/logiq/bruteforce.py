"""Exhaustive exact solvers used as ground truth.

Everything here evaluates constraints by their plain definitions: subsets
and tuples are enumerated outright, distances come from a local BFS, and
normal-form atoms are read straight off the in-neighbor lists.  Nothing is
shared with the solvers' feasibility bookkeeping.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import CapExceededError, InfeasibleError
from .graph import Graph
from .logic import (
    MSO_CAP, Evaluator, Formula, GaifmanForm, KsNormalForm, eval_local,
)

__all__ = [
    "TUPLE_CAP",
    "BruteResult",
    "PREDICATE_FORMULAS",
    "predicate_holds",
    "brute_force_mso",
    "brute_force_predicate",
    "brute_force_fo",
    "gaifman_holds",
    "ks_holds",
    "closure_violations",
]

TUPLE_CAP = 10**7

# FO-expressible catalog predicates as MSO formulas over the set variable X
PREDICATE_FORMULAS = {
    "true": "forall x. x = x",
    "all": "forall x. x in X",
    "nonempty": "exists x. x in X",
    "indset": "forall x. forall y. (x in X & y in X) -> !adj(x, y)",
    "vcover": "forall x. forall y. adj(x, y) -> (x in X | y in X)",
    "domset": "forall x. x in X | (exists y. adj(x, y) & y in X)",
    "edge_in": "exists x. exists y. adj(x, y) & x in X & y in X",
}


@dataclass
class BruteResult:
    solution: object  # frozenset for set problems, tuple for tuple problems
    value: float
    feasible: int  # number of feasible candidates seen


def _bfs(g: Graph, src, allowed=None):
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for x in frontier:
            for y in g.neighbors(x):
                if y not in dist and (allowed is None or y in allowed):
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist


def _connected(g: Graph, U):
    if not U:
        return True
    start = min(U)
    return set(_bfs(g, start, U)) == set(U)


def predicate_holds(g: Graph, expr, U) -> bool:
    """Direct set-level semantics of a parsed predicate expression."""
    U = frozenset(U)
    kind = expr[0]
    if kind == "and":
        return all(predicate_holds(g, e, U) for e in expr[1])
    if kind == "or":
        return any(predicate_holds(g, e, U) for e in expr[1])
    name = expr[1]
    edges = g.sorted_edges()
    if name == "true":
        return True
    if name == "all":
        return len(U) == g.n
    if name == "nonempty":
        return bool(U)
    if name == "indset":
        return not any(u in U and v in U for u, v in edges)
    if name == "vcover":
        return all(u in U or v in U for u, v in edges)
    if name == "edge_in":
        return any(u in U and v in U for u, v in edges)
    if name == "domset":
        return all(v in U or any(w in U for w in g.neighbors(v)) for v in range(g.n))
    if name == "connected":
        return _connected(g, U)
    raise ValueError(f"unknown predicate {name!r}")


def _subsets(n):
    for mask in range(1 << n):
        yield frozenset(i for i in range(n) if mask >> i & 1)


def _argmax_sets(n, feasible, f):
    best = None
    count = 0
    for U in _subsets(n):
        if not feasible(U):
            continue
        count += 1
        val = f(U)
        key = tuple(sorted(U))
        if best is None or val > best[0] or (val == best[0] and key < best[1]):
            best = (val, key, U)
    if best is None:
        raise InfeasibleError("no subset satisfies the constraint")
    return BruteResult(best[2], best[0], count)


def brute_force_mso(g: Graph, phi: Formula, f, cap: int = MSO_CAP) -> BruteResult:
    """Exact ``max f(U)`` over ``U`` with ``g |= phi(U)``; ties go to the lexicographically smallest."""
    if g.n > cap:
        raise CapExceededError(f"brute-force MSO capped at n <= {cap}, got n = {g.n}")
    ev = Evaluator(g, phi, cap=cap)
    return _argmax_sets(g.n, ev.mso, f)


def brute_force_predicate(g: Graph, expr, f, cap: int = MSO_CAP) -> BruteResult:
    """Exact maximum over the models of a catalog predicate expression."""
    if g.n > cap:
        raise CapExceededError(f"brute-force search capped at n <= {cap}, got n = {g.n}")
    return _argmax_sets(g.n, lambda U: predicate_holds(g, expr, U), f)


# --- tuple semantics ------------------------------------------------------------


def gaifman_holds(g: Graph, gf: GaifmanForm, tup, maximal: bool = False) -> bool:
    """Some disjunct holds: block formulas hold on their ``r``-neighborhoods and
    blocks lie pairwise more than ``2r`` apart.

    With ``maximal=True`` every block must in addition be chained by steps of
    distance at most ``2r`` (no finer partition would satisfy the guard).
    """
    return any(_disjunct_holds(g, gf, d, tup, maximal) for d in gf.disjuncts)


def _disjunct_holds(g, gf, d, tup, maximal):
    parts = [[tup[gf.index(x)] for x in b.vars] for b in d.blocks]
    for b, part in zip(d.blocks, parts):
        if not eval_local(g, b.formula, part, d.r, cap=1 << 62):
            return False
    far = 2 * d.r
    for a in range(len(parts)):
        for c in range(a + 1, len(parts)):
            for u in parts[a]:
                dist = _bfs(g, u)
                if any(v in dist and dist[v] <= far for v in parts[c]):
                    return False
    if maximal:
        for part in parts:
            reach = {part[0]}
            grew = True
            while grew:
                grew = False
                for u in part:
                    if u in reach:
                        continue
                    if any(_bfs(g, w).get(u, far + 1) <= far for w in reach):
                        reach.add(u)
                        grew = True
            if not set(part) <= reach:
                return False
    return True


def _rho(aug, p, u):
    if p == 0:
        return u
    ins = aug.in_lists[u]
    return ins[p - 1] if p <= len(ins) else None


def ks_holds(aug, ks: KsNormalForm, tup) -> bool:
    """Some disjunct's unary, equality and inequality atoms all hold.

    An equality with an undefined side is false; an inequality with an
    undefined side is true.
    """
    for d in ks.disjuncts:
        ok = True
        for t in d.tau:
            u = tup[t.var]
            if not all(lab in aug.labels[u] for lab in t.labels):
                ok = False
                break
            for a, b, c in t.fun_eqs:
                mid = _rho(aug, b, u)
                lhs = None if mid is None else _rho(aug, a, mid)
                rhs = _rho(aug, c, u)
                if lhs is None or rhs is None or lhs != rhs:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        for i, p, j, q in d.eq:
            x, y = _rho(aug, p, tup[i]), _rho(aug, q, tup[j])
            if x is None or y is None or x != y:
                ok = False
                break
        if not ok:
            continue
        for i, p, j, q in d.neq:
            x, y = _rho(aug, p, tup[i]), _rho(aug, q, tup[j])
            if x is not None and y is not None and x == y:
                ok = False
                break
        if ok:
            return True
    return False


def brute_force_fo(g: Graph, constraint, f, aug=None, cap: int = TUPLE_CAP, maximal: bool = False) -> BruteResult:
    """Exact ``max f(set(u))`` over all ``k``-tuples satisfying the constraint.

    ``constraint`` is a Formula (global model checking), a GaifmanForm (its
    disjunct semantics) or a KsNormalForm (atoms over ``aug``).  Ties go to
    the lexicographically smallest tuple.
    """
    if isinstance(constraint, Formula):
        k = constraint.k
        ev = Evaluator(g, constraint, cap=1 << 62)
        feasible = ev.fo
    elif isinstance(constraint, GaifmanForm):
        k = constraint.k
        feasible = lambda t: gaifman_holds(g, constraint, t, maximal)  # noqa: E731
    elif isinstance(constraint, KsNormalForm):
        if aug is None:
            raise ValueError("a KS-form constraint needs the augmentation")
        k = constraint.k
        feasible = lambda t: ks_holds(aug, constraint, t)  # noqa: E731
    else:
        raise TypeError(f"unsupported constraint {type(constraint).__name__}")
    if g.n ** k > cap:
        raise CapExceededError(f"{g.n}^{k} tuples exceeds the cap {cap}")
    best = None
    count = 0
    for t in itertools.product(range(g.n), repeat=k):
        if not feasible(t):
            continue
        count += 1
        val = f(set(t))
        if best is None or val > best[0]:
            best = (val, t)
    if best is None:
        raise InfeasibleError("no tuple satisfies the constraint")
    return BruteResult(best[1], best[0], count)


# --- augmentation closure ----------------------------------------------------------


def closure_violations(aug) -> list[str]:
    """Scan every step for missing transitive or fraternal arcs and for shrinking arc sets."""
    out = []
    for j in range(len(aug.graphs) - 1):
        cur = set(aug.graphs[j].arcs)
        nxt = set(aug.graphs[j + 1].arcs)
        if not cur <= nxt:
            out.append(f"step {j + 1} drops arcs {sorted(cur - nxt)[:3]}")
        heads = {}
        for u, v in cur:
            heads.setdefault(v, []).append(u)
        for u, v in cur:
            for w in [b for a, b in cur if a == v]:
                if u != w and (u, w) not in nxt:
                    out.append(f"step {j + 1}: transitive arc {u + 1}->{w + 1} missing")
        for v, tails in heads.items():
            for a, b in itertools.combinations(sorted(tails), 2):
                if (a, b) not in nxt and (b, a) not in nxt:
                    out.append(f"step {j + 1}: fraternal pair {a + 1},{b + 1} unconnected")
    final = aug.graphs[-1]
    for v in range(aug.n):
        if sorted(aug.in_lists[v]) != list(final.in_neighbors(v)):
            out.append(f"in-neighbor list of {v + 1} disagrees with the final graph")
    return out
