"""Centroid recursive greedy with forbidden-pattern guessing for KS-form constraints.

The equality atoms of a disjunct form a forest over the variables.  Each
tree is solved by fixing its centroid variable to every admissible vertex
and solving the remaining subtrees one after another against the grown
assignment.  Trees are processed in order, and inequality atoms that an
optimal tuple would violate against the current solution are ruled out by
guessing entries of a forbidden pattern ``(i, p, v)``: ``rho_p(u_i) != v``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from ..augment import Augmentation
from ..errors import InfeasibleError
from ..logic import KsDisjunct, KsNormalForm, validate_ks
from ..submodular import SubmodularOracle
from .lowdeg import FoSolution

__all__ = [
    "TreeSolution",
    "centroid",
    "certificate_factor",
    "recursive_greedy_tree",
    "greedy_bddexp",
    "suspect_recurse_bddexp",
]


def certificate_factor(k_max: int) -> int:
    """``ceil(log2 k_max) + 2``: one level per centroid halving plus the outer greedy."""
    return math.ceil(math.log2(max(k_max, 1))) + 2


def centroid(vars_, edges):
    """Centroid of the tree on ``vars_`` and its remaining subtrees.

    Picks the lowest variable whose removal leaves components of at most
    ``len(vars_) // 2`` nodes.  Subtrees are returned as sorted tuples in
    order of their smallest variable.
    """
    vs = sorted(vars_)
    adj = {v: [] for v in vs}
    for a, b in edges:
        if a in adj and b in adj:
            adj[a].append(b)
            adj[b].append(a)

    def parts_without(c):
        seen = {c}
        comps = []
        for s in vs:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(tuple(sorted(comp)))
        return comps

    half = len(vs) // 2
    for c in vs:
        comps = parts_without(c)
        if all(len(p) <= half for p in comps):
            return c, sorted(comps, key=min)
    raise ValueError("variables do not form a tree")


@dataclass
class TreeSolution:
    assignment: dict  # variable index -> vertex
    trees: list  # per tree: True when assigned
    complete: bool
    value: float | None = None
    tuple: tuple | None = None


class _Context:
    def __init__(self, aug: Augmentation, k: int, dj: KsDisjunct, forest, f: SubmodularOracle):
        self.aug = aug
        self.k = k
        self.dj = dj
        self.f = f
        self.trees = [t.vars for t in forest.trees]
        self.k_max = forest.k_max
        tree_of = {v: t for t, Y in enumerate(self.trees) for v in Y}
        self.tree_of = tree_of
        self.cross_atoms = sum(1 for i, _, j, _ in dj.neq if tree_of[i] != tree_of[j])
        self.eq_edges = [(i, j) for i, _, j, _ in dj.eq]
        n = aug.n
        self.eq_of = {i: [] for i in range(k)}
        for i, p, j, q in dj.eq:
            self.eq_of[i].append((j, p, q))
            self.eq_of[j].append((i, q, p))
        self.neq_of = {i: [] for i in range(k)}
        for i, p, j, q in dj.neq:
            self.neq_of[i].append((j, p, q))
            self.neq_of[j].append((i, q, p))
        self.cand = []
        for i in range(k):
            self.cand.append([u for u in range(n) if self._tau(i, u)])
        self.cand_set = [set(c) for c in self.cand]
        self._inv = {}
        self._split = {}
        self._span = {}
        self.order = []
        for t in self.trees:
            self._walk(t)
        self.rank = {v: r for r, v in enumerate(self.order)}
        self.cache = {}
        self.nodes = 0

    def _walk(self, Y):
        c, subs = self.split(Y)
        self.order.append(c)
        for S in subs:
            self._walk(S)

    def split(self, Y):
        got = self._split.get(Y)
        if got is None:
            got = centroid(Y, self.eq_edges)
            self._split[Y] = got
        return got

    def _tau(self, i, u):
        rho = self.aug.rho
        for t in self.dj.tau_of(i):
            if any(not self.aug.has_label(u, lab) for lab in t.labels):
                return False
            for a, b, c in t.fun_eqs:
                lhs = rho(a, rho(b, u))
                rhs = rho(c, u)
                if lhs is None or rhs is None or lhs != rhs:
                    return False
        return True

    def inverse(self, p, w):
        table = self._inv.get(p)
        if table is None:
            table = {}
            for u in range(self.aug.n):
                x = self.aug.rho(p, u)
                if x is not None:
                    table.setdefault(x, []).append(u)
            self._inv[p] = table
        return table.get(w, [])

    def candidates(self, i, A):
        for j, p, q in self.eq_of[i]:
            if j in A:
                y = self.aug.rho(q, A[j])
                if y is None:
                    return []
                return [u for u in self.inverse(p, y) if u in self.cand_set[i]]
        return self.cand[i]

    def consistent(self, i, u, A, F):
        rho = self.aug.rho
        for j, p, q in self.eq_of[i]:
            if j in A:
                x, y = rho(p, u), rho(q, A[j])
                if x is None or y is None or x != y:
                    return False
        for j, p, q in self.neq_of[i]:
            if j in A:
                x, y = rho(p, u), rho(q, A[j])
                if x is not None and y is not None and x == y:
                    return False
        for fi, p, v in F:
            if fi == i and rho(p, u) == v:
                return False
        return True

    def value(self, vertices):
        U = frozenset(vertices)
        v = self.cache.get(U)
        if v is None:
            v = self.f(U)
            self.cache[U] = v
        return v

    def spanning(self, Y):
        """Inequality atoms whose sides fall in different subtrees of ``Y``'s centroid.

        Returns the distinct sides processed first and the number of atoms.
        """
        got = self._span.get(Y)
        if got is None:
            _, subs = self.split(Y)
            where = {v: s for s, S in enumerate(subs) for v in S}
            sides = []
            count = 0
            for i, p, j, q in self.dj.neq:
                if i in where and j in where and where[i] != where[j]:
                    count += 1
                    side = (i, p) if where[i] < where[j] else (j, q)
                    if side not in sides:
                        sides.append(side)
            got = (sides, count)
            self._span[Y] = got
        return got

    def _branch(self, subs, A, F):
        """Solve the subtrees in order; returns (assignment or None, what got assigned)."""
        grown = A
        for S in subs:
            nxt = self.solve_tree(S, grown, F)
            if nxt is None:
                return None, grown
            grown = nxt
        return grown, grown

    def solve_tree(self, Y, A, F):
        self.nodes += 1
        c, subs = self.split(Y)
        span, budget = self.spanning(Y)
        best = None
        best_val = None
        for u in self.candidates(c, A):
            if not self.consistent(c, u, A, F):
                continue
            start = dict(A)
            start[c] = u
            if span:
                got = self._local(subs, start, F, span, budget)
            else:
                got = self._branch(subs, start, F)[0]
            if got is None:
                continue
            val = self.value(got.values())
            if best is None or val > best_val:
                best, best_val = got, val
        return best

    def _local(self, subs, start, F, span, budget):
        """Subtrees under one centroid value, guessing forbidden entries between them.

        A later subtree's optimal piece can only be blocked by an earlier
        subtree's current value through a spanning inequality atom, so the
        guesses forbid those values one at a time.
        """
        memo = {}

        def run(L):
            if L in memo:
                return memo[L]
            got, seen = self._branch(subs, start, F | L)
            out = None if got is None else (self.value(got.values()), got)
            if len(L) < budget:
                for a, pa in span:
                    if a not in seen:
                        continue
                    v = self.aug.rho(pa, seen[a])
                    trip = (a, pa, v)
                    if v is None or trip in F or trip in L:
                        continue
                    cand = run(L | {trip})
                    if cand is not None and (out is None or cand[0] > out[0]):
                        out = cand
            memo[L] = out
            return out

        got = run(frozenset())
        return None if got is None else got[1]

    def greedy(self, F) -> TreeSolution:
        A = {}
        done = []
        for Y in self.trees:
            got = self.solve_tree(Y, A, F)
            done.append(got is not None)
            if got is not None:
                A = got
        if not all(done):
            return TreeSolution(A, done, False)
        tup = tuple(A[i] for i in range(self.k))
        return TreeSolution(A, done, True, self.value(tup), tup)

    def guesses(self, sol: TreeSolution, F):
        """Forbidden-pattern entries read off the current solution.

        For each inequality atom across two trees, the side processed first
        is the one whose current value can clash with an optimal later side,
        so the guess forbids that side's current value.  Atoms inside one
        tree are guessed within the tree recursion.
        """
        out = []
        for i, p, j, q in self.dj.neq:
            if self.tree_of[i] == self.tree_of[j]:
                continue  # handled inside the tree recursion
            a, pa = (i, p) if self.rank[i] < self.rank[j] else (j, q)
            if a not in sol.assignment:
                continue
            v = self.aug.rho(pa, sol.assignment[a])
            if v is None:
                continue
            trip = (a, pa, v)
            if trip not in F and trip not in out:
                out.append(trip)
        return out


def _better(a, b):
    if b is None:
        return True
    if a[0] != b[0]:
        return a[0] > b[0]
    return a[1] < b[1]


def _contexts(aug, ks, f):
    if f.n != aug.n:
        raise ValueError(f"objective ground set has {f.n} elements, graph has {aug.n} vertices")
    forests = validate_ks(ks)
    return [_Context(aug, ks.k, dj, fo, f) for dj, fo in zip(ks.disjuncts, forests)]


def recursive_greedy_tree(aug: Augmentation, ks: KsNormalForm, f: SubmodularOracle, tree: int,
                          A=None, F=(), disjunct: int = 0):
    """Grown assignment for tree ``tree`` of a disjunct, or None when nothing is consistent."""
    ctx = _contexts(aug, ks, f)[disjunct]
    return ctx.solve_tree(ctx.trees[tree], dict(A or {}), frozenset(F))


def greedy_bddexp(aug: Augmentation, ks: KsNormalForm, f: SubmodularOracle, F=(), disjunct: int = 0) -> TreeSolution:
    ctx = _contexts(aug, ks, f)[disjunct]
    return ctx.greedy(frozenset(F))


def suspect_recurse_bddexp(aug: Augmentation, ks: KsNormalForm, f: SubmodularOracle) -> FoSolution:
    """Approximate maximization of ``f`` over tuples satisfying ``ks`` on ``aug``.

    The certificate is ``ceil(log2 k_max) + 2`` with ``k_max`` the largest
    equality tree over all disjuncts.
    """
    start = time.perf_counter()
    calls0 = f.calls
    ctxs = _contexts(aug, ks, f)
    if not ctxs:
        raise InfeasibleError("the form has no disjuncts")
    best = None
    best_d = None
    nodes = depth = 0
    for di, ctx in enumerate(ctxs):
        memo = {}
        budget = ctx.cross_atoms

        def run(F, level):
            nonlocal depth
            if F in memo:
                return memo[F]
            depth = max(depth, level)
            sol = ctx.greedy(F)
            out = (sol.value, sol.tuple) if sol.complete else None
            if len(F) < budget:
                for trip in ctx.guesses(sol, F):
                    got = run(F | {trip}, level + 1)
                    if got is not None and _better(got, out):
                        out = got
            memo[F] = out
            return out

        got = run(frozenset(), 0)
        nodes += len(memo)
        if got is not None and _better(got, best):
            best, best_d = got, di
    if best is None:
        raise InfeasibleError("no complete feasible tuple found")
    B = max(certificate_factor(c.k_max) for c in ctxs)
    return FoSolution(
        tuple=best[1],
        value=best[0],
        B=B,
        calls=f.calls - calls0,
        nodes=nodes,
        depth=depth,
        disjunct=best_d,
        millis=(time.perf_counter() - start) * 1000.0,
    )
