"""Block greedy with guessed optimal entries for Gaifman-form constraints.

A disjunct of a Gaifman form fixes a radius ``r`` and a partition of the
free variables into blocks; a tuple is feasible when every block formula
holds on the ``r``-neighborhood of its block and blocks lie pairwise more
than ``2r`` apart.  The greedy fills blocks in order, each by exhaustive
search around an anchor vertex.  When an optimal block is blocked by the
prefix, one of its entries must sit within ``2r`` of the prefix; the
suspect step guesses that entry and re-runs the greedy under the guess.

Within-block search places the remaining block variables within
``2r * (m - 1)`` hops of the anchor (``m`` = block size).  Every block whose
variables are chained at distance at most ``2r`` is covered, which is what
the maximality clause of a Gaifman normal form guarantees.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from ..errors import InfeasibleError
from ..graph import Graph, neighborhood
from ..logic import Evaluator, GaifmanDisjunct, GaifmanForm
from ..submodular import ModularFunction, SubmodularOracle

__all__ = [
    "BlockSolution",
    "FoSolution",
    "block_solve",
    "greedy_lowdeg",
    "suspect_recurse_lowdeg",
    "solve_linear_exact",
]

_NO_CAP = 1 << 62


@dataclass
class BlockSolution:
    blocks: list  # per block: tuple of vertices, or None when absent
    complete: bool
    value: float | None = None
    tuple: tuple | None = None  # full k-tuple when complete


@dataclass
class FoSolution:
    tuple: tuple
    value: float
    B: int
    calls: int
    nodes: int  # suspect-tree nodes (greedy runs)
    depth: int
    disjunct: int
    millis: float
    exact: bool = False
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "solution": [u + 1 for u in self.tuple],
            "value": self.value,
            "certificate": self.B,
            "oracle_calls": self.calls,
            "recursive_calls": self.nodes,
            "depth": self.depth,
            "disjunct": self.disjunct + 1,
        }
        out.update(self.extra)
        return out


class _Disjunct:
    """Precomputed locally feasible block tuples for one disjunct."""

    def __init__(self, g: Graph, gf: GaifmanForm, d: GaifmanDisjunct):
        self.g = g
        self.r = d.r
        self.k = gf.k
        self.blocks = [tuple(gf.index(x) for x in b.vars) for b in d.blocks]
        self.block_of = {}
        for bi, idx in enumerate(self.blocks):
            for pos, i in enumerate(idx):
                self.block_of[i] = (bi, pos)
        self.tuples = []
        for b, idx in zip(d.blocks, self.blocks):
            ev = Evaluator(g, b.formula, cap=_NO_CAP)
            reach = 2 * d.r * (len(idx) - 1)
            found = []
            for u in range(g.n):
                near = sorted(neighborhood(g, (u,), reach))
                for rest in itertools.product(near, repeat=len(idx) - 1):
                    t = (u,) + rest
                    if ev.local(t, d.r):
                        found.append(t)
            found.sort()
            self.tuples.append(found)

    def ball(self, vertices):
        return neighborhood(self.g, vertices, 2 * self.r)


class _Search:
    def __init__(self, dj: _Disjunct, f: SubmodularOracle, tuples=None):
        self.dj = dj
        self.f = f
        self.tuples = tuples if tuples is not None else dj.tuples
        self.cache = {}
        self.memo = {}
        self.nodes = 0
        self.depth = 0

    def value(self, U):
        U = frozenset(U)
        v = self.cache.get(U)
        if v is None:
            v = self.f(U)
            self.cache[U] = v
        return v

    def block(self, prefix, F, I):
        """Best tuple for block ``I`` given the assigned prefix blocks and guesses."""
        dj = self.dj
        placed = [u for t in prefix if t is not None for u in t]
        banned = set(dj.ball(placed)) if placed else set()
        pins = {}
        outside = []
        for i, v in F:
            bi, pos = dj.block_of[i]
            if bi == I:
                pins[pos] = v
            else:
                outside.append(v)
        if outside:
            banned |= dj.ball(outside)
        base = frozenset(placed)
        best = None
        best_val = None
        for t in self.tuples[I]:
            if any(t[p] != v for p, v in pins.items()):
                continue
            if any(u in banned for u in t):
                continue
            val = self.value(base | set(t))
            if best is None or val > best_val:
                best, best_val = t, val
        return best

    def greedy(self, F) -> BlockSolution:
        blocks = []
        for I in range(len(self.dj.blocks)):
            blocks.append(self.block(blocks, F, I))
        if any(t is None for t in blocks):
            return BlockSolution(blocks, False)
        tup = [None] * self.dj.k
        for idx, t in zip(self.dj.blocks, blocks):
            for i, u in zip(idx, t):
                tup[i] = u
        tup = tuple(tup)
        return BlockSolution(blocks, True, self.value(tup), tup)

    def suspects(self, sol: BlockSolution, F):
        """Guesses that could unblock an optimal block.

        An optimal block can only leave the feasible set of block ``I``
        through an entry within ``2r`` of an earlier block, and only up to
        the first absent block; entries already guessed are excluded.
        """
        dj = self.dj
        guessed = {i for i, _ in F}
        guessed_at = {v: dj.block_of[i][0] for i, v in F}
        out = []
        placed = []
        for I, t in enumerate(sol.blocks):
            if placed:
                near = sorted(dj.ball(placed))
                for i in dj.blocks[I]:
                    if i in guessed:
                        continue
                    for v in near:
                        if self._contradicts(I, v, guessed_at):
                            continue
                        out.append((i, v))
            if t is None:
                break
            placed.extend(t)
        return out

    def _contradicts(self, I, v, guessed_at):
        # guessed entries of different blocks must stay more than 2r apart
        for w, J in guessed_at.items():
            if J != I and w in self.dj.ball((v,)):
                return True
        return False

    def run(self, F=frozenset(), level=0):
        got = self.memo.get(F, False)
        if got is not False:
            return got
        self.nodes += 1
        self.depth = max(self.depth, level)
        sol = self.greedy(F)
        best = (sol.value, sol.tuple) if sol.complete else None
        if len(F) < self.dj.k:
            for guess in self.suspects(sol, F):
                cand = self.run(F | {guess}, level + 1)
                if cand is not None and _better(cand, best):
                    best = cand
        self.memo[F] = best
        return best


def _better(a, b):
    """Larger value wins; ties go to the lexicographically smaller tuple."""
    if b is None:
        return True
    if a[0] != b[0]:
        return a[0] > b[0]
    return a[1] < b[1]


def _check_inputs(g, gf, f):
    if f.n != g.n:
        raise ValueError(f"objective ground set has {f.n} elements, graph has {g.n} vertices")
    if not gf.disjuncts:
        raise InfeasibleError("the form has no disjuncts")


def block_solve(g: Graph, gf: GaifmanForm, disjunct: int, prefix, F, I: int, f: SubmodularOracle):
    """Best tuple for block ``I`` of one disjunct, or None when no tuple is admissible.

    ``prefix`` lists the tuples chosen for blocks ``0..I-1`` (None for absent
    blocks) and ``F`` is an iterable of guesses ``(i, v)`` with 0-based ids.
    """
    dj = _Disjunct(g, gf, gf.disjuncts[disjunct])
    return _Search(dj, f).block(list(prefix), frozenset(F), I)


def greedy_lowdeg(g: Graph, gf: GaifmanForm, f: SubmodularOracle, F=(), disjunct: int = 0) -> BlockSolution:
    """One greedy pass over the blocks of a disjunct under the guesses ``F``."""
    _check_inputs(g, gf, f)
    dj = _Disjunct(g, gf, gf.disjuncts[disjunct])
    return _Search(dj, f).greedy(frozenset(F))


def _solve(g, gf, f, patterns, B, exact):
    _check_inputs(g, gf, f)
    start = time.perf_counter()
    calls0 = f.calls
    best = None
    best_d = None
    nodes = depth = 0
    for di, d in enumerate(gf.disjuncts):
        dj = _Disjunct(g, gf, d)
        for tuples in patterns(dj):
            s = _Search(dj, f, tuples)
            got = s.run()
            nodes += s.nodes
            depth = max(depth, s.depth)
            if got is not None and _better(got, best):
                best, best_d = got, di
    if best is None:
        raise InfeasibleError("no complete feasible tuple found")
    return FoSolution(
        tuple=best[1],
        value=best[0],
        B=B,
        calls=f.calls - calls0,
        nodes=nodes,
        depth=depth,
        disjunct=best_d,
        millis=(time.perf_counter() - start) * 1000.0,
        exact=exact,
    )


def suspect_recurse_lowdeg(g: Graph, gf: GaifmanForm, f: SubmodularOracle) -> FoSolution:
    """2-approximate maximization of ``f`` over tuples satisfying ``gf``.

    Each disjunct is searched independently over guess sets; the best
    complete tuple across disjuncts is returned.
    """
    return _solve(g, gf, f, lambda dj: [None], B=2, exact=False)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for j in range(len(part)):
            yield part[:j] + [[first] + part[j]] + part[j + 1:]


def _pattern_of(t):
    seen = {}
    return tuple(seen.setdefault(u, len(seen)) for u in t)


def _coincidence_patterns(dj: _Disjunct):
    """Split each block's tuples by which positions coincide."""
    per_block = []
    for I, idx in enumerate(dj.blocks):
        wanted = []
        for part in _set_partitions(list(range(len(idx)))):
            label = [0] * len(idx)
            for c, cls in enumerate(sorted(part, key=min)):
                for p in cls:
                    label[p] = c
            wanted.append(tuple(label))
        groups = {w: [] for w in wanted}
        for t in dj.tuples[I]:
            groups[_pattern_of(t)].append(t)
        per_block.append([groups[w] for w in wanted])
    for combo in itertools.product(*per_block):
        if all(combo):
            yield list(combo)


def solve_linear_exact(g: Graph, gf: GaifmanForm, w: ModularFunction) -> FoSolution:
    """Exact maximization of a modular objective over tuples satisfying ``gf``.

    Fixing which variables coincide makes all entries of a tuple distinct,
    so the greedy's block marginals add up exactly and the suspect search
    returns an optimum.
    """
    if not isinstance(w, ModularFunction):
        raise TypeError("exact mode needs a ModularFunction objective")
    return _solve(g, gf, w, _coincidence_patterns, B=1, exact=True)
