"""Recursive greedy maximization over the models of a structured DNNF."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from ..dnnf import Circuit, enumerate_models, is_satisfiable, split
from ..errors import InfeasibleError
from ..submodular import SubmodularOracle, contract

__all__ = ["MsoSolution", "recursive_greedy", "certificate_bound"]


@dataclass
class MsoSolution:
    U: frozenset
    value: float
    B: int  # claimed approximation factor: B * f(U) >= f(OPT)
    calls: int
    depth: int
    nodes: int  # recursive invocations
    millis: float
    edges: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "solution": sorted(u + 1 for u in self.U),
            "value": self.value,
            "certificate": self.B,
            "oracle_calls": self.calls,
            "depth": self.depth,
            "recursive_calls": self.nodes,
        }


def certificate_bound(n: int) -> int:
    """``1 + ceil(log_{3/2} n)``; the factor guaranteed for ``n`` variables."""
    if n <= 1:
        return 1
    return 1 + math.ceil(math.log(n) / math.log(1.5) - 1e-12)


def _is_true(c: Circuit) -> bool:
    # normal-form true circuits are AND chains over leaf T gates
    return all(g.kind in ("T", "A") for g in c.gates)


def _key(U):
    return tuple(sorted(U))


class _Run:
    def __init__(self, base_size, record_edges):
        self.base_size = base_size
        self.nodes = 0
        self.depth = 0
        self.record_edges = record_edges
        self.edges = []

    def solve(self, c: Circuit, f: SubmodularOracle, level: int):
        """Best found model and its certificate, or None when unsatisfiable."""
        self.nodes += 1
        self.depth = max(self.depth, level)
        if not is_satisfiable(c):
            return None
        vt = c.vtree
        if _is_true(c):
            # every subset is a model, so by monotonicity the full set is optimal
            return frozenset(vt.variables), 1
        if vt.count[vt.root] <= self.base_size:
            best = None
            for U in enumerate_models(c, cap=1 << self.base_size):
                cand = (f(U), _neg_key(U))
                if best is None or cand > best[0]:
                    best = (cand, U)
            return best[1], 1
        sp = split(c)
        if self.record_edges:
            self.edges.append((c, sp.edge))
        best = None
        cert = 1
        for d1, d2 in sp.pairs:
            r1 = self.solve(d1, f, level + 1)
            if r1 is None:
                continue
            U1, B1 = r1
            r2 = self.solve(d2, contract(f, U1), level + 1)
            if r2 is None:
                continue
            U2, B2 = r2
            U = U1 | U2
            val = f(U)
            cert = max(cert, 1 + max(B1, B2))
            if best is None or val > best[0]:
                best = (val, U)
        if best is None:
            return None
        return best[1], cert


def _neg_key(U):
    # larger tuple compares greater; negate so the lexicographically smallest wins ties
    return tuple(-x for x in sorted(U)) + (1,)


def recursive_greedy(
    c: Circuit, f: SubmodularOracle, base_size: int = 1, record_edges: bool = False
) -> MsoSolution:
    """Approximately maximize ``f`` over the models of ``c``.

    Splits at the leaf separator, recurses on each factor pair (the second
    factor with ``f`` contracted by the first factor's answer) and keeps the
    best union.  Circuits of at most ``base_size`` variables are solved
    exhaustively.  The reported certificate ``B`` satisfies
    ``B * f(U) >= f(OPT)``.
    """
    if base_size < 1:
        raise ValueError("base_size must be at least 1")
    if not is_satisfiable(c):
        raise InfeasibleError("the circuit has no models")
    start = time.perf_counter()
    calls0 = f.calls
    run = _Run(base_size, record_edges)
    got = run.solve(c, f, 0)
    if got is None:
        raise InfeasibleError("no feasible solution found")
    U, B = got
    value = f(U)
    return MsoSolution(
        U=frozenset(U),
        value=value,
        B=B,
        calls=f.calls - calls0,
        depth=run.depth,
        nodes=run.nodes,
        millis=(time.perf_counter() - start) * 1000.0,
        edges=run.edges,
    )
