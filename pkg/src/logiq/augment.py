"""Transitive fraternal augmentations with in-neighbor function access.

Starting from a degeneracy orientation, each step adds

* transitive arcs ``u -> w`` for every path ``u -> v -> w``, and
* fraternal arcs between the two tails of any common head
  (``u -> v`` and ``w -> v``), oriented toward the endpoint with the smaller
  current in-degree (ties: toward the lower id).

``rho(p, u)`` is the ``p``-th in-neighbor of ``u`` in the final graph,
``rho(0, u) = u``.  Indices are stable across steps: a vertex keeps the
in-neighbors it had and new ones are appended in ascending order.  Each new
arc records labels ``"trans:r:q:p"`` (``rho_r(w) = rho_q(rho_p(w))``) or
``"frat:r:q:p"`` (some ``v`` has ``rho_p(v) = w`` and ``rho_q(v) = rho_r(w)``)
on its head ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapExceededError
from .graph import DirectedGraph, Graph, degeneracy_orientation

__all__ = ["Augmentation", "fraternal_augment", "ARC_CAP"]

ARC_CAP = 1_000_000


@dataclass
class Augmentation:
    n: int
    graphs: list  # DirectedGraph per step, graphs[0] is the orientation
    in_lists: list  # stable in-neighbor order of the final graph
    labels: list  # per vertex: set of label strings
    label_rows: list = field(default_factory=list)  # (v, r, q, p, kind) in creation order
    arc_step: dict = field(default_factory=dict)  # (u, v) -> step that added it

    @property
    def steps(self) -> int:
        return len(self.graphs) - 1

    @property
    def gamma(self) -> list[int]:
        """Max in-degree after each step."""
        return [h.max_in_degree() for h in self.graphs]

    @property
    def depth(self) -> int:
        return max((len(x) for x in self.in_lists), default=0)

    @property
    def final(self) -> DirectedGraph:
        return self.graphs[-1]

    def rho(self, p: int, u: int):
        """``rho_p(u)``, or None when ``u`` has fewer than ``p`` in-neighbors."""
        if u is None:
            return None
        if p == 0:
            return u
        ins = self.in_lists[u]
        return ins[p - 1] if p <= len(ins) else None

    def has_label(self, u: int, label: str) -> bool:
        return label in self.labels[u]

    def dump(self) -> str:
        lines = []
        for (u, v), step in sorted(self.arc_step.items(), key=lambda kv: (kv[1], kv[0])):
            lines.append(f"arc {u + 1} {v + 1} {step}")
        for v, r, q, p, kind in self.label_rows:
            lines.append(f"label {v + 1} {r} {q} {p} {kind}")
        return "\n".join(lines) + "\n"


def fraternal_augment(g: Graph | DirectedGraph, steps: int, arc_cap: int = ARC_CAP) -> Augmentation:
    """Run ``steps`` closure steps; an undirected input is oriented by degeneracy first."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    base = g if isinstance(g, DirectedGraph) else degeneracy_orientation(g)
    n = g.n
    in_lists = [list(base.in_neighbors(v)) for v in range(n)]
    arcs = {(u, v) for v in range(n) for u in in_lists[v]}
    arc_step = {a: 0 for a in arcs}
    labels = [set() for _ in range(n)]
    rows = []
    graphs = [base]

    def index_of(v, u):
        return in_lists[v].index(u) + 1

    for step in range(1, steps + 1):
        old = set(arcs)
        old_in = [list(x) for x in in_lists]
        pos = [{u: i + 1 for i, u in enumerate(x)} for x in old_in]
        out = [[] for _ in range(n)]
        for u, v in sorted(old):
            out[u].append(v)
        new_arcs = {}  # (u, w) -> list of (kind, q, p) witnesses
        # transitivity: u -> v -> w
        for v in range(n):
            for u in old_in[v]:
                for w in out[v]:
                    if u != w and (u, w) not in old:
                        # rho_p(w) = v, rho_q(v) = u
                        new_arcs.setdefault((u, w), []).append(("trans", pos[v][u], pos[w][v]))
        added = set(new_arcs)
        indeg = [len(x) for x in in_lists]
        for u, w in added:
            indeg[w] += 1
        # fraternality: u -> v <- w
        frat = {}
        for v in range(n):
            tails = old_in[v]
            for a in range(len(tails)):
                for b in range(a + 1, len(tails)):
                    u, w = sorted((tails[a], tails[b]))
                    if (u, w) in old or (w, u) in old or (u, w) in added or (w, u) in added:
                        continue
                    frat.setdefault((u, w), []).append(v)
        for u, w in sorted(frat):
            if (u, w) in added or (w, u) in added:
                continue
            # head goes to the endpoint with the smaller in-degree, ties to the lower id
            head, tail = (u, w) if indeg[u] <= indeg[w] else (w, u)
            indeg[head] += 1
            added.add((tail, head))
            for v in frat[(u, w)]:
                # rho_p(v) = head, rho_q(v) = tail
                new_arcs.setdefault((tail, head), []).append(("frat", pos[v][tail], pos[v][head]))
        if len(arcs) + len(added) > arc_cap:
            raise CapExceededError(f"augmentation exceeds {arc_cap} arcs at step {step}")
        by_head = {}
        for u, w in added:
            by_head.setdefault(w, []).append(u)
        for w in sorted(by_head):
            for u in sorted(by_head[w]):
                in_lists[w].append(u)
                arcs.add((u, w))
                arc_step[(u, w)] = step
        for (u, w) in sorted(new_arcs):
            r = index_of(w, u)
            for kind, q, p in sorted(set(new_arcs[(u, w)])):
                tag = f"{kind}:{r}:{q}:{p}"
                if tag not in labels[w]:
                    labels[w].add(tag)
                    rows.append((w, r, q, p, kind))
        graphs.append(DirectedGraph(n, arcs))
    return Augmentation(n, graphs, in_lists, labels, rows, arc_step)
