"""Undirected and directed graphs over dense vertex ids ``0..n-1``.

Vertex ids are 0-based in memory; the text file format is 1-based (DIMACS).
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Iterable, NamedTuple

from .errors import FormatError

log = logging.getLogger(__name__)

__all__ = [
    "INFINITE",
    "Graph",
    "DirectedGraph",
    "InducedSubgraph",
    "load_graph",
    "dump_graph",
    "distance",
    "neighborhood",
    "induced_subgraph",
    "degeneracy",
    "degeneracy_orientation",
]


class _Infinite:
    """Distance between disconnected vertices; larger than every integer."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


def _check_vertex(n, v):
    if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
        raise ValueError(f"vertex id {v!r} out of range 0..{n - 1}")


class Graph:
    """Simple undirected graph; immutable after construction.

    >>> g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    >>> g.neighbors(1)
    (0, 2)
    """

    __slots__ = ("n", "edges", "_adj", "_adjset", "_dist")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = set()
        for u, v in edges:
            _check_vertex(n, u)
            _check_vertex(n, v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            norm.add((u, v) if u < v else (v, u))
        adj = [[] for _ in range(n)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self.edges = frozenset(norm)
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self._adjset = tuple(frozenset(a) for a in adj)
        self._dist = {}

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    def neighbor_set(self, u: int) -> frozenset[int]:
        return self._adjset[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adjset[u]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def distances_from(self, u: int) -> tuple:
        """BFS hop distances from ``u`` (``INFINITE`` where unreachable); cached."""
        row = self._dist.get(u)
        if row is None:
            _check_vertex(self.n, u)
            dist = [INFINITE] * self.n
            dist[u] = 0
            queue = deque([u])
            while queue:
                x = queue.popleft()
                dx = dist[x] + 1
                for y in self._adj[x]:
                    if dist[y] is INFINITE:
                        dist[y] = dx
                        queue.append(y)
            row = tuple(dist)
            self._dist[u] = row
        return row

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    # a few constructors used throughout tests and demos
    @classmethod
    def path(cls, n):
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n):
        if n < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, leaves):
        return cls(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

    @classmethod
    def complete(cls, n):
        return cls(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class DirectedGraph:
    """Directed graph without self-loops.

    ``in_neighbors(v)`` lists the tails of arcs into ``v`` in ascending id
    order; that order defines the in-neighbor functions used downstream.
    """

    __slots__ = ("n", "arcs", "_in", "_out")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = ()):
        arcs = set(arcs)
        ins = [[] for _ in range(n)]
        outs = [[] for _ in range(n)]
        for u, v in arcs:
            _check_vertex(n, u)
            _check_vertex(n, v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            ins[v].append(u)
            outs[u].append(v)
        self.n = n
        self.arcs = frozenset(arcs)
        self._in = tuple(tuple(sorted(a)) for a in ins)
        self._out = tuple(tuple(sorted(a)) for a in outs)

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_neighbors(self, u: int) -> tuple[int, ...]:
        return self._out[u]

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def max_in_degree(self) -> int:
        return max((len(a) for a in self._in), default=0)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def underlying(self) -> Graph:
        return Graph(self.n, self.arcs)

    def __repr__(self):
        return f"DirectedGraph(n={self.n}, arcs={len(self.arcs)})"


class InducedSubgraph(NamedTuple):
    graph: Graph
    old_of_new: tuple[int, ...]
    new_of_old: dict[int, int]


def load_graph(text: str) -> Graph:
    """Parse the line-oriented graph format (``p n m`` header, ``e u v`` lines)."""
    n = None
    declared_m = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise FormatError("duplicate header", line=lineno)
            # tolerate DIMACS "p edge n m"
            nums = parts[2:] if len(parts) == 4 else parts[1:]
            if len(nums) != 2:
                raise FormatError("header must be 'p <n> <m>'", line=lineno)
            try:
                n, declared_m = int(nums[0]), int(nums[1])
            except ValueError:
                raise FormatError("non-integer header field", line=lineno) from None
            if n < 0 or declared_m < 0:
                raise FormatError("negative header field", line=lineno)
        elif parts[0] == "e":
            if n is None:
                raise FormatError("edge before header", line=lineno)
            if len(parts) != 3:
                raise FormatError("edge line must be 'e <u> <v>'", line=lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise FormatError("non-integer vertex id", line=lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise FormatError(f"vertex id out of range 1..{n}", line=lineno)
            if u == v:
                raise FormatError(f"self-loop at vertex {u}", line=lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                log.warning("line %d: duplicate edge %d-%d ignored", lineno, u, v)
                continue
            seen.add(key)
            edges.append((u - 1, v - 1))
        else:
            raise FormatError(f"unknown line type {parts[0]!r}", line=lineno)
    if n is None:
        raise FormatError("missing 'p <n> <m>' header")
    if declared_m != len(edges):
        log.warning("header declares %d edges, found %d", declared_m, len(edges))
    return Graph(n, edges)


def dump_graph(g: Graph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def distance(g: Graph, u: int, v: int):
    """Hop distance, or ``INFINITE`` when ``u`` and ``v`` are disconnected."""
    _check_vertex(g.n, v)
    return g.distances_from(u)[v]


def neighborhood(g: Graph, tup: Iterable[int], r: int) -> frozenset[int]:
    """All vertices within distance ``r`` of some entry of ``tup``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    out = set()
    for u in tup:
        row = g.distances_from(u)
        if r == 0:
            out.add(u)
            continue
        out.update(v for v, d in enumerate(row) if d <= r)
    return frozenset(out)


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> InducedSubgraph:
    """Subgraph induced by ``vertices``; new ids follow ascending old ids."""
    old = sorted(set(vertices))
    for v in old:
        _check_vertex(g.n, v)
    new_of_old = {v: i for i, v in enumerate(old)}
    edges = [
        (new_of_old[u], new_of_old[v])
        for u, v in g.edges
        if u in new_of_old and v in new_of_old
    ]
    return InducedSubgraph(Graph(len(old), edges), tuple(old), new_of_old)


def _peeling_order(g: Graph):
    """Repeated min-degree removal, ties by lowest id. Returns (order, degeneracy)."""
    deg = [g.degree(v) for v in range(g.n)]
    removed = [False] * g.n
    # bucket queue keyed by current degree; each bucket kept as a sorted set
    buckets = {}
    for v in range(g.n):
        buckets.setdefault(deg[v], set()).add(v)
    order = []
    k = 0
    for _ in range(g.n):
        d = min(b for b, s in buckets.items() if s)
        v = min(buckets[d])
        buckets[d].discard(v)
        removed[v] = True
        order.append(v)
        k = max(k, d)
        for w in g.neighbors(v):
            if not removed[w]:
                buckets[deg[w]].discard(w)
                deg[w] -= 1
                buckets.setdefault(deg[w], set()).add(w)
    return order, k


def degeneracy(g: Graph) -> int:
    return _peeling_order(g)[1]


def degeneracy_orientation(g: Graph) -> DirectedGraph:
    """Orient every edge from the later-peeled to the earlier-peeled endpoint.

    The in-degree of a vertex equals its degree at the moment it was peeled,
    so the maximum in-degree is the degeneracy of ``g``.
    """
    order, _ = _peeling_order(g)
    pos = {v: i for i, v in enumerate(order)}
    arcs = [(u, v) if pos[u] > pos[v] else (v, u) for u, v in g.edges]
    return DirectedGraph(g.n, arcs)
