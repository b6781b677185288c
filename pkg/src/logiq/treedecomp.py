"""Tree decompositions: validation, min-fill construction, nice normal form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormatError, ValidationError
from .graph import Graph

__all__ = [
    "TreeDecomposition",
    "NiceNode",
    "NiceTreeDecomposition",
    "Violation",
    "validate",
    "min_fill_decomposition",
    "make_nice",
    "load_decomposition",
    "dump_decomposition",
    "LEAF",
    "INTRODUCE",
    "FORGET",
    "JOIN",
]

LEAF = "leaf"
INTRODUCE = "introduce"
FORGET = "forget"
JOIN = "join"


@dataclass(frozen=True)
class Violation:
    kind: str  # "structure" | "vertex" | "edge" | "connectivity"
    witness: tuple
    message: str

    def __str__(self):
        return self.message


class TreeDecomposition:
    """Bags over the nodes ``0..N-1`` of an undirected tree."""

    def __init__(self, bags: Sequence[Iterable[int]], tree_edges: Iterable[tuple[int, int]]):
        self.bags = tuple(frozenset(b) for b in bags)
        self.tree_edges = tuple(sorted((min(a, b), max(a, b)) for a, b in tree_edges))
        adj = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            if not (0 <= a < len(adj) and 0 <= b < len(adj)):
                raise ValueError(f"tree edge ({a}, {b}) references a missing node")
            adj[a].append(b)
            adj[b].append(a)
        self.tree_adj = tuple(tuple(sorted(a)) for a in adj)

    @property
    def num_nodes(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def structural_violations(self) -> list[Violation]:
        out = []
        k = self.num_nodes
        if k == 0:
            return [Violation("structure", (), "decomposition has no nodes")]
        if len(set(self.tree_edges)) != len(self.tree_edges):
            out.append(Violation("structure", (), "duplicate tree edge"))
        if any(a == b for a, b in self.tree_edges):
            out.append(Violation("structure", (), "tree self-loop"))
        if len(self.tree_edges) != k - 1:
            out.append(
                Violation(
                    "structure",
                    (len(self.tree_edges),),
                    f"a tree on {k} nodes needs {k - 1} edges, got {len(self.tree_edges)}",
                )
            )
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for s in self.tree_adj[t]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        if len(seen) != k:
            missing = min(set(range(k)) - seen)
            out.append(Violation("structure", (missing,), f"tree is disconnected at node {missing}"))
        return out

    def occurrence_violations(self) -> list[Violation]:
        """Vertices whose occurrence set ``{t : v in B(t)}`` is not connected."""
        out = []
        occ = {}
        for t, bag in enumerate(self.bags):
            for v in bag:
                occ.setdefault(v, set()).add(t)
        for v in sorted(occ):
            nodes = occ[v]
            start = min(nodes)
            seen = {start}
            stack = [start]
            while stack:
                t = stack.pop()
                for s in self.tree_adj[t]:
                    if s in nodes and s not in seen:
                        seen.add(s)
                        stack.append(s)
            if seen != nodes:
                out.append(
                    Violation(
                        "connectivity",
                        (v, tuple(sorted(nodes))),
                        f"occurrences of vertex {v} are disconnected: nodes {sorted(nodes)}",
                    )
                )
        return out

    def __repr__(self):
        return f"TreeDecomposition(nodes={self.num_nodes}, width={self.width})"


def validate(g: Graph, td: TreeDecomposition) -> list[Violation]:
    """All violated decomposition conditions, each with a witness; empty means valid."""
    out = td.structural_violations()
    covered = set().union(*td.bags) if td.bags else set()
    for v in range(g.n):
        if v not in covered:
            out.append(Violation("vertex", (v,), f"vertex {v} is in no bag"))
    stray = sorted(v for v in covered if not 0 <= v < g.n)
    for v in stray:
        out.append(Violation("vertex", (v,), f"bag mentions unknown vertex {v}"))
    for u, v in g.sorted_edges():
        if not any(u in b and v in b for b in td.bags):
            out.append(Violation("edge", (u, v), f"edge ({u}, {v}) is in no bag"))
    if not any(x.kind == "structure" for x in out):
        out.extend(td.occurrence_violations())
    return out


def min_fill_decomposition(g: Graph) -> TreeDecomposition:
    """Decomposition from a min-fill elimination ordering (ties by lowest id)."""
    n = g.n
    if n == 0:
        return TreeDecomposition([()], [])
    nbrs = [set(g.neighbors(v)) for v in range(n)]
    alive = set(range(n))
    order = []
    bag_of = {}
    while alive:
        best = None
        for v in sorted(alive):
            nb = sorted(nbrs[v])
            fill = 0
            for i, a in enumerate(nb):
                na = nbrs[a]
                for b in nb[i + 1:]:
                    if b not in na:
                        fill += 1
            if best is None or fill < best[0]:
                best = (fill, v)
                if fill == 0:
                    break
        v = best[1]
        nb = nbrs[v]
        for a in nb:
            nbrs[a] |= nb
            nbrs[a].discard(a)
            nbrs[a].discard(v)
        bag_of[v] = frozenset(nb | {v})
        order.append(v)
        alive.remove(v)
        nbrs[v] = set()
    pos = {v: i for i, v in enumerate(order)}
    bags = [bag_of[v] for v in order]
    edges = []
    roots = []
    for i, v in enumerate(order):
        later = [u for u in bag_of[v] if u != v]
        if later:
            parent = min(later, key=pos.__getitem__)
            edges.append((i, pos[parent]))
        else:
            roots.append(i)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(bags, edges)


@dataclass(frozen=True)
class NiceNode:
    kind: str
    bag: frozenset
    children: tuple[int, ...] = ()
    vertex: int | None = None


class NiceTreeDecomposition:
    """Rooted binary decomposition with LEAF/INTRODUCE/FORGET/JOIN nodes.

    Nodes are stored children-first, so iterating ``nodes`` in order is a
    valid bottom-up schedule; the root is the last node and has an empty bag.
    """

    def __init__(self, nodes: Sequence[NiceNode]):
        self.nodes = tuple(nodes)
        self.root = len(self.nodes) - 1

    @property
    def width(self) -> int:
        return max((len(nd.bag) for nd in self.nodes), default=0) - 1

    def __len__(self):
        return len(self.nodes)

    def check(self) -> list[str]:
        """Violations of the nice-form invariants (empty means well formed)."""
        errs = []
        if not self.nodes:
            return ["empty decomposition"]
        if self.nodes[self.root].bag:
            errs.append("root bag is not empty")
        for i, nd in enumerate(self.nodes):
            if any(c >= i for c in nd.children):
                errs.append(f"node {i}: child stored after parent")
                continue
            kids = [self.nodes[c] for c in nd.children]
            if nd.kind == LEAF:
                if kids or nd.bag:
                    errs.append(f"node {i}: leaf must be childless with empty bag")
            elif nd.kind == INTRODUCE:
                if len(kids) != 1 or kids[0].bag | {nd.vertex} != nd.bag or nd.vertex in kids[0].bag:
                    errs.append(f"node {i}: bad introduce of {nd.vertex}")
            elif nd.kind == FORGET:
                if len(kids) != 1 or kids[0].bag - {nd.vertex} != nd.bag or nd.vertex not in kids[0].bag:
                    errs.append(f"node {i}: bad forget of {nd.vertex}")
            elif nd.kind == JOIN:
                if len(kids) != 2 or any(k.bag != nd.bag for k in kids):
                    errs.append(f"node {i}: join children must share its bag")
            else:
                errs.append(f"node {i}: unknown kind {nd.kind!r}")
        forgets = {}
        for nd in self.nodes:
            if nd.kind == FORGET:
                forgets[nd.vertex] = forgets.get(nd.vertex, 0) + 1
        for v, c in sorted(forgets.items()):
            if c != 1:
                errs.append(f"vertex {v} forgotten {c} times")
        return errs

    def forget_node(self) -> dict[int, int]:
        """Map each vertex to the unique node that forgets it."""
        return {nd.vertex: i for i, nd in enumerate(self.nodes) if nd.kind == FORGET}

    def to_plain(self) -> TreeDecomposition:
        edges = [(i, c) for i, nd in enumerate(self.nodes) for c in nd.children]
        return TreeDecomposition([nd.bag for nd in self.nodes], edges)


def make_nice(td: TreeDecomposition, g: Graph | None = None, root: int = 0) -> NiceTreeDecomposition:
    """Convert a valid decomposition to nice form with the same width."""
    problems = validate(g, td) if g is not None else (
        td.structural_violations() or td.occurrence_violations()
    )
    if problems:
        raise ValidationError("invalid tree decomposition", problems)
    nodes: list[NiceNode] = []

    def add(kind, bag, children=(), vertex=None):
        nodes.append(NiceNode(kind, frozenset(bag), tuple(children), vertex))
        return len(nodes) - 1

    def transition(node, have, want):
        # forget first so intermediate bags stay inside the child's bag
        bag = set(have)
        for v in sorted(have - want):
            bag.discard(v)
            node = add(FORGET, bag, (node,), v)
        for v in sorted(want - have):
            bag.add(v)
            node = add(INTRODUCE, bag, (node,), v)
        return node

    # iterative post-order over the rooted tree
    parent = {root: None}
    order = []
    stack = [root]
    while stack:
        t = stack.pop()
        order.append(t)
        for s in td.tree_adj[t]:
            if s not in parent:
                parent[s] = t
                stack.append(s)
    children = {t: [s for s in td.tree_adj[t] if parent.get(s) == t] for t in order}
    top = {}
    for t in reversed(order):
        bag = td.bags[t]
        chains = [transition(top[c], td.bags[c], bag) for c in children[t]]
        if not chains:
            chains = [transition(add(LEAF, ()), frozenset(), bag)]
        node = chains[0]
        for other in chains[1:]:
            node = add(JOIN, bag, (node, other))
        top[t] = node
    transition(top[root], td.bags[root], frozenset())
    if nodes[-1].bag:
        raise AssertionError("nice root bag must be empty")
    return NiceTreeDecomposition(nodes)


def load_decomposition(text: str) -> TreeDecomposition:
    """Parse the PACE ``.td`` layout (1-based bag and vertex ids)."""
    header = None
    bags = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td":
                    raise FormatError("header must be 's td <nodes> <width+1> <n>'", line=lineno)
                header = tuple(int(x) for x in parts[2:])
            elif parts[0] == "b":
                if header is None:
                    raise FormatError("bag before header", line=lineno)
                node = int(parts[1])
                vs = [int(x) for x in parts[2:]]
                if vs and vs[-1] == 0:
                    vs = vs[:-1]
                if not 1 <= node <= header[0]:
                    raise FormatError(f"bag id {node} out of range", line=lineno)
                if any(not 1 <= v <= header[2] for v in vs):
                    raise FormatError("bag vertex out of range", line=lineno)
                bags[node - 1] = [v - 1 for v in vs]
            else:
                if header is None:
                    raise FormatError("tree edge before header", line=lineno)
                if len(parts) != 2:
                    raise FormatError("tree edge must be '<a> <b>'", line=lineno)
                a, b = int(parts[0]), int(parts[1])
                if not (1 <= a <= header[0] and 1 <= b <= header[0]):
                    raise FormatError("tree edge node out of range", line=lineno)
                edges.append((a - 1, b - 1))
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError("non-integer field", line=lineno) from None
    if header is None:
        raise FormatError("missing 's td' header")
    count = header[0]
    td = TreeDecomposition([bags.get(i, ()) for i in range(count)], edges)
    if count and td.width + 1 != header[1]:
        raise FormatError(f"header declares max bag size {header[1]}, bags give {td.width + 1}")
    return td


def dump_decomposition(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {td.num_nodes} {td.width + 1} {n}"]
    for i, bag in enumerate(td.bags):
        lines.append(" ".join(["b", str(i + 1)] + [str(v + 1) for v in sorted(bag)]))
    lines += [f"{a + 1} {b + 1}" for a, b in td.tree_edges]
    return "\n".join(lines) + "\n"
