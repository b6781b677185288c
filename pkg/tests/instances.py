"""Random and hand-built instances shared by the test modules."""

from __future__ import annotations

import json
import math

from logiq.augment import fraternal_augment
from logiq.graph import DirectedGraph, Graph
from logiq.logic import KsDisjunct, KsNormalForm, TauConstraint, load_gaifman
from logiq.submodular import CoverageFunction, ModularFunction

CATALOG = ["true", "all", "nonempty", "indset", "vcover", "domset", "edge_in", "connected"]


def random_graph(rng, n, p=0.35):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def bounded_degree_graph(rng, n, max_deg=4, p=0.3):
    deg = [0] * n
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p and deg[u] < max_deg and deg[v] < max_deg:
                edges.append((u, v))
                deg[u] += 1
                deg[v] += 1
    return Graph(n, edges)


def random_tree(rng, n):
    return Graph(n, [(v, rng.randrange(v)) for v in range(1, n)])


def coverage(rng, n, items=8, most=3):
    return CoverageFunction({u: [rng.randrange(items) for _ in range(rng.randint(0, most))] for u in range(n)}, n=n)


def modular(rng, n, top=5):
    return ModularFunction([rng.randint(0, top) for _ in range(n)])


def objective(rng, n):
    return coverage(rng, n) if rng.random() < 0.5 else modular(rng, n)


def random_predicate(rng, depth=2):
    """Depth-2 AND/OR combination over catalog predicates."""
    if depth == 0 or rng.random() < 0.3:
        return f"{rng.choice(CATALOG)}(X)"
    op = rng.choice([" & ", " | "])
    parts = [random_predicate(rng, depth - 1) for _ in range(rng.randint(2, 3))]
    return "(" + op.join(parts) + ")"


# --- Gaifman forms --------------------------------------------------------------


def _block_formula(rng, vs, r):
    if len(vs) == 1:
        x = vs[0]
        if r == 0:
            return f"{x} = {x}"
        return rng.choice([f"{x} = {x}", f"exists y. adj({x}, y)", f"!(exists y. adj({x}, y))"])
    # chained blocks keep every block connected at distance <= 2r
    parts = [f"dist({a}, {b}) <= {2 * r}" for a, b in zip(vs, vs[1:])]
    a, b = rng.sample(vs, 2)
    parts.append(rng.choice([f"adj({a}, {b})", f"{a} != {b}", f"!adj({a}, {b})", f"({a} = {b} | adj({a}, {b}))"]))
    return " & ".join(parts)


def random_gaifman(rng, k):
    vs = [f"x{i + 1}" for i in range(k)]
    disjuncts = []
    for _ in range(rng.choice([1, 1, 2])):
        r = rng.choice([0, 1, 1])
        perm = vs[:]
        rng.shuffle(perm)
        blocks = []
        i = 0
        while i < k:
            s = rng.randint(1, min(2, k - i))
            blocks.append(sorted(perm[i:i + s]))
            i += s
        disjuncts.append({"r": r, "blocks": [{"vars": b, "formula": _block_formula(rng, b, r)} for b in blocks]})
    return load_gaifman(json.dumps({"vars": vs, "disjuncts": disjuncts}))


def singleton_blocks(k, r=1, formula="{x} = {x}"):
    vs = [f"x{i + 1}" for i in range(k)]
    doc = {"vars": vs, "disjuncts": [{"r": r, "blocks": [{"vars": [x], "formula": formula.format(x=x)} for x in vs]}]}
    return load_gaifman(json.dumps(doc))


def hub_graph(spokes, idle):
    """A hub joined to ``spokes`` tips through private middle vertices, plus isolated vertices.

    Vertex 0 is the hub, tips are ``1..spokes``, middles follow, isolated
    vertices come last.  Tips sit at distance 2 from the hub and 4 from each
    other.
    """
    n = 1 + 2 * spokes + idle
    edges = []
    for i in range(spokes):
        tip, mid = 1 + i, 1 + spokes + i
        edges += [(0, mid), (mid, tip)]
    return Graph(n, edges)


def adversarial_lowdeg():
    """Instances where greedy takes the hub and strands the heavy tips.

    Each entry is ``(name, graph, form, f)``.
    """
    out = []
    for spokes, k in ((4, 4), (3, 3), (4, 3)):
        g = hub_graph(spokes, idle=k)
        w = [0.0] * g.n
        w[0] = 12.0
        for i in range(spokes):
            w[1 + i] = 11.0
        out.append((f"hub{spokes}-k{k}-modular", g, singleton_blocks(k), ModularFunction(w)))
    # coverage: the hub covers most of two tips' items
    g = hub_graph(4, idle=4)
    sets = {
        0: list("abcdefghi"),
        1: list("abcde"),
        2: list("fghij"),
        3: list("klmno"),
        4: list("pqrst"),
    }
    out.append(("hub4-k4-coverage", g, singleton_blocks(4), CoverageFunction(sets, n=g.n)))
    # an adjacent pair plus two singletons: the hub's pair hogs every tip
    g = hub_graph(4, idle=2)
    doc = {"vars": ["x1", "x2", "x3", "x4"], "disjuncts": [{"r": 1, "blocks": [
        {"vars": ["x1", "x2"], "formula": "adj(x1, x2)"},
        {"vars": ["x3"], "formula": "x3 = x3"},
        {"vars": ["x4"], "formula": "x4 = x4"},
    ]}]}
    w = [0.0] * g.n
    w[0] = 12.0
    for i in range(4):
        w[1 + i] = 11.0
    out.append(("pair-hub", g, load_gaifman(json.dumps(doc)), ModularFunction(w)))
    return out


# --- KS normal forms ------------------------------------------------------------


def random_ks(rng, k, depth, max_neq=3):
    disjuncts = []
    for _ in range(rng.choice([1, 1, 2])):
        eq = []
        for j in range(1, k):
            if rng.random() < 0.6:
                i = rng.randrange(j)
                eq.append((i, rng.randint(0, depth), j, rng.randint(0, depth)))
        neq = []
        for _ in range(rng.randint(0, max_neq) if k > 1 else 0):
            i, j = rng.sample(range(k), 2)
            neq.append((i, rng.randint(0, depth), j, rng.randint(0, depth)))
        tau = []
        if rng.random() < 0.3:
            fe = ((1, 1, depth),) if rng.random() < 0.5 else ((0, 1, 1),)
            tau.append(TauConstraint(rng.randrange(k), (), fe))
        disjuncts.append(KsDisjunct(tuple(tau), tuple(eq), tuple(neq)))
    return KsNormalForm(k, depth, tuple(disjuncts))


def ks_instance(rng, n_range=(5, 14), k_max=6, tuple_cap=2 * 10**5):
    """Random sparse graph, augmentation, KS form and objective, sized for brute force."""
    n = rng.randint(*n_range)
    k = rng.randint(1, k_max)
    k = min(k, max(1, int(math.log(tuple_cap) / math.log(n))))
    g = random_graph(rng, n, rng.choice([0.12, 0.2, 0.28]))
    aug = fraternal_augment(g, rng.randint(0, 2))
    ks = random_ks(rng, k, min(2, max(aug.depth, 1)))
    f = coverage(rng, n, items=10) if rng.random() < 0.6 else modular(rng, n)
    return g, aug, ks, f


def adversarial_bddexp():
    """Hand-built instances where greedy is infeasible or loses value.

    Augmentations use zero steps over explicit orientations, so ``rho`` is
    read straight off the arcs.  Each entry is ``(name, aug, ks, f)``.
    """
    out = []
    # x1 takes the heavy vertex 0; its in-neighbor 1 is the only vertex left
    # for x2 (x2 needs an in-neighbor and must differ from x1)
    d = DirectedGraph(4, [(1, 0), (3, 1)])
    ks = KsNormalForm(2, 1, (KsDisjunct(
        (TauConstraint(1, (), ((0, 1, 1),)),),
        (),
        ((0, 1, 1, 0), (0, 0, 1, 0)),
    ),))
    out.append(("stranded-in-neighbor", fraternal_augment(d, 0), ks, ModularFunction([10, 4, 5, 0])))
    # x1's in-neighbor must differ from x2; the heavy x1 choice points at
    # the only heavy x2 candidate
    d = DirectedGraph(6, [(1, 0), (3, 2)])
    ks = KsNormalForm(2, 1, (KsDisjunct((), (), ((0, 1, 1, 0),)),))
    out.append(("blocked-partner", fraternal_augment(d, 0), ks, ModularFunction([10, 9, 8, 0, 0, 0])))
    # a two-variable tree (x2 is x1's in-neighbor) plus a singleton x3 whose
    # in-neighbor must differ from x2; the tree's best pair (3, 1) rules out
    # the heavy x3 = 3 and leaves only x3 = 1
    d = DirectedGraph(6, [(1, 3), (5, 1)])
    ks = KsNormalForm(3, 1, (KsDisjunct(
        (TauConstraint(2, (), ((0, 1, 1),)),),
        ((0, 1, 1, 0),),
        ((1, 0, 2, 1),),
    ),))
    out.append(("tree-vs-singleton", fraternal_augment(d, 0), ks, ModularFunction([7, 2, 2, 9, 2, 6])))
    return out
