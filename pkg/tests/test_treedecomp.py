import random
from functools import lru_cache

import pytest

from logiq.errors import FormatError, ValidationError
from logiq.graph import Graph
from logiq.treedecomp import (
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    TreeDecomposition,
    dump_decomposition,
    load_decomposition,
    make_nice,
    min_fill_decomposition,
    validate,
)

from instances import random_graph, random_tree


def exact_treewidth(g):
    """Subset DP over elimination prefixes; fine for n <= 10."""
    n = g.n
    if n == 0:
        return -1
    nbrs = [g.neighbor_set(v) for v in range(n)]

    def q(S, v):
        # vertices outside S + v reachable from v through S
        seen = {v}
        stack = [v]
        out = set()
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y in seen:
                    continue
                seen.add(y)
                if y in S:
                    stack.append(y)
                else:
                    out.add(y)
        return len(out)

    @lru_cache(maxsize=None)
    def tw(S):
        if not S:
            return -1
        return min(max(tw(S - {v}), q(S - {v}, v)) for v in S)

    return tw(frozenset(range(n)))


def path_td():
    return TreeDecomposition([{0, 1}, {1, 2}, {2, 3}], [(0, 1), (1, 2)])


def test_path_decomposition_is_valid():
    td = path_td()
    assert validate(Graph.path(4), td) == []
    assert td.width == 1


def test_missing_bag_is_reported():
    td = TreeDecomposition([{0, 1}, {2, 3}], [(0, 1)])
    kinds = {v.kind for v in validate(Graph.path(4), td)}
    assert "edge" in kinds


def test_disconnected_occurrences_are_reported():
    td = TreeDecomposition([{0, 1}, {1, 2}, {0, 3}], [(0, 1), (1, 2)])
    g = Graph(4, [(0, 1), (1, 2), (0, 3)])
    bad = validate(g, td)
    assert any(v.kind == "connectivity" and v.witness[0] == 0 for v in bad)


def test_structure_errors():
    assert validate(Graph(2), TreeDecomposition([{0}, {1}], []))  # forest, not a tree
    with pytest.raises(ValueError):
        TreeDecomposition([{0}], [(0, 3)])


def test_single_bag_always_valid():
    rng = random.Random(1)
    for _ in range(20):
        g = random_graph(rng, rng.randint(1, 8))
        td = TreeDecomposition([set(range(g.n))], [])
        assert validate(g, td) == []
        assert td.width == g.n - 1


def test_min_fill_small_cases():
    assert min_fill_decomposition(Graph.complete(4)).width == 3
    assert min_fill_decomposition(Graph.cycle(5)).width == 2
    assert exact_treewidth(Graph.cycle(5)) == 2


def test_min_fill_on_trees_has_width_one():
    rng = random.Random(2)
    for _ in range(30):
        t = random_tree(rng, rng.randint(2, 15))
        td = min_fill_decomposition(t)
        assert validate(t, td) == []
        assert td.width == 1


def test_min_fill_is_valid_and_not_below_treewidth():
    rng = random.Random(3)
    for _ in range(40):
        g = random_graph(rng, rng.randint(1, 8), rng.choice([0.2, 0.4, 0.6]))
        td = min_fill_decomposition(g)
        assert validate(g, td) == []
        assert td.width >= exact_treewidth(g)


def test_nice_single_bag():
    g = Graph(2, [(0, 1)])
    ntd = make_nice(TreeDecomposition([{0, 1}], []), g)
    assert ntd.check() == []
    assert ntd.width == 1
    kinds = [nd.kind for nd in ntd.nodes]
    assert kinds == [LEAF, INTRODUCE, INTRODUCE, FORGET, FORGET]


def test_nice_keeps_path_width():
    ntd = make_nice(path_td(), Graph.path(4))
    assert ntd.width == 1
    assert ntd.check() == []


def test_nice_form_is_a_valid_decomposition():
    rng = random.Random(4)
    for _ in range(40):
        g = random_graph(rng, rng.randint(1, 9))
        td = min_fill_decomposition(g)
        ntd = make_nice(td, g)
        assert ntd.check() == []
        assert ntd.width == td.width
        assert validate(g, ntd.to_plain()) == []
        assert set(ntd.forget_node()) == set(range(g.n))
        assert all(len(nd.children) == 2 for nd in ntd.nodes if nd.kind == JOIN)


def test_make_nice_rejects_invalid():
    with pytest.raises(ValidationError) as exc:
        make_nice(TreeDecomposition([{0}, {1}], [(0, 1)]), Graph.path(2))
    assert exc.value.violations


def test_pace_roundtrip():
    g = Graph.cycle(6)
    td = min_fill_decomposition(g)
    again = load_decomposition(dump_decomposition(td, g.n))
    assert again.bags == td.bags
    assert again.tree_edges == td.tree_edges


def test_pace_parse_errors():
    with pytest.raises(FormatError):
        load_decomposition("b 1 1\n")
    with pytest.raises(FormatError):
        load_decomposition("s td 1 2 2\nb 1 1 x\n")
