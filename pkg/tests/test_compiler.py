import random

import pytest

from logiq.bruteforce import predicate_holds
from logiq.compiler import (
    CONNECTED_BAG_CAP,
    compile_predicate,
    list_predicates,
    parse_predicate,
    predicate_text,
    state_bound,
)
from logiq.dnnf import check_structured, enumerate_models, evaluate
from logiq.errors import CapExceededError, FormatError, ValidationError
from logiq.graph import Graph
from logiq.treedecomp import TreeDecomposition, make_nice, min_fill_decomposition

from instances import CATALOG, random_graph, random_predicate


def all_sets(n):
    for m in range(1 << n):
        yield frozenset(v for v in range(n) if m >> v & 1)


def brute_models(g, text):
    expr = parse_predicate(text)
    return {U for U in all_sets(g.n) if predicate_holds(g, expr, U)}


def test_edge_in_on_p4_matches_running_example():
    models = enumerate_models(compile_predicate(Graph.path(4), "edge_in(X)").circuit)
    h = {U for U in all_sets(4) if {0, 1} <= U or {1, 2} <= U or {2, 3} <= U}
    assert models == h and len(models) == 8


def test_true_has_every_subset():
    g = Graph.cycle(5)
    assert len(enumerate_models(compile_predicate(g, "true").circuit)) == 32
    assert len(enumerate_models(compile_predicate(g, "true(X)").circuit)) == 32


def test_dominating_sets_of_c5():
    g = Graph.cycle(5)
    models = enumerate_models(compile_predicate(g, "domset(X)").circuit)
    assert models == brute_models(g, "domset(X)")
    assert not any(len(U) == 1 for U in models)
    assert sorted(sorted(U) for U in models if len(U) == 2) == [[0, 2], [0, 3], [1, 3], [1, 4], [2, 4]]


@pytest.mark.parametrize("pred", CATALOG)
def test_each_predicate_on_small_families(pred):
    for g in [Graph.path(5), Graph.cycle(6), Graph.star(4), Graph.complete(4), Graph(3)]:
        res = compile_predicate(g, f"{pred}(X)")
        assert check_structured(res.circuit) == []
        assert enumerate_models(res.circuit) == brute_models(g, f"{pred}(X)")


def test_random_combinations_match_brute_force():
    rng = random.Random(31)
    for _ in range(40):
        g = random_graph(rng, rng.randint(1, 6))
        text = random_predicate(rng)
        res = compile_predicate(g, text)
        want = brute_models(g, text)
        assert enumerate_models(res.circuit) == want
        for U in all_sets(g.n):
            assert evaluate(res.circuit, U) == (U in want)


def test_state_counts_within_bounds():
    rng = random.Random(37)
    for _ in range(30):
        g = random_graph(rng, rng.randint(2, 7))
        for pred in ["indset", "vcover", "domset", "edge_in", "true", "nonempty"]:
            expr = parse_predicate(f"{pred}(X)")
            res = compile_predicate(g, expr)
            assert res.max_states <= state_bound(expr, res.decomposition_width + 1)


def test_indset_uses_every_mask_on_one_edgeless_bag():
    g = Graph(4)
    ntd = make_nice(TreeDecomposition([set(range(4))], []), g)
    assert compile_predicate(g, "indset(X)", ntd).max_states == 16
    assert compile_predicate(g, "true", ntd).max_states == 1


def test_given_decomposition_is_used_and_checked():
    g = Graph.path(4)
    td = TreeDecomposition([{0, 1}, {1, 2}, {2, 3}], [(0, 1), (1, 2)])
    res = compile_predicate(g, "vcover(X)", make_nice(td, g))
    assert res.decomposition_width == 1
    wrong = make_nice(TreeDecomposition([{0, 1}, {2, 3}], [(0, 1)]))
    with pytest.raises(ValidationError):
        compile_predicate(g, "vcover(X)", wrong)


def test_connected_bag_cap():
    g = Graph.complete(CONNECTED_BAG_CAP + 1)
    with pytest.raises(CapExceededError):
        compile_predicate(g, "connected(X)")
    compile_predicate(g, "indset(X)")


def test_state_cap():
    with pytest.raises(CapExceededError):
        compile_predicate(Graph(8), "indset(X)", make_nice(TreeDecomposition([set(range(8))], []), Graph(8)), state_cap=10)


@pytest.mark.parametrize(
    "text",
    ["", "indset(X) &", "foo(X)", "indset(X) & domset(Y)", "(indset(X)", "indset(X) ! vcover(X)"],
)
def test_bad_predicate_text(text):
    with pytest.raises(FormatError):
        parse_predicate(text)


def test_predicate_text_roundtrip():
    rng = random.Random(41)
    for _ in range(50):
        expr = parse_predicate(random_predicate(rng))
        assert parse_predicate(predicate_text(expr)) == expr


def test_precedence_and_binds_tighter():
    assert parse_predicate("indset(X) | vcover(X) & domset(X)") == (
        "or", (("pred", "indset"), ("and", (("pred", "vcover"), ("pred", "domset")))),
    )


def test_catalog_listing():
    ids = [p["id"] for p in list_predicates()]
    assert sorted(ids) == sorted(CATALOG)
    assert all(p["description"] and p["states"] for p in list_predicates())


def test_empty_graph_is_rejected():
    with pytest.raises(ValueError):
        compile_predicate(Graph(0), "true")


def test_min_fill_is_default():
    g = Graph.cycle(6)
    res = compile_predicate(g, "indset(X)")
    assert res.decomposition_width == min_fill_decomposition(g).width
