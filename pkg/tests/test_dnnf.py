import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logiq.compiler import compile_predicate
from logiq.dnnf import (
    Builder,
    Circuit,
    Gate,
    Vtree,
    apply,
    check_structured,
    dump_circuit,
    enumerate_models,
    evaluate,
    example_circuit,
    false_circuit,
    is_normal,
    is_satisfiable,
    leaf_separator,
    literal_circuit,
    load_circuit,
    normalize,
    split,
    true_circuit,
    width,
)
from logiq.errors import FormatError, ValidationError
from logiq.graph import Graph
from logiq.treedecomp import make_nice, min_fill_decomposition

from instances import CATALOG, random_graph


def all_sets(variables):
    vs = sorted(variables)
    for m in range(1 << len(vs)):
        yield frozenset(v for i, v in enumerate(vs) if m >> i & 1)


def models_by_eval(c):
    return {U for U in all_sets(c.variables) if evaluate(c, U)}


# --- the running example ------------------------------------------------------------


def test_example_evaluation():
    c = example_circuit()
    assert evaluate(c, {0, 1})
    assert not evaluate(c, {0, 2})
    assert check_structured(c) == []


def test_example_width_and_models():
    c = example_circuit()
    assert width(c) == 3
    assert len(enumerate_models(c)) == 8


def test_example_split_at_root_edge():
    sp = split(example_circuit())
    assert sp.V1 == {0, 1} and sp.V2 == {2, 3}
    assert sp.W == 3
    got = [(enumerate_models(d1), enumerate_models(d2)) for d1, d2 in sp.pairs]
    b1b2 = {frozenset({0, 1})}
    b3b4 = {frozenset({2, 3})}
    top_left = set(all_sets({0, 1}))
    top_right = set(all_sets({2, 3}))
    b2 = {U for U in top_left if 1 in U}
    b3 = {U for U in top_right if 2 in U}
    assert got == [(b1b2, top_right), (b2, b3), (top_left, b3b4)]


# --- constants and literals -----------------------------------------------------------


def test_constant_circuits():
    vt = Vtree.balanced([0, 1, 2])
    assert enumerate_models(true_circuit(vt)) == set(all_sets({0, 1, 2}))
    assert enumerate_models(false_circuit(vt)) == set()
    assert not is_satisfiable(false_circuit(vt))


def test_literal():
    vt = Vtree.from_nested(0)
    assert enumerate_models(literal_circuit(vt, 0)) == {frozenset({0})}
    assert width(literal_circuit(vt, 0)) == 1
    neg = literal_circuit(Vtree.balanced([0, 1]), 0, positive=False)
    assert enumerate_models(neg) == {frozenset(), frozenset({1})}


def test_disjoining_width_one_circuits():
    vt = Vtree.balanced([0, 1])
    c = apply("or", literal_circuit(vt, 0), literal_circuit(vt, 1))
    assert width(c) <= 2
    assert enumerate_models(c) == {frozenset({0}), frozenset({1}), frozenset({0, 1})}


# --- vtrees and the leaf separator ---------------------------------------------------------


def balance(vt, t):
    n = vt.count[vt.root]
    return max(vt.count[t], n - vt.count[t])


def test_separator_small_vtrees():
    vt = Vtree.balanced([0, 1, 2, 3])
    s, t = leaf_separator(vt)
    assert s == vt.root and vt.count[t] == 2
    s, t = leaf_separator(Vtree.balanced([0, 1]))
    assert vt.count[t] == 1
    with pytest.raises(ValueError):
        leaf_separator(Vtree.from_nested(0))


def test_separator_on_comb_is_the_best_edge():
    vt = Vtree.left_linear(range(9))
    s, t = leaf_separator(vt)
    best = min(balance(vt, x) for x in range(vt.size) if x != vt.root)
    assert balance(vt, t) == best <= 6


@settings(max_examples=80)
@given(st.integers(2, 300), st.integers(0, 10**6))
def test_separator_is_optimal_and_two_thirds(leaves, seed):
    vt = Vtree.random(leaves, random.Random(seed))
    s, t = leaf_separator(vt)
    assert vt.parent[t] == s
    best = min(balance(vt, x) for x in range(vt.size) if x != vt.root)
    assert balance(vt, t) == best
    assert 3 * best <= 2 * leaves + 2


def test_vtree_text_roundtrip():
    vt = Vtree.random(12, random.Random(3))
    assert Vtree.from_text(vt.to_text()) == vt
    with pytest.raises(ValueError):
        Vtree([0], [-1], [None])


# --- structure checks -------------------------------------------------------------------


def test_non_decomposable_circuit_is_rejected():
    vt = Vtree.balanced([0, 1])
    gates = (Gate("L", (), 0, True, 0), Gate("L", (), 0, False, 0), Gate("A", (0, 1), vnode=2))
    bad = Circuit(vt, gates, 2)
    assert check_structured(bad)
    with pytest.raises(ValidationError):
        normalize(bad)


def test_normalize_keeps_models():
    c = example_circuit()
    n = normalize(c)
    assert is_normal(n)
    assert enumerate_models(n) == enumerate_models(c) == models_by_eval(c)


# --- apply --------------------------------------------------------------------------------


def same_vtree_pair(g, a, b):
    ntd = make_nice(min_fill_decomposition(g), g)
    return compile_predicate(g, a, ntd).circuit, compile_predicate(g, b, ntd).circuit


def test_apply_identities():
    c = example_circuit()
    assert enumerate_models(apply("and", c, true_circuit(c.vtree))) == enumerate_models(c)
    assert enumerate_models(apply("or", c, false_circuit(c.vtree))) == enumerate_models(c)
    with pytest.raises(ValueError):
        apply("not", c, c)


def test_apply_union_and_intersection_on_p3():
    a, b = same_vtree_pair(Graph.path(3), "indset(X)", "vcover(X)")
    ma, mb = enumerate_models(a), enumerate_models(b)
    assert enumerate_models(apply("or", a, b)) == ma | mb
    assert enumerate_models(apply("and", a, b)) == ma & mb


def test_apply_random_pairs():
    rng = random.Random(17)
    for _ in range(20):
        g = random_graph(rng, rng.randint(2, 6))
        p, q = rng.sample(CATALOG, 2)
        a, b = same_vtree_pair(g, f"{p}(X)", f"{q}(X)")
        ma, mb = enumerate_models(a), enumerate_models(b)
        both = apply("and", a, b)
        assert check_structured(both) == []
        assert enumerate_models(both) == ma & mb
        assert enumerate_models(apply("or", a, b)) == ma | mb


# --- enumeration and split on compiled circuits ------------------------------------------------


def test_enumeration_matches_evaluation():
    rng = random.Random(23)
    for _ in range(20):
        g = random_graph(rng, rng.randint(1, 6))
        c = compile_predicate(g, f"{rng.choice(CATALOG)}(X)").circuit
        assert enumerate_models(c) == models_by_eval(c)


def test_split_biconditional_on_every_edge():
    rng = random.Random(29)
    for _ in range(10):
        g = random_graph(rng, rng.randint(2, 5))
        c = normalize(compile_predicate(g, f"{rng.choice(CATALOG)}(X)").circuit)
        vt = c.vtree
        for t in range(vt.size):
            if t == vt.root:
                continue
            sp = split(c, (vt.parent[t], t))
            for d1, d2 in sp.pairs:
                assert width(d1) <= width(c) and width(d2) <= width(c)
            for U in all_sets(c.variables):
                rhs = any(evaluate(d1, U & sp.V1) and evaluate(d2, U & sp.V2) for d1, d2 in sp.pairs)
                assert evaluate(c, U) == rhs


def test_split_rejects_non_edges():
    c = example_circuit()
    with pytest.raises(ValueError):
        split(c, (0, 1))


# --- text format ---------------------------------------------------------------------------


def test_circuit_text_roundtrip():
    c = example_circuit()
    again = load_circuit(dump_circuit(c))
    assert enumerate_models(again) == enumerate_models(c)
    assert dump_circuit(again) == dump_circuit(c)


def test_circuit_text_errors():
    with pytest.raises(FormatError):
        load_circuit("")
    with pytest.raises(FormatError):
        load_circuit("vtree (1 2)\nX 1\n")


def test_builder_constant_folding():
    vt = Vtree.balanced([0, 1])
    b = Builder(vt)
    f = b.false()
    assert b.circuit(b.or_(vt.root, [f])).is_false()
