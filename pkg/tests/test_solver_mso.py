import math
import random

import pytest

from logiq import solve_mso
from logiq.bruteforce import brute_force_predicate
from logiq.compiler import compile_predicate, parse_predicate
from logiq.dnnf import evaluate, example_circuit, false_circuit
from logiq.errors import InfeasibleError
from logiq.graph import Graph
from logiq.report import certificate_holds
from logiq.solvers.mso import certificate_bound, recursive_greedy
from logiq.submodular import CoverageFunction, ModularFunction

from instances import objective, random_graph, random_predicate


def test_certificate_bound_values():
    assert certificate_bound(1) == 1
    assert certificate_bound(2) == 3
    assert certificate_bound(4) == 5
    for n in range(2, 200):
        assert certificate_bound(n) == 1 + math.ceil(math.log(n, 1.5) - 1e-12)


def test_example_circuit_with_coverage():
    c = example_circuit()
    f = CoverageFunction({0: "ab", 1: "bc", 2: "cd", 3: "d"})
    sol = recursive_greedy(c, f)
    assert evaluate(c, sol.U)
    assert sol.value == f(sol.U)
    assert certificate_holds(sol.B, sol.value, 4.0)
    assert sol.B <= certificate_bound(4)


def test_returns_a_model_with_valid_certificate():
    rng = random.Random(5)
    for _ in range(60):
        g = random_graph(rng, rng.randint(1, 7))
        text = random_predicate(rng)
        expr = parse_predicate(text)
        f = objective(rng, g.n)
        c = compile_predicate(g, expr).circuit
        try:
            opt = brute_force_predicate(g, expr, f)
        except InfeasibleError:
            with pytest.raises(InfeasibleError):
                recursive_greedy(c, f)
            continue
        sol = recursive_greedy(c, f)
        assert evaluate(c, sol.U)
        assert sol.value <= opt.value + 1e-9
        assert certificate_holds(sol.B, sol.value, opt.value)
        assert sol.B <= certificate_bound(g.n)


def test_large_base_is_exact():
    rng = random.Random(6)
    for _ in range(20):
        g = random_graph(rng, rng.randint(1, 6))
        f = objective(rng, g.n)
        expr = parse_predicate(random_predicate(rng))
        try:
            opt = brute_force_predicate(g, expr, f)
        except InfeasibleError:
            continue
        sol = solve_mso(g, expr, f, base_size=g.n)
        assert sol.value == opt.value and sol.B == 1


def test_true_returns_everything():
    g = Graph.cycle(6)
    sol = solve_mso(g, "true", ModularFunction([1] * 6))
    assert sol.U == frozenset(range(6)) and sol.B == 1


def test_max_weight_independent_set_on_path():
    g = Graph.path(5)
    w = ModularFunction([1, 5, 1, 5, 1])
    sol = solve_mso(g, "indset(X)", w)
    assert sol.value * sol.B >= 10
    assert sol.value <= 10


def test_unsatisfiable_raises():
    with pytest.raises(InfeasibleError):
        recursive_greedy(false_circuit(example_circuit().vtree), ModularFunction([1] * 4))
    g = Graph(3)
    with pytest.raises(InfeasibleError):
        solve_mso(g, "edge_in(X)", ModularFunction([1, 1, 1]))


def test_bad_base_size():
    with pytest.raises(ValueError):
        recursive_greedy(example_circuit(), ModularFunction([1] * 4), base_size=0)


def test_oracle_calls_are_reported():
    f = ModularFunction([3, 1, 4, 1, 5, 9])
    f({0})
    sol = solve_mso(Graph.path(6), "vcover(X)", f)
    assert sol.calls == f.calls - 1 > 0
    assert sol.nodes >= 1 and sol.depth >= 1


def test_deterministic():
    rng = random.Random(8)
    g = random_graph(rng, 7)
    f = objective(rng, 7)
    a = solve_mso(g, "domset(X)", f)
    b = solve_mso(g, "domset(X)", f)
    assert a.U == b.U and a.B == b.B


def test_recorded_edges_are_vtree_edges():
    c = compile_predicate(Graph.cycle(5), "domset(X)").circuit
    sol = recursive_greedy(c, ModularFunction([1] * 5), record_edges=True)
    assert sol.edges
    for sub, (s, t) in sol.edges:
        assert sub.vtree.parent[t] == s


def test_to_json_is_one_based():
    sol = solve_mso(Graph.path(3), "all(X)", ModularFunction([1, 1, 1]))
    doc = sol.to_json()
    assert doc["solution"] == [1, 2, 3]
    assert doc["certificate"] == sol.B
