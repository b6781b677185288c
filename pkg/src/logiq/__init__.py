"""Monotone submodular maximization under graph-logic constraints.

Three solvers share one objective interface:

* :func:`solve_mso` compiles a set predicate to a structured DNNF over a
  tree decomposition and runs recursive greedy on it;
* :func:`solve_fo_lowdeg` handles tuple constraints in Gaifman form on
  bounded-degree graphs;
* :func:`solve_fo_bddexp` handles tuple constraints in KS normal form over a
  transitive fraternal augmentation.
"""

from .augment import Augmentation, fraternal_augment
from .compiler import compile_predicate, list_predicates, parse_predicate
from .dnnf import Circuit, Vtree, enumerate_models, evaluate, example_circuit, leaf_separator, split, width
from .errors import CapExceededError, FormatError, InfeasibleError, LogiqError, ValidationError
from .graph import DirectedGraph, Graph, load_graph
from .report import SolveReport
from .solvers.bddexp import suspect_recurse_bddexp
from .solvers.lowdeg import solve_linear_exact, suspect_recurse_lowdeg
from .solvers.mso import recursive_greedy
from .submodular import CoverageFunction, ModularFunction, contract, load_function, verify_properties
from .treedecomp import make_nice, min_fill_decomposition

__version__ = "0.1.0"


def solve_mso(g, predicate, f, decomposition=None, base_size=1):
    """Compile ``predicate`` on ``g`` and run recursive greedy on the circuit."""
    expr = parse_predicate(predicate) if isinstance(predicate, str) else predicate
    ntd = None if decomposition is None else make_nice(decomposition, g)
    comp = compile_predicate(g, expr, ntd)
    return recursive_greedy(comp.circuit, f, base_size=base_size)


solve_fo_lowdeg = suspect_recurse_lowdeg


def solve_fo_bddexp(g, ks, f, steps=1):
    """Augment ``g`` for ``steps`` rounds and run the KS-form solver."""
    return suspect_recurse_bddexp(fraternal_augment(g, steps), ks, f)


__all__ = [
    "Augmentation", "fraternal_augment",
    "compile_predicate", "list_predicates", "parse_predicate",
    "Circuit", "Vtree", "enumerate_models", "evaluate", "example_circuit", "leaf_separator", "split", "width",
    "CapExceededError", "FormatError", "InfeasibleError", "LogiqError", "ValidationError",
    "DirectedGraph", "Graph", "load_graph",
    "SolveReport",
    "recursive_greedy", "solve_linear_exact", "suspect_recurse_bddexp", "suspect_recurse_lowdeg",
    "CoverageFunction", "ModularFunction", "contract", "load_function", "verify_properties",
    "make_nice", "min_fill_decomposition",
    "solve_mso", "solve_fo_lowdeg", "solve_fo_bddexp",
]
