"""Why the low-degree solver guesses.

Four heavy tips hang two hops off a slightly heavier hub.  Picking the hub
first blocks every tip (they all sit within distance 2 of it), so plain
block greedy fills the rest with zero-weight isolated vertices.  Suspect-and-recurse guesses that an
optimal entry lies near the hub and finds the four tips.
"""

import json

from logiq import ModularFunction, Graph
from logiq.bruteforce import brute_force_fo
from logiq.logic import load_gaifman
from logiq.solvers.lowdeg import greedy_lowdeg, solve_linear_exact, suspect_recurse_lowdeg

SPOKES = 4


def hub():
    edges = []
    for i in range(SPOKES):
        tip, mid = 1 + i, 1 + SPOKES + i
        edges += [(0, mid), (mid, tip)]
    return Graph(1 + 2 * SPOKES + SPOKES, edges)


def main():
    g = hub()
    w = [0.0] * g.n
    w[0] = 12
    for i in range(SPOKES):
        w[1 + i] = 11
    f = ModularFunction(w)
    vs = [f"x{i + 1}" for i in range(SPOKES)]
    gf = load_gaifman(json.dumps({
        "vars": vs,
        "disjuncts": [{"r": 1, "blocks": [{"vars": [x], "formula": f"{x} = {x}"} for x in vs]}],
    }))

    plain = greedy_lowdeg(g, gf, f)
    print("plain greedy:", [b[0] + 1 for b in plain.blocks], "value", plain.value)
    sol = suspect_recurse_lowdeg(g, gf, f)
    print("suspect-and-recurse:", [u + 1 for u in sol.tuple], "value", sol.value, "depth", sol.depth)
    exact = solve_linear_exact(g, gf, f)
    opt = brute_force_fo(g, gf, f)
    print("exact mode:", exact.value, " brute force:", opt.value)


if __name__ == "__main__":
    main()
