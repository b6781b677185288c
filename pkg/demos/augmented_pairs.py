"""KS-form constraints over a transitive fraternal augmentation.

Builds a random sparse graph, augments it for two steps, prints the
in-degree history, then asks for a pair (x1, x2) where x2 is the first
in-neighbor of x1 and a third vertex x3 distinct from both.
"""

import random

from logiq import fraternal_augment
from logiq.bruteforce import brute_force_fo, closure_violations
from logiq.graph import Graph
from logiq.logic import KsDisjunct, KsNormalForm
from logiq.solvers.bddexp import suspect_recurse_bddexp
from logiq.submodular import CoverageFunction


def main(seed=11, n=12):
    rng = random.Random(seed)
    g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.2])
    aug = fraternal_augment(g, 2)
    print("max in-degree per step:", aug.gamma)
    print("closure problems:", closure_violations(aug) or "none")

    ks = KsNormalForm(3, 1, (KsDisjunct(
        eq=((0, 1, 1, 0),),
        neq=((0, 0, 2, 0), (1, 0, 2, 0)),
    ),))
    f = CoverageFunction({v: rng.sample("abcdefghij", 3) for v in range(n)}, n=n)
    sol = suspect_recurse_bddexp(aug, ks, f)
    opt = brute_force_fo(g, ks, f, aug=aug)
    print("solver :", [u + 1 for u in sol.tuple], "value", sol.value, "certificate", sol.B)
    print("optimum:", [u + 1 for u in opt.solution], "value", opt.value)


if __name__ == "__main__":
    main()
