#!/usr/bin/env python3
"""Exercise the hardness-instance generators at desk scale.

Part one samples tour games and compares the approximated worst
equilibrium value against the brute-force optimal tour; part two runs the
strong/weak improvement decisions on small digraphs with and without a
Hamiltonian path.  Instances where equal-share multi-lap walks undercut
every tour are reported rather than hidden.
"""

import argparse
import itertools
import math
import random
import time
from fractions import Fraction

from eqdesign.benchmarks import (
    CostDigraph,
    complete_digraph,
    gen_hamiltonian_complement_game,
    gen_hamiltonian_game,
    gen_tsp_game,
)
from eqdesign.design import ImprovementQuery, decide_improvement, epsilon_worst_ne


def optimal_tour(verts, costs) -> int:
    best = None
    for perm in itertools.permutations(verts[1:]):
        tour = [verts[0]] + list(perm)
        c = sum(costs[(tour[i], tour[(i + 1) % len(verts)])] for i in range(len(verts)))
        best = c if best is None else min(best, c)
    return best


def tour_experiment(seed: int, instances: int, cities: int) -> None:
    rng = random.Random(seed)
    verts = [f"v{i}" for i in range(1, cities + 1)]
    print(f"tour games: {instances} instances, {cities} cities, seed {seed}")
    for trial in range(instances):
        costs = {(u, v): rng.randint(1, 9) for u in verts for v in verts if u != v}
        game = gen_tsp_game(complete_digraph(cities, costs))
        start = time.monotonic()
        value = epsilon_worst_ne(game, Fraction(1))
        elapsed = time.monotonic() - start
        opt = optimal_tour(verts, costs)
        note = "" if math.floor(value) == opt else "  <- multi-lap walk undercuts tours"
        print(f"  #{trial}: optimal tour {opt:3d}, eps-worst {value} "
              f"({elapsed:.2f} s){note}")


def hamiltonian_experiment() -> None:
    graphs = {
        "3-cycle (path exists)": CostDigraph(
            ("v1", "v2", "v3"), (("v1", "v2"), ("v2", "v3"), ("v3", "v1"))),
        "out-star (no path)": CostDigraph(
            ("v1", "v2", "v3"), (("v1", "v2"), ("v1", "v3"))),
        "4-path + chord": CostDigraph(
            ("v1", "v2", "v3", "v4"),
            (("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1"), ("v1", "v3"))),
    }
    strong_q = ImprovementQuery(budget=1, delta=Fraction(1, 2), epsilon=Fraction(1),
                                mode="strong")
    weak_q = ImprovementQuery(budget=1, delta=Fraction(1, 2), epsilon=Fraction(1),
                              mode="weak")
    print("hamiltonian reductions (budget 1, delta 1/2, eps 1):")
    for name, graph in graphs.items():
        start = time.monotonic()
        strong = decide_improvement(gen_hamiltonian_game(graph), strong_q)
        weak = decide_improvement(gen_hamiltonian_complement_game(graph), weak_q)
        elapsed = time.monotonic() - start
        print(f"  {name}: strong {'yes' if strong.decision else 'no':3s} "
              f"weak(complement) {'yes' if weak.decision else 'no':3s} "
              f"({elapsed:.1f} s)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--instances", type=int, default=3)
    parser.add_argument("--cities", type=int, default=4)
    parser.add_argument("--skip-hamiltonian", action="store_true")
    args = parser.parse_args()
    tour_experiment(args.seed, args.instances, args.cities)
    if not args.skip_hamiltonian:
        hamiltonian_experiment()


if __name__ == "__main__":
    main()
