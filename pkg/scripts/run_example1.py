#!/usr/bin/env python3
"""Walk the robot delivery example end to end.

Prints the exact extreme equilibrium values of the bare game and of its two
delivery-machine products, runs the strong improvement decision, and writes
the synthesized witness machine next to the other outputs.
"""

import argparse
from fractions import Fraction
from pathlib import Path

from eqdesign.benchmarks import gen_example1
from eqdesign.design import (
    ImprovementQuery,
    decide_improvement,
    epsilon_worst_ne,
    exact_best_ne,
    exact_worst_ne,
)
from eqdesign.fileio import serialize_game, serialize_rm
from eqdesign.rewards import implement, k_cycle_delivery_rm


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="out_example1")
    parser.add_argument("--epsilon", type=Fraction, default=Fraction(1, 10))
    parser.add_argument("--max-loops", type=int, default=4)
    args = parser.parse_args()

    game, m1, m2 = gen_example1()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    (dest / "example1.game").write_text(serialize_game(game))

    print("bare game:")
    print(f"  worst equilibrium value : {exact_worst_ne(game).global_payoff}")
    print(f"  best equilibrium value  : {exact_best_ne(game).global_payoff}")
    print(f"  epsilon-worst (eps={args.epsilon}): {epsilon_worst_ne(game, args.epsilon)}")

    print("delivery machines, one payment per k loops:")
    for k in range(1, args.max_loops + 1):
        rm = k_cycle_delivery_rm(game, k)
        worst = exact_worst_ne(implement(game, rm)).global_payoff
        print(f"  k={k}: {rm.n_states} machine states, product worst = {worst}")
    (dest / "delivery_k1.rm").write_text(serialize_rm(m1, game))
    (dest / "delivery_k2.rm").write_text(serialize_rm(m2, game))

    query = ImprovementQuery(budget=1, delta=Fraction(1, 2), epsilon=args.epsilon)
    answer = decide_improvement(game, query)
    print(f"strong improvement (budget 1, delta 1/2): "
          f"{'yes' if answer.decision else 'no'}")
    print(f"  baseline {answer.baseline_value}, improved {answer.improved_value}")
    if answer.witness_rm is not None:
        path = dest / "witness.rm"
        path.write_text(serialize_rm(answer.witness_rm, game))
        print(f"  witness machine ({answer.witness_rm.n_states} states) -> {path}")


if __name__ == "__main__":
    main()
