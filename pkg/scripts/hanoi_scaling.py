"""Move counts, rewrite steps and wall time for the hT-monad Hanoi solver.

    python scripts/hanoi_scaling.py [--max N] [--repeat K]
"""

import argparse
import time

from wlmonad.expr import Compound, Integer
from wlmonad.stdlib import MOVE_DISCS, make_tower, moves_of, replay, standard_engine, tower_lists


def solve(engine, n):
    goal = Compound(Compound(MOVE_DISCS, (Integer(1), Integer(3), Integer(n))), (make_tower(n),))
    return engine.evaluate_with_steps(goal)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=3, help="report the best of K timings")
    args = ap.parse_args()

    engine = standard_engine()
    print(f"{'n':>3} {'moves':>6} {'2^n-1':>6} {'steps':>7} {'legal':>5} {'ms':>9}")
    for n in range(1, args.max + 1):
        best = float("inf")
        for _ in range(args.repeat):
            t = time.perf_counter()
            result, steps = solve(engine, n)
            best = min(best, time.perf_counter() - t)
        moves = moves_of(result)
        legal = not replay(tower_lists(make_tower(n)), moves)
        print(f"{n:>3} {len(moves):>6} {2 ** n - 1:>6} {steps:>7} {str(legal):>5} {best * 1000:>9.2f}")


if __name__ == "__main__":
    main()
