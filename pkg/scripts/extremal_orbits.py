"""Orbit counts of maximum intersecting k-arc families, with one witness per orbit.

At n = 2k the star is not the only optimum once k >= 3; this table shows where.

    python scripts/extremal_orbits.py --k 2..6 --max-n 12
"""

import argparse

from katona.predicates import PredicateId, is_star
from katona.search import Constraint, SearchProblem, SlotSpec, maximize, parse_range


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--k", default="2..6")
    parser.add_argument("--max-n", type=int, default=12)
    parser.add_argument("--witnesses", action="store_true", help="print every orbit representative")
    args = parser.parse_args()
    print(f"{'n':>3} {'k':>3} {'optimum':>8} {'orbits':>7} {'non-star':>9}")
    for k in parse_range(args.k):
        for n in range(2 * k, args.max_n + 1):
            problem = SearchProblem(n, (SlotSpec.arcs(k),), (Constraint(PredicateId("intersecting")),))
            rep = maximize(problem)
            others = [w[0] for w in rep.witnesses if not is_star(w[0])]
            print(f"{n:>3} {k:>3} {str(rep.optimum):>8} {rep.extremal_count:>7} {len(others):>9}")
            if args.witnesses:
                for fam in others:
                    print(f"        heads {fam.heads(k)}")


if __name__ == "__main__":
    main()
