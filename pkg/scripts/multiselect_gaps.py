"""Multiselection cost against the gap envelope as the number of ranks grows.

Usage: python3 scripts/multiselect_gaps.py [--exp 14] [--seed 0]
"""
import argparse

from synergy import harness
from synergy.core import InstrumentedArray
from synergy.measures import predictor_envelope
from synergy.multiselect import multiselect


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--exp", type=int, default=14)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    n = 2 ** args.exp
    values = harness.gen_values(harness.InstanceSpec("random", n, seed=args.seed))
    print(f"{'q':>7} {'comparisons':>12} {'per n':>8} {'/ envelope':>11}")
    for j in range(args.exp + 1):
        ranks = harness.query_ranks(harness.QuerySpec("uniform", 2 ** j), n)
        a = InstrumentedArray(values)
        multiselect(a, ranks)
        print(f"{2 ** j:>7} {a.comparisons:>12} {a.comparisons / n:8.3f} "
              f"{a.comparisons / predictor_envelope(n, ranks):11.3f}")


if __name__ == "__main__":
    main()
