"""Space of the compressed structures relative to their targets as rho varies.

Usage: python3 scripts/succinct_space.py [--exp 18]
"""
import argparse

from synergy import harness
from synergy.succinct import build_rank_aware, build_select_aware, space_report


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--exp", type=int, default=18)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    n = 2 ** args.exp
    print(f"{'rho':>7} {'structure':14} {'total bits':>11} {'target':>11} {'ratio':>7}")
    for k in range(2, args.exp // 2 + 2, 2):
        values = harness.gen_values(harness.InstanceSpec("random", n, rho=2 ** k, seed=args.seed))
        for label, build in (("rank-aware", build_rank_aware), ("select-aware", build_select_aware)):
            rep = space_report(build(values))
            print(f"{2 ** k:>7} {label:14} {rep.total:>11} {rep.target:>11.0f} {rep.ratio:7.3f}")


if __name__ == "__main__":
    main()
