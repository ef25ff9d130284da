"""Comparison counts of every sorter on the four example families.

Usage: python3 scripts/example_families.py [--max-exp 14]
"""
import argparse
import math

from synergy import harness


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-exp", type=int, default=14)
    args = parser.parse_args()
    rows = []
    for exp in range(8, args.max_exp + 1, 2):
        n = 2 ** exp
        rows.append(("example1", n, harness.InstanceSpec("example1", n)))
        rows.append(("example2", n, harness.InstanceSpec("example2", n)))
        rows.append(("example4", n, harness.InstanceSpec("example4", n, rho=16)))
    for k in range(3, min(args.max_exp // 2, 7) + 1):
        rows.append(("example3", 4 ** k, harness.InstanceSpec("example3", 4 ** k, sigma=2 ** k)))
    names = list(harness.SORTERS)
    print(f"{'family':10} {'n':>7} " + " ".join(f"{name[:12]:>12}" for name in names))
    for family, n, spec in rows:
        values = harness.gen_values(spec)
        costs = [harness.run_algorithm(name, values)[0].comparisons / len(values) for name in names]
        print(f"{family:10} {len(values):>7} " + " ".join(f"{c:12.3f}" for c in costs))
    print(f"(comparisons per element; log2 of the largest n is {math.log2(rows[-1][1]):.0f})")


if __name__ == "__main__":
    main()
