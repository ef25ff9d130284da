"""Deferred structures under different query orders: comparisons and index work.

Usage: python3 scripts/deferred_locality.py [--exp 14] [--queries 1024]
"""
import argparse

from synergy import harness
from synergy.core import InstrumentedArray
from synergy.deferred import FingerDeferred, RamDeferred


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--exp", type=int, default=14)
    parser.add_argument("--queries", type=int, default=1024)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    n = 2 ** args.exp
    values = harness.gen_values(harness.InstanceSpec("random", n, seed=args.seed))
    ranks = harness.query_ranks(harness.QuerySpec("uniform", args.queries), n)
    print(f"{'structure':15} {'order':10} {'comparisons':>12} {'index steps':>12}")
    for cls in (RamDeferred, FingerDeferred):
        for order in harness.ORDERS:
            ds = cls(InstrumentedArray(values))
            for r in harness.order_ranks(ranks, order, args.seed):
                ds.select(r)
            print(f"{cls.__name__:15} {order:10} {ds.comparisons:>12} {ds.index_steps:>12}")


if __name__ == "__main__":
    main()
