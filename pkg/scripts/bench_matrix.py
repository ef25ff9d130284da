"""Write the full algorithm-by-instance CSV matrix (thin wrapper over the bench command).

Usage: python3 scripts/bench_matrix.py [--out bench.csv]
"""
import argparse
import sys

from synergy.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="bench.csv")
    parser.add_argument("--sizes", default="1024,4096")
    args = parser.parse_args()
    return cli_main(["bench", "--family", "random,example1,example2,example4", "--rho", "16", "--sizes", args.sizes,
                     "--queries", "uniform:16", "--queries", "clustered:4:16", "--out", args.out])


if __name__ == "__main__":
    sys.exit(main())
