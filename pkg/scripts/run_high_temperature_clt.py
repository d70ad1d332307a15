#!/usr/bin/env python3
"""High-temperature Gaussian-fluctuation campaign.

Samples N (F_N - F(beta)) over seeded disorder realizations and compares the
empirical mean/variance/KS distance with the closed-form Gaussian prediction.
Writes samples.csv, summary.json and manifest.json into --out-dir.

Desk-scale reference configuration (about a minute):
    python scripts/run_high_temperature_clt.py --trials 2000
"""

import argparse
import sys

from bssk.cli import run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n1", type=int, default=200)
    parser.add_argument("--n2", type=int, default=200)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--trials", type=int, default=500)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--dist", default="gaussian")
    parser.add_argument("--w4-check", action="store_true")
    parser.add_argument("--out-dir", default="runs/high_t_clt")
    args = parser.parse_args()
    argv = [
        "fluctuate",
        "--n1", str(args.n1),
        "--n2", str(args.n2),
        "--beta", str(args.beta),
        "--trials", str(args.trials),
        "--seed", str(args.seed),
        "--dist", args.dist,
        "--out-dir", args.out_dir,
    ]
    if args.w4_check:
        argv.append("--w4-check")
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
