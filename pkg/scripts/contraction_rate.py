#!/usr/bin/env python3
"""Empirical posterior contraction study.

For each sample size, the knot-interval count follows the rate rule
K = round(n^(1/2 - 2*epsilon)); the posterior-mean L1 error is averaged
over replicates and the log-log slope against n is printed.
"""

import argparse

from bmreg.experiments import run_contract, write_rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-values", default="50,200,800", help="comma-separated sample sizes")
    parser.add_argument("--rate-epsilon", type=float, default=0.05)
    parser.add_argument("--manifold", default="circle")
    parser.add_argument("--sigma2", type=float, default=0.1)
    parser.add_argument("--c", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--replicates", type=int, default=5)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default="contraction.csv")
    args = parser.parse_args()

    n_values = [int(v) for v in args.n_values.split(",") if v.strip()]
    report = run_contract(
        n_values,
        args.rate_epsilon,
        base_seed=args.seed,
        replicates=args.replicates,
        workers=args.workers,
        manifold=args.manifold,
        sigma2=args.sigma2,
        c=args.c,
    )
    write_rows(args.out, report.rows)
    for line in report.summary_lines():
        print(line)
    print(f"wrote {len(report.rows)} rows -> {args.out}")


if __name__ == "__main__":
    main()
