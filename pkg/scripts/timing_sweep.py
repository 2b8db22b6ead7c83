#!/usr/bin/env python3
"""Desk-scale timing sweep: exact spectrum method vs dense full-matrix method.

Sweeps the channel count for a 3x3 kernel on a 16x16 feature map and writes a
timings CSV. The dense method is only run up to the size cap unless --force is
given (the n=16, m=32 dense case takes a few minutes).

Usage:
    python scripts/timing_sweep.py --out timings.csv
    python scripts/timing_sweep.py --out timings.csv --force --full-max-m 32
"""

import argparse

from conv_spectra.bench import BenchSpec, run_bench
from conv_spectra.oracle import ORACLE_SIZE_CAP


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="timings.csv")
    parser.add_argument("--n", type=int, default=16)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--channels", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--force", action="store_true", help="run dense cases beyond the size cap")
    parser.add_argument("--full-max-m", type=int, default=None,
                        help="largest channel count for the dense method (default: all that fit)")
    args = parser.parse_args()

    specs = [
        BenchSpec(method="exact", n=args.n, m=m, k=args.k, repeats=args.repeats)
        for m in args.channels
    ]
    for m in args.channels:
        if args.full_max_m is not None and m > args.full_max_m:
            continue
        if not args.force and args.n * args.n * m > ORACLE_SIZE_CAP:
            print(f"skipping full_matrix m={m} (beyond size cap; use --force)")
            continue
        specs.append(
            BenchSpec(method="full_matrix", n=args.n, m=m, k=args.k, repeats=max(3, args.repeats))
        )

    rows = run_bench(specs, seed=args.seed, force=args.force, out_path=args.out)
    print("method,n,m,k,median_s,min_s")
    for r in rows:
        print(f"{r.method},{r.n},{r.m},{r.k},{r.median_seconds:.6f},{r.min_seconds:.6f}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
