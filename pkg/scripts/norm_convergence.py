#!/usr/bin/env python3
"""Sweep truncated-operator norm estimates toward 2*sqrt(s-1)/s.

Writes one CSV per s value and prints a summary of the final gaps.  The
estimates approach the limit from below as the truncation deepens, which is
the numerical backbone of the tensor-model bound.

Usage:
    python3 scripts/norm_convergence.py --out-dir out --depth-max 14
"""

import argparse
import pathlib

from steergap import GroupParams, analytic_norm, norm_sweep
from steergap.serialize import csv_text, format_float


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--depth-max", type=int, default=14)
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=pathlib.Path, default=pathlib.Path("out"))
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    print(f"{'s':>3} {'bound':>20} {'estimate':>20} {'gap':>12} {'rep':>7}")
    for s in args.s:
        sweep = norm_sweep(
            GroupParams(s),
            args.depth_max,
            tol=args.tol,
            seed=args.seed,
        )
        rows = [
            (r.depth, r.estimated_norm, r.analytic_bound, r.gap, r.iterations)
            for r in sweep
        ]
        path = args.out_dir / f"norm_s{s}.csv"
        path.write_text(
            csv_text(["N", "estimate", "analytic_bound", "gap", "iterations"], rows)
        )
        last = sweep[-1]
        print(
            f"{s:>3} {format_float(analytic_norm(s)):>20} "
            f"{format_float(last.estimated_norm):>20} {last.gap:>12.3e} "
            f"{last.representation:>7}"
        )
    print(f"wrote {len(args.s)} sweeps to {args.out_dir}/")


if __name__ == "__main__":
    main()
