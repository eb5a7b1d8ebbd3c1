#!/usr/bin/env python3
"""Ridge family study: uniform convergence of metrics without positivity
does not control the Quillen metric. Sweeps delta at fixed c and prints
the sup distance, the exact Dirichlet energy check and the torsion gap."""

import argparse
import sys

from spheretorsion import experiments


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--c", type=float, nargs="+", default=[1.0])
    ap.add_argument("--deltas", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4])
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--gamma", type=float, default=None)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--json", default=None)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    res = experiments.run_counterexample(
        cs=tuple(args.c), deltas=tuple(args.deltas), eps=args.eps,
        gamma=args.gamma, jobs=args.jobs,
    )
    print(f"{'c':>6} {'delta':>9} {'sup/scale':>10} {'dir_err':>9} {'T gap':>11} {'bound':>11}")
    for r in res["rows"]:
        print(
            f"{r['c']:6.2f} {r['delta']:9.1e} {r['sup_over_scale']:10.6f} "
            f"{r['dirichlet_abs_err']:9.1e} {r['torsion_gap']:11.6f} {r['gap_bound']:11.6f}"
        )
    for name, ok in res["verdicts"].items():
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    if args.json:
        experiments.write_json(res, path=args.json)
    if args.csv:
        experiments.write_csv(res["rows"], args.csv)
    return 0 if all(res["verdicts"].values()) else 1


if __name__ == "__main__":
    sys.exit(main())
