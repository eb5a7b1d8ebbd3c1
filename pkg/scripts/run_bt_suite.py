#!/usr/bin/env python3
# Weak-* convergence battery: three approximating families x three test
# functions, pairings against the limit curvature must settle below tol.

import argparse
import sys

from spheretorsion import experiments


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--tol", type=float, default=1e-7)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()

    res = experiments.run_bt_suite(m=args.m, tol=args.tol)
    for key, rep in res["results"].items():
        print(f"{key:18s} {rep['verdict']:12s} final gap {rep['gaps'][-1]:.2e} rate {rep['rate']:+.2f}")
    ok = res["verdicts"]["all_converged_below_tol"]
    print(f"  [{'PASS' if ok else 'FAIL'}] all_converged_below_tol")
    if args.json:
        experiments.write_json(res, path=args.json)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
