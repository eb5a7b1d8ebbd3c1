#!/usr/bin/env python3
# Double-sequence route agreement at the canonical point: diagonal Quillen
# limit vs direct integrable evaluation vs two volume decompositions.

import argparse
import sys

from spheretorsion import experiments


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--n-max", type=int, default=32)
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()

    res = experiments.run_double_limit_study(m=args.m, n_max=args.n_max, tol=args.tol)
    r = res["results"]
    print(f"diagonal limit : {r['quillen_diagonal_limit']:+.12f}")
    print(f"direct         : {r['quillen_direct']:+.12f}   gap {r['quillen_gap']:.2e}")
    print(f"decompositions : {['%+.12f' % v for v in r['decomposition_limits']]}")
    print(f"  agreement {r['decomposition_agreement']:.2e}, vs direct {r['decomposition_vs_direct']:.2e}")
    for name, ok in res["verdicts"].items():
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    if args.json:
        experiments.write_json(res, path=args.json)
    return 0 if all(res["verdicts"].values()) else 1


if __name__ == "__main__":
    sys.exit(main())
