"""Scan how fast the rotation-stripped circle holonomy approaches the torus.

Writes a CSV with n, merge_bound and the smallest |f_gap| on B_n for several (tau, r).
"""

import argparse
import csv
import math
import sys

import numpy as np

from symred import rbarspace as rb

CASES = [(math.pi, 1.0), (math.pi / 2, 2.0), (1.5 * math.pi, 0.5)]


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--out", default="-")
    args = p.parse_args()
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["tau", "r", "n", "merge_bound", "min_abs_f_gap"])
    for tau, r in CASES:
        for n in range(1, args.nmax + 1):
            lo, hi = rb.B_interval(n, tau, r)
            gap = float(np.abs(rb.f_gap(np.linspace(lo, hi, 2000), tau, r)).min())
            w.writerow([f"{tau:.17g}", f"{r:.17g}", n, f"{rb.merge_bound(n, tau, r):.17g}", f"{gap:.17g}"])
    if fh is not sys.stdout:
        fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
