"""Smallest x on the noisy flat line over a grid of prime m and n >= m.

One row per cell with x1, x2, x_min, nm and which candidate attains x_min.

    python3 scripts/conjecture_grid.py --nmax 30 --mmax 13 --out conj.csv
"""

import argparse
import csv
import sys

from ghzbell.asymptotics import check_conjecture
from ghzbell.core import is_prime


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, default=30)
    ap.add_argument("--mmax", type=int, default=13)
    ap.add_argument("--mode", default="balanced", choices=["balanced", "regular", "exhaustive"])
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "m", "y_max", "x1", "x2", "x_min", "nm", "x_min_le_nm", "achieved_by"])
    for m in range(2, args.mmax + 1):
        if not is_prime(m):
            continue
        for n in range(m, args.nmax + 1):
            r = check_conjecture(n, m, mode=args.mode)
            w.writerow([n, m, r.y_max, r.x1, r.x2, r.x_min, r.nm, int(r.holds), r.achieved_by])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
