"""Thresholds with as many settings as parties (m = n, prime n).

    python3 scripts/square_diagonal.py --out diagonal.csv
"""

import argparse

from ghzbell.cli import SWEEP_COLUMNS, SWEEP_SCHEMA, _emit, parse_grid, threshold_report
from ghzbell.envelope import scenario_envelope

NS = [3, 5, 7, 11, 13, 17, 19]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", default="0.50:1:0.05")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    rows = []
    for n in NS:
        e, _, used = scenario_envelope(n, n, mode="auto")
        rows.extend(threshold_report(n, n, v, envelope=(e, used)) for v in parse_grid(args.grid))
    _emit(rows, SWEEP_COLUMNS, SWEEP_SCHEMA, "csv", args.out)


if __name__ == "__main__":
    main()
