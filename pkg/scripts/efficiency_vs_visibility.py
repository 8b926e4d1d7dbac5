"""Threshold efficiency against visibility for a few (n, m) pairs.

Writes one CSV row per grid point; plot eta_star against v grouped by (n, m).

    python3 scripts/efficiency_vs_visibility.py --out sweep.csv
"""

import argparse

from ghzbell.cli import SWEEP_COLUMNS, SWEEP_SCHEMA, _emit, parse_grid, threshold_report
from ghzbell.envelope import scenario_envelope

PAIRS = [(3, 3), (4, 5), (6, 7), (8, 5), (8, 11)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", default="0.40:1:0.01")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    rows = []
    for n, m in PAIRS:
        e, _, used = scenario_envelope(n, m, mode="auto")
        rows.extend(threshold_report(n, m, v, envelope=(e, used)) for v in parse_grid(args.grid))
    _emit(rows, SWEEP_COLUMNS, SWEEP_SCHEMA, "csv", args.out)


if __name__ == "__main__":
    main()
