"""All constraint lines for a small scenario, flagged by envelope membership.

Writes ``<prefix>_lines.csv`` and ``<prefix>_vertices.csv``; draw every line
faintly and the relevant ones on top to see the feasible region.

    python3 scripts/constraint_lines.py --n 5 --m 3 --prefix n5m3
"""

import argparse
import os
import sys

from ghzbell.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--mode", default="exhaustive")
    ap.add_argument("--prefix", default="lines")
    args = ap.parse_args()
    code = cli_main(["lines", "--n", str(args.n), "--m", str(args.m), "--mode", args.mode,
                     "--out", f"{args.prefix}_lines.csv"])
    if code == 0:
        os.replace(f"{args.prefix}_lines.csv.vertices.csv", f"{args.prefix}_vertices.csv")
    sys.exit(code)


if __name__ == "__main__":
    main()
