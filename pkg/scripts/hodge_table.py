#!/usr/bin/env python3
"""Print the grid-transfer convergence table (both stencil variants).

Usage: hodge_table.py [--orders 2 4 6] [--grids 16 32 64 128]
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mimetic_pic.diagnostics import hodge_convergence


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--orders", type=int, nargs="+", default=[2, 4, 6])
    ap.add_argument("--grids", type=int, nargs="+", default=[16, 32, 64, 128])
    args = ap.parse_args()

    for variant in ("natural", "minimal"):
        print(f"variant: {variant}")
        print(f"{'order':>5} {'n':>5} {'e1':>12} {'rate':>6} "
              f"{'e2':>12} {'rate':>6}")
        for r in hodge_convergence(args.orders, args.grids, variant):
            print(f"{r['order']:>5} {r['n']:>5} {r['e1']:>12.4g} "
                  f"{r['rate1']:>6.2f} {r['e2']:>12.4g} {r['rate2']:>6.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
