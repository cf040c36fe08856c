#!/usr/bin/env python3
"""Run the constraint-conservation experiment and report the worst-case
Gauss-law residual and magnetic divergence over the whole run."""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mimetic_pic.config import load_config
from mimetic_pic.diagnostics import read_csv, run


def main() -> int:
    here = Path(__file__).resolve().parent
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", nargs="?", default=here / "conservation.config")
    ap.add_argument("--output-dir", default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    result = run(cfg, output_dir=args.output_dir)
    _, names, data = read_csv(result["diagnostics"])
    gauss = data[:, names.index("gauss_residual")].max()
    divb = data[:, names.index("max_div_b")].max()
    total = data[:, names.index("total")]
    drift = abs(total - total[0]).max() / abs(total[0])
    print(f"diagnostics: {result['diagnostics']}")
    print(f"max relative Gauss residual: {gauss:.3e}")
    print(f"max |div B|:                 {divb:.3e}")
    print(f"max relative energy error:   {drift:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
