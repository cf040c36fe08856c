#!/usr/bin/env python3
"""Run a quasi-1D wave-spectrum experiment and report the spectral ridge.

Usage: run_dispersion.py [config] [--output-dir DIR] [--modes N]
Prints, for the N lowest nonzero spatial modes, the dominant frequency and
the two analytic circularly polarized branch frequencies.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mimetic_pic.config import load_config
from mimetic_pic.diagnostics import dispersion_from_slice, run, spectral_ridge


def main() -> int:
    here = Path(__file__).resolve().parent
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", nargs="?",
                    default=here / "dispersion_scaled.config")
    ap.add_argument("--output-dir", default=None)
    ap.add_argument("--modes", type=int, default=8)
    args = ap.parse_args()

    cfg = load_config(args.config)
    result = run(cfg, output_dir=args.output_dir)
    out_csv = result["slice"].with_name("spectrum.csv")
    spec = dispersion_from_slice(result["slice"], out_csv)
    ridge = spectral_ridge(spec)
    dw = spec["omega"][1] - spec["omega"][0]
    print(f"spectrum: {out_csv}")
    print(f"{'k':>8} {'ridge':>8} {'branch+':>8} {'branch-':>8} {'bins':>6}")
    for m in range(1, args.modes + 1):
        dist = min(abs(ridge[m] - spec["branch_plus"][m]),
                   abs(ridge[m] - spec["branch_minus"][m]))
        print(f"{spec['k'][m]:8.4f} {ridge[m]:8.4f} "
              f"{spec['branch_plus'][m]:8.4f} {spec['branch_minus'][m]:8.4f} "
              f"{dist / dw:6.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
