#!/usr/bin/env python3
"""Run a Weibel-type growth experiment and fit the magnetic growth rate.

Usage: run_weibel.py [config] [--window a,b] [--output-dir DIR]
Defaults to the reduced-count preset next to this script.
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mimetic_pic.config import load_config
from mimetic_pic.diagnostics import growth_rate_fit, read_csv, run


def main() -> int:
    here = Path(__file__).resolve().parent
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", nargs="?", default=here / "weibel_smoke.config")
    ap.add_argument("--window", default="100,200")
    ap.add_argument("--output-dir", default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    result = run(cfg, output_dir=args.output_dir)
    _, names, data = read_csv(result["diagnostics"])
    t0, t1 = (float(s) for s in args.window.split(","))
    rate = growth_rate_fit(data[:, names.index("time")],
                           data[:, names.index("mag_y")], t0, t1)
    print(f"diagnostics: {result['diagnostics']}")
    print(f"fitted growth rate over [{t0}, {t1}]: {rate:.5f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
