"""Command line front end: ``plotkit <kind> <inputs...> -o <image>``."""

from __future__ import annotations

import argparse
import sys

from .jobs import KINDS, PlotJob


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from versioned diagnostics CSV files.")
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("inputs", nargs="+")
    parser.add_argument("-o", "--output", required=True)
    parser.add_argument("--title", default=None)
    parser.add_argument("--column", default=None,
                        help="energy column for the growth figure")
    parser.add_argument("--window", default=None,
                        help="fit window 'start,end' for the growth figure")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)

    options: dict = {"dpi": args.dpi}
    if args.title:
        options["title"] = args.title
    if args.column:
        options["column"] = args.column
    if args.window:
        try:
            a, b = (float(s) for s in args.window.split(","))
        except ValueError:
            print(f"error: window must be 'start,end', got {args.window!r}",
                  file=sys.stderr)
            return 1
        options["window"] = (a, b)

    try:
        out = PlotJob(args.kind, args.inputs, args.output, options).run()
    except Exception as exc:  # noqa: BLE001 - single-line CLI error contract
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"figure: {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
