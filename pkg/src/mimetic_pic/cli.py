"""Command line interface.

Subcommands:

    run <config>                       execute a configured simulation
    hodge-convergence [...]            grid-transfer error table
    dispersion <slice.csv>             omega-k spectrum from a slice series
    fit-growth <diag.csv> --col ...    exponential growth-rate fit
    print-stencils --order N           show the 1D transfer stencils

Exit code 0 on success; on error a single machine-readable line
``error: <message>`` is printed to stderr and the exit code is nonzero.
The environment variable ``MIMETIC_PIC_OUTPUT`` overrides the output
directory of ``run``.
"""

from __future__ import annotations

import argparse
import os
import sys

OUTPUT_ENV = "MIMETIC_PIC_OUTPUT"


def _parse_window(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"window must be 'start,end', got {text!r}")
    return float(parts[0]), float(parts[1])


def _cmd_run(args) -> int:
    from .config import load_config
    from .diagnostics import run

    cfg = load_config(args.config)
    out = args.output_dir or os.environ.get(OUTPUT_ENV) or cfg.output_dir
    result = run(cfg, output_dir=out)
    print(f"diagnostics: {result['diagnostics']}")
    if result["slice"] is not None:
        print(f"slice: {result['slice']}")
    return 0


def _cmd_hodge(args) -> int:
    from .diagnostics import hodge_convergence, write_hodge_convergence

    rows = hodge_convergence(args.orders, args.grids, args.variant)
    if args.output:
        write_hodge_convergence(args.output, rows, args.variant)
        print(f"table: {args.output}")
    else:
        print(f"{'order':>5} {'n':>5} {'e1':>12} {'rate':>6} "
              f"{'e2':>12} {'rate':>6}")
        for r in rows:
            print(f"{r['order']:>5} {r['n']:>5} {r['e1']:>12.4g} "
                  f"{r['rate1']:>6.2f} {r['e2']:>12.4g} {r['rate2']:>6.2f}")
    return 0


def _cmd_dispersion(args) -> int:
    from .diagnostics import dispersion_from_slice

    out = args.output
    if out is None:
        out = os.path.splitext(str(args.slice))[0] + "_spectrum.csv"
    dispersion_from_slice(args.slice, out)
    print(f"spectrum: {out}")
    return 0


def _cmd_fit_growth(args) -> int:
    from .diagnostics import growth_rate_fit, read_csv

    _, names, data = read_csv(args.diagnostics)
    if args.col not in names:
        raise ValueError(
            f"column {args.col!r} not in {args.diagnostics} "
            f"(have {', '.join(names)})")
    t0, t1 = _parse_window(args.window)
    times = data[:, names.index("time")]
    values = data[:, names.index(args.col)]
    rate = growth_rate_fit(times, values, t0, t1)
    print(f"rate: {rate:.6g}")
    return 0


def _cmd_print_stencils(args) -> int:
    from .hodge import build_h0, build_h0_min, build_h1

    p = args.order // 2 - 1
    if args.order % 2 or p < 0:
        raise ValueError("order must be a positive even integer")
    for name, st in (("point -> cell integral (width 2p+3)", build_h0(p, 1.0)),
                     ("cell integral -> point (width 2p+1)", build_h1(p, 1.0)),
                     ("point -> cell integral, minimal width", build_h0_min(p, 1.0))):
        offs = range(-st.half_width, st.half_width + 1)
        print(f"{name}:")
        for o, c in zip(offs, st.coeffs):
            print(f"  {o:+d}: {c:+.17g}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mimetic-pic",
        description="Structure-preserving electromagnetic particle-in-cell "
                    "solver on staggered grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a configured simulation")
    p.add_argument("config")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("hodge-convergence",
                       help="grid-transfer convergence table")
    p.add_argument("--orders", type=int, nargs="+", default=[2, 4, 6])
    p.add_argument("--grids", type=int, nargs="+", default=[16, 32, 64, 128])
    p.add_argument("--variant", choices=("natural", "minimal"),
                   default="natural")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_hodge)

    p = sub.add_parser("dispersion", help="omega-k spectrum from a slice CSV")
    p.add_argument("slice")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("fit-growth", help="exponential growth-rate fit")
    p.add_argument("diagnostics")
    p.add_argument("--col", required=True)
    p.add_argument("--window", required=True, help="t_start,t_end")
    p.set_defaults(func=_cmd_fit_growth)

    p = sub.add_parser("print-stencils", help="show the 1D transfer stencils")
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=_cmd_print_stencils)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single-line CLI error contract
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
