"""Figure builders and the PlotJob front end."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, Table, read_table, require_columns

ENERGY_COLS = ("time", "kinetic", "electric", "magnetic", "total")
CONSTRAINT_COLS = ("gauss_residual", "max_div_b")
SPECTRUM_COLS = ("k", "omega", "power", "branch_plus", "branch_minus")


def _fig_timeseries(tables: list[Table], options: dict):
    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(7, 6), sharex=True,
        gridspec_kw={"height_ratios": [2, 1]})
    for table in tables:
        require_columns(table, ENERGY_COLS)
        t = table.column("time")
        for name in ("kinetic", "electric", "magnetic", "total"):
            ax1.plot(t, table.column(name), label=name)
        for name in CONSTRAINT_COLS:
            if name in table.names:
                ax2.semilogy(np.ma.masked_invalid(t),
                             np.ma.masked_less_equal(table.column(name), 0.0),
                             label=name)
    ax1.set_ylabel("energy")
    ax1.legend(loc="best", fontsize=8)
    ax2.set_xlabel("time")
    ax2.set_ylabel("residual")
    if ax2.lines:
        ax2.legend(loc="best", fontsize=8)
    ax1.set_title(options.get("title", "energy and constraint history"))
    return fig


def _fig_spectrogram(tables: list[Table], options: dict):
    table = tables[0]
    require_columns(table, SPECTRUM_COLS)
    k = table.column("k")
    w = table.column("omega")
    p = table.column("power")
    ks = np.unique(k)
    ws = np.unique(w)
    if len(ks) * len(ws) != len(p):
        raise SchemaError("spectrum rows do not form a full (k, omega) lattice")
    grid = np.full((len(ks), len(ws)), np.nan)
    ki = np.searchsorted(ks, k)
    wi = np.searchsorted(ws, w)
    grid[ki, wi] = p
    fig, ax = plt.subplots(figsize=(7, 5))
    floor = max(grid[grid > 0].min() if np.any(grid > 0) else 1e-30, 1e-30)
    mesh = ax.pcolormesh(ks, ws, np.log10(np.maximum(grid, floor)).T,
                         shading="nearest", cmap="magma")
    fig.colorbar(mesh, ax=ax, label="log10 power")
    # one branch value per k (constant within each k group)
    bp = np.array([table.column("branch_plus")[k == kk][0] for kk in ks])
    bm = np.array([table.column("branch_minus")[k == kk][0] for kk in ks])
    ax.plot(ks, bp, "w--", lw=1, label="branch +")
    ax.plot(ks, bm, "c--", lw=1, label="branch -")
    ax.set_xlabel("k")
    ax.set_ylabel("omega")
    ax.set_ylim(ws.min(), ws.max())
    ax.legend(loc="upper left", fontsize=8)
    ax.set_title(options.get("title", "field power spectrum"))
    return fig


def _fig_growth(tables: list[Table], options: dict):
    col = options.get("column", "mag_y")
    window = options.get("window")
    fig, ax = plt.subplots(figsize=(7, 5))
    for table in tables:
        require_columns(table, ("time", col))
        t = table.column("time")
        e = table.column(col)
        ax.semilogy(t, np.ma.masked_less_equal(e, 0.0), label=col)
        if window is None:
            t0, t1 = t[len(t) // 4], t[3 * len(t) // 4]
        else:
            t0, t1 = window
        mask = (t >= t0) & (t <= t1) & (e > 0)
        if mask.sum() >= 2:
            slope, icpt = np.polyfit(t[mask], 0.5 * np.log(e[mask]), 1)
            ax.semilogy(t[mask], np.exp(2 * (icpt + slope * t[mask])), "k--",
                        label=f"fit: rate {slope:.4g}")
    ax.set_xlabel("time")
    ax.set_ylabel("energy")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(options.get("title", "field-energy growth"))
    return fig


KINDS = {
    "timeseries": _fig_timeseries,
    "spectrogram": _fig_spectrogram,
    "growth": _fig_growth,
}


@dataclass
class PlotJob:
    """One figure: a kind, one or more input CSV files, an output image."""

    kind: str
    inputs: list[Path]
    output: Path
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r} "
                f"(choose from {', '.join(sorted(KINDS))})")
        if not self.inputs:
            raise ValueError("at least one input file is required")

    def run(self) -> Path:
        tables = [read_table(p) for p in self.inputs]
        fig = KINDS[self.kind](tables, self.options)
        out = Path(self.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, dpi=options_dpi(self.options))
        plt.close(fig)
        return out


def options_dpi(options: dict) -> int:
    return int(options.get("dpi", 150))


def render(kind: str, inputs, output, **options) -> Path:
    """Convenience wrapper: build and run a PlotJob."""
    return PlotJob(kind, [Path(p) for p in inputs], Path(output),
                   options).run()
