"""Figures from versioned simulation diagnostics CSV files.

The input contract is the plain-text CSV written by the solver: the first
line must be the version marker ``# mimetic-gempic v1``, further ``#``
comment lines may carry ``key = value`` parameters, then one header row of
column names and uniform numeric rows.  Files without the marker or with a
wrong shape are refused.

Three figure kinds are provided:

    timeseries   energy components and constraint residuals over time
    spectrogram  omega-k power map with the analytic branch overlay
    growth       semilog magnetic energy with a fitted exponential slope
"""

from .io import SchemaError, read_table
from .jobs import KINDS, PlotJob, render

__all__ = ["PlotJob", "render", "read_table", "SchemaError", "KINDS"]
