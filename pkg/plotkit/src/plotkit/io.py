"""Reader for the versioned diagnostics CSV format."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

CSV_MAGIC = "# mimetic-gempic v1"


class SchemaError(ValueError):
    """The input file is not a valid versioned diagnostics CSV."""


@dataclass
class Table:
    params: dict
    names: list[str]
    data: np.ndarray

    def column(self, name: str) -> np.ndarray:
        if name not in self.names:
            raise SchemaError(
                f"missing required column {name!r} (have {', '.join(self.names)})")
        return self.data[:, self.names.index(name)]


def read_table(path) -> Table:
    """Parse a versioned CSV; refuses files without the version marker,
    without a header, or with ragged or non-numeric rows."""
    path = Path(path)
    params: dict = {}
    names = None
    rows = []
    with open(path) as f:
        first = f.readline().rstrip("\n")
        if first != CSV_MAGIC:
            raise SchemaError(
                f"{path}: missing '{CSV_MAGIC}' version line; refusing input")
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = (s.strip() for s in body.split("=", 1))
                    params[k] = v
                continue
            if names is None:
                names = [s.strip() for s in line.split(",")]
                continue
            vals = line.split(",")
            if len(vals) != len(names):
                raise SchemaError(
                    f"{path}: row with {len(vals)} fields, expected {len(names)}")
            try:
                rows.append([float(v) for v in vals])
            except ValueError as exc:
                raise SchemaError(f"{path}: non-numeric value ({exc})")
    if names is None or not rows:
        raise SchemaError(f"{path}: no data rows found")
    return Table(params, names, np.asarray(rows, dtype=float))


def require_columns(table: Table, needed) -> None:
    missing = [n for n in needed if n not in table.names]
    if missing:
        raise SchemaError(
            f"missing required columns: {', '.join(missing)} "
            f"(have {', '.join(table.names)})")
