"""Run configuration: a flat key-value text format with dotted sections.

Grammar (one assignment per line):

    key.subkey = value            # comments start with '#'

Vectors are whitespace separated.  Species are declared by name through
keys of the form ``species.<name>.<field>``.  Unknown keys are rejected.

Example::

    grid.cells = 7 7 7
    grid.lengths = 5.0265 5.0265 5.0265
    scheme.dt = 0.02
    scheme.t_end = 200.0
    scheme.hodge_order = 4
    scheme.kernel_degree = 1
    species.electrons.charge = -1.0
    species.electrons.mass = 1.0
    species.electrons.per_cell = 500
    species.electrons.thermal = 0.0141 0.049 0.049
    perturbation.b_amplitude = 1e-4
    diagnostics.interval = 10
    output.directory = runs/weibel
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import GridSpec, build_grid
from .particles import SpeciesSpec
from .simulation import SchemeConfig


@dataclass
class DiagnosticsConfig:
    interval: int = 1
    slice_enable: bool = False
    slice_axis: int = 0
    slice_component: int = 1


@dataclass
class RunConfig:
    """Validated parameters of one simulation run."""

    cells: tuple[int, int, int]
    lengths: tuple[float, float, float]
    dt: float
    t_end: float
    hodge_order: int = 2
    hodge_variant: str = "natural"
    kernel_degree: int = 1
    neutralize: bool = True
    species: list[SpeciesSpec] = field(default_factory=list)
    external_b0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    pert_b_amplitude: float = 0.0
    pert_b_component: int = 1
    pert_b_mode: int = 1
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    output_dir: str = "."

    def grid(self) -> GridSpec:
        return build_grid(self.lengths, self.cells, self.hodge_order)

    def scheme(self) -> SchemeConfig:
        return SchemeConfig(self.dt, self.hodge_order, self.hodge_variant,
                            self.neutralize)

    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


class ConfigError(ValueError):
    pass


def _scalar(kind, key, raw):
    try:
        if kind is bool:
            if raw in ("on", "true", "1", "yes"):
                return True
            if raw in ("off", "false", "0", "no"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind.__name__}")


def _vector(kind, n, key, raw):
    parts = raw.split()
    if len(parts) != n:
        raise ConfigError(f"{key}: expected {n} values, got {len(parts)}")
    return tuple(_scalar(kind, key, p) for p in parts)


_TOP_KEYS = {
    "grid.cells": ("cells", lambda k, v: _vector(int, 3, k, v)),
    "grid.lengths": ("lengths", lambda k, v: _vector(float, 3, k, v)),
    "scheme.dt": ("dt", lambda k, v: _scalar(float, k, v)),
    "scheme.t_end": ("t_end", lambda k, v: _scalar(float, k, v)),
    "scheme.hodge_order": ("hodge_order", lambda k, v: _scalar(int, k, v)),
    "scheme.hodge_variant": ("hodge_variant", lambda k, v: v),
    "scheme.kernel_degree": ("kernel_degree", lambda k, v: _scalar(int, k, v)),
    "scheme.neutralize": ("neutralize", lambda k, v: _scalar(bool, k, v)),
    "external_b0": ("external_b0", lambda k, v: _vector(float, 3, k, v)),
    "perturbation.b_amplitude": ("pert_b_amplitude", lambda k, v: _scalar(float, k, v)),
    "perturbation.b_component": ("pert_b_component", lambda k, v: _scalar(int, k, v)),
    "perturbation.b_mode": ("pert_b_mode", lambda k, v: _scalar(int, k, v)),
    "output.directory": ("output_dir", lambda k, v: v),
}

_DIAG_KEYS = {
    "diagnostics.interval": ("interval", lambda k, v: _scalar(int, k, v)),
    "diagnostics.slice": ("slice_enable", lambda k, v: _scalar(bool, k, v)),
    "diagnostics.slice_axis": ("slice_axis", lambda k, v: _scalar(int, k, v)),
    "diagnostics.slice_component": ("slice_component", lambda k, v: _scalar(int, k, v)),
}

_SPECIES_KEYS = {
    "charge": lambda k, v: _scalar(float, k, v),
    "mass": lambda k, v: _scalar(float, k, v),
    "count": lambda k, v: _scalar(int, k, v),
    "per_cell": lambda k, v: _scalar(int, k, v),
    "thermal": lambda k, v: _vector(float, 3, k, v),
    "drift": lambda k, v: _vector(float, 3, k, v),
    "density": lambda k, v: _scalar(float, k, v),
    "sampling": lambda k, v: v,
    "seed": lambda k, v: _scalar(int, k, v),
}


def parse_config(text: str) -> RunConfig:
    top: dict = {}
    diag: dict = {}
    species: dict[str, dict] = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in _TOP_KEYS:
            name, conv = _TOP_KEYS[key]
            top[name] = conv(key, raw)
        elif key in _DIAG_KEYS:
            name, conv = _DIAG_KEYS[key]
            diag[name] = conv(key, raw)
        elif key.startswith("species."):
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in _SPECIES_KEYS:
                raise ConfigError(f"line {ln}: unknown key {key!r}")
            species.setdefault(parts[1], {})[parts[2]] = \
                _SPECIES_KEYS[parts[2]](key, raw)
        else:
            raise ConfigError(f"line {ln}: unknown key {key!r}")

    for req in ("cells", "lengths", "dt", "t_end"):
        if req not in top:
            raise ConfigError(f"missing required key for {req!r}")
    cfg = RunConfig(species=[], diagnostics=DiagnosticsConfig(**diag), **top)
    if cfg.hodge_order % 2 or cfg.hodge_order < 2:
        raise ConfigError(f"scheme.hodge_order must be even, got {cfg.hodge_order}")
    if cfg.hodge_variant not in ("natural", "minimal"):
        raise ConfigError(f"unknown scheme.hodge_variant {cfg.hodge_variant!r}")
    if not 0 <= cfg.kernel_degree <= 4:
        raise ConfigError(f"scheme.kernel_degree must be in 0..4")
    if cfg.diagnostics.interval < 1:
        raise ConfigError("diagnostics.interval must be >= 1")
    if not 0 <= cfg.diagnostics.slice_axis <= 2:
        raise ConfigError("diagnostics.slice_axis must be 0, 1 or 2")
    if not 0 <= cfg.diagnostics.slice_component <= 2:
        raise ConfigError("diagnostics.slice_component must be 0, 1 or 2")
    n_cells = int(np.prod(top["cells"]))
    for name, fields in species.items():
        for req in ("charge", "mass"):
            if req not in fields:
                raise ConfigError(f"species.{name}: missing {req!r}")
        if ("count" in fields) == ("per_cell" in fields):
            raise ConfigError(
                f"species.{name}: give exactly one of count / per_cell")
        count = fields.pop("count", None)
        if count is None:
            count = fields.pop("per_cell") * n_cells
        cfg.species.append(SpeciesSpec(
            name=name, count=count,
            spline_degree=cfg.kernel_degree, **fields))
    # validate grid/scheme construction eagerly
    cfg.grid()
    cfg.scheme()
    return cfg


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())
