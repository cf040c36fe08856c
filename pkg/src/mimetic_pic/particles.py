"""Particle species containers and phase-space sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .grid import GridSpec


@dataclass
class ParticleBatch:
    """Markers of one species: positions in [0, L) per axis, velocities,
    constant-in-time weights."""

    species: str
    charge: float
    mass: float
    positions: np.ndarray   # (Np, 3)
    velocities: np.ndarray  # (Np, 3)
    weights: np.ndarray     # (Np,)
    spline_degree: int = 1

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        n = len(self.positions)
        if len(self.velocities) != n or len(self.weights) != n:
            raise ValueError("positions, velocities, weights must have equal length")
        if np.any(self.weights <= 0):
            raise ValueError("particle weights must be positive")
        if self.mass <= 0:
            raise ValueError("particle mass must be positive")

    @property
    def count(self) -> int:
        return len(self.weights)

    def wrap(self, spec: GridSpec) -> None:
        L = np.asarray(spec.lengths)
        np.mod(self.positions, L, out=self.positions)

    def check_kernel_fits(self, spec: GridSpec) -> None:
        p = self.spline_degree
        for a in range(3):
            if (p + 1) * spec.spacings[a] > spec.lengths[a]:
                raise ValueError(
                    f"axis {a}: spline kernel of degree {p} is wider than the "
                    f"domain ({p + 1} cells of {spec.cells[a]})"
                )


def _radical_inverse(base: int, n: np.ndarray) -> np.ndarray:
    n = n.copy()
    out = np.zeros(len(n))
    f = 1.0 / base
    while np.any(n > 0):
        out += f * (n % base)
        n //= base
        f /= base
    return out


def hammersley(count: int, dims: int, skip: int = 0) -> np.ndarray:
    """Hammersley point set in [0,1)^dims: first axis is i/N, the rest are
    radical inverses in successive prime bases."""
    primes = [2, 3, 5, 7, 11, 13]
    idx = np.arange(skip, skip + count)
    cols = [(idx + 0.5) / (skip + count)]
    for b in primes[: dims - 1]:
        cols.append(_radical_inverse(b, idx + 1))
    return np.column_stack(cols)


@dataclass
class SpeciesSpec:
    """Sampling recipe for one species: uniform in space, anisotropic
    Gaussian in velocity, uniform weights for a given mean density."""

    name: str
    charge: float
    mass: float
    count: int
    thermal: tuple[float, float, float] = (0.0, 0.0, 0.0)
    drift: tuple[float, float, float] = (0.0, 0.0, 0.0)
    density: float = 1.0
    spline_degree: int = 1
    sampling: str = "hammersley"   # or "random"
    seed: int = 0


def sample_particles(spec_s: SpeciesSpec, grid: GridSpec) -> ParticleBatch:
    """Draw markers: quasi-random (Hammersley) or seeded pseudo-random
    positions; velocities by inverse-CDF Gaussian transform."""
    n = spec_s.count
    if n <= 0:
        raise ValueError("particle count must be positive")
    sig = np.asarray(spec_s.thermal, dtype=float)
    if np.any(sig < 0):
        raise ValueError("thermal spreads must be non-negative")
    if spec_s.sampling == "hammersley":
        u = hammersley(n, 6)
    elif spec_s.sampling == "random":
        u = np.random.default_rng(spec_s.seed).uniform(size=(n, 6))
    else:
        raise ValueError(f"unknown sampling mode {spec_s.sampling!r}")
    pos = u[:, :3] * np.asarray(grid.lengths)
    # clip away exact 0/1 before the normal inverse CDF
    uv = np.clip(u[:, 3:], 1e-12, 1.0 - 1e-12)
    vel = ndtri(uv) * sig + np.asarray(spec_s.drift)
    vel[:, sig == 0.0] = np.asarray(spec_s.drift)[sig == 0.0]
    w = spec_s.density * grid.volume / n
    batch = ParticleBatch(
        spec_s.name, spec_s.charge, spec_s.mass, pos, vel,
        np.full(n, w), spec_s.spline_degree,
    )
    batch.wrap(grid)
    batch.check_kernel_fits(grid)
    return batch
