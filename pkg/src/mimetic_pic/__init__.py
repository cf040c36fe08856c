"""Structure-preserving electromagnetic particle-in-cell solver on dual
staggered periodic Cartesian grids.

Layers, bottom to top:

    grid        grid geometry, geometric DoF containers, flat layout
    splines     centered B-spline kernels and antiderivatives
    derham      incidence operators (grad/curl/div) and field reductions
    hodge       primal/dual transfer stencils and pointwise reconstruction
    particles   species sampling and marker batches
    coupling    particle-grid gather/scatter kernels (fast + reference)
    simulation  the splitting integrator and its conservation diagnostics
    structure   dense bracket assembly for structure verification
    config      text run configuration
    diagnostics experiment drivers, CSV output, spectra and fits
    cli         the ``mimetic-pic`` command line front end
"""

from .config import RunConfig, load_config, parse_config
from .diagnostics import run
from .grid import DUAL, PRIMAL, DofField, GridSpec, build_grid
from .particles import ParticleBatch, SpeciesSpec, sample_particles
from .simulation import SchemeConfig, Simulation

__all__ = [
    "RunConfig", "load_config", "parse_config", "run",
    "DUAL", "PRIMAL", "DofField", "GridSpec", "build_grid",
    "ParticleBatch", "SpeciesSpec", "sample_particles",
    "SchemeConfig", "Simulation",
]

__version__ = "0.1.0"
