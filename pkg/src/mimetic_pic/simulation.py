"""Time integration of the coupled particle-field system.

State: marker batches (X, V, constant weights), dual face fluxes D (the
displacement field) and primal face fluxes B.  One step is a palindromic
splitting of the Hamiltonian into a magnetic piece, an electric piece and
one kinetic piece per spatial axis,

    B(dt/2) E(dt/2) X(dt/2) Y(dt/2) Z(dt) Y(dt/2) X(dt/2) E(dt/2) B(dt/2)

applied left to right.  Every substep flow is exact, so the composition is
reversible and second order, conserves total charge and momentum maps, and
keeps the divergence constraints at round-off: div B stays exactly zero
and the deposited substep currents telescope against the charge motion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import coupling
from .derham import apply_curl, apply_curl_dual, apply_div, apply_div_dual
from .grid import DUAL, PRIMAL, DofField, GridSpec, zeros_field
from .hodge import apply_hodge, assemble_hodge, hodge_symbols
from .particles import ParticleBatch
from .splines import spline_tables


@dataclass(frozen=True)
class SchemeConfig:
    """Numerical parameters of the field/particle discretization."""

    dt: float
    hodge_order: int = 2
    hodge_variant: str = "natural"
    neutralize: bool = True

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.hodge_order % 2 or self.hodge_order < 2:
            raise ValueError("hodge_order must be a positive even integer")
        if self.hodge_variant not in ("natural", "minimal"):
            raise ValueError(f"unknown hodge variant {self.hodge_variant!r}")


def solve_poisson(spec: GridSpec, rho: DofField, hodge_d) -> DofField:
    """Electrostatic initialization: dual fluxes D with div D = rho exactly
    and D derived from a primal potential, D = -Hd^{-1} grad phi.

    Solved spectrally; requires a neutral rho (zero total charge).
    """
    if rho.degree != 3 or rho.grid != DUAL:
        raise ValueError("solve_poisson expects dual cell-integrated charge")
    tot = rho.data.sum()
    scale = np.abs(rho.data).sum() + 1.0
    if abs(tot) > 1e-10 * scale:
        raise ValueError(
            f"total charge {tot:.3e} is not neutral; add a background or "
            "fix the species charges"
        )
    M = spec.cells
    sig = hodge_symbols(hodge_d, spec)  # (3, M1, M2, M3), real
    gs = []
    for a in range(3):
        k = np.fft.fftfreq(M[a]) * M[a]
        g = np.exp(2j * np.pi * k / M[a]) - 1.0
        shape = [1, 1, 1]
        shape[a] = M[a]
        gs.append(g.reshape(shape))
    denom = sum(np.abs(gs[a]) ** 2 / sig[a] for a in range(3))
    denom[0, 0, 0] = 1.0
    rho_hat = np.fft.fftn(rho.data)
    phi_hat = rho_hat / denom
    phi_hat[0, 0, 0] = 0.0
    D = np.stack([
        np.fft.ifftn(-gs[a] * phi_hat / sig[a]).real for a in range(3)
    ])
    return DofField(2, DUAL, D)


class Simulation:
    """Field state, marker batches and the splitting integrator."""

    def __init__(self, spec: GridSpec, scheme: SchemeConfig,
                 batches: list[ParticleBatch]):
        spec.require_order(scheme.hodge_order)
        self.spec = spec
        self.scheme = scheme
        self.batches = batches
        for b in batches:
            b.wrap(spec)
            b.check_kernel_fits(spec)
        self.hodge_b = assemble_hodge("H2", scheme.hodge_order, spec,
                                      scheme.hodge_variant)
        self.hodge_d = assemble_hodge("H2_dual", scheme.hodge_order, spec,
                                      scheme.hodge_variant)
        self.D = zeros_field(spec, 2, DUAL)
        self.B = zeros_field(spec, 2, PRIMAL)
        self.time = 0.0
        self.step_count = 0
        # fixed neutralizing background charge per dual cell
        self.background = 0.0
        if scheme.neutralize:
            qtot = sum(float(np.sum(b.weights)) * b.charge for b in batches)
            self.background = -qtot / spec.n_scalar

    # -- diagnostics ------------------------------------------------------

    def charge_density(self) -> DofField:
        """Dual cell integrals of the charge, markers plus background."""
        rho = np.full(self.spec.cells, self.background)
        h1, h2, h3 = self.spec.spacings
        for b in self.batches:
            bc, ac = spline_tables(b.spline_degree)
            coupling.deposit_charge(b.positions, b.weights * b.charge,
                                    h1, h2, h3, b.spline_degree, bc, ac, rho)
        return DofField(3, DUAL, rho)

    def electric_edge_field(self) -> DofField:
        return apply_hodge(self.hodge_d, self.D)

    def energies(self) -> dict:
        kin = 0.0
        for b in self.batches:
            kin += 0.5 * b.mass * float(
                np.sum(b.weights * np.sum(b.velocities ** 2, axis=1))
            )
        E = self.electric_edge_field()
        H = apply_hodge(self.hodge_b, self.B)
        mag_c = [0.5 * float(np.vdot(self.B.data[c], H.data[c])) for c in range(3)]
        return {
            "kinetic": kin,
            "electric": 0.5 * float(np.vdot(self.D.data, E.data)),
            "magnetic": sum(mag_c),
            "magnetic_components": tuple(mag_c),
        }

    def total_energy(self) -> float:
        e = self.energies()
        return e["kinetic"] + e["electric"] + e["magnetic"]

    def gauss_residual(self) -> float:
        """Relative L2 residual of div D = rho."""
        rho = self.charge_density()
        r = apply_div_dual(self.D).data - rho.data
        den = np.linalg.norm(rho.data)
        return float(np.linalg.norm(r) / max(den, 1e-300))

    def max_div_b(self) -> float:
        return float(np.abs(apply_div(self.B).data).max())

    # -- initialization ---------------------------------------------------

    def initialize_fields(self, b_field: DofField | None = None) -> None:
        """Set D from the electrostatic solve of the deposited charge and
        (optionally) B from provided primal face fluxes."""
        rho = self.charge_density()
        self.D = solve_poisson(self.spec, rho, self.hodge_d)
        if b_field is not None:
            if b_field.degree != 2 or b_field.grid != PRIMAL:
                raise ValueError("b_field must be primal face fluxes")
            div = np.abs(apply_div(b_field).data).max()
            scale = np.abs(b_field.data).max() + 1e-300
            if div > 1e-10 * scale:
                raise ValueError(f"initial B is not divergence free (max {div:.3e})")
            self.B = b_field.copy()

    # -- substep flows ----------------------------------------------------

    def _flow_magnetic(self, tau: float) -> None:
        H = apply_hodge(self.hodge_b, self.B)
        self.D.data += tau * apply_curl_dual(H).data

    def _flow_electric(self, tau: float) -> None:
        E = self.electric_edge_field()
        h1, h2, h3 = self.spec.spacings
        pad = max(b.spline_degree for b in self.batches) + 2
        Ep = [coupling.pad_wrap(E.data[c], (pad, pad, pad)) for c in range(3)]
        for b in self.batches:
            bc, ac = spline_tables(b.spline_degree)
            coupling.kick_velocity(b.positions, b.velocities,
                                   tau * b.charge / b.mass,
                                   Ep[0], Ep[1], Ep[2], pad,
                                   h1, h2, h3, b.spline_degree, bc, ac)
        self.B.data -= tau * apply_curl(E).data

    def _flow_axis(self, a: int, tau: float) -> None:
        b, c = (a + 1) % 3, (a + 2) % 3
        spec = self.spec
        order = [a, b, c]
        half = 0.5 * spec.lengths[a]
        vmax = 0.0
        for bt in self.batches:
            vmax = max(vmax, float(np.abs(bt.velocities[:, a]).max(initial=0.0)))
        if abs(tau) * vmax >= half:
            raise FloatingPointError(
                f"substep displacement {abs(tau) * vmax:.3e} exceeds half "
                f"the domain along axis {a}; reduce dt"
            )
        padt = max(bt.spline_degree for bt in self.batches) + 2
        pada = padt + int(np.ceil(abs(tau) * vmax / spec.spacings[a])) + 1
        pads = (pada, padt, padt)
        Bb = coupling.pad_wrap(
            np.moveaxis(self.B.data[b], order, [0, 1, 2]), pads)
        Bc = coupling.pad_wrap(
            np.moveaxis(self.B.data[c], order, [0, 1, 2]), pads)
        J = np.zeros(Bb.shape)
        for bt in self.batches:
            bcoef, acoef = spline_tables(bt.spline_degree)
            Xa = np.ascontiguousarray(bt.positions[:, a])
            Va = np.ascontiguousarray(bt.velocities[:, a])
            Vb = np.ascontiguousarray(bt.velocities[:, b])
            Vc = np.ascontiguousarray(bt.velocities[:, c])
            coupling.push_axis(
                tau, Xa, Va, Vb, Vc,
                bt.positions[:, b] / spec.spacings[b],
                bt.positions[:, c] / spec.spacings[c],
                bt.charge / bt.mass, bt.weights * bt.charge,
                Bb, Bc, J, pada, padt,
                spec.spacings[a], spec.spacings[b], spec.spacings[c],
                spec.lengths[a], bt.spline_degree, bcoef, acoef,
            )
            bt.positions[:, a] = Xa
            bt.velocities[:, b] = Vb
            bt.velocities[:, c] = Vc
        cells_abc = (spec.cells[a], spec.cells[b], spec.cells[c])
        J = coupling.fold_wrap(J, cells_abc)
        self.D.data[a] -= np.moveaxis(J, [0, 1, 2], order)

    def step(self, n: int = 1) -> None:
        dt = self.scheme.dt
        for _ in range(n):
            self._flow_magnetic(0.5 * dt)
            self._flow_electric(0.5 * dt)
            self._flow_axis(0, 0.5 * dt)
            self._flow_axis(1, 0.5 * dt)
            self._flow_axis(2, dt)
            self._flow_axis(1, 0.5 * dt)
            self._flow_axis(0, 0.5 * dt)
            self._flow_electric(0.5 * dt)
            self._flow_magnetic(0.5 * dt)
            self.time += dt
            self.step_count += 1
