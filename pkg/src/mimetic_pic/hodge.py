"""Sliding Lagrange interpolation / histopolation and banded Hodge operators.

All 1D stencils are computed at build time by exact rational integration of
the Lagrange windows (no hard-coded tables).  On the uniform periodic grid
every Hodge operator is a symmetric circulant stencil per axis; the 3D
operators are tensor products of a point-to-integral factor along the
component axis and integral-to-point factors along the transverse axes.

Conventions, in cell-width units u = (x - x_i)/h:

* interpolation window of cell [x_i, x_{i+1}]: Lagrange polynomials on the
  2p+2 nodes u = -p..p+1
* histopolation window: the 2p+1 polynomials hb_a = sum_{b>a} l'_b whose
  integrals over [g, g+1] equal delta_{a,g}
* h0 (width 2p+3): point values -> integral over the staggered cell
  [u=-1/2, u=1/2], split across the two adjacent interpolation windows
* h1 (width 2p+1): cell integrals -> point value at the staggered point
  u = 1/2, by evaluating the histopolation window there
* h0_min (width 2p+1): like h0 but integrating the single Lagrange window
  on nodes u = -p..p; its order-2 case is the classical Yee transfer
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grid import DUAL, PRIMAL, DofField, GridSpec

__all__ = [
    "Stencil1D",
    "HodgeOp3D",
    "build_h0",
    "build_h1",
    "build_h0_min",
    "assemble_hodge",
    "apply_hodge",
    "apply_hodge_inverse",
    "hodge_symbols",
    "lagrange_window",
    "interp_i0",
    "interp_i1",
]


# --------------------------------------------------------------------------
# exact polynomial arithmetic over Fractions (coefficients low -> high)
# --------------------------------------------------------------------------

def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _poly_int(a, lo: Fraction, hi: Fraction) -> Fraction:
    total = Fraction(0)
    for m, am in enumerate(a):
        total += am * (hi ** (m + 1) - lo ** (m + 1)) / (m + 1)
    return total


def _poly_eval(a, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for am in reversed(a):
        acc = acc * x + am
    return acc


def _poly_diff(a):
    return [a[m] * m for m in range(1, len(a))] or [Fraction(0)]


def _lagrange_exact(nodes, which):
    """Lagrange polynomial over rational nodes equal to 1 at nodes[which]."""
    poly = [Fraction(1)]
    xj = nodes[which]
    for m, xm in enumerate(nodes):
        if m == which:
            continue
        poly = _poly_mul(poly, [Fraction(-xm, 1) / (xj - xm), Fraction(1) / (xj - xm)])
    return poly


def lagrange_window(p: int) -> list[np.ndarray]:
    """Float coefficient arrays of the 2p+2 Lagrange polynomials of one
    interpolation window, in u-units on nodes -p..p+1."""
    nodes = [Fraction(a) for a in range(-p, p + 2)]
    return [
        np.array([float(c) for c in _lagrange_exact(nodes, m)])
        for m in range(len(nodes))
    ]


# --------------------------------------------------------------------------
# 1D stencils
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Stencil1D:
    """Symmetric circulant stencil: out_i = sum_a coeffs[w + a] * in_{i+a}."""

    kind: str
    p: int
    coeffs: tuple[float, ...]
    h: float

    @property
    def half_width(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def apply(self, arr: np.ndarray, axis: int) -> np.ndarray:
        w = self.half_width
        out = self.coeffs[w] * arr
        for a in range(1, w + 1):
            out += self.coeffs[w + a] * (
                np.roll(arr, -a, axis=axis) + np.roll(arr, a, axis=axis)
            )
        return out

    def symbol(self, M: int) -> np.ndarray:
        """Real eigenvalues of the periodic stencil under the DFT."""
        w = self.half_width
        k = np.arange(M)
        sym = np.full(M, self.coeffs[w])
        for a in range(1, w + 1):
            sym += 2.0 * self.coeffs[w + a] * np.cos(2.0 * np.pi * k * a / M)
        return sym

    def dense(self, M: int) -> np.ndarray:
        mat = np.zeros((M, M))
        w = self.half_width
        for a in range(-w, w + 1):
            mat[np.arange(M), (np.arange(M) + a) % M] += self.coeffs[w + a]
        return mat


def _order_to_p(order: int) -> int:
    if order < 2 or order % 2:
        raise ValueError(f"Hodge order must be even and >= 2, got {order}")
    return order // 2 - 1


def _h0_coeffs(p: int):
    half = Fraction(1, 2)
    right = [Fraction(a) for a in range(-p, p + 2)]   # window of [x_i, x_{i+1}]
    left = [Fraction(a) for a in range(-p - 1, p + 1)]  # window of [x_{i-1}, x_i]
    coeffs = [Fraction(0)] * (2 * p + 3)
    for a in range(-p - 1, p + 2):
        c = Fraction(0)
        if -p - 1 <= a <= p:  # contribution of [x_{i-1/2}, x_i]
            c += _poly_int(_lagrange_exact(left, a + p + 1), -half, Fraction(0))
        if -p <= a <= p + 1:  # contribution of [x_i, x_{i+1/2}]
            c += _poly_int(_lagrange_exact(right, a + p), Fraction(0), half)
        coeffs[a + p + 1] = c
    return coeffs


def _h1_coeffs(p: int):
    half = Fraction(1, 2)
    nodes = [Fraction(a) for a in range(-p, p + 2)]
    dl = [_poly_diff(_lagrange_exact(nodes, m)) for m in range(len(nodes))]
    coeffs = []
    for a in range(-p, p + 1):
        # hb_a(1/2) = sum_{b = a+1}^{p+1} l'_b(1/2)
        val = sum((_poly_eval(dl[b + p], half) for b in range(a + 1, p + 2)),
                  Fraction(0))
        coeffs.append(val)
    return coeffs


def _h0_min_coeffs(p: int):
    half = Fraction(1, 2)
    nodes = [Fraction(a) for a in range(-p, p + 1)]
    return [
        _poly_int(_lagrange_exact(nodes, a + p), -half, half)
        for a in range(-p, p + 1)
    ]


def build_h0(p: int, h: float) -> Stencil1D:
    """Point values -> staggered cell integrals, width 2p+3, order 2(p+1)."""
    coeffs = tuple(float(c) * h for c in _h0_coeffs(p))
    return Stencil1D("h0", p, coeffs, h)


def build_h1(p: int, h: float) -> Stencil1D:
    """Cell integrals -> staggered point values, width 2p+1, order 2(p+1)."""
    coeffs = tuple(float(c) / h for c in _h1_coeffs(p))
    return Stencil1D("h1", p, coeffs, h)


def build_h0_min(p: int, h: float) -> Stencil1D:
    """Minimal-width (2p+1) point-to-integral transfer of order 2(p+1)."""
    coeffs = tuple(float(c) * h for c in _h0_min_coeffs(p))
    return Stencil1D("h0_min", p, coeffs, h)


# --------------------------------------------------------------------------
# 3D Hodge operators
# --------------------------------------------------------------------------

_TARGETS = {
    # target: (input degree, input grid, output degree, output grid)
    "H2": (2, PRIMAL, 1, DUAL),
    "H2_dual": (2, DUAL, 1, PRIMAL),
    "H3": (3, PRIMAL, 0, DUAL),
    "H3_dual": (3, DUAL, 0, PRIMAL),
}


@dataclass(frozen=True)
class HodgeOp3D:
    """Kronecker-structured Hodge transfer between the staggered grids.

    For H2-type targets, component alpha applies the point-to-integral
    stencil along axis alpha and the integral-to-point stencil along the
    two transverse axes; H3-type targets apply the integral-to-point
    stencil along all axes.
    """

    target: str
    order: int
    variant: str
    axis_h0: tuple[Stencil1D, Stencil1D, Stencil1D]
    axis_h1: tuple[Stencil1D, Stencil1D, Stencil1D]

    @property
    def signature(self):
        return _TARGETS[self.target]


def assemble_hodge(target: str, order: int, spec: GridSpec,
                   variant: str = "natural") -> HodgeOp3D:
    if target not in _TARGETS:
        raise ValueError(f"unknown Hodge target {target!r}")
    if variant not in ("natural", "minimal"):
        raise ValueError(f"unknown Hodge variant {variant!r}")
    spec.require_order(order)
    p = _order_to_p(order)
    build_pt2int = build_h0 if variant == "natural" else build_h0_min
    h0 = tuple(build_pt2int(p, spec.spacings[a]) for a in range(3))
    h1 = tuple(build_h1(p, spec.spacings[a]) for a in range(3))
    return HodgeOp3D(target, order, variant, h0, h1)


def _component_stencils(op: HodgeOp3D, comp: int):
    if op.target in ("H3", "H3_dual"):
        return op.axis_h1
    return tuple(
        op.axis_h0[a] if a == comp else op.axis_h1[a] for a in range(3)
    )


def apply_hodge(op: HodgeOp3D, f: DofField) -> DofField:
    deg_in, grid_in, deg_out, grid_out = op.signature
    if f.degree != deg_in or f.grid != grid_in:
        raise ValueError(
            f"{op.target} expects a degree-{deg_in} {grid_in} field, "
            f"got degree-{f.degree} {f.grid}"
        )
    if op.target in ("H3", "H3_dual"):
        out = f.data
        for a, st in enumerate(op.axis_h1):
            out = st.apply(out, a)
        return DofField(deg_out, grid_out, out)
    comps = []
    for c in range(3):
        out = f.data[c]
        for a, st in enumerate(_component_stencils(op, c)):
            out = st.apply(out, a)
        comps.append(out)
    return DofField(deg_out, grid_out, np.stack(comps))


def hodge_symbols(op: HodgeOp3D, spec: GridSpec) -> np.ndarray:
    """DFT eigenvalues: shape (3, M1, M2, M3) for H2-type targets, or
    (M1, M2, M3) for H3-type.  Strictly positive (SPD operators)."""
    Ms = spec.cells
    if op.target in ("H3", "H3_dual"):
        sx, sy, sz = (op.axis_h1[a].symbol(Ms[a]) for a in range(3))
        return sx[:, None, None] * sy[None, :, None] * sz[None, None, :]
    out = []
    for c in range(3):
        sts = _component_stencils(op, c)
        sx, sy, sz = (sts[a].symbol(Ms[a]) for a in range(3))
        out.append(sx[:, None, None] * sy[None, :, None] * sz[None, None, :])
    return np.stack(out)


def apply_hodge_inverse(op: HodgeOp3D, f: DofField, spec: GridSpec) -> DofField:
    """Inverse transfer via the DFT diagonalization of the circulant
    stencils (exact; symbols are positive by the SPD property)."""
    deg_in, grid_in, deg_out, grid_out = op.signature
    if f.degree != deg_out or f.grid != grid_out:
        raise ValueError(
            f"inverse {op.target} expects a degree-{deg_out} {grid_out} field, "
            f"got degree-{f.degree} {f.grid}"
        )
    sym = hodge_symbols(op, spec)
    if f.is_vector:
        out = np.stack([
            np.fft.ifftn(np.fft.fftn(f.data[c]) / sym[c]).real for c in range(3)
        ])
    else:
        out = np.fft.ifftn(np.fft.fftn(f.data) / sym).real
    return DofField(deg_in, grid_in, out)


# --------------------------------------------------------------------------
# pointwise interpolation / histopolation (1D, periodic)
# --------------------------------------------------------------------------

def _window_cell(x: float, h: float, M: int) -> tuple[int, float]:
    u = x / h
    i = int(np.floor(u))
    return i % M, u - i


def interp_i0(f: np.ndarray, x: float, h: float, p: int) -> float:
    """Evaluate the sliding-Lagrange interpolant of periodic point values."""
    M = len(f)
    i, u = _window_cell(x, h, M)
    basis = lagrange_window(p)
    val = 0.0
    for a in range(-p, p + 2):
        val += f[(i + a) % M] * float(np.polyval(basis[a + p][::-1], u))
    return val


def interp_i1(g: np.ndarray, x: float, h: float, p: int) -> float:
    """Evaluate the histopolant of periodic cell integrals (value has units
    of the integrand, i.e. includes the 1/h of the u-substitution)."""
    M = len(g)
    i, u = _window_cell(x, h, M)
    basis = lagrange_window(p)
    dbasis = [np.polyder(np.poly1d(b[::-1])) for b in basis]
    val = 0.0
    for a in range(-p, p + 1):
        hb = sum(float(dbasis[b + p](u)) for b in range(a + 1, p + 2))
        val += g[(i + a) % M] * hb
    return val / h
