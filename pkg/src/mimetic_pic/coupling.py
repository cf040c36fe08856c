"""Particle-grid transfer kernels.

Every transfer factorizes per axis into two one-dimensional weight types
built from the centered B-spline S_p of the marker:

    point weights     pt[i]  = S_p(i + 1/2 - X/h)
    interval weights  iw[i]  = A(i + 1/2 - X/h) - A(i - 1/2 - X/h)

with A the spline antiderivative.  Point weights sample the kernel at the
staggered points x_{i+1/2}; interval weights are its exact integrals over
the staggered cells.  Flux-type degrees of freedom use the point weight
along their own axis (divided by h) and interval weights transversely;
circulation-type ones the other way around; charge uses intervals on all
three axes.  Partition of unity of S_p makes the gather of any uniform
field exact.

During a position substep along one axis the same antiderivative gives the
time integral in closed form,

    int_0^tau S_p(i + 1/2 - (X + s V)/h) (V/h) ds = A(u_i) - A(u_i - d),

with u_i = i + 1/2 - X/h and d = tau V / h.  The current deposited this
way telescopes against the charge movement exactly, which is what keeps
the discrete Gauss law at round-off over arbitrarily many steps.

The hot loops are numba kernels over a compact window of p + 2 cells per
axis (plus the swept cells for the time integrals).  The *_ref functions
build the same weights as full-grid numpy arrays and exist as slow oracles
for the tests and for the dense bracket assembly.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .grid import DofField, GridSpec
from .splines import spline_antiderivative, spline_tables, spline_value

__all__ = [
    "kick_velocity",
    "push_axis",
    "deposit_charge",
    "gather_b_particles",
    "line_weights_ref",
    "kernel_dofs_ref",
    "gather_ref",
    "deposit_ref",
]


@njit(cache=True, inline="always")
def _bcdf(p, ac, u):
    t = u + 0.5 * (p + 1)
    if t <= 0.0:
        return 0.0
    if t >= p + 1:
        return 1.0
    j = int(t)
    if j > p:
        j = p
    s = t - j
    v = ac[j, p + 2]
    for m in range(p + 1, 0, -1):
        v = v * s + ac[j, m]
    return v * s + ac[j, 0]


@njit(cache=True, inline="always")
def _fill_window(c, p, bc, ac, pt, iw):
    """Fill point and interval weights on the shared window starting at the
    returned base index; both windows have p + 2 slots.

    The evaluation points are unit spaced, so slot n falls in spline piece
    n at one common local coordinate s; no per-slot branching is needed.
    """
    i0 = int(np.floor(c - 0.5 * (p + 2))) + 1
    # knot coordinate of slot n is n + s with the shared s in (0, 1], so
    # slot n lives on (the closure of) spline piece n
    s = i0 + 0.5 * (p + 2) - c
    prev = 0.0
    for n in range(p + 1):
        v = bc[n, p]
        for m in range(p - 1, -1, -1):
            v = v * s + bc[n, m]
        pt[n] = v
        v = ac[n, p + 2]
        for m in range(p + 1, 0, -1):
            v = v * s + ac[n, m]
        cur = v * s + ac[n, 0]
        iw[n] = cur - prev
        prev = cur
    pt[p + 1] = 0.0
    iw[p + 1] = 1.0 - prev
    return i0


@njit(cache=True, fastmath=True)
def kick_velocity(pos, vel, coef, E1, E2, E3, pad, h1, h2, h3, p, bc, ac):
    """Velocity kick vel += coef * E(X) with E gathered from primal edge
    integrals; coef = tau * q / m.  E1, E2, E3 are wrap-padded by ``pad``
    cells on every side so the window loops need no periodic wrapping."""
    W = p + 2
    ptx = np.empty(W); iwx = np.empty(W)
    pty = np.empty(W); iwy = np.empty(W)
    ptz = np.empty(W); iwz = np.empty(W)
    for pp in range(pos.shape[0]):
        i0 = _fill_window(pos[pp, 0] / h1, p, bc, ac, ptx, iwx) + pad
        j0 = _fill_window(pos[pp, 1] / h2, p, bc, ac, pty, iwy) + pad
        k0 = _fill_window(pos[pp, 2] / h3, p, bc, ac, ptz, iwz) + pad
        ex = 0.0; ey = 0.0; ez = 0.0
        for n1 in range(W):
            i = i0 + n1
            px = ptx[n1]
            wx = iwx[n1]
            for n2 in range(W):
                j = j0 + n2
                a_pi = px * iwy[n2]
                a_ip = wx * pty[n2]
                a_ii = wx * iwy[n2]
                for n3 in range(W):
                    wz = iwz[n3]
                    ex += E1[i, j, k0 + n3] * a_pi * wz
                    ey += E2[i, j, k0 + n3] * a_ip * wz
                    ez += E3[i, j, k0 + n3] * a_ii * ptz[n3]
        vel[pp, 0] += coef * ex / h1
        vel[pp, 1] += coef * ey / h2
        vel[pp, 2] += coef * ez / h3


@njit(cache=True)
def gather_b_particles(pos, B1, B2, B3, h1, h2, h3, p, bc, ac, out):
    """Magnetic field at the markers from primal face fluxes."""
    M1, M2, M3 = B1.shape
    W = p + 2
    ptx = np.empty(W); iwx = np.empty(W)
    pty = np.empty(W); iwy = np.empty(W)
    ptz = np.empty(W); iwz = np.empty(W)
    for pp in range(pos.shape[0]):
        i0 = _fill_window(pos[pp, 0] / h1, p, bc, ac, ptx, iwx)
        j0 = _fill_window(pos[pp, 1] / h2, p, bc, ac, pty, iwy)
        k0 = _fill_window(pos[pp, 2] / h3, p, bc, ac, ptz, iwz)
        bx = 0.0; by = 0.0; bz = 0.0
        for n1 in range(W):
            i = (i0 + n1) % M1
            for n2 in range(W):
                j = (j0 + n2) % M2
                for n3 in range(W):
                    k = (k0 + n3) % M3
                    bx += B1[i, j, k] * iwx[n1] * pty[n2] * ptz[n3]
                    by += B2[i, j, k] * ptx[n1] * iwy[n2] * ptz[n3]
                    bz += B3[i, j, k] * ptx[n1] * pty[n2] * iwz[n3]
        out[pp, 0] = bx / (h2 * h3)
        out[pp, 1] = by / (h1 * h3)
        out[pp, 2] = bz / (h1 * h2)


@njit(cache=True)
def deposit_charge(pos, wq, h1, h2, h3, p, bc, ac, out):
    """Accumulate charge cell integrals: out[i,j,k] += wq_p iwx iwy iwz."""
    M1, M2, M3 = out.shape
    W = p + 2
    ptx = np.empty(W); iwx = np.empty(W)
    pty = np.empty(W); iwy = np.empty(W)
    ptz = np.empty(W); iwz = np.empty(W)
    for pp in range(pos.shape[0]):
        i0 = _fill_window(pos[pp, 0] / h1, p, bc, ac, ptx, iwx)
        j0 = _fill_window(pos[pp, 1] / h2, p, bc, ac, pty, iwy)
        k0 = _fill_window(pos[pp, 2] / h3, p, bc, ac, ptz, iwz)
        w = wq[pp]
        for n1 in range(W):
            i = (i0 + n1) % M1
            for n2 in range(W):
                j = (j0 + n2) % M2
                for n3 in range(W):
                    k = (k0 + n3) % M3
                    out[i, j, k] += w * iwx[n1] * iwy[n2] * iwz[n3]


@njit(cache=True)
def push_axis(tau, Xa, Va, Vb, Vc, cb, cc, qm, wq, Bb, Bc, Ja,
              pada, padt, ha, hb, hc, La, p, bc, ac):
    """One position substep along axis a (cyclic components a, b, c).

    Arrays Bb, Bc, Ja are laid out with the motion axis first and are
    wrap-padded: ``pada`` cells on each side of the motion axis (sized by
    the caller to cover the largest displacement) and ``padt`` on each
    side of the transverse axes.  Updates Xa in place, rotates the
    transverse velocities through the exact line integrals of the
    magnetic field along the trajectory, and accumulates the swept
    current into Ja; the caller folds Ja back periodically and subtracts
    it from the dual fluxes.  cb, cc are the fixed transverse positions
    in cell units.
    """
    W = p + 2
    ptb = np.empty(W); iwb = np.empty(W)
    ptc = np.empty(W); iwc = np.empty(W)
    for pp in range(Xa.shape[0]):
        caa = Xa[pp] / ha
        d = tau * Va[pp] / ha
        j0 = _fill_window(cb[pp], p, bc, ac, ptb, iwb) + padt
        k0 = _fill_window(cc[pp], p, bc, ac, ptc, iwc) + padt
        lo = caa if d >= 0.0 else caa + d
        i0 = int(np.floor(lo - 0.5 * (p + 2))) + 1
        Wm = W + int(np.ceil(abs(d)))
        tib = 0.0
        tic = 0.0
        w = wq[pp]
        for n in range(Wm):
            u = i0 + n + 0.5 - caa
            I = _bcdf(p, ac, u) - _bcdf(p, ac, u - d)
            if I == 0.0:
                continue
            i = i0 + n + pada
            wI = w * I
            for nb in range(W):
                j = j0 + nb
                t_ib = I * iwb[nb]
                t_pb = I * ptb[nb]
                t_w = wI * iwb[nb]
                for nc in range(W):
                    k = k0 + nc
                    tib += Bb[i, j, k] * t_ib * ptc[nc]
                    tic += Bc[i, j, k] * t_pb * iwc[nc]
                    Ja[i, j, k] += t_w * iwc[nc]
        Xa[pp] = (Xa[pp] + tau * Va[pp]) % La
        if Xa[pp] < 0.0:
            Xa[pp] += La
        # d/ds V = (q/m) Va e_a x b acting on the transverse components;
        # tic / hb is the exact line integral of b_c along the trajectory
        Vb[pp] -= qm * tic / hb
        Vc[pp] += qm * tib / hc


def pad_wrap(arr: np.ndarray, pads) -> np.ndarray:
    """Periodically extend a field by pads[ax] cells on each side."""
    return np.pad(arr, tuple((q, q) for q in pads), mode="wrap")


def fold_wrap(arr: np.ndarray, cells) -> np.ndarray:
    """Adjoint of pad_wrap: fold a padded accumulation array back onto the
    periodic grid."""
    for ax in range(3):
        n = arr.shape[ax]
        M = cells[ax]
        pad = (n - M) // 2
        idx = (np.arange(n) - pad) % M
        moved = np.moveaxis(arr, ax, 0)
        out = np.zeros((M,) + moved.shape[1:])
        np.add.at(out, idx, moved)
        arr = np.moveaxis(out, 0, ax)
    return arr


# ---------------------------------------------------------------------------
# Full-grid numpy reference path (test oracles, dense bracket assembly)
# ---------------------------------------------------------------------------

def line_weights_ref(kind: str, M: int, h: float, x: float, p: int) -> np.ndarray:
    """Periodized per-axis weight vector of length M.

    kind "pt": S_p sampled at the staggered points (not divided by h);
    kind "int": exact integrals of S_p over the staggered cells.
    """
    c = x / h
    i = np.arange(M)
    # fold the kernel support back into [0, M)
    shifts = np.arange(-(p // 2 + 2), p // 2 + 3) * M
    u = i[:, None] + shifts[None, :] + 0.5 - c
    if kind == "pt":
        return spline_value(p, u).sum(axis=1)
    if kind == "int":
        w = spline_antiderivative(p, u) - spline_antiderivative(p, u - 1.0)
        return w.sum(axis=1)
    raise ValueError(f"unknown weight kind {kind!r}")


def kernel_dofs_ref(degree: int, comp: int | None, spec: GridSpec,
                    x: np.ndarray, p: int) -> np.ndarray:
    """Dual-grid DoF weights of the marker kernel as a full (M1,M2,M3)
    array: flux type (degree 2), circulation type (degree 1) or cell
    integrals (degree 3)."""
    if degree == 2:
        kinds = ["int", "int", "int"]
        kinds[comp] = "pt"
        scale = 1.0 / spec.spacings[comp]
    elif degree == 1:
        kinds = ["pt", "pt", "pt"]
        kinds[comp] = "int"
        scale = 1.0
        for a in range(3):
            if a != comp:
                scale /= spec.spacings[a]
    elif degree == 3:
        kinds = ["int", "int", "int"]
        scale = 1.0
    else:
        raise ValueError(f"no kernel reduction for degree {degree}")
    ws = [
        line_weights_ref(kinds[a], spec.cells[a], spec.spacings[a], x[a], p)
        for a in range(3)
    ]
    return scale * np.einsum("i,j,k->ijk", *ws)


def gather_ref(degree: int, field: DofField, pos: np.ndarray, p: int,
               spec: GridSpec) -> np.ndarray:
    """Gather a vector field at marker positions (slow path)."""
    out = np.zeros((len(pos), 3))
    for pp, x in enumerate(pos):
        for c in range(3):
            out[pp, c] = np.sum(field.data[c] * kernel_dofs_ref(degree, c, spec, x, p))
    return out


def deposit_ref(degree: int, spec: GridSpec, pos: np.ndarray,
                values: np.ndarray, p: int) -> np.ndarray:
    """Adjoint of gather_ref: scatter per-marker values (Np, 3) or (Np,)
    into the grid (slow path)."""
    if degree == 3:
        out = np.zeros(spec.cells)
        for pp, x in enumerate(pos):
            out += values[pp] * kernel_dofs_ref(3, None, spec, x, p)
        return out
    out = np.zeros((3, *spec.cells))
    for pp, x in enumerate(pos):
        for c in range(3):
            out[c] += values[pp, c] * kernel_dofs_ref(degree, c, spec, x, p)
    return out
