"""Reduction operators and matrix-free discrete grad / curl / div.

The 1D building block is the circulant forward difference
(d f)_i = f_{i+1} - f_i and its adjoint-derived backward difference
(dt f)_i = f_i - f_{i-1} (dt = -d^T).  The 3D operators are Kronecker
blocks of these with identities; here they are applied as strided sweeps
via np.roll, never assembled.

The dual operators use the backward difference throughout, which realizes
the adjoint relations  G^T = -Dt,  C^T = Ct,  D^T = -Gt  exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import DUAL, PRIMAL, DofField, GridSpec

__all__ = [
    "ReductionConfig",
    "reduce_field",
    "apply_grad",
    "apply_curl",
    "apply_div",
    "apply_grad_dual",
    "apply_curl_dual",
    "apply_div_dual",
    "diff1d_matrix",
]


def _fwd(arr: np.ndarray, axis: int) -> np.ndarray:
    return np.roll(arr, -1, axis=axis) - arr


def _bwd(arr: np.ndarray, axis: int) -> np.ndarray:
    return arr - np.roll(arr, 1, axis=axis)


def diff1d_matrix(M: int) -> np.ndarray:
    """Dense circulant forward-difference matrix (test oracle helper)."""
    d = -np.eye(M)
    d += np.eye(M, k=1)
    d[-1, 0] = 1.0
    return d


def _check(f: DofField, degree: int, grid: str, op: str) -> None:
    if f.degree != degree or f.grid != grid:
        raise ValueError(
            f"{op} expects a degree-{degree} {grid} field, "
            f"got degree-{f.degree} {f.grid}"
        )


def apply_grad(phi: DofField) -> DofField:
    """Discrete gradient: primal 0-form -> primal 1-form."""
    _check(phi, 0, PRIMAL, "apply_grad")
    g = np.stack([_fwd(phi.data, a) for a in range(3)])
    return DofField(1, PRIMAL, g)


def apply_curl(E: DofField) -> DofField:
    """Discrete curl: primal 1-form -> primal 2-form."""
    _check(E, 1, PRIMAL, "apply_curl")
    return DofField(2, PRIMAL, _curl(E.data, _fwd))


def apply_div(B: DofField) -> DofField:
    """Discrete divergence: primal 2-form -> primal 3-form."""
    _check(B, 2, PRIMAL, "apply_div")
    d = _fwd(B.data[0], 0) + _fwd(B.data[1], 1) + _fwd(B.data[2], 2)
    return DofField(3, PRIMAL, d)


def apply_grad_dual(phi: DofField) -> DofField:
    """Discrete gradient on the dual grid: dual 0-form -> dual 1-form."""
    _check(phi, 0, DUAL, "apply_grad_dual")
    g = np.stack([_bwd(phi.data, a) for a in range(3)])
    return DofField(1, DUAL, g)


def apply_curl_dual(H: DofField) -> DofField:
    """Discrete curl on the dual grid: dual 1-form -> dual 2-form."""
    _check(H, 1, DUAL, "apply_curl_dual")
    return DofField(2, DUAL, _curl(H.data, _bwd))


def apply_div_dual(D: DofField) -> DofField:
    """Discrete divergence on the dual grid: dual 2-form -> dual 3-form."""
    _check(D, 2, DUAL, "apply_div_dual")
    d = _bwd(D.data[0], 0) + _bwd(D.data[1], 1) + _bwd(D.data[2], 2)
    return DofField(3, DUAL, d)


def _curl(comp: np.ndarray, diff) -> np.ndarray:
    cx = diff(comp[2], 1) - diff(comp[1], 2)
    cy = diff(comp[0], 2) - diff(comp[2], 0)
    cz = diff(comp[1], 0) - diff(comp[0], 1)
    return np.stack([cx, cy, cz])


# ---------------------------------------------------------------------------
# Reduction (restriction) of continuous fields to geometric DoFs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionConfig:
    """Gauss-Legendre quadrature resolution for the integral reductions."""

    n_quad: int = 8

    def __post_init__(self):
        if self.n_quad < 1:
            raise ValueError("n_quad must be positive")


# per-axis staggering of each (degree, grid, component): "pt" = point
# evaluation, "int" = integral over one cell of the respective grid
def _axis_kinds(degree: int, comp: int | None):
    if degree == 0:
        return ("pt", "pt", "pt")
    if degree == 3:
        return ("int", "int", "int")
    kinds = ["pt", "pt", "pt"] if degree == 2 else ["int", "int", "int"]
    # 1-forms integrate along their own axis, 2-forms along the transverse ones
    if degree == 1:
        kinds = ["pt", "pt", "pt"]
        kinds[comp] = "int"
    else:
        kinds = ["int", "int", "int"]
        kinds[comp] = "pt"
    return tuple(kinds)


def _axis_rule(spec: GridSpec, axis: int, kind: str, grid: str, n_quad: int):
    """Evaluation coordinates and (for integrals) fold-back weights along
    one axis.  Returns (coords, weights or None)."""
    M = spec.cells[axis]
    h = spec.spacings[axis]
    if kind == "pt":
        return spec.nodes(axis, grid), None
    gp, gw = np.polynomial.legendre.leggauss(n_quad)
    # cell [a, a+h]: primal cells start at x_i, dual cells at x_{i-1/2}
    start = 0.0 if grid == PRIMAL else -0.5 * h
    centers = np.arange(M) * h + start + 0.5 * h
    coords = (centers[:, None] + 0.5 * h * gp[None, :]).ravel()
    weights = np.broadcast_to(0.5 * h * gw, (M, n_quad))
    return coords, weights


def _reduce_scalar(f, spec, kinds, grid, n_quad, chunk=16):
    """Tensor-product reduction of one scalar component."""
    rules = [_axis_rule(spec, a, kinds[a], grid, n_quad) for a in range(3)]
    cx, wx = rules[0]
    cy, wy = rules[1]
    cz, wz = rules[2]
    M1, M2, M3 = spec.cells
    out = np.empty(spec.cells)
    nqx = len(cx) // M1
    # chunk along x to bound the size of the evaluation tensor
    for i0 in range(0, M1, chunk):
        i1 = min(i0 + chunk, M1)
        vals = f(
            cx[i0 * nqx : i1 * nqx, None, None],
            cy[None, :, None],
            cz[None, None, :],
        )
        vals = np.asarray(vals, dtype=float)
        vals = np.broadcast_to(
            vals, (len(cx[i0 * nqx : i1 * nqx]), len(cy), len(cz))
        )
        if wz is not None:
            vals = vals.reshape(vals.shape[0], vals.shape[1], M3, -1) @ wz[0]
        if wy is not None:
            vals = np.einsum("xyqz,yq->xyz", vals.reshape(vals.shape[0], M2, -1, M3), wy)
        if wx is not None:
            vals = np.einsum("xqyz,xq->xyz", vals.reshape(i1 - i0, -1, M2, M3), wx[i0:i1])
        out[i0:i1] = vals
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("field evaluation produced non-finite values")
    return out


def reduce_field(degree: int, grid: str, f, spec: GridSpec,
                 cfg: ReductionConfig | None = None) -> DofField:
    """Reduce a continuous field to geometric DoFs.

    ``f`` is a vectorized callable f(x, y, z); for degrees 1 and 2 it must
    return a length-3 sequence of component arrays (or a component callable
    can be passed as a 3-tuple of scalar callables).
    """
    cfg = cfg or ReductionConfig()
    if degree in (0, 3):
        data = _reduce_scalar(f, spec, _axis_kinds(degree, None), grid, cfg.n_quad)
        return DofField(degree, grid, data)
    if isinstance(f, (tuple, list)):
        comps = f
    else:
        comps = [lambda x, y, z, c=c: np.asarray(f(x, y, z)[c]) for c in range(3)]
    if len(comps) != 3:
        raise ValueError(f"degree-{degree} reduction needs a 3-component field")
    data = np.stack([
        _reduce_scalar(comps[c], spec, _axis_kinds(degree, c), grid, cfg.n_quad)
        for c in range(3)
    ])
    return DofField(degree, grid, data)
