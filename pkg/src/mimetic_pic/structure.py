"""Dense assembly of the antisymmetric structure matrix of the semi-discrete
system, for verification on small problems.

State layout (length 6 Np + 6 N, N grid cells):

    [ X (Np x 3, particle-major) | V (Np x 3) | D (3 blocks, x-fastest)
      | B (3 blocks, x-fastest) ]

The matrix J(u) drives du/dt = J(u) grad H(u) with
H = sum_p w_p m |V_p|^2 / 2 + (D . Hd D) / 2 + (B . Hb B) / 2.  Its only
state dependence is through the marker kernel weights (via X) and the
magnetic rotation term (via X and B), which is what the Jacobi identity
test differentiates.
"""

from __future__ import annotations

import numpy as np

from .derham import apply_curl_dual
from .grid import DUAL, DofField, GridSpec
from .hodge import apply_hodge
from .particles import ParticleBatch
from . import coupling

_DENSE_LIMIT = 20000


def _check_size(spec: GridSpec, batch: ParticleBatch) -> None:
    n = 6 * batch.count + 6 * spec.n_scalar
    if n > _DENSE_LIMIT:
        raise ValueError(
            f"dense structure assembly limited to {_DENSE_LIMIT} unknowns, "
            f"requested {n}"
        )


def pack_state(batch: ParticleBatch, D: DofField, B: DofField) -> np.ndarray:
    return np.concatenate([
        batch.positions.ravel(), batch.velocities.ravel(),
        D.flat(), B.flat(),
    ])


def unpack_state(u: np.ndarray, spec: GridSpec, batch: ParticleBatch,
                 D: DofField, B: DofField):
    """Split a packed state vector into copies of the four blocks."""
    np3 = 3 * batch.count
    N = spec.n_scalar
    pos = u[:np3].reshape(-1, 3).copy()
    vel = u[np3:2 * np3].reshape(-1, 3).copy()

    def fields(vec):
        return np.stack([
            vec[c * N:(c + 1) * N].reshape(spec.cells, order="F")
            for c in range(3)
        ])

    Dd = fields(u[2 * np3:2 * np3 + 3 * N])
    Bd = fields(u[2 * np3 + 3 * N:])
    return pos, vel, Dd, Bd


def _flux_weight_rows(spec: GridSpec, pos: np.ndarray, p: int) -> np.ndarray:
    """Rows (particle, component) of the flux-type kernel weights against
    the dual face DoFs; shape (Np, 3, 3N)."""
    N = spec.n_scalar
    out = np.zeros((len(pos), 3, 3 * N))
    for pp, x in enumerate(pos):
        for c in range(3):
            out[pp, c, c * N:(c + 1) * N] = coupling.kernel_dofs_ref(
                2, c, spec, x, p).ravel(order="F")
    return out


def _rotation_blocks(spec: GridSpec, pos: np.ndarray, Bd: np.ndarray,
                     p: int) -> np.ndarray:
    """Per-particle 3x3 matrices r(b(X_p)) with r(b) v = v x b."""
    Bf = DofField(2, "primal", Bd)
    b = coupling.gather_ref(1, Bf, pos, p, spec)
    out = np.zeros((len(pos), 3, 3))
    for pp, (b1, b2, b3) in enumerate(b):
        out[pp] = [[0.0, b3, -b2], [-b3, 0.0, b1], [b2, -b1, 0.0]]
    return out


def _curl_dual_matrix(spec: GridSpec) -> np.ndarray:
    """Dense dual curl on the stacked x-fastest layout."""
    N = spec.n_scalar
    C = np.zeros((3 * N, 3 * N))
    basis = DofField(1, DUAL, np.zeros((3, *spec.cells)))
    for col in range(3 * N):
        basis.data[:] = 0.0
        c, rest = divmod(col, N)
        i = rest % spec.cells[0]
        j = (rest // spec.cells[0]) % spec.cells[1]
        k = rest // (spec.cells[0] * spec.cells[1])
        basis.data[c, i, j, k] = 1.0
        C[:, col] = apply_curl_dual(basis).flat()
    return C


def assemble_structure(spec: GridSpec, batch: ParticleBatch,
                       Dd: np.ndarray, Bd: np.ndarray) -> np.ndarray:
    """Dense antisymmetric structure matrix J(u)."""
    _check_size(spec, batch)
    Np = batch.count
    N = spec.n_scalar
    np3 = 3 * Np
    n = 2 * np3 + 6 * N
    oX, oV, oD, oB = 0, np3, 2 * np3, 2 * np3 + 3 * N
    J = np.zeros((n, n))
    q, m, w = batch.charge, batch.mass, batch.weights
    p = batch.spline_degree

    inv_wm = 1.0 / (w * m)
    for pp in range(Np):
        for c in range(3):
            i = 3 * pp + c
            J[oX + i, oV + i] = inv_wm[pp]
            J[oV + i, oX + i] = -inv_wm[pp]

    rot = _rotation_blocks(spec, batch.positions, Bd, p)
    for pp in range(Np):
        blk = (q / (m * m * w[pp])) * rot[pp]
        J[oV + 3 * pp:oV + 3 * pp + 3, oV + 3 * pp:oV + 3 * pp + 3] = blk

    S = _flux_weight_rows(spec, batch.positions, p)  # (Np, 3, 3N)
    for pp in range(Np):
        J[oV + 3 * pp:oV + 3 * pp + 3, oD:oD + 3 * N] = (q / m) * S[pp]
        J[oD:oD + 3 * N, oV + 3 * pp:oV + 3 * pp + 3] = -(q / m) * S[pp].T

    C = _curl_dual_matrix(spec)
    # field block: dD/dt = C^T (dH/dB), dB/dt = -C (dH/dD); the dual curl
    # matrix equals the transpose of the primal one
    J[oD:oD + 3 * N, oB:oB + 3 * N] = C
    J[oB:oB + 3 * N, oD:oD + 3 * N] = -C.T
    return J


def hamiltonian_gradient(spec: GridSpec, batch: ParticleBatch,
                         D: DofField, B: DofField,
                         hodge_d, hodge_b) -> np.ndarray:
    """Gradient of H in the packed state layout."""
    gx = np.zeros(3 * batch.count)
    gv = (batch.weights[:, None] * batch.mass * batch.velocities).ravel()
    gd = apply_hodge(hodge_d, D).flat()
    gb = apply_hodge(hodge_b, B).flat()
    return np.concatenate([gx, gv, gd, gb])


def jacobi_residuals(spec: GridSpec, batch: ParticleBatch,
                     D: DofField, B: DofField, n_triples: int = 500,
                     step: float = 1e-6, seed: int = 0,
                     triples: np.ndarray | None = None) -> np.ndarray:
    """Cyclic-sum residuals of the Jacobi identity at random index triples.

    For each triple (i, j, k) the residual is
    sum_l [ J_il d_l J_jk + J_jl d_l J_ki + J_kl d_l J_ij ]
    with the derivatives taken by central differences over the coordinates
    the matrix actually depends on (marker positions and B).
    """
    _check_size(spec, batch)
    rng = np.random.default_rng(seed)
    Np = batch.count
    N = spec.n_scalar
    n = 6 * Np + 6 * N
    oB = 6 * Np + 3 * N
    u0 = pack_state(batch, D, B)
    if triples is None:
        triples = rng.integers(0, n, size=(n_triples, 3))
    else:
        triples = np.asarray(triples, dtype=int)
        n_triples = len(triples)

    pairs = []
    pair_idx = {}
    for (i, j, k) in triples:
        for (a, b) in ((j, k), (k, i), (i, j)):
            if (a, b) not in pair_idx:
                pair_idx[(a, b)] = len(pairs)
                pairs.append((a, b))
    rows = np.array([a for a, _ in pairs])
    cols = np.array([b for _, b in pairs])

    # coordinates J depends on: X block and B block
    dep = np.concatenate([np.arange(3 * Np), np.arange(oB, n)])

    def J_of(u):
        pos, vel, Dd, Bd = unpack_state(u, spec, batch, D, B)
        b2 = ParticleBatch(batch.species, batch.charge, batch.mass,
                           pos, vel, batch.weights, batch.spline_degree)
        return assemble_structure(spec, b2, Dd, Bd)

    J0 = J_of(u0)
    deriv = np.zeros((len(dep), len(pairs)))
    for li, l in enumerate(dep):
        up = u0.copy(); up[l] += step
        um = u0.copy(); um[l] -= step
        deriv[li] = (J_of(up)[rows, cols] - J_of(um)[rows, cols]) / (2 * step)

    res = np.zeros(n_triples)
    Jdep = J0[:, dep]
    for t, (i, j, k) in enumerate(triples):
        res[t] = (
            Jdep[i] @ deriv[:, pair_idx[(j, k)]]
            + Jdep[j] @ deriv[:, pair_idx[(k, i)]]
            + Jdep[k] @ deriv[:, pair_idx[(i, j)]]
        )
    return res
