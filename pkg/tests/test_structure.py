import numpy as np
import pytest

from mimetic_pic.coupling import deposit_ref, gather_ref
from mimetic_pic.derham import apply_curl, apply_curl_dual
from mimetic_pic.grid import DUAL, PRIMAL, DofField, build_grid, zeros_field
from mimetic_pic.hodge import apply_hodge, assemble_hodge
from mimetic_pic.particles import ParticleBatch
from mimetic_pic.structure import (
    assemble_structure, hamiltonian_gradient, jacobi_residuals, pack_state,
    unpack_state,
)

SPEC = build_grid((1.0, 1.0, 1.0), (4, 4, 4))


def _setup(rng, count=2, degree=1, solenoidal=True):
    pos = rng.uniform(0.0, 1.0, size=(count, 3))
    vel = rng.normal(scale=0.3, size=(count, 3))
    w = rng.uniform(0.5, 1.5, size=count)
    batch = ParticleBatch("e", -1.0, 1.0, pos, vel, w, degree)
    D = zeros_field(SPEC, 2, DUAL)
    D.data[:] = rng.normal(scale=0.1, size=D.data.shape)
    if solenoidal:
        # B in the range of the curl, so its discrete divergence vanishes
        A = zeros_field(SPEC, 1, PRIMAL)
        A.data[:] = rng.normal(scale=0.1, size=A.data.shape)
        B = apply_curl(A)
    else:
        B = zeros_field(SPEC, 2, PRIMAL)
        B.data[:] = rng.normal(scale=0.1, size=B.data.shape)
    return batch, D, B


def test_pack_unpack_round_trip(rng):
    batch, D, B = _setup(rng)
    u = pack_state(batch, D, B)
    assert len(u) == 6 * batch.count + 6 * SPEC.n_scalar
    pos, vel, Dd, Bd = unpack_state(u, SPEC, batch, D, B)
    assert np.array_equal(pos, batch.positions)
    assert np.array_equal(vel, batch.velocities)
    assert np.array_equal(Dd, D.data)
    assert np.array_equal(Bd, B.data)


def test_structure_antisymmetric(rng):
    batch, D, B = _setup(rng)
    J = assemble_structure(SPEC, batch, D.data, B.data)
    assert np.abs(J + J.T).max() == 0.0


def test_structure_is_state_dependent(rng):
    batch, D, B = _setup(rng)
    J0 = assemble_structure(SPEC, batch, D.data, B.data)
    batch.positions[0, 0] += 0.01
    J1 = assemble_structure(SPEC, batch, D.data, B.data)
    assert np.abs(J1 - J0).max() > 0.0
    B.data *= 2.0
    J2 = assemble_structure(SPEC, batch, D.data, B.data)
    assert np.abs(J2 - J1).max() > 0.0


def test_structure_drives_equations_of_motion(rng):
    # u' = J(u) grad H reproduces the analytic right-hand sides:
    # X' = V, V' = (q/m)(E + V x B) at the markers, D' = curl H - J_dep,
    # B' = -curl E
    batch, D, B = _setup(rng, count=3)
    hodge_d = assemble_hodge("H2_dual", 2, SPEC)
    hodge_b = assemble_hodge("H2", 2, SPEC)
    J = assemble_structure(SPEC, batch, D.data, B.data)
    du = J @ hamiltonian_gradient(SPEC, batch, D, B, hodge_d, hodge_b)

    Np = batch.count
    N = SPEC.n_scalar
    dX = du[:3 * Np].reshape(-1, 3)
    dV = du[3 * Np:6 * Np].reshape(-1, 3)
    dD = du[6 * Np:6 * Np + 3 * N]
    dB = du[6 * Np + 3 * N:]

    assert np.allclose(dX, batch.velocities, atol=1e-12)

    E = apply_hodge(hodge_d, D)
    p = batch.spline_degree
    e_at = gather_ref(2, E, batch.positions, p, SPEC)
    b_at = gather_ref(1, B, batch.positions, p, SPEC)
    vxb = np.cross(batch.velocities, b_at)
    assert np.allclose(dV, -(e_at + vxb), atol=1e-12)  # q/m = -1

    H = apply_hodge(hodge_b, B)
    curlH = apply_curl_dual(H)
    cur = deposit_ref(2, SPEC, batch.positions,
                      batch.charge * batch.weights[:, None] * batch.velocities,
                      p)
    expect_dD = DofField(2, DUAL, curlH.data - cur).flat()
    assert np.allclose(dD, expect_dD, atol=1e-12)

    curlE = apply_curl(E)
    assert np.allclose(dB, -DofField(2, PRIMAL, curlE.data).flat(), atol=1e-12)


def test_jacobi_identity_random_triples(rng):
    batch, D, B = _setup(rng)
    res = jacobi_residuals(SPEC, batch, D, B, n_triples=50, seed=5)
    assert np.abs(res).max() < 1e-6


def test_jacobi_identity_targeted_triples(rng):
    # velocity/velocity/field triples exercise the cancellation between the
    # derivative of the magnetic rotation block and the kernel weights
    batch, D, B = _setup(rng)
    Np = batch.count
    N = SPEC.n_scalar
    oV = 3 * Np
    oD = 6 * Np
    oB = 6 * Np + 3 * N
    triples = [
        (oV + 0, oV + 1, oV + 2),          # V x, y, z of particle 0
        (oV + 3, oV + 4, oV + 5),          # V of particle 1
        (0, oV + 0, oD + 7),               # X, V, D
        (1, oV + 2, oB + 11),              # X, V, B
        (oV + 0, oV + 1, oB + 5),          # V, V, B
        (oV + 1, oD + 3, oB + 3),          # V, D, B
    ]
    res = jacobi_residuals(SPEC, batch, D, B, triples=np.array(triples))
    assert np.abs(res).max() < 1e-6


def test_jacobi_fails_off_the_divergence_constraint(rng):
    # the bracket satisfies the Jacobi identity only where div B = 0: for a
    # velocity/velocity/velocity triple of one marker the cyclic sum equals
    # (up to constants) the smoothed divergence of B at the marker, so a
    # non-solenoidal B must be detected by a nonzero residual
    batch, D, B = _setup(rng, solenoidal=False)
    triples = np.array([(6, 7, 8), (9, 10, 11)])  # V blocks of both markers
    res = jacobi_residuals(SPEC, batch, D, B, triples=triples)
    assert np.abs(res).max() > 1e-3


def test_dense_size_guard(rng):
    big = ParticleBatch("e", -1.0, 1.0, np.zeros((4000, 3)),
                        np.zeros((4000, 3)), np.ones(4000))
    D = zeros_field(SPEC, 2, DUAL)
    B = zeros_field(SPEC, 2, PRIMAL)
    with pytest.raises(ValueError):
        assemble_structure(SPEC, big, D.data, B.data)
