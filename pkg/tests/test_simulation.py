import numpy as np
import pytest

from mimetic_pic.derham import apply_div_dual
from mimetic_pic.grid import DUAL, PRIMAL, DofField, build_grid, zeros_field
from mimetic_pic.particles import SpeciesSpec, sample_particles
from mimetic_pic.simulation import SchemeConfig, Simulation, solve_poisson

SPEC = build_grid((2.0, 2.0, 2.0), (5, 5, 5))


def _batch(count=40, thermal=(0.2, 0.1, 0.15), drift=(0.0, 0.0, 0.0),
           degree=1, seed=3):
    return sample_particles(
        SpeciesSpec("e", -1.0, 1.0, count=count, thermal=thermal,
                    drift=drift, spline_degree=degree, sampling="random",
                    seed=seed), SPEC)


def _sim(dt=0.05, order=2, degree=1, count=40, b_seed=True):
    sim = Simulation(SPEC, SchemeConfig(dt, hodge_order=order),
                     [_batch(count=count, degree=degree)])
    b = None
    if b_seed:
        b = zeros_field(SPEC, 2, PRIMAL)
        h = SPEC.spacings
        x = SPEC.nodes(0, PRIMAL)
        k = 2.0 * np.pi / SPEC.lengths[0]
        prof = 1e-3 * (np.sin(k * (x + h[0])) - np.sin(k * x)) / k
        b.data[1] += prof[:, None, None] * h[2]
        b.data[2] += 0.3 * h[0] * h[1]
    sim.initialize_fields(b)
    return sim


# -- electrostatic initialization --------------------------------------------

def test_poisson_satisfies_gauss_exactly():
    sim = _sim(b_seed=False)
    rho = sim.charge_density()
    assert abs(rho.data.sum()) < 1e-12  # neutral with background
    r = apply_div_dual(sim.D).data - rho.data
    assert np.abs(r).max() < 1e-13 * np.abs(rho.data).max()


def test_poisson_rejects_non_neutral():
    sim = Simulation(SPEC, SchemeConfig(0.05, neutralize=False), [_batch()])
    rho = sim.charge_density()
    with pytest.raises(ValueError):
        solve_poisson(SPEC, rho, sim.hodge_d)
    with pytest.raises(ValueError):
        solve_poisson(SPEC, zeros_field(SPEC, 2, DUAL), sim.hodge_d)


def test_initial_b_validation():
    sim = Simulation(SPEC, SchemeConfig(0.05), [_batch()])
    bad = zeros_field(SPEC, 2, PRIMAL)
    bad.data[0, 2, 2, 2] = 1.0  # a single face flux has nonzero divergence
    with pytest.raises(ValueError):
        sim.initialize_fields(bad)
    with pytest.raises(ValueError):
        sim.initialize_fields(zeros_field(SPEC, 2, DUAL))


# -- conservation over steps -------------------------------------------------

@pytest.mark.parametrize("order,degree", [(2, 1), (4, 2)])
def test_constraints_preserved_over_steps(order, degree):
    sim = _sim(order=order, degree=degree)
    assert sim.gauss_residual() < 1e-12
    assert sim.max_div_b() < 1e-15
    sim.step(25)
    assert sim.gauss_residual() < 1e-11
    assert sim.max_div_b() < 1e-13
    assert sim.step_count == 25
    assert np.isclose(sim.time, 25 * 0.05)


def test_energy_drift_bounded():
    sim = _sim(dt=0.02)
    e0 = sim.total_energy()
    sim.step(50)
    assert abs(sim.total_energy() - e0) < 1e-4 * abs(e0)


def test_energies_keys_positive():
    sim = _sim()
    e = sim.energies()
    assert e["kinetic"] > 0 and e["electric"] > 0 and e["magnetic"] > 0
    assert np.isclose(sum(e["magnetic_components"]), e["magnetic"])
    assert np.isclose(sim.total_energy(),
                      e["kinetic"] + e["electric"] + e["magnetic"])


# -- exact reversibility -----------------------------------------------------

def test_time_reversal_involution():
    # negating all velocities and the magnetic fluxes conjugates the step
    # map to its inverse; the splitting is palindromic and every substep
    # flow is exact, so the round trip returns the state to round-off
    sim = _sim(dt=0.05)
    x0 = sim.batches[0].positions.copy()
    v0 = sim.batches[0].velocities.copy()
    d0 = sim.D.data.copy()
    b0 = sim.B.data.copy()
    sim.step(10)
    sim.batches[0].velocities *= -1.0
    sim.B.data *= -1.0
    sim.step(10)
    sim.batches[0].velocities *= -1.0
    sim.B.data *= -1.0
    assert np.allclose(sim.batches[0].positions, x0, atol=1e-10)
    assert np.allclose(sim.batches[0].velocities, v0, atol=1e-10)
    assert np.allclose(sim.D.data, d0, atol=1e-10)
    assert np.allclose(sim.B.data, b0, atol=1e-10)


def test_substep_displacement_guard():
    sim = Simulation(SPEC, SchemeConfig(100.0),
                     [_batch(thermal=(0.5, 0.5, 0.5))])
    sim.initialize_fields()
    with pytest.raises(FloatingPointError):
        sim.step()


# -- scheme validation -------------------------------------------------------

def test_scheme_config_validation():
    with pytest.raises(ValueError):
        SchemeConfig(0.0)
    with pytest.raises(ValueError):
        SchemeConfig(0.1, hodge_order=3)
    with pytest.raises(ValueError):
        SchemeConfig(0.1, hodge_variant="wide")
    with pytest.raises(ValueError):
        Simulation(SPEC, SchemeConfig(0.1, hodge_order=8), [_batch()])
