"""
Tests for the annealing schedule and the closed / open-system integrators.
"""

import math

import numpy as np
import pytest

from anneal_certify.models.anneal import AnnealConfig, AnnealConfigError
from anneal_certify.models.pauli import PauliHamiltonian
from anneal_certify.models.state import StateVector
from anneal_certify.services.dynamics_service import (
    OPEN_MAX_PHASE_PER_STEP,
    AnnealingEngine,
    default_driver,
    default_steps,
    evolve_closed,
    evolve_open,
    plus_state,
    schedule_hamiltonian,
)
from anneal_certify.services.measure_service import expectation
from anneal_certify.services.pauli_service import to_matrix
from anneal_certify.services.spectrum_service import decompose, diagonalize, first_gap
from anneal_certify.utils.error_handlers import DimensionError, IntegrationError, UsageError


@pytest.fixture(scope='module')
def h2_engine(h2, h2_driver):
    return AnnealingEngine(h2, h2_driver)


def test_schedule_endpoints_and_midpoint(h2, h2_driver):
    hp = to_matrix(h2)
    hd = to_matrix(h2_driver)
    np.testing.assert_allclose(schedule_hamiltonian(h2, h2_driver, 0.0, 10.0), hd)
    np.testing.assert_allclose(schedule_hamiltonian(h2, h2_driver, 10.0, 10.0), hp)
    np.testing.assert_allclose(schedule_hamiltonian(h2, h2_driver, 5.0, 10.0), 0.5 * (hp + hd))


def test_schedule_rejects_time_outside_range(h2, h2_driver):
    with pytest.raises(UsageError):
        schedule_hamiltonian(h2, h2_driver, 10.5, 10.0)
    with pytest.raises(UsageError):
        schedule_hamiltonian(h2, h2_driver, -0.1, 10.0)


def test_schedule_rejects_mismatched_registers(h2):
    with pytest.raises(DimensionError):
        schedule_hamiltonian(h2, default_driver(3), 0.0, 1.0)


def test_default_driver_ground_state():
    driver = default_driver(1)
    assert len(driver) == 1 and driver.terms[0].coefficient == -1.0
    spectrum = diagonalize(to_matrix(default_driver(4)))
    assert spectrum.ground_energy == pytest.approx(-4.0)
    ground = StateVector(spectrum.eigenvector(0))
    assert ground.fidelity(plus_state(4)) > 1 - 1e-12


def test_plus_state():
    np.testing.assert_allclose(plus_state(1).amplitudes, [1 / math.sqrt(2)] * 2)
    np.testing.assert_allclose(plus_state(2).amplitudes, [0.5] * 4)
    assert expectation(plus_state(3), default_driver(3)) == pytest.approx(-3.0)


def test_anneal_config_validation():
    with pytest.raises(AnnealConfigError):
        AnnealConfig(0.0)
    with pytest.raises(AnnealConfigError):
        AnnealConfig(1.0, gamma=-0.1)
    with pytest.raises(AnnealConfigError):
        AnnealConfig(1.0, steps=9)
    with pytest.raises(AnnealConfigError):
        AnnealConfig(1.0, lindblad_axis='W')
    assert AnnealConfig(2.0, steps=100, lindblad_axis='y').lindblad_axis == 'Y'


def test_default_steps_rule(h2, h2_driver):
    """Test: max ||H(t)|| dt stays within the phase budget; the driver norm is 4"""
    steps = default_steps(h2, h2_driver, 2000.0)
    assert 2000.0 * 4.0 / 0.02 <= steps <= 2000.0 * 4.0 / 0.02 + 1
    assert default_steps(h2, h2_driver, 0.001) == 10


def test_constant_hamiltonian_keeps_plus_state():
    driver = default_driver(2)
    final = evolve_closed(driver, driver, AnnealConfig(5.0, steps=1000))
    assert final.fidelity(plus_state(2)) > 1 - 1e-10
    assert expectation(final, driver) == pytest.approx(-2.0, abs=1e-10)


def test_closed_rejects_dephasing(h2_engine):
    with pytest.raises(UsageError):
        h2_engine.evolve_closed(AnnealConfig(1.0, gamma=0.01, steps=100))


def test_closed_norm_drift_is_an_error(h2_engine):
    with pytest.raises(IntegrationError):
        h2_engine.evolve_closed(AnnealConfig(100.0, steps=10))


def test_closed_evolution_is_unitary(h2_engine):
    rng = np.random.default_rng(2)
    a = StateVector.normalized(rng.normal(size=16) + 1j * rng.normal(size=16))
    b = StateVector.normalized(rng.normal(size=16) + 1j * rng.normal(size=16))
    cfg = AnnealConfig(10.0, steps=2000)
    overlap = a.overlap(b)
    assert h2_engine.evolve_closed(cfg, a).overlap(h2_engine.evolve_closed(cfg, b)) == pytest.approx(overlap, abs=1e-8)


def test_rk4_order(h2_engine):
    """Test: halving the step cuts the error against a fine reference by about 16x"""
    reference = h2_engine.evolve_closed(AnnealConfig(10.0, steps=25600)).amplitudes
    coarse = h2_engine.evolve_closed(AnnealConfig(10.0, steps=800)).amplitudes
    fine = h2_engine.evolve_closed(AnnealConfig(10.0, steps=1600)).amplitudes
    ratio = np.linalg.norm(coarse - reference) / np.linalg.norm(fine - reference)
    assert 12.0 <= ratio <= 20.0


def test_self_convergence_of_energy(h2, h2_engine):
    half = expectation(h2_engine.evolve_closed(AnnealConfig(10.0, steps=4000)), h2)
    double = expectation(h2_engine.evolve_closed(AnnealConfig(10.0, steps=8000)), h2)
    assert abs(half - double) < 1e-7


def test_open_matches_closed_without_dephasing(h2_engine):
    """Test: gamma = 0 Lindblad evolution reproduces |psi><psi|"""
    cfg = AnnealConfig(10.0, gamma=0.0, steps=8000)
    psi = h2_engine.evolve_closed(cfg)
    rho = h2_engine.evolve_open(cfg)
    assert np.max(np.abs(rho.entries - np.outer(psi.amplitudes, psi.amplitudes.conj()))) <= 1e-6


@pytest.mark.parametrize('annealing_time', [1.0, 10.0, 30.0])
def test_pure_dephasing_decay(annealing_time):
    """Test: with H = 0 the |+> coherence decays as exp(-2 gamma t)"""
    gamma = 0.1
    zero = PauliHamiltonian.from_terms([], 1)
    rho = evolve_open(zero, zero, AnnealConfig(annealing_time, gamma=gamma, steps=2000))
    expected = 0.5 * math.exp(-2.0 * gamma * annealing_time)
    assert rho.entries[0, 1].real == pytest.approx(expected, rel=1e-6)
    assert rho.entries[0, 0].real == pytest.approx(0.5, abs=1e-12)
    assert rho.entries[1, 1].real == pytest.approx(0.5, abs=1e-12)


def test_lindblad_axis_variants():
    zero = PauliHamiltonian.from_terms([], 1)
    x_rho = evolve_open(zero, zero, AnnealConfig(5.0, gamma=0.2, steps=500, lindblad_axis='X'))
    np.testing.assert_allclose(x_rho.entries, 0.5 * np.ones((2, 2)), atol=1e-12)
    y_rho = evolve_open(zero, zero, AnnealConfig(5.0, gamma=0.2, steps=500, lindblad_axis='Y'))
    assert y_rho.entries[0, 1].real == pytest.approx(0.5 * math.exp(-2.0), rel=1e-6)


def test_open_state_invariants(h2_engine):
    rho = h2_engine.evolve_open(AnnealConfig(20.0, gamma=0.01, steps=h2_engine.default_steps(20.0)))
    entries = rho.entries
    assert abs(np.trace(entries).real - 1.0) <= 1e-8
    assert np.max(np.abs(entries - entries.conj().T)) <= 1e-10
    assert rho.min_eigenvalue() >= -1e-6


def test_dephasing_raises_energy(h2, h2_engine):
    cfg = AnnealConfig(50.0, steps=h2_engine.default_steps(50.0))
    closed = expectation(h2_engine.evolve_open(cfg), h2)
    noisy = expectation(h2_engine.evolve_open(cfg.with_gamma(0.05)), h2)
    assert noisy > closed


def test_adiabatic_limit_on_field_pair(field_pair):
    """Test: a 100 ns closed anneal across a sqrt(2) gap ends in the ground state"""
    engine = AnnealingEngine(field_pair, default_driver(2))
    spectrum = diagonalize(to_matrix(field_pair))
    psi = engine.evolve_closed(AnnealConfig(100.0, steps=engine.default_steps(100.0)))
    e0, e1 = first_gap(spectrum)
    assert e0 == pytest.approx(-2.0)
    assert e1 == pytest.approx(0.0, abs=1e-12)
    assert decompose(psi, spectrum).epsilon_squared < 0.01
    assert expectation(psi, field_pair) - e0 < 1e-3 * abs(e0)


@pytest.mark.slow
def test_h2_anneal_at_2000ns_is_diabatic(h2, h2_engine, h2_spectrum):
    """Test: the 3.15e-3 GHz avoided crossing near s = 0.9 sends a 2000 ns anneal to E1"""
    psi = h2_engine.evolve_closed(AnnealConfig(2000.0, steps=h2_engine.default_steps(2000.0)))
    decomposition = decompose(psi, h2_spectrum)
    _, e1 = first_gap(h2_spectrum)
    assert decomposition.epsilon_squared > 0.9
    assert decomposition.populations[1] > 0.5
    assert abs(expectation(psi, h2) - e1) < 0.01


@pytest.mark.slow
def test_h2_anneal_at_20000ns_stays_mostly_excited(h2_engine, h2_spectrum):
    psi = h2_engine.evolve_closed(AnnealConfig(20000.0, steps=h2_engine.default_steps(20000.0)))
    assert 0.5 < decompose(psi, h2_spectrum).epsilon_squared < 0.9


def test_open_default_steps_use_coarser_rule(h2, h2_driver, h2_engine):
    closed = default_steps(h2, h2_driver, 2000.0)
    opened = h2_engine.default_steps(2000.0, OPEN_MAX_PHASE_PER_STEP)
    assert OPEN_MAX_PHASE_PER_STEP == 0.05
    assert 2000.0 * 4.0 / 0.05 <= opened <= 2000.0 * 4.0 / 0.05 + 1
    assert opened < closed
