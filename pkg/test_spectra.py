"""
Tests for exact diagonalization, population decompositions and synthetic
pre-estimates.
"""

import numpy as np
import pytest

from anneal_certify.models.spectrum import PreEstimate, Spectrum, SpectrumValidationError
from anneal_certify.models.state import DensityMatrix, StateVector
from anneal_certify.services.measure_service import expectation
from anneal_certify.services.pauli_service import to_matrix
from anneal_certify.services.spectrum_service import (
    OFFSET_CENTERED,
    OFFSET_WORST_CASE,
    decompose,
    diagonalize,
    first_gap,
    synthesize_preestimate,
)
from anneal_certify.utils.error_handlers import DiagonalizationError, DimensionError
from conftest import jacobi_eigenvalues


def spectrum_from(eigenvalues):
    return Spectrum(np.array(eigenvalues), np.eye(len(eigenvalues), dtype=complex))


def test_diagonal_matrix():
    spectrum = diagonalize(np.diag([1.0, -1.0]))
    np.testing.assert_allclose(spectrum.eigenvalues, [-1.0, 1.0])
    np.testing.assert_allclose(np.abs(spectrum.eigenvector(0)), [0.0, 1.0])


def test_sigma_x_eigenvectors():
    spectrum = diagonalize(np.array([[0, 1], [1, 0]], dtype=complex))
    np.testing.assert_allclose(spectrum.eigenvalues, [-1.0, 1.0], atol=1e-15)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert abs(np.vdot(minus, spectrum.eigenvector(0))) == pytest.approx(1.0)


def test_h2_ground_energy_matches_golden_and_jacobi(h2, h2_spectrum, golden):
    """Test: LAPACK result agrees with the recorded golden and an independent Jacobi solver"""
    reference = jacobi_eigenvalues(to_matrix(h2))
    np.testing.assert_allclose(reference, golden['eigenvalues'], atol=1e-10)
    np.testing.assert_allclose(h2_spectrum.eigenvalues, golden['eigenvalues'], atol=1e-10)
    e0, e1 = first_gap(h2_spectrum)
    assert e0 == pytest.approx(golden['e0'], abs=1e-10)
    assert e1 == pytest.approx(golden['e1'], abs=1e-10)


def test_h2_reconstruction_and_residuals(h2, h2_spectrum):
    matrix = to_matrix(h2)
    vectors = h2_spectrum.eigenvectors
    rebuilt = vectors @ np.diag(h2_spectrum.eigenvalues) @ vectors.conj().T
    np.testing.assert_allclose(rebuilt, matrix, atol=1e-9)
    residuals = np.linalg.norm(matrix @ vectors - vectors * h2_spectrum.eigenvalues, axis=0)
    assert residuals.max() <= 1e-9


def test_non_hermitian_rejected():
    with pytest.raises(DiagonalizationError):
        diagonalize(np.array([[0, 1], [0, 0]], dtype=complex))


def test_degenerate_basis_is_canonical():
    """Test: a degenerate eigenspace gets the Gram-Schmidt basis of e_0, e_1, ..."""
    matrix = np.kron(np.eye(2), np.diag([0.0, 2.0]))
    spectrum = diagonalize(matrix)
    assert spectrum.ground_space_size(1e-9) == 2
    np.testing.assert_allclose(spectrum.eigenvector(0), [1, 0, 0, 0], atol=1e-12)
    np.testing.assert_allclose(spectrum.eigenvector(1), [0, 0, 1, 0], atol=1e-12)

    u = np.array([1.0, 1.0, 0.0, 0.0]) / np.sqrt(2)
    e2 = np.array([0.0, 0.0, 1.0, 0.0])
    mixed = np.eye(4) - 2.0 * (np.outer(u, u) + np.outer(e2, e2))
    spectrum = diagonalize(mixed)
    np.testing.assert_allclose(spectrum.eigenvalues, [-1.0, -1.0, 1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(spectrum.eigenvector(0), u, atol=1e-12)
    np.testing.assert_allclose(spectrum.eigenvector(1), e2, atol=1e-12)


def test_spectrum_rejects_descending():
    with pytest.raises(SpectrumValidationError):
        spectrum_from([1.0, 0.0])


def test_first_gap_skips_degeneracy():
    assert first_gap(spectrum_from([-1.0, -1.0 + 1e-12, 0.5]), 1e-9) == (-1.0, 0.5)
    assert first_gap(spectrum_from([0.0, 1.0])) == (0.0, 1.0)


def test_first_gap_fully_degenerate():
    with pytest.raises(DiagonalizationError):
        first_gap(spectrum_from([0.0, 1e-12]), 1e-9)


def test_decompose_ground_state(h2_spectrum):
    ground = StateVector(h2_spectrum.eigenvector(0))
    decomposition = decompose(ground, h2_spectrum)
    assert decomposition.populations[0] == pytest.approx(1.0)
    assert decomposition.epsilon_squared == pytest.approx(0.0, abs=1e-12)


def test_decompose_maximally_mixed(h2_spectrum):
    decomposition = decompose(DensityMatrix.maximally_mixed(4), h2_spectrum)
    np.testing.assert_allclose(decomposition.populations, np.full(16, 1 / 16), atol=1e-12)
    assert decomposition.epsilon_squared == pytest.approx(15 / 16)


def test_decompose_degenerate_ground_space():
    spectrum = spectrum_from([-1.0, -1.0, 0.0, 1.0])
    state = StateVector.normalized([1.0, 1.0, 0.0, 0.0])
    decomposition = decompose(state, spectrum)
    assert decomposition.ground_space_size == 2
    assert decomposition.epsilon_squared == pytest.approx(0.0, abs=1e-15)


def test_decompose_dimension_mismatch(h2_spectrum):
    with pytest.raises(DimensionError):
        decompose(StateVector.basis(0, 2), h2_spectrum)


def test_population_energy_matches_expectation(h2, h2_spectrum):
    """Test: sum p_m E_m equals <H> for pure and mixed states"""
    rng = np.random.default_rng(5)
    for _ in range(5):
        psi = StateVector.normalized(rng.normal(size=16) + 1j * rng.normal(size=16))
        decomposition = decompose(psi, h2_spectrum)
        assert decomposition.mean_energy(h2_spectrum.eigenvalues) == pytest.approx(expectation(psi, h2), abs=1e-8)

        weights = rng.dirichlet(np.ones(3))
        states = [StateVector.normalized(rng.normal(size=16) + 1j * rng.normal(size=16)) for _ in range(3)]
        rho = DensityMatrix.mixture(weights, states)
        decomposition = decompose(rho, h2_spectrum)
        assert decomposition.mean_energy(h2_spectrum.eigenvalues) == pytest.approx(expectation(rho, h2), abs=1e-8)


def test_synthesize_preestimate_modes():
    spectrum = spectrum_from([-1.0, 0.0, 2.0])
    assert synthesize_preestimate(spectrum, 0.1, 0.1, OFFSET_CENTERED) == PreEstimate(-1.0, 0.0, 0.1, 0.1)
    shifted = synthesize_preestimate(spectrum, 0.1, 0.1, OFFSET_WORST_CASE)
    assert shifted.e0_approx == pytest.approx(-0.9)
    assert shifted.e1_approx == pytest.approx(-0.1)
    with pytest.raises(ValueError):
        synthesize_preestimate(spectrum, 0.1, 0.1, 'sideways')


def test_preestimate_validation():
    with pytest.raises(SpectrumValidationError):
        PreEstimate(-1.0, 0.0, -0.1, 0.1)
    with pytest.raises(SpectrumValidationError):
        PreEstimate(1.0, -1.0, 0.1, 0.1)
    assert PreEstimate(-1.0, 0.0, 0.1, 0.3).halfwidth == pytest.approx(0.2)
