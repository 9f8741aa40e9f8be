"""
Spectrum service for anneal-certify.
Exact diagonalization of small Hermitian matrices, eigenbasis populations
and synthetic classical pre-estimates.
"""

import logging
from typing import Tuple, Union

import numpy as np

from anneal_certify.models.spectrum import PopulationDecomposition, PreEstimate, Spectrum
from anneal_certify.models.state import DensityMatrix, StateVector
from anneal_certify.utils.error_handlers import (
    DiagonalizationError,
    DimensionError,
    PositivityError,
)

logger = logging.getLogger(__name__)

DEFAULT_DEGENERACY_TOL = 1e-9
HERMITIAN_TOL = 1e-10
RESIDUAL_TOL = 1e-9
POSITIVITY_TOL = 1e-6

# Residual norm below which a projected basis vector is skipped
_GRAM_SCHMIDT_CUTOFF = 1e-6

OFFSET_CENTERED = 'centered'
OFFSET_WORST_CASE = 'worst_case_shift'
OFFSET_MODES = (OFFSET_CENTERED, OFFSET_WORST_CASE)


def diagonalize(matrix: np.ndarray, degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> Spectrum:
    """
    Full eigen-decomposition of a Hermitian matrix.

    LAPACK's Hermitian tridiagonal QR driver (numpy ``eigh``) does the work
    with its built-in iteration cap (30 sweeps per eigenvalue); failure to
    converge surfaces as DiagonalizationError. Eigenvectors are then made
    canonical: within each cluster of eigenvalues closer than
    ``degeneracy_tol`` the basis is rebuilt by Gram-Schmidt on the projected
    computational basis vectors taken in index order, so the output depends
    only on the input matrix.

    Args:
        matrix (np.ndarray): Square Hermitian matrix
        degeneracy_tol (float): Cluster width for degenerate eigenvalues

    Returns:
        Spectrum: Ascending eigenvalues with canonical eigenvectors

    Raises:
        DiagonalizationError: Non-Hermitian input or no convergence
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f'Expected a square matrix, got shape {matrix.shape}')

    scale = max(1.0, float(np.max(np.abs(matrix))) if matrix.size else 1.0)
    asymmetry = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if asymmetry > HERMITIAN_TOL * scale:
        raise DiagonalizationError(f'Matrix is not Hermitian (max deviation {asymmetry:.3e})')

    hermitian = 0.5 * (matrix + matrix.conj().T)
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(hermitian)
    except np.linalg.LinAlgError as e:
        raise DiagonalizationError(f'Eigensolver did not converge: {e}')

    eigenvectors = _canonical_eigenvectors(eigenvalues, eigenvectors, degeneracy_tol)

    residuals = np.linalg.norm(hermitian @ eigenvectors - eigenvectors * eigenvalues, axis=0)
    worst = float(np.max(residuals)) if residuals.size else 0.0
    if worst > RESIDUAL_TOL * scale:
        raise DiagonalizationError(f'Eigenpair residual {worst:.3e} above tolerance')

    return Spectrum(eigenvalues, eigenvectors)


def _canonical_eigenvectors(eigenvalues, eigenvectors, degeneracy_tol):
    dimension = eigenvalues.shape[0]
    canonical = np.empty_like(eigenvectors)
    start = 0
    while start < dimension:
        stop = start + 1
        while stop < dimension and eigenvalues[stop] - eigenvalues[stop - 1] <= degeneracy_tol:
            stop += 1
        block = eigenvectors[:, start:stop]
        canonical[:, start:stop] = _gram_schmidt_in_index_order(block)
        start = stop
    return canonical


def _gram_schmidt_in_index_order(block):
    """Orthonormal basis of span(block) built from projected e_0, e_1, ..."""
    dimension, size = block.shape
    accepted = []
    for index in range(dimension):
        # projection of e_index onto the block subspace
        vector = block @ block[index, :].conj()
        for basis_vector in accepted:
            vector = vector - basis_vector * np.vdot(basis_vector, vector)
        norm = np.linalg.norm(vector)
        if norm > _GRAM_SCHMIDT_CUTOFF:
            accepted.append(vector / norm)
            if len(accepted) == size:
                break
    if len(accepted) < size:
        raise DiagonalizationError('Could not build a canonical basis for a degenerate eigenspace')
    return np.column_stack(accepted)


def first_gap(spectrum: Spectrum, degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> Tuple[float, float]:
    """
    Lowest eigenvalue and the first eigenvalue above it by more than
    ``degeneracy_tol``.

    Raises:
        DiagonalizationError: Fewer than two eigenvalues or a spectrum that is
            fully degenerate within tolerance.
    """
    eigenvalues = spectrum.eigenvalues
    if eigenvalues.shape[0] < 2:
        raise DiagonalizationError('first_gap needs at least two eigenvalues')
    e0 = float(eigenvalues[0])
    above = eigenvalues[eigenvalues > e0 + degeneracy_tol]
    if above.size == 0:
        raise DiagonalizationError('Spectrum is fully degenerate within tolerance')
    return e0, float(above[0])


def decompose(
    state: Union[StateVector, DensityMatrix],
    spectrum: Spectrum,
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
) -> PopulationDecomposition:
    """
    Populations of ``state`` on each eigenvector; eps^2 is the population
    outside the (near-)degenerate ground space.

    Raises:
        DimensionError: State and spectrum sizes differ
        PositivityError: A mixed-state population below -POSITIVITY_TOL
    """
    if state.dimension != spectrum.dimension:
        raise DimensionError(
            f'State dimension {state.dimension} does not match spectrum dimension {spectrum.dimension}'
        )

    vectors = spectrum.eigenvectors
    if isinstance(state, StateVector):
        populations = np.abs(vectors.conj().T @ state.amplitudes) ** 2
    else:
        populations = np.real(np.einsum('im,ij,jm->m', vectors.conj(), state.entries, vectors))
        lowest = float(populations.min())
        if lowest < -POSITIVITY_TOL:
            raise PositivityError(f'Eigenbasis population {lowest:.3e} below -{POSITIVITY_TOL}')
        populations = np.clip(populations, 0.0, None)

    populations = populations / populations.sum()
    ground_size = spectrum.ground_space_size(degeneracy_tol)
    epsilon_squared = float(populations[ground_size:].sum())
    decomposition = PopulationDecomposition(populations, epsilon_squared, ground_size)
    logger.debug('Eigenbasis populations', extra=decomposition.to_dict())
    return decomposition


def synthesize_preestimate(
    spectrum: Spectrum,
    m0: float,
    m1: float,
    offset_mode: str = OFFSET_CENTERED,
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
) -> PreEstimate:
    """
    Stand-in for a classical pre-estimation of E0 and E1.

    ``centered`` places the estimates on the true energies;
    ``worst_case_shift`` moves them to E0 + m0 and E1 - m1, the adversarial
    placement still allowed by the error bounds.
    """
    if offset_mode not in OFFSET_MODES:
        raise ValueError(f'Invalid offset_mode. Must be one of {OFFSET_MODES}')
    e0, e1 = first_gap(spectrum, degeneracy_tol)
    if offset_mode == OFFSET_WORST_CASE:
        pre = PreEstimate(e0 + m0, e1 - m1, m0, m1)
    else:
        pre = PreEstimate(e0, e1, m0, m1)
    logger.debug('Synthesized pre-estimate', extra=dict(pre.to_dict(), offset_mode=offset_mode))
    return pre
