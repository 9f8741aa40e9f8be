"""
Measurement service for anneal-certify.
Energy expectation and variance of a state, either exactly or through a
term-by-term single-shot sampling model.
"""

import logging
import math
from typing import Union

import numpy as np

from anneal_certify.models.moments import EnergyMoments
from anneal_certify.models.pauli import PauliHamiltonian
from anneal_certify.models.state import DensityMatrix, StateVector
from anneal_certify.services.pauli_service import square_hamiltonian, term_action
from anneal_certify.utils.error_handlers import DimensionError, UsageError

logger = logging.getLogger(__name__)

# numpy bit generator behind sample_moments; documented as part of the determinism contract
RNG_ALGORITHM = 'PCG64'

State = Union[StateVector, DensityMatrix]


def _check_dimension(state: State, h: PauliHamiltonian):
    if state.dimension != h.dimension:
        raise DimensionError(
            f'State dimension {state.dimension} does not match Hamiltonian dimension {h.dimension}'
        )


def pauli_expectation(state: State, factors, num_qubits: int) -> float:
    """<P> for one Pauli string, from its basis action P|b> = phase_b |b ^ flip>."""
    _, targets, phase = term_action(factors, num_qubits)
    if isinstance(state, StateVector):
        psi = state.amplitudes
        value = np.vdot(psi[targets], phase * psi)
    else:
        value = np.sum(phase * state.entries[np.arange(targets.shape[0]), targets])
    return float(value.real)


def term_expectations(state: State, h: PauliHamiltonian) -> np.ndarray:
    """<P_j> for every term of ``h`` in term order."""
    _check_dimension(state, h)
    return np.array([pauli_expectation(state, term.factors, h.num_qubits) for term in h.terms])


def expectation(state: State, h: PauliHamiltonian) -> float:
    """
    <H> = sum_j c_j <P_j>, measured term by term.

    Raises:
        DimensionError: State and Hamiltonian sizes differ
    """
    if not h.terms:
        _check_dimension(state, h)
        return 0.0
    coefficients = np.array([term.coefficient for term in h.terms])
    return float(np.dot(coefficients, term_expectations(state, h)))


def energy_moments(state: State, h: PauliHamiltonian) -> EnergyMoments:
    """Exact mean and variance; <H^2> comes from the cached symbolic square."""
    mean = expectation(state, h)
    second = expectation(state, square_hamiltonian(h))
    return EnergyMoments(mean, second - mean * mean)


def sample_moments(state: State, h: PauliHamiltonian, shots_per_term: int, seed: int) -> EnergyMoments:
    """
    Moments estimated from ``shots_per_term`` single-shot +-1 outcomes of
    every Pauli term of H and of H^2.

    Term k (H terms first, then H^2 terms) draws from its own PCG64 stream
    seeded with (seed, k), so results do not depend on evaluation order.
    The outcome count is drawn as Binomial(shots, (1 + <P>)/2), which has
    the distribution of the sum of i.i.d. shots. Identity terms are not
    sampled. ``std_error`` is the root-sum-square of |c_j| times the
    per-term standard error of the H terms.

    Raises:
        UsageError: shots_per_term < 1
    """
    if shots_per_term < 1:
        raise UsageError(f'shots_per_term must be >= 1, got {shots_per_term}')
    _check_dimension(state, h)
    squared = square_hamiltonian(h)

    def sampled_means(hamiltonian, offset):
        means = np.empty(len(hamiltonian.terms))
        for j, term in enumerate(hamiltonian.terms):
            if term.is_identity:
                means[j] = 1.0
                continue
            exact = pauli_expectation(state, term.factors, hamiltonian.num_qubits)
            p_plus = min(max(0.5 * (1.0 + exact), 0.0), 1.0)
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, offset + j])))
            plus_count = rng.binomial(shots_per_term, p_plus)
            means[j] = (2.0 * plus_count - shots_per_term) / shots_per_term
        return means

    h_means = sampled_means(h, 0)
    h2_means = sampled_means(squared, len(h.terms))

    coefficients = np.array([term.coefficient for term in h.terms])
    squared_coefficients = np.array([term.coefficient for term in squared.terms])

    mean = float(np.dot(coefficients, h_means))
    second = float(np.dot(squared_coefficients, h2_means))
    per_term_variance = np.clip(1.0 - h_means ** 2, 0.0, None) / shots_per_term
    std_error = math.sqrt(float(np.sum(coefficients ** 2 * per_term_variance)))

    moments = EnergyMoments(mean, second - mean * mean, shots=shots_per_term, std_error=std_error)
    logger.debug('Sampled energy moments', extra=dict(
        moments.to_dict(), seed=seed, terms=len(h.terms) + len(squared.terms),
    ))
    return moments
