"""
Spectral models for anneal-certify.
Eigen-decompositions, classical pre-estimation records and population
decompositions of states in an energy eigenbasis.
"""

import math
from dataclasses import dataclass
import numpy as np

ORTHONORMAL_TOL = 1e-10
POPULATION_SUM_TOL = 1e-8
POPULATION_MAX_TOL = 1e-10


class SpectrumValidationError(ValueError):
    """Spectral record violates its invariants."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues (GHz) with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        eigenvalues = np.array(self.eigenvalues, dtype=float).reshape(-1)
        eigenvectors = np.array(self.eigenvectors, dtype=complex)
        if eigenvectors.shape != (eigenvalues.shape[0], eigenvalues.shape[0]):
            raise SpectrumValidationError(
                f'Eigenvector matrix shape {eigenvectors.shape} does not match {eigenvalues.shape[0]} eigenvalues'
            )
        if np.any(np.diff(eigenvalues) < 0):
            raise SpectrumValidationError('Eigenvalues must be ascending')
        gram = eigenvectors.conj().T @ eigenvectors
        deviation = np.max(np.abs(gram - np.eye(gram.shape[0])))
        if deviation > ORTHONORMAL_TOL:
            raise SpectrumValidationError(f'Eigenvectors not orthonormal (max deviation {deviation:.3e})')
        eigenvalues.flags.writeable = False
        eigenvectors.flags.writeable = False
        object.__setattr__(self, 'eigenvalues', eigenvalues)
        object.__setattr__(self, 'eigenvectors', eigenvectors)

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def eigenvector(self, index) -> np.ndarray:
        return self.eigenvectors[:, index]

    def ground_space_size(self, degeneracy_tol) -> int:
        """Number of eigenvalues within ``degeneracy_tol`` of the lowest."""
        return int(np.count_nonzero(self.eigenvalues <= self.eigenvalues[0] + degeneracy_tol))


@dataclass(frozen=True)
class PreEstimate:
    """
    Classical pre-estimation: approximate E0, E1 (GHz) with guaranteed
    error bounds m0 = dM0, m1 = dM1 (GHz). The true deviations are not
    stored; only their bounds are data.
    """

    e0_approx: float
    e1_approx: float
    m0: float
    m1: float

    def __post_init__(self):
        for name in ('e0_approx', 'e1_approx', 'm0', 'm1'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise SpectrumValidationError(f'{name} must be finite')
            object.__setattr__(self, name, value)
        if self.m0 < 0 or self.m1 < 0:
            raise SpectrumValidationError('m0 and m1 must be non-negative')
        if self.e0_approx - self.m0 > self.e1_approx + self.m1:
            raise SpectrumValidationError(
                'Inconsistent pre-estimate: e0_approx - m0 exceeds e1_approx + m1'
            )

    @property
    def halfwidth(self) -> float:
        """(dM0 + dM1) / 2."""
        return 0.5 * (self.m0 + self.m1)

    def to_dict(self):
        return {
            'e0_approx': self.e0_approx,
            'e1_approx': self.e1_approx,
            'm0': self.m0,
            'm1': self.m1,
        }


@dataclass(frozen=True, eq=False)
class PopulationDecomposition:
    """Eigenbasis populations of a state and the ground-space deficit eps^2."""

    populations: np.ndarray
    epsilon_squared: float
    ground_space_size: int = 1

    def __post_init__(self):
        populations = np.array(self.populations, dtype=float).reshape(-1)
        total = populations.sum()
        if abs(total - 1.0) > POPULATION_SUM_TOL:
            raise SpectrumValidationError(f'Populations sum to {total:.12f}, expected 1')
        if np.any(populations < 0) or np.any(populations > 1 + POPULATION_MAX_TOL):
            raise SpectrumValidationError('Populations must lie in [0, 1]')
        populations.flags.writeable = False
        object.__setattr__(self, 'populations', populations)
        object.__setattr__(self, 'epsilon_squared', float(self.epsilon_squared))

    def mean_energy(self, eigenvalues) -> float:
        """sum_m p_m E_m."""
        return float(np.dot(self.populations, eigenvalues))

    def to_dict(self):
        return {
            'populations': [float(p) for p in self.populations],
            'epsilon_squared': self.epsilon_squared,
            'ground_space_size': self.ground_space_size,
        }
