"""
Quantum state models for anneal-certify.
Pure states (StateVector) and mixed states (DensityMatrix) on n qubits.
"""

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-8
HERMITIAN_TOL = 1e-8
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-6


class StateValidationError(ValueError):
    """State violates its norm/trace/positivity invariants."""


def _num_qubits_for(dimension):
    num_qubits = int(dimension).bit_length() - 1
    if num_qubits < 1 or 2 ** num_qubits != dimension:
        raise StateValidationError(f'Dimension {dimension} is not 2^n with n >= 1')
    return num_qubits


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector of length 2^n."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        _num_qubits_for(amplitudes.shape[0])
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateValidationError(f'State norm {norm:.12f} differs from 1 by more than {NORM_TOL}')
        amplitudes.flags.writeable = False
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def normalized(cls, amplitudes):
        """Build from an unnormalized vector."""
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amplitudes / np.linalg.norm(amplitudes))

    @classmethod
    def basis(cls, index, num_qubits):
        amplitudes = np.zeros(2 ** num_qubits, dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes)

    @property
    def dimension(self):
        return self.amplitudes.shape[0]

    @property
    def num_qubits(self):
        return _num_qubits_for(self.dimension)

    def overlap(self, other: 'StateVector') -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: 'StateVector') -> float:
        return abs(self.overlap(other)) ** 2

    def to_density_matrix(self) -> 'DensityMatrix':
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Hermitian, unit-trace 2^n x 2^n matrix. Eigenvalues down to
    -POSITIVITY_TOL are accepted (integrator round-off).
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise StateValidationError(f'Density matrix must be square, got shape {entries.shape}')
        _num_qubits_for(entries.shape[0])

        asymmetry = np.max(np.abs(entries - entries.conj().T))
        if asymmetry > HERMITIAN_TOL:
            raise StateValidationError(f'Density matrix not Hermitian (max deviation {asymmetry:.3e})')
        trace = np.trace(entries).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise StateValidationError(f'Density matrix trace {trace:.12f} differs from 1')
        lowest = self.min_eigenvalue_of(entries)
        if lowest < -POSITIVITY_TOL:
            raise StateValidationError(f'Density matrix eigenvalue {lowest:.3e} below -{POSITIVITY_TOL}')

        entries.flags.writeable = False
        object.__setattr__(self, 'entries', entries)

    @staticmethod
    def min_eigenvalue_of(entries) -> float:
        hermitian = 0.5 * (entries + entries.conj().T)
        return float(np.linalg.eigvalsh(hermitian)[0])

    @classmethod
    def maximally_mixed(cls, num_qubits):
        dimension = 2 ** num_qubits
        return cls(np.eye(dimension, dtype=complex) / dimension)

    @classmethod
    def mixture(cls, weights, states):
        """sum_k p_k |k><k| for StateVector inputs."""
        entries = sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in zip(weights, states))
        return cls(entries)

    @property
    def dimension(self):
        return self.entries.shape[0]

    @property
    def num_qubits(self):
        return _num_qubits_for(self.dimension)

    def min_eigenvalue(self) -> float:
        return self.min_eigenvalue_of(self.entries)
