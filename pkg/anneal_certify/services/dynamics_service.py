"""
Annealing dynamics service for anneal-certify.
Evolves the linear schedule H(t) = (t/T) H_P + (1 - t/T) H_D from |+...+>
under the Schroedinger equation or the dephasing Lindblad equation.

Units: coefficients in GHz are used as angular frequencies in rad/ns, so
d|psi>/dt = -i H |psi> with t in ns and no factor of 2*pi.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np

from anneal_certify.models.anneal import MIN_STEPS, AnnealConfig
from anneal_certify.models.pauli import AXIS_X, AXIS_Z, PauliHamiltonian
from anneal_certify.models.state import DensityMatrix, StateVector
from anneal_certify.services.pauli_service import (
    DEFAULT_MAX_QUBITS,
    pauli_string_hamiltonian,
    term_action,
    to_matrix,
)
from anneal_certify.utils.error_handlers import (
    DimensionError,
    IntegrationError,
    PositivityError,
    UsageError,
)

logger = logging.getLogger(__name__)

NORM_DRIFT_TOL = 1e-6
TRACE_DRIFT_TOL = 1e-6
POSITIVITY_TOL = 1e-6

# Default step rules: max ||H(t)|| * dt <= max_phase.
# Closed runs are held to the tighter value by the 1e-6 norm-drift check;
# the Lindblad right-hand side is traceless, so open runs take the coarser one.
MAX_PHASE_PER_STEP = 0.02
OPEN_MAX_PHASE_PER_STEP = 0.05


def default_driver(num_qubits: int) -> PauliHamiltonian:
    """Transverse-field driver H_D = -sum_i sigma^x_i."""
    if num_qubits < 1:
        raise UsageError(f'num_qubits must be >= 1, got {num_qubits}')
    return pauli_string_hamiltonian(-1.0, AXIS_X, range(num_qubits), num_qubits)


def plus_state(num_qubits: int) -> StateVector:
    """|+...+> with every amplitude 2^(-n/2)."""
    if num_qubits < 1:
        raise UsageError(f'num_qubits must be >= 1, got {num_qubits}')
    dimension = 2 ** num_qubits
    return StateVector(np.full(dimension, 1.0 / math.sqrt(dimension), dtype=complex))


def schedule_hamiltonian(hp: PauliHamiltonian, hd: PauliHamiltonian, t: float, T: float) -> np.ndarray:
    """
    Dense matrix of (t/T) H_P + (1 - t/T) H_D.

    Raises:
        UsageError: t outside [0, T]
        DimensionError: H_P and H_D act on different registers
    """
    if T <= 0 or t < 0 or t > T:
        raise UsageError(f't={t} outside the schedule [0, {T}]')
    _check_registers(hp, hd)
    s = t / T
    return s * to_matrix(hp) + (1.0 - s) * to_matrix(hd)


def default_steps(
    hp: PauliHamiltonian,
    hd: PauliHamiltonian,
    annealing_time: float,
    max_phase: float = MAX_PHASE_PER_STEP,
    min_steps: int = MIN_STEPS,
) -> int:
    """
    Smallest step count with max_t ||H(t)|| * dt <= max_phase. The norm of a
    convex combination is bounded by the larger endpoint norm.
    """
    norm = max(np.linalg.norm(to_matrix(hp), 2), np.linalg.norm(to_matrix(hd), 2))
    return max(min_steps, int(math.ceil(annealing_time * norm / max_phase)))


def rk4_integrate(rhs: Callable, y0: np.ndarray, t0: float, t1: float, steps: int) -> np.ndarray:
    """Classical fixed-step RK4 for dy/dt = rhs(t, y); works on arrays of any shape."""
    dt = (t1 - t0) / steps
    y = np.array(y0, dtype=complex)
    for i in range(steps):
        t = t0 + i * dt
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def _check_registers(hp: PauliHamiltonian, hd: PauliHamiltonian):
    if hp.num_qubits != hd.num_qubits:
        raise DimensionError(
            f'Problem Hamiltonian has {hp.num_qubits} qubits but driver has {hd.num_qubits}'
        )


class AnnealingEngine:
    """
    Precomputed dense operators for repeated anneals of one (H_P, H_D) pair.
    Instances hold no mutable state after construction.
    """

    def __init__(self, hp: PauliHamiltonian, hd: Optional[PauliHamiltonian] = None,
                 max_qubits: int = DEFAULT_MAX_QUBITS):
        if hd is None:
            hd = default_driver(hp.num_qubits)
        _check_registers(hp, hd)
        self.hp = hp
        self.hd = hd
        self.num_qubits = hp.num_qubits
        self.dimension = 2 ** self.num_qubits
        self.hp_matrix = to_matrix(hp, max_qubits)
        self.hd_matrix = to_matrix(hd, max_qubits)
        self._delta = self.hp_matrix - self.hd_matrix
        self._z_mask = self._z_dephasing_mask()

    def hamiltonian_at(self, s: float) -> np.ndarray:
        """H at schedule fraction s = t/T."""
        return self.hd_matrix + s * self._delta

    def default_steps(self, annealing_time: float, max_phase: float = MAX_PHASE_PER_STEP,
                      min_steps: int = MIN_STEPS) -> int:
        return default_steps(self.hp, self.hd, annealing_time, max_phase, min_steps)

    def evolve_closed(self, cfg: AnnealConfig, initial: Optional[StateVector] = None,
                      norm_tol: float = NORM_DRIFT_TOL) -> StateVector:
        """
        Integrate d|psi>/dt = -i H(t) |psi> over [0, T] with cfg.steps RK4 steps.

        Raises:
            UsageError: cfg.gamma is not 0
            IntegrationError: final norm drifted by more than ``norm_tol``
        """
        if not cfg.is_closed:
            raise UsageError(f'evolve_closed requires gamma = 0 (got {cfg.gamma}); use evolve_open')
        psi0 = (initial or plus_state(self.num_qubits)).amplitudes
        self._check_state_size(psi0.shape[0])
        T = cfg.annealing_time

        def rhs(t, psi):
            return -1j * (self.hamiltonian_at(t / T) @ psi)

        psi = rk4_integrate(rhs, psi0, 0.0, T, cfg.steps)
        norm = float(np.linalg.norm(psi))
        drift = abs(norm - 1.0)
        logger.debug('Closed anneal finished', extra={
            'annealing_time': T, 'steps': cfg.steps, 'norm_drift': drift,
        })
        if drift > norm_tol:
            raise IntegrationError(
                f'Norm drift {drift:.3e} exceeds {norm_tol:.1e} at T={T}, steps={cfg.steps}; increase steps'
            )
        return StateVector(psi / norm)

    def evolve_open(self, cfg: AnnealConfig, initial: Optional[DensityMatrix] = None,
                    trace_tol: float = TRACE_DRIFT_TOL,
                    positivity_tol: float = POSITIVITY_TOL) -> DensityMatrix:
        """
        Integrate d rho/dt = -i[H(t), rho] + gamma sum_n (L_n rho L_n - rho)
        with L_n = sigma^axis on qubit n, from rho(0) = |+...+><+...+|.

        Raises:
            IntegrationError: trace drifted by more than ``trace_tol``
            PositivityError: an eigenvalue fell below ``-positivity_tol``
        """
        if initial is None:
            initial = plus_state(self.num_qubits).to_density_matrix()
        rho0 = initial.entries
        self._check_state_size(rho0.shape[0])
        T = cfg.annealing_time
        gamma = cfg.gamma
        dissipator = self._dissipator(cfg.lindblad_axis) if gamma > 0 else None

        def rhs(t, rho):
            h = self.hamiltonian_at(t / T)
            drho = -1j * (h @ rho - rho @ h)
            if dissipator is not None:
                drho = drho + gamma * dissipator(rho)
            return drho

        rho = rk4_integrate(rhs, rho0, 0.0, T, cfg.steps)
        rho = 0.5 * (rho + rho.conj().T)

        trace = float(np.trace(rho).real)
        drift = abs(trace - 1.0)
        if drift > trace_tol:
            raise IntegrationError(
                f'Trace drift {drift:.3e} exceeds {trace_tol:.1e} at T={T}, gamma={gamma}'
            )
        rho = rho / trace
        lowest = DensityMatrix.min_eigenvalue_of(rho)
        logger.debug('Open anneal finished', extra={
            'annealing_time': T, 'gamma': gamma, 'steps': cfg.steps,
            'trace_drift': drift, 'min_eigenvalue': lowest,
        })
        if lowest < -positivity_tol:
            raise PositivityError(
                f'Density matrix eigenvalue {lowest:.3e} below -{positivity_tol:.1e} at T={T}, gamma={gamma}'
            )
        return DensityMatrix(rho)

    def _dissipator(self, axis: str):
        """sum_n (L_n rho L_n - rho) for single-qubit Pauli L_n on every qubit."""
        n = self.num_qubits
        if axis == AXIS_Z:
            mask = self._z_mask
            return lambda rho: mask * rho

        operators = []
        for index in range(n):
            _, targets, phase = term_action(((index, axis),), n)
            operator = np.zeros((self.dimension, self.dimension), dtype=complex)
            operator[targets, np.arange(self.dimension)] = phase
            operators.append(operator)

        def dissipate(rho):
            total = -n * rho
            for operator in operators:
                total = total + operator @ rho @ operator
            return total

        return dissipate

    def _z_dephasing_mask(self):
        """Z-dephasing is diagonal: element (a, b) decays at -2 * popcount(a ^ b)."""
        basis = np.arange(self.dimension)
        flips = basis[:, None] ^ basis[None, :]
        popcount = np.zeros_like(flips)
        for bit in range(self.num_qubits):
            popcount += (flips >> bit) & 1
        return -2.0 * popcount

    def _check_state_size(self, dimension):
        if dimension != self.dimension:
            raise DimensionError(f'Initial state dimension {dimension} does not match {self.dimension}')


def evolve_closed(hp: PauliHamiltonian, hd: PauliHamiltonian, cfg: AnnealConfig,
                  initial: Optional[StateVector] = None) -> StateVector:
    """Closed-system anneal from |+...+> (see AnnealingEngine.evolve_closed)."""
    return AnnealingEngine(hp, hd).evolve_closed(cfg, initial)


def evolve_open(hp: PauliHamiltonian, hd: PauliHamiltonian, cfg: AnnealConfig,
                initial: Optional[DensityMatrix] = None) -> DensityMatrix:
    """Dephasing Lindblad anneal from |+...+><+...+| (see AnnealingEngine.evolve_open)."""
    return AnnealingEngine(hp, hd).evolve_open(cfg, initial)
