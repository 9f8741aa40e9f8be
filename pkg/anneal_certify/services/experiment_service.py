"""
Experiment harness for anneal-certify.
Annealing-time optimization per dephasing rate, threshold dephasing-rate
maps against pre-estimation accuracy, and certified error-bar tables.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from anneal_certify.models.anneal import AnnealConfig, AnnealRun
from anneal_certify.models.moments import EnergyMoments
from anneal_certify.models.pauli import AXIS_Z, PauliHamiltonian
from anneal_certify.models.spectrum import PreEstimate
from anneal_certify.models.sweep import (
    STATUS_ALWAYS_FAILS,
    STATUS_NOT_BRACKETED,
    STATUS_OK,
    ErrorBarRow,
    SweepCell,
    SweepGrid,
    ThresholdPoint,
)
from anneal_certify.services.certify_service import certify, threshold, verify_sufficiency
from anneal_certify.services.dynamics_service import OPEN_MAX_PHASE_PER_STEP, AnnealingEngine, default_driver
from anneal_certify.services.measure_service import energy_moments
from anneal_certify.services.pauli_service import to_matrix
from anneal_certify.services.spectrum_service import (
    DEFAULT_DEGENERACY_TOL,
    OFFSET_CENTERED,
    decompose,
    diagonalize,
    first_gap,
    synthesize_preestimate,
)
from anneal_certify.tasks.sweep_runner import run_cells
from anneal_certify.utils.error_handlers import AnnealCertifyError, ComputationError

logger = logging.getLogger(__name__)

BISECTION_RTOL = 1e-2
BISECTION_MAX_ITER = 60

# Grid points added on each side of the bracketing optimal T when bisecting
BRACKET_MARGIN = 1

# Slack for floating-point comparisons against the exact ground energy
ENERGY_TOL = 1e-9

PREDICATE_APPLICABILITY = 'applicability'
PREDICATE_IMPROVEMENT = 'improvement'

# Log-spaced 1 ns to 2 us, the default annealing-time grid
DEFAULT_ANNEALING_TIMES = tuple(float(T) for T in np.geomspace(1.0, 2000.0, 40))


@lru_cache(maxsize=8)
def _engine_for(hp: PauliHamiltonian, hd: PauliHamiltonian) -> AnnealingEngine:
    return AnnealingEngine(hp, hd)


@lru_cache(maxsize=8)
def _spectrum_for(hp: PauliHamiltonian, degeneracy_tol: float):
    return diagonalize(to_matrix(hp), degeneracy_tol)


@dataclass(frozen=True)
class CellTask:
    """Everything a worker process needs to evaluate one (gamma, T) cell."""

    hp: PauliHamiltonian
    hd: PauliHamiltonian
    gamma: float
    T: float
    steps: Optional[int]
    max_phase: float = OPEN_MAX_PHASE_PER_STEP
    lindblad_axis: str = AXIS_Z
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL


def evaluate_cell(task: CellTask) -> SweepCell:
    """
    Open-system anneal for one cell, with exact moments and the oracle eps^2.

    Raises:
        ComputationError: Integrator failure (annotated with the cell) or a
            state violating the midpoint sufficiency implication
    """
    engine = _engine_for(task.hp, task.hd)
    spectrum = _spectrum_for(task.hp, task.degeneracy_tol)
    steps = task.steps or engine.default_steps(task.T, task.max_phase)
    try:
        cfg = AnnealConfig(task.T, task.gamma, steps, task.lindblad_axis)
        rho = engine.evolve_open(cfg)
        moments = energy_moments(rho, task.hp)
        decomposition = decompose(rho, spectrum, task.degeneracy_tol)
    except AnnealCertifyError as e:
        raise ComputationError(f'cell gamma={task.gamma!r}, T={task.T!r}: {e}')

    if not verify_sufficiency(spectrum, rho, task.degeneracy_tol):
        raise ComputationError(
            f'cell gamma={task.gamma!r}, T={task.T!r}: energy below the midpoint with eps^2 > 1/2'
        )
    return SweepCell(
        gamma=task.gamma,
        T=task.T,
        mean=moments.mean,
        variance=moments.variance,
        epsilon_squared=decomposition.epsilon_squared,
    )


def mark_optimal(cells: Sequence[SweepCell]) -> List[SweepCell]:
    """
    Flag, per gamma, the cell of minimum mean; ties go to the smaller T.
    Output is ordered by (gamma, T).
    """
    ordered = sorted(cells, key=lambda cell: (cell.gamma, cell.T))
    best: Dict[float, SweepCell] = {}
    for cell in ordered:
        current = best.get(cell.gamma)
        if current is None or cell.mean < current.mean:
            best[cell.gamma] = cell
    return [
        SweepCell(cell.gamma, cell.T, cell.mean, cell.variance, cell.epsilon_squared,
                  optimal=cell is best[cell.gamma])
        for cell in ordered
    ]


def run_anneal(hp: PauliHamiltonian, hd: PauliHamiltonian, cfg: AnnealConfig,
               degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> Tuple[object, AnnealRun]:
    """
    Single anneal: Schroedinger evolution when gamma = 0, Lindblad otherwise.

    Returns:
        tuple: (final state, AnnealRun with exact moments and populations)
    """
    engine = _engine_for(hp, hd)
    spectrum = _spectrum_for(hp, degeneracy_tol)
    state = engine.evolve_closed(cfg) if cfg.is_closed else engine.evolve_open(cfg)
    moments = energy_moments(state, hp)
    decomposition = decompose(state, spectrum, degeneracy_tol)
    run = AnnealRun(
        config=cfg,
        mean=moments.mean,
        variance=moments.variance,
        epsilon_squared=decomposition.epsilon_squared,
        populations=tuple(float(p) for p in decomposition.populations),
    )
    logger.info('Anneal finished', extra=run.to_dict())
    return state, run


class ExperimentRunner:
    """
    Harness bound to one (H_P, H_D) pair. Caches the optimal-T cell per
    dephasing rate so threshold maps and error-bar tables reuse sweeps;
    bisection probes are cached per (gamma, annealing-time window).
    """

    def __init__(
        self,
        hp: PauliHamiltonian,
        hd: PauliHamiltonian,
        annealing_times: Sequence[float],
        steps: Optional[int] = None,
        threads: int = 1,
        max_phase: float = OPEN_MAX_PHASE_PER_STEP,
        lindblad_axis: str = AXIS_Z,
        degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
        bisection_rtol: float = BISECTION_RTOL,
    ):
        if hd is None:
            hd = default_driver(hp.num_qubits)
        self.hp = hp
        self.hd = hd
        self.annealing_times = SweepGrid(tuple(annealing_times), (0.0,)).annealing_times
        self.steps = steps
        self.threads = threads
        self.max_phase = max_phase
        self.lindblad_axis = lindblad_axis
        self.degeneracy_tol = degeneracy_tol
        self.bisection_rtol = bisection_rtol

        self.spectrum = _spectrum_for(hp, degeneracy_tol)
        self.e0, self.e1 = first_gap(self.spectrum, degeneracy_tol)
        self._optimal: Dict[float, SweepCell] = {}
        self._probes: Dict[Tuple[float, Tuple[float, ...]], SweepCell] = {}

    @property
    def gap(self) -> float:
        return self.e1 - self.e0

    def _task(self, gamma: float, T: float) -> CellTask:
        return CellTask(self.hp, self.hd, gamma, T, self.steps, self.max_phase,
                        self.lindblad_axis, self.degeneracy_tol)

    def time_sweep(self, gammas: Sequence[float]) -> List[SweepCell]:
        """One cell per (gamma, T) with per-gamma optimal flags."""
        grid = SweepGrid(self.annealing_times, tuple(gammas))
        tasks = [self._task(gamma, T) for gamma in grid.gammas for T in grid.annealing_times]
        cells = mark_optimal(run_cells(evaluate_cell, tasks, self.threads))
        for cell in cells:
            if cell.optimal:
                self._optimal[cell.gamma] = cell
        logger.info('Time sweep finished', extra=grid.to_dict())
        return cells

    def optimal_cells(self, gammas: Sequence[float]) -> Dict[float, SweepCell]:
        """Optimal-T cell for each gamma, simulating only rates not seen yet."""
        missing = sorted(set(float(g) for g in gammas) - set(self._optimal))
        if missing:
            self.time_sweep(missing)
        return {float(g): self._optimal[float(g)] for g in gammas}

    def optimal_cell(self, gamma: float) -> SweepCell:
        return self.optimal_cells([gamma])[float(gamma)]

    def _passes(self, predicate: str, cell: SweepCell, pre: PreEstimate) -> bool:
        report = certify(EnergyMoments(cell.mean, cell.variance), pre)
        if predicate == PREDICATE_IMPROVEMENT:
            return report.improves_preestimate
        return report.variance_is_bound

    def threshold_map(self, predicate: str, gammas: Sequence[float], halfwidths: Sequence[float],
                      offset_mode: str = OFFSET_CENTERED) -> List[ThresholdPoint]:
        """
        Largest gamma at which the predicate holds at the optimal T, per
        halfwidth (m0 = m1 = halfwidth). The transition between adjacent
        grid rates is refined by bisection with fresh simulations.
        """
        grid = SweepGrid(self.annealing_times, tuple(gammas), tuple(halfwidths))
        optimal = self.optimal_cells(grid.gammas)
        points = []

        for halfwidth in grid.preestimate_halfwidths:
            pre = synthesize_preestimate(self.spectrum, halfwidth, halfwidth, offset_mode, self.degeneracy_tol)
            if halfwidth >= self.gap / 2.0 or threshold(pre) <= self.e0:
                points.append(ThresholdPoint(halfwidth, None, STATUS_ALWAYS_FAILS))
                continue

            passes = [self._passes(predicate, optimal[gamma], pre) for gamma in grid.gammas]
            if not any(passes):
                points.append(ThresholdPoint(halfwidth, None, STATUS_NOT_BRACKETED))
                continue
            if all(passes):
                points.append(ThresholdPoint(halfwidth, grid.gammas[-1], STATUS_NOT_BRACKETED))
                continue

            first_fail = passes.index(False)
            if first_fail == 0:
                points.append(ThresholdPoint(halfwidth, None, STATUS_NOT_BRACKETED))
                continue
            if any(passes[first_fail:]):
                logger.warning('Predicate not monotone in gamma; keeping grid resolution', extra={
                    'predicate': predicate, 'halfwidth': halfwidth,
                })
                points.append(ThresholdPoint(halfwidth, grid.gammas[first_fail - 1], STATUS_OK))
                continue

            gamma_star = self._bisect(predicate, pre, grid.gammas[first_fail - 1], grid.gammas[first_fail])
            points.append(ThresholdPoint(halfwidth, gamma_star, STATUS_OK))

        for point in points:
            logger.debug('Threshold point', extra=dict(point.to_dict(), predicate=predicate))
        if predicate == PREDICATE_APPLICABILITY:
            self.check_non_increasing(points)
        return points

    def bracket_window(self, low: float, high: float) -> Tuple[float, ...]:
        """
        Annealing times searched for a rate between two grid rates: the
        contiguous slice spanning both optimal T, widened by BRACKET_MARGIN
        grid points on each side.
        """
        times = self.annealing_times
        indices = [times.index(self.optimal_cell(gamma).T) for gamma in (low, high)]
        start = max(0, min(indices) - BRACKET_MARGIN)
        stop = min(len(times), max(indices) + BRACKET_MARGIN + 1)
        return times[start:stop]

    def probe_cell(self, gamma: float, window: Sequence[float]) -> SweepCell:
        """Lowest-energy cell for ``gamma`` over the annealing times in ``window``."""
        key = (float(gamma), tuple(window))
        if key not in self._probes:
            cells = mark_optimal(run_cells(evaluate_cell, [self._task(gamma, T) for T in window], self.threads))
            self._probes[key] = next(cell for cell in cells if cell.optimal)
        return self._probes[key]

    def _bisect(self, predicate: str, pre: PreEstimate, low: float, high: float) -> float:
        """Shrink [low (passes), high (fails)] until (high - low) <= rtol * high."""
        window = self.bracket_window(low, high)
        for _ in range(BISECTION_MAX_ITER):
            if high - low <= self.bisection_rtol * high:
                break
            middle = math.sqrt(low * high) if low > 0 else 0.5 * high
            if self._passes(predicate, self.probe_cell(middle, window), pre):
                low = middle
            else:
                high = middle
            logger.debug('Bisection step', extra={
                'predicate': predicate, 'low': low, 'high': high, 'window': len(window),
            })
        return low

    def check_non_increasing(self, points: Sequence[ThresholdPoint]) -> bool:
        """
        Whether the threshold never rises with the halfwidth, allowing the
        bisection tolerance. Points without a threshold count as -inf.
        Each rise is logged as a warning.
        """
        monotone = True
        previous = math.inf
        for point in points:
            value = point.gamma_threshold if point.gamma_threshold is not None else -math.inf
            if value > previous * (1.0 + self.bisection_rtol):
                monotone = False
                logger.warning('Applicability threshold increased with halfwidth', extra={
                    'halfwidth': point.halfwidth, 'gamma_threshold': point.gamma_threshold,
                })
            previous = min(previous, value)
        return monotone

    def errorbar_table(self, gammas: Sequence[float], pre: PreEstimate) -> List[ErrorBarRow]:
        """
        Optimal-T mean, sqrt(variance) and verdict per gamma, next to the
        exact E0.

        Raises:
            ComputationError: mean below E0, or a certified row whose error
                bar does not cover E0
        """
        grid = SweepGrid(self.annealing_times, tuple(gammas))
        optimal = self.optimal_cells(grid.gammas)
        rows = []
        for gamma in grid.gammas:
            cell = optimal[gamma]
            report = certify(EnergyMoments(cell.mean, cell.variance), pre)
            if cell.mean < self.e0 - ENERGY_TOL:
                raise ComputationError(f'gamma={gamma!r}: mean {cell.mean!r} below exact E0 {self.e0!r}')
            if report.variance_is_bound and cell.mean - report.error_bar > self.e0 + ENERGY_TOL:
                raise ComputationError(
                    f'gamma={gamma!r}: certified error bar {report.error_bar!r} does not cover E0'
                )
            rows.append(ErrorBarRow(
                gamma=gamma,
                T_opt=cell.T,
                mean=cell.mean,
                error_bar=report.error_bar,
                certified=report.variance_is_bound,
                e0_exact=self.e0,
            ))
        return rows


def time_sweep(hp, hd, gammas, annealing_times, steps=None, threads=1) -> List[SweepCell]:
    """Annealing-time sweep over the (gamma, T) grid."""
    return ExperimentRunner(hp, hd, annealing_times, steps, threads).time_sweep(gammas)


def threshold_map_applicability(hp, hd, gammas, halfwidths, offset_mode=OFFSET_CENTERED,
                                annealing_times=DEFAULT_ANNEALING_TIMES, steps=None, threads=1) -> List[ThresholdPoint]:
    """Threshold gamma for the variance to be a certified error bar."""
    runner = ExperimentRunner(hp, hd, annealing_times, steps, threads)
    return runner.threshold_map(PREDICATE_APPLICABILITY, gammas, halfwidths, offset_mode)


def threshold_map_improvement(hp, hd, gammas, halfwidths, offset_mode=OFFSET_CENTERED,
                              annealing_times=DEFAULT_ANNEALING_TIMES, steps=None, threads=1) -> List[ThresholdPoint]:
    """Threshold gamma for the certified error bar to beat the pre-estimate bound dM0."""
    runner = ExperimentRunner(hp, hd, annealing_times, steps, threads)
    return runner.threshold_map(PREDICATE_IMPROVEMENT, gammas, halfwidths, offset_mode)


def errorbar_table(hp, hd, gammas, steps, pre, annealing_times=DEFAULT_ANNEALING_TIMES, threads=1) -> List[ErrorBarRow]:
    """Per-gamma optimal-T energy with its error bar and certification verdict."""
    return ExperimentRunner(hp, hd, annealing_times, steps, threads).errorbar_table(gammas, pre)
