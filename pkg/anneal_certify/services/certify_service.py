"""
Certification service for anneal-certify.
Decides whether the energy variance of the annealed state is a rigorous
error bar on the ground-state energy, and brute-force checks the variance
bound that justifies the decision.

The bound: if the population outside the ground state is eps^2 <= 1/2,
then (<H> - E0)^2 <= Var(H). A measured energy below
(E~0 + E~1)/2 - (dM0 + dM1)/2 guarantees eps^2 <= 1/2.
"""

import logging
from typing import Union

import numpy as np

from anneal_certify.models.certification import CertificationReport, Theorem1Report
from anneal_certify.models.moments import EnergyMoments
from anneal_certify.models.spectrum import PreEstimate, Spectrum
from anneal_certify.models.state import DensityMatrix, StateVector
from anneal_certify.services.spectrum_service import DEFAULT_DEGENERACY_TOL, decompose, first_gap
from anneal_certify.utils.error_handlers import TheoremViolationError, UsageError

logger = logging.getLogger(__name__)

MARGIN_TOL = 1e-12
SUFFICIENCY_TOL = 1e-12

MIN_DIMENSION = 2
MAX_DIMENSION = 16
ENERGY_RANGE = 2.0


def threshold(pre: PreEstimate) -> float:
    """(E~0 + E~1)/2 - (dM0 + dM1)/2."""
    return 0.5 * (pre.e0_approx + pre.e1_approx) - pre.halfwidth


def certify(moments: EnergyMoments, pre: PreEstimate) -> CertificationReport:
    """
    Apply the threshold test to measured moments.

    A failed certification is a valid report, not an error. The comparison
    is strict. When sampled moments are passed the report records the shot
    count; the statistical caveat stays with the caller.
    """
    limit = threshold(pre)
    is_bound = moments.mean < limit
    error_bar = moments.error_bar
    improves = is_bound and error_bar < pre.m0

    report = CertificationReport(
        measured_energy=moments.mean,
        measured_variance=moments.variance,
        threshold=limit,
        variance_is_bound=is_bound,
        error_bar=error_bar,
        improves_preestimate=improves,
        preestimate_error=pre.m0,
        shots=moments.shots,
    )
    logger.info('Certification verdict', extra=report.to_dict())
    return report


def population_margin(energies: np.ndarray, populations: np.ndarray) -> np.ndarray:
    """
    Var(H) - (<H> - E0)^2 computed from eigenenergies and populations.
    Rows are independent instances; column 0 must hold the ground energy.
    """
    energies = np.atleast_2d(energies)
    populations = np.atleast_2d(populations)
    mean = np.sum(populations * energies, axis=1)
    variance = np.sum(populations * (energies - mean[:, None]) ** 2, axis=1)
    error = np.sum(populations * (energies - energies[:, :1]), axis=1)
    return variance - error ** 2


def verify_theorem1(trials: int, seed: int) -> Theorem1Report:
    """
    Brute-force check of the variance bound.

    Draws ``trials`` random spectra (dimension 2-16, energies uniform in
    [-2, 2]) with random populations whose ground population is at least
    1/2, and returns the smallest margin Var(H) - (<H> - E0)^2. Also
    evaluates the two-level equality case (eps^2 = 1/2) and the two-level
    counterexample with eps^2 = 0.9, where the bound fails.

    Raises:
        UsageError: trials < 1
        TheoremViolationError: a margin below -MARGIN_TOL
    """
    if trials < 1:
        raise UsageError(f'trials must be >= 1, got {trials}')
    rng = np.random.Generator(np.random.PCG64(seed))

    dimensions = rng.integers(MIN_DIMENSION, MAX_DIMENSION + 1, size=trials)
    columns = np.arange(MAX_DIMENSION)
    active = columns[None, :] < dimensions[:, None]

    energies = rng.uniform(-ENERGY_RANGE, ENERGY_RANGE, size=(trials, MAX_DIMENSION))
    energies = np.sort(np.where(active, energies, np.inf), axis=1)
    energies = np.where(active, energies, 0.0)

    ground = rng.uniform(0.5, 1.0, size=trials)
    weights = np.where(active, rng.exponential(size=(trials, MAX_DIMENSION)), 0.0)
    weights[:, 0] = 0.0
    totals = weights.sum(axis=1)
    populations = weights * ((1.0 - ground) / totals)[:, None]
    populations[:, 0] = ground

    margins = population_margin(energies, populations)
    worst = int(np.argmin(margins))
    min_margin = float(margins[worst])

    equality = float(population_margin(np.array([0.0, 1.0]), np.array([0.5, 0.5]))[0])
    counter_populations = np.array([0.1, 0.9])
    counter_energies = np.array([0.0, 1.0])
    counter_mean = float(np.dot(counter_populations, counter_energies))
    counter_variance = float(np.dot(counter_populations, (counter_energies - counter_mean) ** 2))
    counter_error_squared = (counter_mean - counter_energies[0]) ** 2

    report = Theorem1Report(
        trials=trials,
        seed=seed,
        min_margin=min_margin,
        worst_dimension=int(dimensions[worst]),
        worst_epsilon_squared=float(1.0 - ground[worst]),
        equality_margin=equality,
        counterexample_variance=counter_variance,
        counterexample_error_squared=counter_error_squared,
    )
    logger.info('Variance bound verified', extra=report.to_dict())

    if min_margin < -MARGIN_TOL:
        raise TheoremViolationError(
            f'Variance bound violated: margin {min_margin:.3e} at dimension {report.worst_dimension}'
        )
    return report


def verify_sufficiency(
    spectrum: Spectrum,
    state: Union[StateVector, DensityMatrix],
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
) -> bool:
    """
    True when <H> <= (E0 + E1)/2 implies eps^2 <= 1/2 for this state
    (vacuously true when the energy is above the midpoint).
    """
    decomposition = decompose(state, spectrum, degeneracy_tol)
    e0, e1 = first_gap(spectrum, degeneracy_tol)
    mean = decomposition.mean_energy(spectrum.eigenvalues)
    below_midpoint = mean <= 0.5 * (e0 + e1) + SUFFICIENCY_TOL
    return (not below_midpoint) or decomposition.epsilon_squared <= 0.5 + SUFFICIENCY_TOL
