"""
Certification models for anneal-certify.
Outcome of the threshold test and of the brute-force check of the
variance bound.
"""

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class CertificationReport:
    """
    Verdict on whether the final-state variance is a rigorous error bar.

    ``variance_is_bound`` holds iff measured_energy < threshold;
    ``improves_preestimate`` additionally requires sqrt(variance) < dM0.
    """

    measured_energy: float
    measured_variance: float
    threshold: float
    variance_is_bound: bool
    error_bar: float
    improves_preestimate: bool
    preestimate_error: float
    shots: Optional[int] = None

    def __post_init__(self):
        if self.variance_is_bound != (self.measured_energy < self.threshold):
            raise ValueError('variance_is_bound must equal measured_energy < threshold')
        if self.improves_preestimate and not self.variance_is_bound:
            raise ValueError('improves_preestimate requires variance_is_bound')

    @property
    def best_error_bar(self) -> float:
        """Smaller of the certified sqrt(variance) and the pre-estimation bound dM0."""
        if self.variance_is_bound:
            return min(self.error_bar, self.preestimate_error)
        return self.preestimate_error

    @property
    def energy_interval(self):
        """Interval guaranteed to hold E0 when certified, else None."""
        if not self.variance_is_bound:
            return None
        return (self.measured_energy - self.error_bar, self.measured_energy)

    @property
    def verdict(self) -> str:
        if self.improves_preestimate:
            return (f'certified: E0 in [{self.measured_energy - self.error_bar:.17g}, '
                    f'{self.measured_energy:.17g}] GHz, error bar {self.error_bar:.17g} '
                    f'improves on pre-estimate {self.preestimate_error:.17g}')
        if self.variance_is_bound:
            return (f'certified: error bar {self.error_bar:.17g} GHz is rigorous but does not '
                    f'improve on pre-estimate {self.preestimate_error:.17g}')
        return (f'not certified: energy {self.measured_energy:.17g} is not below '
                f'threshold {self.threshold:.17g}')

    def to_dict(self):
        return {
            'measured_energy': self.measured_energy,
            'measured_variance': self.measured_variance,
            'threshold': self.threshold,
            'variance_is_bound': self.variance_is_bound,
            'error_bar': self.error_bar,
            'improves_preestimate': self.improves_preestimate,
            'best_error_bar': self.best_error_bar,
            'shots': self.shots,
        }


@dataclass(frozen=True)
class Theorem1Report:
    """Worst margin of variance - error^2 over random instances with eps^2 <= 1/2."""

    trials: int
    seed: int
    min_margin: float
    worst_dimension: int
    worst_epsilon_squared: float
    equality_margin: float
    counterexample_variance: float
    counterexample_error_squared: float

    @property
    def counterexample_violates(self) -> bool:
        return self.counterexample_variance < self.counterexample_error_squared

    def to_dict(self):
        return {
            'trials': self.trials,
            'seed': self.seed,
            'min_margin': self.min_margin,
            'worst_dimension': self.worst_dimension,
            'worst_epsilon_squared': self.worst_epsilon_squared,
            'equality_margin': self.equality_margin,
            'counterexample_variance': self.counterexample_variance,
            'counterexample_error_squared': self.counterexample_error_squared,
        }
