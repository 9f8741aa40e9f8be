"""
Energy moment model for anneal-certify.
"""

import math
from dataclasses import dataclass
from typing import Optional

VARIANCE_CLAMP_TOL = 1e-10


class MomentsValidationError(ValueError):
    """Invalid energy moments."""


@dataclass(frozen=True)
class EnergyMoments:
    """
    <H> and <H^2> - <H>^2 of a state (GHz, GHz^2). ``shots`` is the number
    of single-shot samples per Pauli term when the moments were sampled;
    exact moments carry neither ``shots`` nor ``std_error``.
    """

    mean: float
    variance: float
    shots: Optional[int] = None
    std_error: Optional[float] = None

    def __post_init__(self):
        variance = float(self.variance)
        if self.shots is None:
            # Round-off may push an exact variance slightly negative
            if variance < -VARIANCE_CLAMP_TOL:
                raise MomentsValidationError(f'Exact variance {variance:.3e} is negative')
            if self.std_error is not None:
                raise MomentsValidationError('std_error requires shots')
        elif int(self.shots) < 1:
            raise MomentsValidationError('shots must be >= 1')
        object.__setattr__(self, 'mean', float(self.mean))
        object.__setattr__(self, 'variance', max(variance, 0.0))

    @property
    def is_exact(self) -> bool:
        return self.shots is None

    @property
    def error_bar(self) -> float:
        return math.sqrt(self.variance)

    def to_dict(self):
        return {
            'mean': self.mean,
            'variance': self.variance,
            'shots': self.shots,
            'std_error': self.std_error,
        }
