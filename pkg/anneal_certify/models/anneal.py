"""
Annealing run models for anneal-certify.
Configuration of one annealing schedule and the record of its outcome.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from anneal_certify.models.pauli import AXIS_Z, VALID_AXES

MIN_STEPS = 10


class AnnealConfigError(ValueError):
    """Invalid annealing configuration."""


@dataclass(frozen=True)
class AnnealConfig:
    """
    Linear schedule H(t) = (t/T) H_P + (1 - t/T) H_D over T ns with
    dephasing rate gamma (GHz) and a fixed number of RK4 steps.
    """

    annealing_time: float
    gamma: float = 0.0
    steps: int = 1000
    lindblad_axis: str = AXIS_Z

    def __post_init__(self):
        annealing_time = float(self.annealing_time)
        gamma = float(self.gamma)
        if not math.isfinite(annealing_time) or annealing_time <= 0:
            raise AnnealConfigError(f'annealing_time must be > 0, got {self.annealing_time}')
        if not math.isfinite(gamma) or gamma < 0:
            raise AnnealConfigError(f'gamma must be >= 0, got {self.gamma}')
        if int(self.steps) < MIN_STEPS:
            raise AnnealConfigError(f'steps must be >= {MIN_STEPS}, got {self.steps}')
        axis = str(self.lindblad_axis).upper()
        if axis not in VALID_AXES:
            raise AnnealConfigError(f'Invalid lindblad_axis. Must be one of {VALID_AXES}')
        object.__setattr__(self, 'annealing_time', annealing_time)
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'steps', int(self.steps))
        object.__setattr__(self, 'lindblad_axis', axis)

    @property
    def is_closed(self) -> bool:
        return self.gamma == 0.0

    def with_gamma(self, gamma) -> 'AnnealConfig':
        return AnnealConfig(self.annealing_time, gamma, self.steps, self.lindblad_axis)

    def to_dict(self):
        return {
            'annealing_time': self.annealing_time,
            'gamma': self.gamma,
            'steps': self.steps,
            'lindblad_axis': self.lindblad_axis,
        }


@dataclass(frozen=True)
class AnnealRun:
    """Configuration plus the measured outcome of one anneal."""

    config: AnnealConfig
    mean: float
    variance: float
    epsilon_squared: Optional[float] = None
    populations: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def ground_population(self) -> Optional[float]:
        if self.epsilon_squared is None:
            return None
        return 1.0 - self.epsilon_squared

    def to_dict(self):
        data = self.config.to_dict()
        data.update({
            'mean': self.mean,
            'variance': self.variance,
            'epsilon_squared': self.epsilon_squared,
            'populations': list(self.populations),
        })
        return data
