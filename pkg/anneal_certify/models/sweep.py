"""
Sweep models for anneal-certify.
Parameter grids and the result rows of the annealing-time sweep, the
threshold maps and the error-bar table.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


class SweepValidationError(ValueError):
    """Invalid grid or result row."""


def _ascending(values, name, allow_zero=False):
    values = tuple(float(v) for v in values)
    if not values:
        raise SweepValidationError(f'{name} must not be empty')
    for value in values:
        if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
            raise SweepValidationError(f'{name} contains invalid value {value}')
    if any(b <= a for a, b in zip(values, values[1:])):
        raise SweepValidationError(f'{name} must be strictly ascending')
    return values


@dataclass(frozen=True)
class SweepGrid:
    """Annealing times (ns), dephasing rates (GHz, may include 0) and pre-estimate halfwidths (GHz)."""

    annealing_times: Tuple[float, ...]
    gammas: Tuple[float, ...]
    preestimate_halfwidths: Tuple[float, ...] = (0.0,)

    def __post_init__(self):
        object.__setattr__(self, 'annealing_times', _ascending(self.annealing_times, 'annealing_times'))
        object.__setattr__(self, 'gammas', _ascending(self.gammas, 'gammas', allow_zero=True))
        object.__setattr__(
            self, 'preestimate_halfwidths',
            _ascending(self.preestimate_halfwidths, 'preestimate_halfwidths', allow_zero=True),
        )

    @classmethod
    def default(cls, gap, config):
        """
        Default grids: log-spaced T, {0} plus log-spaced gamma, and linear
        halfwidths up to HALFWIDTH_SPAN * gap / 2 (straddling the
        always-fail boundary).
        """
        times = np.geomspace(config['SWEEP_T_MIN'], config['SWEEP_T_MAX'], config['SWEEP_T_POINTS'])
        gammas = np.concatenate((
            [0.0],
            np.geomspace(config['SWEEP_GAMMA_MIN'], config['SWEEP_GAMMA_MAX'], config['SWEEP_GAMMA_POINTS']),
        ))
        points = config['HALFWIDTH_POINTS']
        top = config['HALFWIDTH_SPAN'] * gap / 2.0
        halfwidths = np.linspace(top / points, top, points)
        return cls(tuple(times), tuple(gammas), tuple(halfwidths))

    def to_dict(self):
        return {
            'annealing_times': list(self.annealing_times),
            'gammas': list(self.gammas),
            'preestimate_halfwidths': list(self.preestimate_halfwidths),
        }


@dataclass(frozen=True)
class SweepCell:
    """One (gamma, T) evaluation of the annealing-time sweep."""

    gamma: float
    T: float
    mean: float
    variance: float
    epsilon_squared: float
    optimal: bool = False


# Threshold map statuses
STATUS_OK = 'ok'
STATUS_ALWAYS_FAILS = 'always_fails'
STATUS_NOT_BRACKETED = 'not_bracketed'
VALID_STATUSES = (STATUS_OK, STATUS_ALWAYS_FAILS, STATUS_NOT_BRACKETED)


@dataclass(frozen=True)
class ThresholdPoint:
    """
    Largest dephasing rate at which the predicate holds for one halfwidth.
    ``gamma_threshold`` is None when no rate on the grid passes and the
    largest grid rate when every rate passes; both are not_bracketed.
    """

    halfwidth: float
    gamma_threshold: Optional[float]
    status: str = STATUS_OK

    def __post_init__(self):
        if self.status not in VALID_STATUSES:
            raise SweepValidationError(f'Invalid status. Must be one of {VALID_STATUSES}')

    def to_dict(self):
        return {
            'halfwidth_ghz': self.halfwidth,
            'gamma_threshold_ghz': self.gamma_threshold,
            'status': self.status,
        }


@dataclass(frozen=True)
class ErrorBarRow:
    """Optimal-T anneal at one dephasing rate with its certification verdict."""

    gamma: float
    T_opt: float
    mean: float
    error_bar: float
    certified: bool
    e0_exact: float
