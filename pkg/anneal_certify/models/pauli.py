"""
Pauli-string models for anneal-certify.
Weighted products of single-qubit Pauli factors and their sums.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

AXIS_X = 'X'
AXIS_Y = 'Y'
AXIS_Z = 'Z'

VALID_AXES = (AXIS_X, AXIS_Y, AXIS_Z)

# Sort code per axis for canonical ordering
AXIS_CODES = {AXIS_X: 1, AXIS_Y: 2, AXIS_Z: 3}

# Terms whose merged coefficient falls below this are dropped
MERGE_TOL = 1e-14


class PauliValidationError(ValueError):
    """Invalid Pauli term or Hamiltonian."""


def _normalize_factors(factors) -> Tuple[Tuple[int, str], ...]:
    """Accept a mapping or (index, axis) pairs; return sorted pairs."""
    items = factors.items() if isinstance(factors, dict) else list(factors)
    seen = set()
    pairs = []
    for index, axis in items:
        index = int(index)
        axis = str(axis).upper()
        if index < 0:
            raise PauliValidationError(f'Negative qubit index {index}')
        if axis not in VALID_AXES:
            raise PauliValidationError(f'Invalid axis {axis!r}. Must be one of {VALID_AXES}')
        if index in seen:
            raise PauliValidationError(f'Qubit index {index} appears twice in one term')
        seen.add(index)
        pairs.append((index, axis))
    return tuple(sorted(pairs))


@dataclass(frozen=True)
class PauliTerm:
    """
    coefficient * (product of Pauli factors). Qubits missing from
    ``factors`` carry the identity; an empty product is the identity term.

    Products of terms can carry a phase in {+-1, +-i}, so the coefficient
    may be complex; Hamiltonians only admit real coefficients.
    """

    coefficient: complex
    factors: Tuple[Tuple[int, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'factors', _normalize_factors(self.factors))
        coefficient = complex(self.coefficient)
        if not (math.isfinite(coefficient.real) and math.isfinite(coefficient.imag)):
            raise PauliValidationError(f'Non-finite coefficient {self.coefficient!r}')
        if coefficient.imag == 0.0:
            object.__setattr__(self, 'coefficient', coefficient.real)
        else:
            object.__setattr__(self, 'coefficient', coefficient)

    @property
    def factor_map(self) -> Dict[int, str]:
        return dict(self.factors)

    @property
    def is_identity(self) -> bool:
        return not self.factors

    @property
    def is_real(self) -> bool:
        return isinstance(self.coefficient, float)

    @property
    def max_index(self) -> int:
        """Largest qubit index touched, -1 for the identity term."""
        return max((index for index, _ in self.factors), default=-1)

    @property
    def label(self) -> str:
        """Factor string such as ``Z0 Z1``; empty for the identity."""
        return ' '.join(f'{axis}{index}' for index, axis in self.factors)

    def sort_key(self):
        return (
            tuple(index for index, _ in self.factors),
            tuple(AXIS_CODES[axis] for _, axis in self.factors),
        )


@dataclass(frozen=True)
class PauliHamiltonian:
    """
    Canonical weighted sum of Pauli strings on ``num_qubits`` qubits.

    Construct through :meth:`from_terms`, which merges duplicates, drops
    residues below ``MERGE_TOL`` and sorts terms canonically.
    """

    num_qubits: int
    terms: Tuple[PauliTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.num_qubits) < 1:
            raise PauliValidationError(f'num_qubits must be >= 1, got {self.num_qubits}')
        object.__setattr__(self, 'num_qubits', int(self.num_qubits))
        object.__setattr__(self, 'terms', tuple(self.terms))
        for term in self.terms:
            if not term.is_real:
                raise PauliValidationError(f'Hamiltonian term {term.label or "I"} has a complex coefficient')
            if term.max_index >= self.num_qubits:
                raise PauliValidationError(
                    f'Term {term.label} acts on qubit {term.max_index} but num_qubits={self.num_qubits}'
                )

    @classmethod
    def from_terms(cls, terms: Iterable[PauliTerm], num_qubits: Optional[int] = None) -> 'PauliHamiltonian':
        """Merge, prune and sort ``terms`` into canonical form."""
        merged = merge_terms(terms)
        for term in merged:
            if not term.is_real:
                raise PauliValidationError(f'Hamiltonian term {term.label or "I"} has a complex coefficient')
        if num_qubits is None:
            num_qubits = max((term.max_index for term in merged), default=-1) + 1
        return cls(max(int(num_qubits), 1), tuple(merged))

    @property
    def dimension(self) -> int:
        return 2 ** self.num_qubits

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def coefficient_of(self, factors) -> float:
        """Coefficient of the term with the given factors (0.0 if absent)."""
        key = _normalize_factors(factors)
        for term in self.terms:
            if term.factors == key:
                return term.coefficient
        return 0.0


def merge_terms(terms: Iterable[PauliTerm]) -> Tuple[PauliTerm, ...]:
    """
    Sum coefficients of terms sharing a factor map, drop terms with
    |c| < MERGE_TOL, and return them in canonical order.
    """
    totals: Dict[Tuple[Tuple[int, str], ...], complex] = {}
    order = []
    for term in terms:
        if term.factors not in totals:
            totals[term.factors] = 0j
            order.append(term.factors)
        totals[term.factors] += term.coefficient

    merged = []
    for factors in order:
        coefficient = totals[factors]
        if abs(coefficient) < MERGE_TOL:
            continue
        merged.append(PauliTerm(coefficient, factors))
    merged.sort(key=PauliTerm.sort_key)
    return tuple(merged)
