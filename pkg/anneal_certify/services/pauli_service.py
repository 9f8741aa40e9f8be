"""
Pauli algebra service for anneal-certify.
Parsing, serialization, products, squaring and dense matrix realization
of Pauli-string Hamiltonians.

Basis convention: qubit 0 is the leftmost tensor factor, i.e. the most
significant bit of a computational-basis index.
"""

import logging
import math
import re
from functools import lru_cache
from typing import Iterable, Tuple

import numpy as np

from anneal_certify.models.pauli import (
    AXIS_X,
    AXIS_Y,
    AXIS_Z,
    PauliHamiltonian,
    PauliTerm,
    PauliValidationError,
    merge_terms,
)
from anneal_certify.utils.error_handlers import (
    ComputationError,
    DimensionError,
    HamiltonianFormatError,
)

logger = logging.getLogger(__name__)

# Dense 2^n x 2^n realizations are refused above this many qubits
DEFAULT_MAX_QUBITS = 10

# Imaginary residue allowed in merged coefficients of H^2
SQUARE_IMAG_TOL = 1e-12

_FACTOR_RE = re.compile(r'^([XYZxyz])(\d+)$')
_HEADER_RE = re.compile(r'^qubits\s+(\d+)$', re.IGNORECASE)

# Single-qubit products: (a, b) -> (phase, c) with sigma_a sigma_b = phase sigma_c
_PRODUCT_TABLE = {
    (AXIS_X, AXIS_Y): (1j, AXIS_Z),
    (AXIS_Y, AXIS_Z): (1j, AXIS_X),
    (AXIS_Z, AXIS_X): (1j, AXIS_Y),
    (AXIS_Y, AXIS_X): (-1j, AXIS_Z),
    (AXIS_Z, AXIS_Y): (-1j, AXIS_X),
    (AXIS_X, AXIS_Z): (-1j, AXIS_Y),
}


def parse_hamiltonian(text: str) -> PauliHamiltonian:
    """
    Parse the line-oriented Hamiltonian format.

    Each non-comment line is ``<coefficient> [<axis><index>]...``; ``#``
    starts a comment; an optional ``qubits <n>`` header fixes the register
    size (otherwise 1 + the largest index seen).

    Args:
        text (str): Document contents

    Returns:
        PauliHamiltonian: Canonical Hamiltonian

    Raises:
        HamiltonianFormatError: On malformed lines, duplicate qubit indices,
            non-finite coefficients or an undersized header.
    """
    header_qubits = None
    header_line = None
    terms = []

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue

        header = _HEADER_RE.match(line)
        if header:
            if header_qubits is not None:
                raise HamiltonianFormatError('duplicate qubits header', line_number)
            header_qubits = int(header.group(1))
            header_line = line_number
            if header_qubits < 1:
                raise HamiltonianFormatError('qubits header must be >= 1', line_number)
            continue

        tokens = line.split()
        try:
            coefficient = float(tokens[0])
        except ValueError:
            raise HamiltonianFormatError(f'invalid coefficient {tokens[0]!r}', line_number)
        if not math.isfinite(coefficient):
            raise HamiltonianFormatError(f'non-finite coefficient {tokens[0]!r}', line_number)

        factors = []
        for token in tokens[1:]:
            match = _FACTOR_RE.match(token)
            if not match:
                raise HamiltonianFormatError(f'invalid Pauli factor {token!r}', line_number)
            factors.append((int(match.group(2)), match.group(1).upper()))

        try:
            terms.append(PauliTerm(coefficient, factors))
        except PauliValidationError as e:
            raise HamiltonianFormatError(str(e), line_number)

    needed = max((term.max_index for term in terms), default=-1) + 1
    if header_qubits is not None and needed > header_qubits:
        raise HamiltonianFormatError(
            f'qubits header declares {header_qubits} but terms use {needed}', header_line
        )
    num_qubits = header_qubits if header_qubits is not None else max(needed, 1)

    hamiltonian = PauliHamiltonian.from_terms(terms, num_qubits)
    logger.debug('Parsed Hamiltonian', extra={'terms': len(hamiltonian), 'num_qubits': num_qubits})
    return hamiltonian


def serialize_hamiltonian(h: PauliHamiltonian) -> str:
    """Write ``h`` in the parse format, canonical order, 17 significant digits."""
    lines = [f'qubits {h.num_qubits}']
    for term in h.terms:
        coefficient = format(term.coefficient, '.17g')
        lines.append(f'{coefficient} {term.label}'.rstrip())
    return '\n'.join(lines) + '\n'


def load_hamiltonian(path: str) -> PauliHamiltonian:
    """Read and parse a Hamiltonian file (UTF-8)."""
    with open(path, 'r', encoding='utf-8') as handle:
        return parse_hamiltonian(handle.read())


def multiply_terms(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """
    Product ``a * b`` applying sigma_a sigma_b = delta_ab I + i eps_abc sigma_c
    qubit by qubit. The returned coefficient includes the phase in {+-1, +-i}.
    """
    left = a.factor_map
    right = b.factor_map
    phase = 1 + 0j
    factors = []
    for index in sorted(set(left) | set(right)):
        axis_a = left.get(index)
        axis_b = right.get(index)
        if axis_a is None:
            factors.append((index, axis_b))
        elif axis_b is None:
            factors.append((index, axis_a))
        elif axis_a == axis_b:
            continue
        else:
            step, axis_c = _PRODUCT_TABLE[(axis_a, axis_b)]
            phase *= step
            factors.append((index, axis_c))
    return PauliTerm(a.coefficient * b.coefficient * phase, factors)


@lru_cache(maxsize=64)
def square_hamiltonian(h: PauliHamiltonian) -> PauliHamiltonian:
    """
    Symbolic H^2 = sum_jk P_j P_k in canonical form. Results are cached
    per Hamiltonian.

    Raises:
        ComputationError: If a merged coefficient keeps an imaginary part
            above SQUARE_IMAG_TOL (impossible for real Hermitian input).
    """
    products = [multiply_terms(a, b) for a in h.terms for b in h.terms]
    merged = merge_terms(products)

    real_terms = []
    for term in merged:
        imag = complex(term.coefficient).imag
        if abs(imag) > SQUARE_IMAG_TOL:
            raise ComputationError(
                f'H^2 term {term.label or "I"} kept imaginary coefficient {imag:.3e}'
            )
        real_terms.append(PauliTerm(complex(term.coefficient).real, term.factors))
    return PauliHamiltonian.from_terms(real_terms, h.num_qubits)


@lru_cache(maxsize=4096)
def term_action(factors: Tuple[Tuple[int, str], ...], num_qubits: int):
    """
    Action of a Pauli string on basis states: P|b> = phase[b] |b ^ flip>.

    Returns:
        tuple: (flip mask as int, target indices array, phase array); arrays
        are read-only and shared through the cache.
    """
    dimension = 2 ** num_qubits
    basis = np.arange(dimension)
    flip = 0
    phase = np.ones(dimension, dtype=complex)
    for index, axis in factors:
        shift = num_qubits - 1 - index
        bit = (basis >> shift) & 1
        sign = 1 - 2 * bit
        if axis == AXIS_X:
            flip |= 1 << shift
        elif axis == AXIS_Y:
            flip |= 1 << shift
            phase = phase * (1j * sign)
        else:
            phase = phase * sign
    targets = basis ^ flip
    targets.flags.writeable = False
    phase.flags.writeable = False
    return flip, targets, phase


def check_dimension(num_qubits: int, max_qubits: int = DEFAULT_MAX_QUBITS):
    """Refuse dense realizations beyond ``max_qubits``."""
    if num_qubits > max_qubits:
        raise DimensionError(
            f'{num_qubits} qubits exceeds the dense-matrix cap of {max_qubits}'
        )


def to_matrix(h: PauliHamiltonian, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """
    Dense 2^n x 2^n complex matrix of ``h``.

    Raises:
        DimensionError: If ``h.num_qubits`` exceeds ``max_qubits``.
    """
    check_dimension(h.num_qubits, max_qubits)
    return terms_to_matrix(h.terms, h.num_qubits)


def terms_to_matrix(terms: Iterable[PauliTerm], num_qubits: int) -> np.ndarray:
    """Dense sum of (possibly complex-weighted) terms."""
    dimension = 2 ** num_qubits
    basis = np.arange(dimension)
    matrix = np.zeros((dimension, dimension), dtype=complex)
    for term in terms:
        _, targets, phase = term_action(term.factors, num_qubits)
        matrix[targets, basis] += term.coefficient * phase
    return matrix


def pauli_string_hamiltonian(coefficient: float, axis: str, indices: Iterable[int], num_qubits: int) -> PauliHamiltonian:
    """Sum over ``indices`` of ``coefficient * sigma^axis_i``."""
    terms = [PauliTerm(coefficient, [(index, axis)]) for index in indices]
    return PauliHamiltonian.from_terms(terms, num_qubits)
