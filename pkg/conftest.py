"""
Shared fixtures for the anneal-certify test suite.
"""

import json
import os

import numpy as np
import pytest

from anneal_certify import create_app
from anneal_certify.models.pauli import PauliHamiltonian, PauliTerm
from anneal_certify.services.dynamics_service import default_driver
from anneal_certify.services.pauli_service import load_hamiltonian, to_matrix
from anneal_certify.services.spectrum_service import diagonalize
from config import TestingConfig

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')
H2_PATH = os.path.join(DATA_DIR, 'h2_0.65A.ham')
H2_GOLDEN_PATH = os.path.join(DATA_DIR, 'h2_0.65A.golden.json')
FIELD_PAIR_PATH = os.path.join(DATA_DIR, 'field_pair.ham')

# Single qubit, H_P = -Z: E0 = -1, E1 = 1, minimum gap sqrt(2) along the schedule
TOY_HAM_TEXT = 'qubits 1\n-1.0 Z0\n'


def jacobi_eigenvalues(matrix, tol=1e-13, max_sweeps=60):
    """
    Cyclic Jacobi eigenvalues of a Hermitian matrix, used as a reference
    solver independent of LAPACK. Works on the real symmetric embedding
    [[A, -B], [B, A]] of A + iB, whose spectrum is that of the input with
    every eigenvalue doubled.
    """
    matrix = np.asarray(matrix, dtype=complex)
    a = np.block([[matrix.real, -matrix.imag], [matrix.imag, matrix.real]])
    n = a.shape[0]
    for _ in range(max_sweeps):
        if np.sqrt(np.sum(np.tril(a, -1) ** 2)) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rotation = np.eye(n)
                rotation[p, p] = c
                rotation[q, q] = c
                rotation[p, q] = s
                rotation[q, p] = -s
                a = rotation.T @ a @ rotation
    return np.sort(np.diag(a))[::2]


@pytest.fixture(scope='session')
def app():
    """Runtime built from the testing configuration."""
    return create_app(TestingConfig)


@pytest.fixture(scope='session')
def h2_path():
    return H2_PATH


@pytest.fixture(scope='session')
def h2():
    return load_hamiltonian(H2_PATH)


@pytest.fixture(scope='session')
def h2_driver(h2):
    return default_driver(h2.num_qubits)


@pytest.fixture(scope='session')
def h2_spectrum(h2):
    return diagonalize(to_matrix(h2))


@pytest.fixture(scope='session')
def golden():
    with open(H2_GOLDEN_PATH, 'r', encoding='utf-8') as handle:
        return json.load(handle)


@pytest.fixture(scope='session')
def toy():
    return PauliHamiltonian.from_terms([PauliTerm(-1.0, [(0, 'Z')])], 1)


@pytest.fixture(scope='session')
def toy_driver():
    return default_driver(1)


@pytest.fixture
def toy_path(tmp_path):
    path = tmp_path / 'toy.ham'
    path.write_text(TOY_HAM_TEXT, encoding='utf-8')
    return str(path)


@pytest.fixture(scope='session')
def field_pair_path():
    return FIELD_PAIR_PATH


@pytest.fixture(scope='session')
def field_pair():
    return load_hamiltonian(FIELD_PAIR_PATH)
