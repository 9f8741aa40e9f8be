"""
File handling utilities for anneal-certify.
Reading Hamiltonian and run-config files, writing results to a path or
stdout.
"""

import logging
import os
import re
from typing import Dict, Optional

import click

from anneal_certify.models.pauli import PauliHamiltonian
from anneal_certify.services.pauli_service import parse_hamiltonian
from anneal_certify.utils.error_handlers import UsageError

logger = logging.getLogger(__name__)

_CONFIG_LINE_RE = re.compile(r'^([A-Za-z][A-Za-z0-9_-]*)\s*=\s*(.*)$')


def read_text(path: str) -> str:
    """Read a UTF-8 file; unreadable paths are usage errors."""
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            return handle.read()
    except OSError as e:
        raise UsageError(f'Cannot read {path}: {e.strerror or e}')


def read_hamiltonian(path: str) -> PauliHamiltonian:
    """Load a Hamiltonian file, logging its size."""
    hamiltonian = parse_hamiltonian(read_text(path))
    logger.info('Hamiltonian loaded', extra={
        'path': path, 'terms': len(hamiltonian), 'num_qubits': hamiltonian.num_qubits,
    })
    return hamiltonian


def check_writable(path: Optional[str]):
    """Fail before any computation if the output directory does not exist."""
    if not path:
        return
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        raise UsageError(f'Cannot write {path}: directory {directory} is not writable')


def write_output(text: str, path: Optional[str] = None):
    """Write ``text`` to ``path``, or to stdout when no path is given."""
    if not path:
        click.echo(text, nl=False)
        return
    try:
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    except OSError as e:
        raise UsageError(f'Cannot write {path}: {e.strerror or e}')
    logger.info('Output written', extra={'path': path, 'bytes': len(text)})


def normalize_key(name: str) -> str:
    """``--offset-mode`` and ``offset-mode`` both become ``offset_mode``."""
    return name.lstrip('-').replace('-', '_')


def load_config_file(path: str) -> Dict[str, str]:
    """
    Parse a flat ``key = value`` run-config file. ``#`` starts a comment.

    Args:
        path (str): Config file path

    Returns:
        dict: Normalized flag name -> raw string value

    Raises:
        UsageError: Unreadable file, malformed line or duplicate key
    """
    values = {}
    for number, raw in enumerate(read_text(path).splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        match = _CONFIG_LINE_RE.match(line)
        if not match:
            raise UsageError(f'{path}: line {number}: expected key = value')
        key = normalize_key(match.group(1))
        if key in values:
            raise UsageError(f'{path}: line {number}: duplicate key {key}')
        values[key] = match.group(2).strip()
    return values
