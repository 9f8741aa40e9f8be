"""
Error handlers for anneal-certify.
Exception hierarchy plus the single-line error format used by the CLI.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_NOT_CERTIFIED = 3


class AnnealCertifyError(Exception):
    """Base error; carries the CLI exit code it maps to."""

    exit_code = EXIT_COMPUTATION
    code = 'error'

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context


class UsageError(AnnealCertifyError, ValueError):
    """Bad input from the caller (flags, files, parameters)."""

    exit_code = EXIT_USAGE
    code = 'usage'


class HamiltonianFormatError(UsageError):
    """Malformed Hamiltonian document."""

    code = 'hamiltonian_format'

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message, line_number=line_number)
        self.line_number = line_number


class ComputationError(AnnealCertifyError):
    """A numerical procedure failed."""

    code = 'computation'


class DimensionError(ComputationError, ValueError):
    """Operands of incompatible size, or a size above the dense-matrix cap."""

    code = 'dimension'


class DiagonalizationError(ComputationError):
    """Eigensolver input not Hermitian or solver did not converge."""

    code = 'diagonalization'


class IntegrationError(ComputationError):
    """Time integration drifted beyond tolerance."""

    code = 'integration'


class PositivityError(IntegrationError):
    """Density matrix lost positivity beyond tolerance."""

    code = 'positivity'


class TheoremViolationError(ComputationError):
    """A brute-force check of the variance bound produced a negative margin."""

    code = 'theorem_violation'


def format_error_line(error):
    """
    Render an error as the machine-parsable line ``error: <code>: <detail>``.

    Args:
        error (Exception): Error to render

    Returns:
        str: Single line, no trailing newline
    """
    exit_code = getattr(error, 'exit_code', EXIT_COMPUTATION)
    detail = str(error).replace('\n', ' ').strip() or error.__class__.__name__
    return f'error: {exit_code}: {detail}'


def exit_code_for(error):
    """Map an exception to the CLI exit code contract."""
    if isinstance(error, AnnealCertifyError):
        return error.exit_code
    if isinstance(error, (ValueError, OSError)):
        return EXIT_USAGE
    return EXIT_COMPUTATION
