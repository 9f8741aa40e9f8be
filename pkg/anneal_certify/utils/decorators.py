"""
Custom decorators for anneal-certify commands.
"""

import logging
from functools import wraps

import click

from anneal_certify.utils.error_handlers import AnnealCertifyError, exit_code_for, format_error_line

logger = logging.getLogger(__name__)


def reports_errors(fn):
    """
    Turn domain failures inside a command into the one-line error format
    and the matching exit code.

    Usage:
        @click.command()
        @reports_errors
        def some_command():
            pass
    """
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.exceptions.ClickException:
            raise
        except (AnnealCertifyError, ArithmeticError, ValueError, OSError) as e:
            code = exit_code_for(e)
            logger.debug('Command failed', extra={'error_class': e.__class__.__name__, 'exit_code': code})
            click.echo(format_error_line(e), err=True)
            raise click.exceptions.Exit(code)

    return wrapper

