"""
Application factory for anneal-certify.
Builds the runtime context (configuration + logging) shared by the CLI,
the experiment harness and the tests.
"""

import logging
import sys

from pythonjsonlogger import jsonlogger

__version__ = '1.0.0'

LOG_FIELDS = '%(asctime)s %(levelname)s %(name)s %(message)s'


class AnnealApp:
    """Runtime context: a flat config dict plus the package logger."""

    def __init__(self, name='anneal_certify'):
        self.name = name
        self.config = {}
        self.logger = logging.getLogger(name)

    def config_from_object(self, obj):
        """Copy upper-case attributes of a config class into the config dict."""
        for key in dir(obj):
            if key.isupper():
                self.config[key] = getattr(obj, key)


def create_app(config_class):
    """
    Application factory pattern.
    Creates and configures the anneal-certify runtime.

    Args:
        config_class: Configuration class to use

    Returns:
        AnnealApp instance
    """
    app = AnnealApp()
    app.config_from_object(config_class)

    configure_logging(app)

    if hasattr(config_class, 'init_app'):
        config_class.init_app(app)

    app.logger.debug('anneal-certify initialised', extra={
        'threads': app.config.get('THREADS'),
        'env_testing': app.config.get('TESTING'),
    })
    return app


def configure_logging(app):
    """Install a stderr handler on the package logger (JSON or plain text)."""
    logger = logging.getLogger('anneal_certify')
    logger.setLevel(app.config.get('LOG_LEVEL', 'INFO'))

    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    if app.config.get('LOG_FORMAT', 'json') == 'json':
        handler.setFormatter(jsonlogger.JsonFormatter(LOG_FIELDS))
    else:
        handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    logger.addHandler(handler)
    # tests capture through the root logger
    logger.propagate = bool(app.config.get('TESTING'))
    return logger
