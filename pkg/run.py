"""
Main entry point for anneal-certify.
Builds the runtime from the environment's configuration and dispatches the CLI.
"""

import os
import sys

from anneal_certify import create_app
from anneal_certify.cli import run
from config import get_config

if __name__ == '__main__':
    env = os.getenv('ANNEAL_CERTIFY_ENV', 'development')
    app = create_app(get_config(env))
    sys.exit(run(sys.argv[1:], app))
