"""
Configuration module for anneal-certify.
Handles different environment configurations (Development, Testing, Production).
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _threads_default():
    """Thread cap from the environment, falling back to the CPU count."""
    value = os.getenv('THREADS') or os.getenv('ANNEAL_CERTIFY_THREADS')
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


class Config:
    """Base configuration class with common settings."""

    DEBUG = False
    TESTING = False

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FORMAT = os.getenv('LOG_FORMAT', 'json')  # json or text

    # Harness parallelism
    THREADS = _threads_default()

    # Linear algebra limits
    MAX_QUBITS = int(os.getenv('MAX_QUBITS', 10))
    DEGENERACY_TOL = float(os.getenv('DEGENERACY_TOL', 1e-9))

    # Integrator settings (energies in GHz read as rad/ns, times in ns)
    MAX_PHASE_PER_STEP = float(os.getenv('MAX_PHASE_PER_STEP', 0.02))
    OPEN_MAX_PHASE_PER_STEP = float(os.getenv('OPEN_MAX_PHASE_PER_STEP', 0.05))
    MIN_STEPS = int(os.getenv('MIN_STEPS', 10))

    # Threshold search
    BISECTION_RTOL = float(os.getenv('BISECTION_RTOL', 1e-2))

    # Default sweep grids
    SWEEP_T_MIN = float(os.getenv('SWEEP_T_MIN', 1.0))
    SWEEP_T_MAX = float(os.getenv('SWEEP_T_MAX', 2000.0))
    SWEEP_T_POINTS = int(os.getenv('SWEEP_T_POINTS', 40))
    SWEEP_GAMMA_MIN = float(os.getenv('SWEEP_GAMMA_MIN', 1e-5))
    SWEEP_GAMMA_MAX = float(os.getenv('SWEEP_GAMMA_MAX', 1e-1))
    SWEEP_GAMMA_POINTS = int(os.getenv('SWEEP_GAMMA_POINTS', 25))
    HALFWIDTH_POINTS = int(os.getenv('HALFWIDTH_POINTS', 30))
    HALFWIDTH_SPAN = float(os.getenv('HALFWIDTH_SPAN', 1.2))  # in units of (E1 - E0)/2

    @classmethod
    def init_app(cls, app):
        """Hook for environment-specific initialization."""
        pass


class DevelopmentConfig(Config):
    """Development environment configuration."""

    DEBUG = True
    TESTING = False

    # More verbose logging in development
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'DEBUG')
    LOG_FORMAT = os.getenv('LOG_FORMAT', 'text')


class TestingConfig(Config):
    """Testing environment configuration."""

    DEBUG = False
    TESTING = True

    LOG_LEVEL = 'WARNING'
    LOG_FORMAT = 'text'

    # Serial, small grids keep the suite fast
    THREADS = 1
    SWEEP_T_MIN = 5.0
    SWEEP_T_MAX = 200.0
    SWEEP_T_POINTS = 4
    SWEEP_GAMMA_MIN = 1e-3
    SWEEP_GAMMA_MAX = 1e-1
    SWEEP_GAMMA_POINTS = 3
    HALFWIDTH_POINTS = 4


class ProductionConfig(Config):
    """Production environment configuration."""

    DEBUG = False
    TESTING = False

    # Production logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FORMAT = 'json'

    @classmethod
    def init_app(cls, app):
        """Initialize production-specific settings."""
        Config.init_app(app)

        if cls.THREADS < 1:
            raise ValueError(f'THREADS must be >= 1, got {cls.THREADS}')


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': DevelopmentConfig
}


def get_config(env=None):
    """Get configuration based on environment."""
    if env is None:
        env = os.getenv('ANNEAL_CERTIFY_ENV', 'development')
    return config.get(env, config['default'])
