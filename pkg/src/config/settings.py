"""
Configuration settings for the mapping scheduler.
Uses Pydantic for type safety and validation.
"""

import os
from typing import Optional

from pydantic import BaseModel, field_validator
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

ENV_PREFIX = "MAPSEARCH_"


class Settings(BaseModel):
    """Application settings with validation."""

    # Logging
    log_level: str = "INFO"
    log_dir: str = "data/logs"
    log_to_file: bool = True

    # Simulated annealing defaults
    sa_iterations: int = 1000
    sa_rho: float = 0.999
    sa_t0: float = 0.05
    sa_restarts: int = 1
    seed: int = 0

    # Engine selection
    selection_kappa: float = 1.0
    exhaustive_cap: int = 10**8
    tau_samples: int = 50

    # Execution
    workers: int = 1
    oracle_budget: int = 10**6

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v):
        """Validate log level."""
        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if v.upper() not in valid_levels:
            raise ValueError(f'Log level must be one of: {valid_levels}')
        return v.upper()

    @field_validator('sa_rho')
    @classmethod
    def validate_rho(cls, v):
        """Cooling factor must lie strictly between 0 and 1."""
        if not 0.0 < v < 1.0:
            raise ValueError('rho must be in (0, 1)')
        return v

    @field_validator('sa_t0', 'selection_kappa')
    @classmethod
    def validate_positive_real(cls, v):
        if v <= 0:
            raise ValueError('must be positive')
        return v

    @field_validator('sa_iterations', 'sa_restarts', 'exhaustive_cap',
                     'tau_samples', 'workers', 'oracle_budget')
    @classmethod
    def validate_positive_int(cls, v):
        if v < 1:
            raise ValueError('must be >= 1')
        return v


def _env(name: str, default: Optional[str] = None) -> Optional[str]:
    return os.getenv(f"{ENV_PREFIX}{name}", default)


def get_settings() -> Settings:
    """Get the settings instance built from the environment."""
    # Load environment variables
    load_dotenv()

    values = {
        'log_level': _env('LOG_LEVEL'),
        'log_dir': _env('LOG_DIR'),
        'log_to_file': _env('LOG_TO_FILE'),
        'sa_iterations': _env('SA_ITERATIONS'),
        'sa_rho': _env('SA_RHO'),
        'sa_t0': _env('SA_T0'),
        'sa_restarts': _env('SA_RESTARTS'),
        'seed': _env('SEED'),
        'selection_kappa': _env('SELECTION_KAPPA'),
        'exhaustive_cap': _env('EXHAUSTIVE_CAP'),
        'tau_samples': _env('TAU_SAMPLES'),
        'workers': _env('WORKERS'),
        'oracle_budget': _env('ORACLE_BUDGET'),
    }

    # Unset variables fall back to the model defaults
    return Settings(**{key: value for key, value in values.items() if value is not None})
