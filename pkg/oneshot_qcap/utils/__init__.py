"""
Utility modules for the one-shot capacity toolkit.
"""

from .logger import get_logger, setup_logging, RunLogger
from .helpers import (
    ValidationResult,
    validate_probability,
    validate_slacks,
    format_float,
    format_duration,
)
from .workers import parallel_map, WorkerPool

__all__ = [
    'get_logger',
    'setup_logging',
    'RunLogger',
    'ValidationResult',
    'validate_probability',
    'validate_slacks',
    'format_float',
    'format_duration',
    'parallel_map',
    'WorkerPool',
]
