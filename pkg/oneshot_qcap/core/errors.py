"""
Exception hierarchy of the toolkit.

Every error carries the process exit code the command line reports for it.
"""

from enum import IntEnum


class ExitCode(IntEnum):
    """Process exit codes."""
    SUCCESS = 0
    PROPERTY_FAILURE = 1
    INPUT_ERROR = 2
    RESOURCE_CAP = 3


class QcapError(Exception):
    """Base class for toolkit errors."""
    exit_code = ExitCode.PROPERTY_FAILURE


class InputError(QcapError):
    """Invalid user input: bad states, labels, parameters or documents."""
    exit_code = ExitCode.INPUT_ERROR


class LabelError(InputError):
    """Unknown or colliding system label."""


class DimensionError(InputError):
    """Operator or channel dimensions do not fit together."""


class StateValidationError(InputError):
    """An operator violates the invariants of its declared kind."""


class DomainError(InputError, ValueError):
    """A scalar argument lies outside its admissible range."""


class SlackError(DomainError):
    """Slack parameters violate their interval constraints."""


class DocumentError(InputError):
    """A JSON input document is malformed."""


class AlphabetTooLargeError(InputError):
    """Sub-alphabet search requested beyond the exact-search limit."""


class BudgetExceededError(QcapError):
    """A dimension, branch or sample budget would be exceeded."""
    exit_code = ExitCode.RESOURCE_CAP


class PropertyViolation(QcapError):
    """A checked inequality or invariant failed numerically."""
    exit_code = ExitCode.PROPERTY_FAILURE


class SolverError(QcapError):
    """Internal numerical failure of an iterative solver."""
    exit_code = ExitCode.PROPERTY_FAILURE
