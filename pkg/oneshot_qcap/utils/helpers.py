import math
import re
from enum import Enum
from typing import Any, Sequence, Tuple


from oneshot_qcap.config import QcapConfig


class ValidationResult(Enum):
    """Validation result codes."""
    VALID = "valid"
    NOT_A_NUMBER = "not_a_number"
    OUT_OF_RANGE = "out_of_range"
    INVALID_EPS = "invalid_eps"
    INVALID_EPS_PRIME = "invalid_eps_prime"
    INVALID_DELTA = "invalid_delta"
    INVALID_DELTA_PRIME = "invalid_delta_prime"
    INVALID_GAMMA = "invalid_gamma"
    INVALID_FORMAT = "invalid_format"


def _as_finite(value: Any):
    try:
        number = float(value)
    except (TypeError, ValueError):
        return None
    return number if math.isfinite(number) else None


def validate_probability(value: Any) -> bool:
    """
    Validate a parameter in the closed interval [0, 1].

    Args:
        value: Number to validate

    Returns:
        bool: True if valid, False otherwise
    """
    number = _as_finite(value)
    return number is not None and 0.0 <= number <= 1.0


def validate_slacks(eps: Any, eps_prime: Any, delta: Any,
                    delta_prime: Any, gamma: Any) -> Tuple[bool, ValidationResult]:
    """
    Validate the slack parameters of the coding theorems.

    Args:
        eps: Public error parameter, in (0, 1)
        eps_prime: Privacy error parameter, in (0, 1)
        delta: In (0, eps)
        delta_prime: In (0, sqrt(eps_prime))
        gamma: In (0, sqrt(eps_prime) - delta_prime)

    Returns:
        Tuple of (is_valid, validation_result)
    """
    values = [_as_finite(v) for v in (eps, eps_prime, delta, delta_prime, gamma)]
    if any(v is None for v in values):
        return False, ValidationResult.NOT_A_NUMBER
    eps, eps_prime, delta, delta_prime, gamma = values

    if not 0.0 < eps < 1.0:
        return False, ValidationResult.INVALID_EPS
    if not 0.0 < eps_prime < 1.0:
        return False, ValidationResult.INVALID_EPS_PRIME
    if not 0.0 < delta < eps:
        return False, ValidationResult.INVALID_DELTA
    if not 0.0 < delta_prime < math.sqrt(eps_prime):
        return False, ValidationResult.INVALID_DELTA_PRIME
    if not 0.0 < gamma < math.sqrt(eps_prime) - delta_prime:
        return False, ValidationResult.INVALID_GAMMA

    return True, ValidationResult.VALID


def is_valid_label(name: str) -> bool:
    """
    Validate a system label name.

    Args:
        name: Label to validate

    Returns:
        bool: True if valid, False otherwise
    """
    if not name or len(name) > 16:
        return False
    return bool(re.match(r'^[A-Za-z][A-Za-z0-9_\']*$', name))


def parse_complex(entry: Any) -> complex:
    """
    Parse a complex number written as an [re, im] pair (or a bare real).

    Args:
        entry: Pair or number

    Returns:
        complex: Parsed value

    Raises:
        ValueError: if the entry has the wrong shape
    """
    if isinstance(entry, (int, float)):
        return complex(float(entry), 0.0)
    if isinstance(entry, Sequence) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise ValueError(f"expected [re, im], got {entry!r}")


def format_float(value: float) -> str:
    """
    Format a float at 12 significant digits, with explicit infinities.

    Args:
        value: Number to format

    Returns:
        str: Formatted number
    """
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return QcapConfig.FLOAT_FORMAT % value


def format_duration(seconds: float) -> str:
    """
    Format duration in seconds to human readable string.

    Args:
        seconds: Duration in seconds

    Returns:
        str: Formatted duration string
    """
    if seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        minutes = seconds / 60
        return f"{minutes:.1f}m"
    else:
        hours = seconds / 3600
        return f"{hours:.1f}h"
