import logging
import os
import sys
from datetime import datetime
from typing import Any, Dict, Optional

from oneshot_qcap.config import QcapConfig


def setup_logging(
    name: str,
    log_level: int = logging.INFO,
    log_to_file: Optional[bool] = None,
    log_dir: Optional[str] = None
) -> logging.Logger:
    """
    Set up logging configuration for a module.

    Args:
        name: Logger name (usually __name__)
        log_level: Logging level (default: INFO)
        log_to_file: Whether to log to file (default: only when
            ONESHOT_QCAP_LOG_DIR is set)
        log_dir: Directory for log files (default: ONESHOT_QCAP_LOG_DIR or "logs")

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    logging_config = QcapConfig.get_logging_config()
    if log_to_file is None:
        log_to_file = logging_config["log_to_file"]
    if log_dir is None:
        log_dir = logging_config["log_dir"]

    logger.setLevel(log_level)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # stdout carries data, diagnostics go to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_to_file:
        try:
            if not os.path.exists(log_dir):
                os.makedirs(log_dir)

            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            log_file = os.path.join(log_dir, f"oneshot_qcap_{timestamp}.log")

            file_handler = logging.FileHandler(log_file, encoding=QcapConfig.ENCODING)
            file_handler.setLevel(log_level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

        except OSError as e:
            logger.warning(f"Failed to setup file logging: {e}")

    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a configured logger instance.

    Args:
        name: Logger name (usually __name__)

    Returns:
        Configured logger instance
    """
    return setup_logging(name)


class RunLogger:
    """
    Logger with run-specific events for the command line front end.
    """

    def __init__(self, name: str, command: str = "verify"):
        self.logger = get_logger(name)
        self.command = command

    def run_start(self, config: Dict[str, Any]):
        """Log command startup."""
        self.logger.info(f"{self.command} started with {config}")

    def run_stop(self, exit_code: int, duration: str):
        """Log command completion."""
        self.logger.info(f"{self.command} finished with exit code {exit_code} after {duration}")

    def suite_result(self, name: str, instances: int, violations: int, max_violation: float):
        """Log the outcome of one property suite."""
        level = logging.INFO if violations == 0 else logging.WARNING
        self.logger.log(
            level,
            f"suite {name}: {instances} instances, {violations} violations, "
            f"max violation {max_violation:.3g}"
        )

    def budget_exceeded(self, what: str, needed: int, cap: int):
        """Log a resource budget refusal."""
        self.logger.warning(f"{what} needs {needed}, cap is {cap}")

    def error(self, error_msg: str, exc_info: bool = False):
        """Log error with optional exception info."""
        self.logger.error(error_msg, exc_info=exc_info)

    def warning(self, warning_msg: str):
        """Log warning."""
        self.logger.warning(warning_msg)
