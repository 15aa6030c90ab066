import os
from typing import Optional


class QcapConfig:
    """Toolkit configuration settings"""
    VERSION = "1.0.0"
    DEFAULT_DIM_CAP = 4096
    DEFAULT_BRANCH_CAP = 65536
    DEFAULT_SWEEP_SAMPLE_CAP = 5000
    DEFAULT_SEED = 0
    DEFAULT_WORKERS = 4
    FLOAT_FORMAT = "%.12g"
    ENCODING = "utf-8"

    # eps, eps_prime, delta, delta_prime, gamma
    DEFAULT_SLACKS = (0.1, 0.1, 0.05, 0.1, 0.05)

    # set by the --dim-cap flag; wins over the environment
    _dim_cap_override: Optional[int] = None

    @classmethod
    def dim_cap(cls) -> int:
        if cls._dim_cap_override is not None:
            return cls._dim_cap_override
        return int(os.getenv("ONESHOT_QCAP_DIM_CAP", cls.DEFAULT_DIM_CAP))

    @classmethod
    def override_dim_cap(cls, cap: Optional[int]):
        """Install (or clear, with None) a process-wide dimension cap."""
        cls._dim_cap_override = None if cap is None else int(cap)

    @classmethod
    def branch_cap(cls) -> int:
        return int(os.getenv("ONESHOT_QCAP_BRANCH_CAP", cls.DEFAULT_BRANCH_CAP))

    @classmethod
    def workers(cls) -> int:
        return max(1, int(os.getenv("ONESHOT_QCAP_WORKERS", cls.DEFAULT_WORKERS)))

    @classmethod
    def get_sweep_config(cls):
        return {
            "sample_cap": cls.DEFAULT_SWEEP_SAMPLE_CAP,
            "workers": cls.workers(),
            "float_format": cls.FLOAT_FORMAT,
        }

    @classmethod
    def get_logging_config(cls):
        log_dir = os.getenv("ONESHOT_QCAP_LOG_DIR")
        return {
            "log_to_file": bool(log_dir),
            "log_dir": log_dir or "logs",
        }
