import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root to Python path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from oneshot_qcap.config import QcapConfig  # noqa: E402

FIXTURES = Path(project_root) / "oneshot_qcap" / "fixtures"


@pytest.fixture
def rng():
    """Seeded generator; every test starts from the same stream."""
    return np.random.default_rng(20240917)


@pytest.fixture
def fixture_path():
    def _path(name: str) -> Path:
        return FIXTURES / name
    return _path


@pytest.fixture(autouse=True)
def _reset_dim_cap():
    yield
    QcapConfig.override_dim_cap(None)
