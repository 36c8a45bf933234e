"""
Shared pytest setup: same import path as main.py, plus per-test config and logger
"""

import sys
from pathlib import Path

import pytest

src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from core.matrix_store import MatrixStore  # noqa: E402
from core.run_config import RunConfig  # noqa: E402
from core.run_logger import EnumerationLogger  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "property_based: hypothesis property-based tests")
    config.addinivalue_line("markers", "slow: larger widths or full grid censuses")


@pytest.fixture
def run_config(tmp_path):
    return RunConfig(cache_dir=tmp_path / "cache", log_dir=str(tmp_path / "logs"), threads=1)


@pytest.fixture
def logger(run_config):
    enumeration_logger = EnumerationLogger(run_config.log_dir)
    yield enumeration_logger
    enumeration_logger.close()


@pytest.fixture
def store(run_config, logger):
    return MatrixStore(run_config, logger)
