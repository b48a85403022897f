"""
Shared pytest fixtures.
"""

from pathlib import Path

import pytest

from src.models.workload import LayerSpec
from src.services.fixtures import toy_architectures

CONFIGS = Path(__file__).parent.parent / "configs"


@pytest.fixture(autouse=True)
def console_only_logging(monkeypatch):
    """Keep test runs from writing daily log files."""
    monkeypatch.setenv("MAPSEARCH_LOG_TO_FILE", "false")


@pytest.fixture
def archs():
    return toy_architectures()


@pytest.fixture
def toy_layer():
    return LayerSpec(name="toy", K=4, C=4)


@pytest.fixture
def configs_dir():
    return CONFIGS
