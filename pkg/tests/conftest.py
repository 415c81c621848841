"""Test configuration and fixtures."""
import logging

import pytest

from analysis import catalog
from shared.config import Settings, get_settings
from simulation.graph import sample_graph


@pytest.fixture
def settings() -> Settings:
    return get_settings()


@pytest.fixture
def coarse_settings() -> Settings:
    """Cheaper grid and spectrum for tests that do not check anchors."""
    return Settings(grid_points=256, s_max=10, spectrum_dps=40)


@pytest.fixture
def regular_pair():
    return catalog.regular_3_6()


@pytest.fixture
def variance_pair():
    return catalog.variance_example()


@pytest.fixture
def final_pair():
    return catalog.optim_final()


@pytest.fixture
def small_graph(regular_pair):
    """A (3,6)-regular code with 12 variables and 6 checks."""
    return sample_graph(12, regular_pair, seed=7)


@pytest.fixture(autouse=True)
def restore_root_logging():
    """The CLI reconfigures the root logger; put the handlers back afterwards."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
