"""
Shared fixtures for the InfoRel test suites
"""

import os
import sys

import numpy as np
import pytest

# Add the project root to the Python path (go up one level from tests folder)
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.models.network_models import LinkKind
from src.models.sampler_models import RunConfig
from src.services.data_service import DataService
from src.services.simulation_service import plant_communities


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow statistical suites")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def data_service():
    return DataService()


@pytest.fixture
def planted_binary():
    """12 entities in 2 well separated blocks"""
    return plant_communities(12, 2, 0.8, LinkKind.BINARY, seed=3)


@pytest.fixture
def planted_count():
    return plant_communities(10, 2, 0.5, LinkKind.COUNT, seed=4)


@pytest.fixture
def quick_run():
    return RunConfig(iterations=6, burn_in=2, thinning=1, chains=1, k_max=3, init_k=2, seed=7)

