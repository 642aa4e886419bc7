import pytest

from wittingqkd import WittingConfiguration
from wittingqkd.marking import exhaustive_scan
from wittingqkd.symmetry import generate_group


@pytest.fixture(scope="session")
def config() -> WittingConfiguration:
    return WittingConfiguration()


@pytest.fixture(scope="session")
def group(config):
    return generate_group(config)


@pytest.fixture(scope="session")
def scan(config):
    return exhaustive_scan(config)
