import numpy as np
import pytest
from hypothesis import settings

from core.codegen import ConstructionConfig, construct_code
from core.gf2 import Gf2Matrix
from sim.context import CodeContext

settings.register_profile("default", settings(max_examples=100, deadline=None))
settings.register_profile("ci", settings(max_examples=1000, deadline=None))
settings.register_profile("thorough", settings(max_examples=10000, deadline=None))
settings.load_profile("default")

HAMMING_H = (
    (1, 1, 0, 1, 1, 0, 0),
    (1, 0, 1, 1, 0, 1, 0),
    (0, 1, 1, 1, 0, 0, 1),
)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run long Monte Carlo checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo check, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def hamming_h():
    return Gf2Matrix.from_rows(HAMMING_H)


@pytest.fixture
def hamming_context(hamming_h):
    return CodeContext.from_parity_check(hamming_h)


@pytest.fixture(scope="session")
def constructed_code():
    cfg = ConstructionConfig(seed=1, max_restarts=60, patience=10, attempts=8)
    return construct_code(cfg)


@pytest.fixture(scope="session")
def half_rate_context(constructed_code):
    return CodeContext.from_qc(constructed_code.qc, '12')


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
