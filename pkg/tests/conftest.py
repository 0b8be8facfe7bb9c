import numpy as np
import pytest

from convexprice.distribution import Uniform01
from convexprice.logs import configure_logging
from tests.helpers import market_of


@pytest.fixture
def uniform():
    return Uniform01()


@pytest.fixture
def three_vertex():
    return market_of(("A", 0.25, 1.0), ("M", 0.5, 0.6), ("B", 1.0, 0.25))


@pytest.fixture
def interior_market():
    return market_of(("A", 0.2, 1.0), ("X", 0.45, 0.4), ("C", 1.0, 0.2))


@pytest.fixture
def symmetric_pair():
    return market_of(("A", 0.25, 1.0), ("B", 1.0, 0.25))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def _fresh_logging():
    # CliRunner swaps sys.stderr while a command runs; rebind afterwards
    yield
    configure_logging()
