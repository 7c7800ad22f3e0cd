import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), ".."))

from utils.quadfield import make_field  # noqa: E402

TEST_PREC = 128


@pytest.fixture(scope="session")
def field7():
    return make_field(7)


@pytest.fixture(scope="session")
def field11():
    return make_field(11)


@pytest.fixture(scope="session")
def field23():
    return make_field(23)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
