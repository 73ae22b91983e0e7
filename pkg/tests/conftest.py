import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def one_d():
    """Single column x = (1, 1), response y = (2, 0)."""
    return np.ones((2, 1)), np.array([2.0, 0.0])
