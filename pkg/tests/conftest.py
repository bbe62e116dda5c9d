import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(20240817)))


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: full-scale acceptance criteria (slow)")
