"""
Pytest configuration file for the symtrunc package.

This file contains shared fixtures and configuration for the test suite.
"""

import os
import sys

import numpy as np
import pytest

# Add the package root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from symtrunc.core.domain import make_domain
from symtrunc.core.stepfn import StepFunction
from symtrunc.utils.progress import set_progress_disabled


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: refinement studies on fine grids")


@pytest.fixture(autouse=True)
def quiet_progress():
    """Keep tqdm bars out of the test output."""
    set_progress_disabled(True)
    yield
    set_progress_disabled(False)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def interval_domain():
    """Interval (0, 1) with 32 cells."""
    return make_domain('interval', 32)


@pytest.fixture
def square_domain():
    """Unit-measure square with 16 x 16 cells."""
    return make_domain('square', 16)


@pytest.fixture
def disk_domain():
    """Unit-measure disk, 24 cells across."""
    return make_domain('disk', 24)


@pytest.fixture
def sample_step():
    """
    A step function with four pieces, one of them negative.

    Returns
    -------
    StepFunction
        Values 1, 3, -2, 0 on (0, .1], (.1, .4], (.4, .7], (.7, 1].
    """
    return StepFunction([0.0, 0.1, 0.4, 0.7, 1.0], [1.0, 3.0, -2.0, 0.0])


@pytest.fixture
def sample_interval_family():
    """The interval family {(0.01, 0.5), (0.6, 0.9)}."""
    from symtrunc.core.majorize import IntervalFamily

    return IntervalFamily.from_pairs([(0.01, 0.5), (0.6, 0.9)])
