"""Shared fixtures for the test suites."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def distinct(rng, size, low=-3.0, high=3.0, gap=0.2):
    """Random values with pairwise separation of at least ``gap``."""
    while True:
        values = rng.uniform(low, high, size)
        if size < 2 or np.min(np.diff(np.sort(values))) >= gap:
            return values


def nonzero(rng, size, low=0.2, high=1.0):
    return rng.uniform(low, high, size) * rng.choice([-1.0, 1.0], size)


def slopes(rng, size, low=0.3, high=3.0):
    """Distinct nonzero slopes bounded away from zero."""
    return distinct(rng, size, low, high) * rng.choice([-1.0, 1.0], size)
