"""
Shared fixtures and oracles for the mixbound test suite.

Long acceptance-scale runs are marked `slow` and only run with --runslow.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from norms import BmoConfig, ball_offsets  # noqa: E402
from scenarios import random_band_field  # noqa: E402
from spectral import Grid, PhysicalField, SpectralField, to_spectral  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ============================================================
# Fixtures
# ============================================================

@pytest.fixture
def grid32():
    return Grid(32)


@pytest.fixture
def grid64():
    return Grid(64)


def sample(grid: Grid, fn) -> SpectralField:
    """Spectral form of fn(X, Y) sampled on the grid."""
    return to_spectral(PhysicalField.from_function(grid, fn))


def random_field(grid: Grid, seed: int, k_hi: float = None, k_lo: float = 1.0,
                 amplitude: float = 1.0) -> SpectralField:
    """Seeded random-phase field inside the n/4 band limit."""
    k_hi = grid.n // 4 if k_hi is None else k_hi
    return random_band_field(grid, np.random.default_rng(seed), k_lo, k_hi, 0.0, amplitude)


def brute_force_bmo(values: np.ndarray, cfg: BmoConfig) -> float:
    """Explicit loop over centers and radii, one ball at a time."""
    n = values.shape[0]
    best = 0.0
    for r in cfg.radii:
        ii, jj = ball_offsets(n, round(r * n, 9))
        for cx in range(0, n, cfg.center_stride):
            for cy in range(0, n, cfg.center_stride):
                ball = np.array([values[(cx + a) % n, (cy + b) % n] for a, b in zip(ii, jj)])
                best = max(best, float(np.mean(np.abs(ball - ball.mean()))))
    return best
