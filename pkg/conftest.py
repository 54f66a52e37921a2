"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from app.src.derivator import ContinuousPart, Derivator, JumpSet
from app.src.oscillator import example1_derivator


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running convergence cases (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def identity_d():
    """g(t) = t on [0, 2]."""
    return Derivator.identity(2.0)


@pytest.fixture
def one_jump_d():
    """g(t) = t on [0, 2] plus a unit jump at 0.5."""
    return Derivator.identity(2.0, [(0.5, 1.0)])


@pytest.fixture
def two_jump_d():
    return Derivator.identity(2.0, [(0.5, 0.5), (1.25, 0.25)])


@pytest.fixture
def gremark_d():
    """Slope 1 on [0, 1), flat on [1, 2], slope 1 on [2, 3]."""
    return Derivator(ContinuousPart.piecewise_linear([(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)], 3.0))


@pytest.fixture
def flat_jump_d():
    """Flat segment [1, 2] with a jump inside it, plus jumps on the increasing parts."""
    cont = ContinuousPart.piecewise_linear([(0.0, 1.0), (1.0, 0.0), (2.0, 0.5)], 3.0)
    return Derivator(cont, JumpSet.from_pairs([(0.6, 0.4), (1.5, 0.5), (2.5, 0.3)]))


@pytest.fixture
def g2_d():
    """Staircase saw with jumps of 1/3 at k*pi/4 on [0, 8.5]."""
    return example1_derivator("g2", 1.0 / 3.0, 8.5)


@pytest.fixture
def g1_short():
    """g1 = t plus jumps of 1/3 at k*pi/4, on [0, 2.5]."""
    return example1_derivator("g1", 1.0 / 3.0, 2.5)


def _random_derivator(rng, T=2.0, max_jumps=4):
    # Flats only in the middle piece, so the window conditions always hold.
    n_pieces = int(rng.integers(1, 4))
    cuts = np.sort(rng.uniform(0.1 * T, 0.9 * T, n_pieces - 1)).tolist()
    slopes = rng.uniform(0.2, 2.0, n_pieces).tolist()
    if n_pieces == 3 and rng.random() < 0.5:
        slopes[1] = 0.0
    bps = list(zip([0.0] + cuts, slopes))
    n_jumps = int(rng.integers(1, max_jumps + 1))
    times = np.sort(rng.uniform(0.05 * T, 0.95 * T, n_jumps))
    sizes = rng.uniform(0.05, 0.8, n_jumps)
    return Derivator(ContinuousPart.piecewise_linear(bps, T), JumpSet.from_pairs(list(zip(times, sizes))))


@pytest.fixture
def make_derivator(rng):
    """Factory for random valid derivators drawn from the shared generator."""
    def make(T=2.0, max_jumps=4):
        return _random_derivator(rng, T, max_jumps)
    return make
