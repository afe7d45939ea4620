"""
Shared fixtures for the foldkit test suite.

Slow Monte-Carlo checks run only with FOLDKIT_RUN_SLOW=1.
"""

import os

import numpy as np
import pytest

from foldkit.moments.schemas import MomentTargets, SampleSet

RUN_SLOW = os.environ.get("FOLDKIT_RUN_SLOW") == "1"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale Monte-Carlo runs (set FOLDKIT_RUN_SLOW=1)")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip_slow = pytest.mark.skip(reason="set FOLDKIT_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_orthonormal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q


def noise_free_targets(rng, pl, pr, ml, mr, count=4, k=1):
    """Targets exactly in span(b0 kron a0) with identity covariance."""
    a0 = rng.standard_normal((pl, ml))
    b0 = rng.standard_normal((pr, mr))
    f0 = rng.standard_normal((count, ml * mr, k))
    matrices = np.kron(b0, a0) @ f0
    weights = rng.random(count) + 0.5
    targets = MomentTargets.from_components(matrices, weights / weights.sum(), pl, pr)
    return targets, a0, b0


@pytest.fixture
def small_continuous(rng):
    X = rng.standard_normal((60, 3, 2))
    y = X[:, 0, 0] + 0.5 * X[:, 1, 1] + 0.1 * rng.standard_normal(60)
    return SampleSet(X=X, y=y, response_kind="continuous")


@pytest.fixture
def separable_toy(rng):
    """Two classes that differ by a rank-one mean shift in cell (0, 0)."""
    n = 40
    y = np.repeat([0.0, 1.0], n // 2)
    X = 0.3 * rng.standard_normal((n, 4, 4))
    X[y == 1, 0, 0] += 5.0
    return SampleSet(X=X, y=y, response_kind="categorical")
