"""
Tests for robust item weights and the robust folding path.
"""

import numpy as np
import pytest

from foldkit.envelope.schemas import FoldingConfig
from foldkit.envelope.solver import fit_folded
from foldkit.linalg.schemas import InversionMode
from foldkit.moments.robust import mahalanobis_distances, robust_weights
from foldkit.moments.schemas import SampleSet


def _spherical(n=200, seed=8):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 2, 2))
    y = rng.integers(0, 2, size=n)
    return SampleSet(X=X, y=y, response_kind="categorical")


def test_cutoff_one_gives_uniform_weights():
    samples = _spherical()
    weights = robust_weights(samples, 1.0)
    np.testing.assert_allclose(weights.w, np.full(samples.n, 1.0 / samples.n), atol=1e-15)
    assert weights.cutoff == pytest.approx(mahalanobis_distances(samples).max())


def test_gross_outlier_is_downweighted():
    samples = _spherical()
    X = np.array(samples.X)
    X[0, 0, 0] = 100.0
    contaminated = SampleSet(X=X, y=samples.y, response_kind="categorical")

    weights = robust_weights(contaminated, 0.9)
    assert weights.w[0] < 1.0 / (10 * contaminated.n)
    assert weights.w.sum() == pytest.approx(1.0)
    assert np.all(weights.w >= 0)


def test_weights_decrease_with_distance():
    samples = _spherical()
    d = mahalanobis_distances(samples)
    w = robust_weights(samples, 0.5).w
    order = np.argsort(d)
    assert np.all(np.diff(w[order]) <= 1e-15)


def test_weights_follow_sample_permutation():
    samples = _spherical()
    perm = np.random.default_rng(2).permutation(samples.n)
    permuted = SampleSet(X=samples.X[perm], y=samples.y[perm], response_kind="categorical")
    np.testing.assert_allclose(robust_weights(permuted, 0.8).w, robust_weights(samples, 0.8).w[perm], atol=1e-14)


def test_identical_items_fall_back_to_uniform(caplog):
    X = np.ones((4, 2, 2))
    samples = SampleSet(X=X, y=[0, 1, 0, 1], response_kind="categorical")
    weights = robust_weights(samples, 0.9, InversionMode.pseudo())
    np.testing.assert_allclose(weights.w, 0.25)
    assert "uniform" in caplog.text


def test_cutoff_quantile_range():
    with pytest.raises(ValueError):
        robust_weights(_spherical(), 0.0)


def test_robust_fit_with_cutoff_one_matches_plain_fit():
    samples = _spherical(n=300, seed=4)
    config = FoldingConfig(ml=1, mr=1, restarts=2, seed=9)
    plain = fit_folded(samples, "dr", None, config)
    robust = fit_folded(samples, "dr", None, config, robust_cutoff=1.0)
    assert robust.objective == pytest.approx(plain.objective, rel=1e-8, abs=1e-12)
