"""
Tests for pre-screening, QDA and leave-one-out classification.
"""

import os

import numpy as np
import pytest
from scipy import stats

from foldkit.cli.io import read_dataset
from foldkit.core.exceptions import DimensionError, InputError, InsufficientSliceError, SingularityError
from foldkit.core.utils import derive_seed
from foldkit.envelope.schemas import FoldingConfig
from foldkit.linalg.schemas import InversionMode
from foldkit.moments.schemas import SampleSet
from foldkit.pipeline import loocv
from foldkit.pipeline.loocv import loocv_classify
from foldkit.pipeline.qda import qda_fit, qda_predict, qda_scores
from foldkit.pipeline.screening import apply_screen, prescreen

EEG_PATH = os.environ.get("FOLDKIT_EEG_PATH")


# -- pre-screening -----------------------------------------------------------

def test_full_screen_is_an_isometry(small_continuous):
    bases, screened = prescreen(small_continuous, 3, 2)
    np.testing.assert_allclose(bases.left.T @ bases.left, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(bases.right.T @ bases.right, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(
        np.linalg.norm(screened.X, axis=(1, 2)), np.linalg.norm(small_continuous.X, axis=(1, 2)), atol=1e-10
    )
    assert screened.ids == small_continuous.ids


def test_partial_screen_contracts_norms(rng):
    samples = SampleSet(X=rng.standard_normal((50, 6, 5)), y=rng.standard_normal(50))
    bases, screened = prescreen(samples, 2, 3)
    assert screened.X.shape == (50, 2, 3)
    assert np.all(np.linalg.norm(screened.X, axis=(1, 2)) <= np.linalg.norm(samples.X, axis=(1, 2)) + 1e-12)
    np.testing.assert_allclose(apply_screen(bases, samples.X[4]), screened.X[4], atol=1e-12)
    assert np.all(np.diff(bases.left_eigenvalues) <= 0)


def test_rank_one_data_recovers_its_factors(rng, caplog):
    u = np.array([3.0, 0.0, 4.0]) / 5.0
    v = np.array([0.0, 1.0, 0.0, 0.0])
    scale = rng.standard_normal(30)
    samples = SampleSet(X=scale[:, None, None] * np.outer(u, v), y=np.arange(30.0))
    bases, _ = prescreen(samples, 2, 1)
    assert abs(bases.left[:, 0] @ u) == pytest.approx(1.0)
    np.testing.assert_allclose(bases.right[:, 0], v, atol=1e-12)
    assert "rank 1" in caplog.text


def test_prescreen_is_deterministic(small_continuous):
    first, _ = prescreen(small_continuous, 2, 1)
    second, _ = prescreen(small_continuous, 2, 1)
    np.testing.assert_array_equal(first.left, second.left)
    np.testing.assert_array_equal(first.right, second.right)


def test_prescreen_sizes_are_bounded(small_continuous):
    with pytest.raises(DimensionError):
        prescreen(small_continuous, 4, 1)


# -- QDA ---------------------------------------------------------------------

def _translated_classes(shift):
    base = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    features = np.vstack([base - shift, base + shift])
    labels = np.repeat([0.0, 1.0], 4)
    return features, labels


def test_qda_breaks_ties_towards_smaller_label():
    features, labels = _translated_classes(np.array([2.0, 0.0]))
    model = qda_fit(features, labels)
    scores = qda_scores(model, np.zeros(2))
    assert scores[0, 0] == scores[0, 1]
    assert qda_predict(model, np.zeros(2))[0] == 0.0
    assert qda_predict(model, np.array([0.1, 0.0]))[0] == 1.0


def test_qda_one_dimensional_toy():
    a, b = np.sqrt(0.05), np.sqrt(0.75)
    features = np.array([-a, a, 2.0 - b, 2.0 + b])
    labels = np.array([0, 0, 1, 1])
    model = qda_fit(features, labels)
    np.testing.assert_allclose(model.classes[0].covariance, [[0.1]])
    np.testing.assert_allclose(model.classes[1].covariance, [[1.5]])
    np.testing.assert_array_equal(qda_predict(model, np.array([[0.0], [2.0]])), [0.0, 1.0])


def test_qda_scores_match_gaussian_log_densities(rng):
    features = np.vstack([rng.standard_normal((15, 3)), 2.0 + 0.5 * rng.standard_normal((25, 3))])
    labels = np.repeat([0.0, 1.0], [15, 25])
    model = qda_fit(features, labels)
    x = rng.standard_normal((5, 3))

    expected = np.column_stack([
        np.log(cls.prior) + stats.multivariate_normal(cls.mean, cls.covariance).logpdf(x)
        for cls in model.classes
    ])
    scores = qda_scores(model, x)
    # the discriminant drops the shared -d/2 log(2 pi)
    np.testing.assert_allclose(scores - scores[:, :1], expected - expected[:, :1], atol=1e-9)


def test_qda_is_affine_invariant(rng):
    features = np.vstack([rng.standard_normal((30, 2)), [1.0, -1.0] + 2.0 * rng.standard_normal((30, 2))])
    labels = np.repeat([0.0, 1.0], 30)
    G = np.array([[2.0, 0.5], [-0.3, 1.2]])
    moved = features @ G.T + np.array([5.0, -7.0])

    original = qda_predict(qda_fit(features, labels), features)
    transformed = qda_predict(qda_fit(moved, labels), moved)
    np.testing.assert_array_equal(original, transformed)


def test_qda_singular_class_covariance():
    t = np.arange(4.0)
    collinear = np.column_stack([t, 2.0 * t])
    features = np.vstack([collinear, collinear + [0.5, -3.0]])
    labels = np.repeat([0, 1], 4)
    with pytest.raises(SingularityError) as info:
        qda_fit(features, labels)
    assert "ridge" in str(info.value)
    model = qda_fit(features, labels, InversionMode.ridge(0.5))
    assert qda_predict(model, features[:1])[0] == 0.0


def test_qda_needs_two_members_per_class():
    with pytest.raises(InsufficientSliceError):
        qda_fit(np.array([0.0, 1.0, 2.0]), np.array([0, 1, 1]))
    with pytest.raises(InsufficientSliceError):
        qda_fit(np.array([0.0, 1.0, 2.0]), np.array([1, 1, 1]))


# -- leave-one-out -----------------------------------------------------------

def _config(**overrides):
    values = {"ml": 1, "mr": 1, "restarts": 2, "seed": 11}
    values.update(overrides)
    return FoldingConfig(**values)


def test_separable_toy_is_classified_perfectly(separable_toy):
    result = loocv_classify(separable_toy, "sir", None, 2, 2, _config())
    assert result.summary() == "40/40"
    assert result.predictions == result.truth
    assert result.ids == separable_toy.ids


def test_conventional_sir_path(separable_toy):
    result = loocv_classify(separable_toy, "csir", None, 2, 2, _config(), conventional_dim=1)
    assert result.correct_count == 40


def test_shuffled_labels_stay_near_chance():
    rng = np.random.default_rng(31)
    X = rng.standard_normal((40, 3, 3))
    y = rng.permutation(np.repeat([0.0, 1.0], 20))
    samples = SampleSet(X=X, y=y, response_kind="categorical")
    result = loocv_classify(samples, "sir", None, 3, 3, _config())
    # majority share plus three binomial standard deviations
    assert result.correct_count <= 20 + 3 * np.sqrt(40 * 0.25)


def test_held_out_item_never_reaches_its_fold(separable_toy, monkeypatch):
    seen = []
    original = loocv._fold_model

    def recording(train, *args, **kwargs):
        seen.append(list(train.ids))
        return original(train, *args, **kwargs)

    monkeypatch.setattr(loocv, "_fold_model", recording)
    samples = separable_toy.subset(np.arange(10, 30))
    loocv_classify(samples, "sir", None, 2, 2, _config())

    assert len(seen) == samples.n
    for held_out, train_ids in zip(samples.ids, seen):
        assert held_out not in train_ids
        assert len(train_ids) == samples.n - 1


def test_fold_prediction_uses_only_training_fit(separable_toy):
    samples = separable_toy.subset(np.arange(10, 30))
    config = _config()
    result = loocv_classify(samples, "dr", None, 2, 2, config)
    for i in (0, 7, 19):
        train = samples.subset(np.delete(np.arange(samples.n), i))
        fold_config = config.model_copy(update={"seed": derive_seed(config.seed, samples.ids[i])})
        model = loocv._fold_model(train, "dr", None, 2, 2, fold_config)
        assert model.predict(samples.X[i])[0] == result.predictions[i]


def test_predictions_follow_item_ids_under_permutation(separable_toy):
    perm = np.random.default_rng(4).permutation(separable_toy.n)
    shuffled = separable_toy.subset(perm)
    config = _config()
    first = loocv_classify(separable_toy, "sir", None, 2, 2, config)
    second = loocv_classify(shuffled, "sir", None, 2, 2, config)
    assert dict(zip(first.ids, first.predictions)) == dict(zip(second.ids, second.predictions))


def test_loocv_input_checks(small_continuous, separable_toy):
    with pytest.raises(InputError):
        loocv_classify(small_continuous, "sir", 3, 2, 2, _config())
    with pytest.raises(InputError):
        loocv_classify(separable_toy, "pca", None, 2, 2, _config())
    with pytest.raises(InputError):
        loocv_classify(separable_toy.subset([0, 39]), "sir", None, 2, 2, _config())


def test_fold_errors_name_the_fold(separable_toy):
    with pytest.raises(SingularityError) as info:
        # about 10 items per class cannot support a 16-dim class covariance
        loocv_classify(separable_toy.subset(np.arange(10, 30)), "csave", None, 4, 4, _config(), conventional_dim=16)
    assert info.value.context["fold"] == 0
    assert info.value.context["item"] == "10"


@pytest.mark.skipif(EEG_PATH is None, reason="set FOLDKIT_EEG_PATH to a dataset file")
def test_eeg_folded_dr_accuracy():
    samples = read_dataset(EEG_PATH)
    config = FoldingConfig(ml=1, mr=2, inversion=InversionMode.ridge(0.5), restarts=5, seed=0)
    result = loocv_classify(samples, "dr", None, 15, 15, config)
    assert result.total == 122
    assert result.correct_count >= 90
