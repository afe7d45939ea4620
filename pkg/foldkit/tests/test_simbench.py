"""
Tests for the mixture generators, the conventional baselines and the
Monte-Carlo harness.

Desk-scale Monte-Carlo runs are marked slow.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from foldkit.config import settings
from foldkit.core.exceptions import DimensionError, InputError
from foldkit.envelope.schemas import FoldingConfig
from foldkit.linalg.schemas import InversionMode
from foldkit.linalg.subspace import benchmark_distance, projection, subspace_distance
from foldkit.linalg.tensor_ops import vec
from foldkit.moments.schemas import SliceAssignment
from foldkit.moments.targets import dr_targets
from foldkit.simbench.conventional import candidate_matrix, conventional_fit
from foldkit.simbench.generators import class_parameters, gen_mixture, true_bases
from foldkit.simbench.harness import TABLE_METHODS, _replication, monte_carlo
from foldkit.simbench.schemas import MixtureModelSpec


# -- generators --------------------------------------------------------------

def test_class_parameters_example1():
    means, sds = class_parameters(MixtureModelSpec(variant="example1", p=4, mu=0.8))
    assert means[1, 0, 0] == means[1, 1, 1] == 0.8
    assert np.count_nonzero(means) == 2
    assert sds[0, 0, 1] ** 2 == pytest.approx(0.1)
    assert sds[1, 1, 0] ** 2 == pytest.approx(1.5)
    assert sds[0, 0, 0] == sds[1, 0, 0] == 1.0


def test_mixture_moments_example1():
    spec = MixtureModelSpec(variant="example1", p=3, mu=1.0)
    samples, _, _ = gen_mixture(spec, 40_000, np.random.default_rng(21))
    y = samples.y.astype(bool)

    assert abs(y.mean() - 0.5) <= 3 * math.sqrt(0.25 / samples.n)
    assert samples.X[~y, 0, 1].var() == pytest.approx(0.1, rel=0.05)
    assert samples.X[y, 0, 1].var() == pytest.approx(1.5, rel=0.05)
    assert samples.X[y, 0, 0].mean() == pytest.approx(1.0, abs=0.05)
    assert samples.X[~y, 1, 1].mean() == pytest.approx(0.0, abs=0.05)
    assert samples.X[y, 2, 2].var() == pytest.approx(1.0, rel=0.05)


def test_mixture_moments_example2():
    spec = MixtureModelSpec(variant="example2", p=3)
    samples, _, _ = gen_mixture(spec, 40_000, np.random.default_rng(22))
    y = samples.y.astype(bool)
    assert samples.X[y, 0, 0].var() == pytest.approx(1.5, rel=0.05)
    assert samples.X[~y, 0, 0].var() == pytest.approx(0.1, rel=0.05)


def test_generator_is_seeded():
    spec = MixtureModelSpec(p=4)
    first, _, _ = gen_mixture(spec, 50, np.random.default_rng(9))
    second, _, _ = gen_mixture(spec, 50, np.random.default_rng(9))
    np.testing.assert_array_equal(first.X, second.X)
    np.testing.assert_array_equal(first.y, second.y)
    assert first.response_kind == "categorical"


def test_true_bases_are_leading_coordinates():
    left, right = true_bases(MixtureModelSpec(p=5))
    np.testing.assert_allclose(projection(left), np.diag([1.0, 1.0, 0.0, 0.0, 0.0]), atol=1e-12)
    assert right.subspace_dim == 2


def test_model_spec_validation():
    with pytest.raises(ValidationError):
        MixtureModelSpec(p=3, mu=0.0)
    with pytest.raises(ValidationError):
        MixtureModelSpec(p=3, sigma2=1.0, tau2=1.0)
    with pytest.raises(ValidationError):
        MixtureModelSpec(p=1)
    with pytest.raises(ValidationError):
        MixtureModelSpec(variant="example3", p=3)


# -- conventional baselines --------------------------------------------------

def test_single_slice_candidate_matrix_is_zero(small_continuous):
    whole = SliceAssignment(s=1, labels=np.zeros(small_continuous.n, dtype=int), proportions=[1.0])
    np.testing.assert_allclose(candidate_matrix(dr_targets(small_continuous, whole)), 0.0, atol=1e-10)


def test_conventional_sir_caps_dimension(caplog):
    spec = MixtureModelSpec(variant="example2", p=3)
    samples, _, _ = gen_mixture(spec, 400, np.random.default_rng(3))
    basis = conventional_fit(samples, "sir", None, 4)
    assert basis.subspace_dim == 1
    assert "using d=1" in caplog.text


def test_conventional_sir_finds_mean_direction():
    spec = MixtureModelSpec(variant="example1", p=3, mu=1.0)
    samples, _, _ = gen_mixture(spec, 20_000, np.random.default_rng(4))
    basis = conventional_fit(samples, "sir", None, 1)
    assert subspace_distance(basis, vec(np.diag([1.0, 1.0, 0.0]))) < 0.1


def test_conventional_dr_spans_the_unfolded_subspace():
    spec = MixtureModelSpec(variant="example1", p=3, mu=1.0)
    samples, _, _ = gen_mixture(spec, 50_000, np.random.default_rng(6))
    basis = conventional_fit(samples, "dr", None, spec.conventional_dim)

    truth = np.zeros((9, 3))
    truth[[0, 4], 0] = 1.0
    truth[1, 1] = 1.0
    truth[3, 2] = 1.0
    assert subspace_distance(basis, truth) < 0.15


def test_conventional_dimension_range(small_continuous):
    with pytest.raises(DimensionError):
        conventional_fit(small_continuous, "dr", 3, 0)
    with pytest.raises(DimensionError):
        conventional_fit(small_continuous, "dr", 3, 7)


# -- harness -----------------------------------------------------------------

def _small_run(table, seed=5):
    return monte_carlo(table, n_list=[60, 90], p_list=[3], N=2, seed=seed, benchmark_reps=50)


def test_monte_carlo_layout():
    report = _small_run(2)
    assert report.methods == TABLE_METHODS[2]
    assert len(report.cells) == 2 * len(TABLE_METHODS[2])

    frame = report.to_frame()
    assert list(frame.columns) == ["p", "method", "n=60", "n=90"]
    assert list(frame["method"]) == TABLE_METHODS[2]
    assert report.cell("folded-dr", 90, 3).replications == 2

    summary = report.summary()
    assert "runtime_seconds" not in summary
    assert set(summary["benchmark"]) == {"3"}


def test_monte_carlo_is_reproducible():
    first, second = _small_run(1), _small_run(1)
    assert first.to_csv() == second.to_csv()
    assert first.summary() == second.summary()
    assert _small_run(1, seed=6).to_csv() != first.to_csv()


def test_monte_carlo_argument_checks():
    with pytest.raises(InputError):
        monte_carlo(3, N=2)
    with pytest.raises(InputError):
        monte_carlo(1, N=1)
    with pytest.raises(DimensionError):
        monte_carlo(1, N=2, config=FoldingConfig(ml=1, mr=2))


def test_failed_replications_are_counted(caplog):
    # four items never give a nonsingular 4 x 4 covariance
    exact = FoldingConfig(ml=2, mr=2, inversion=InversionMode.exact())
    report = monte_carlo(1, n_list=[4], p_list=[2], N=3, config=exact, benchmark_reps=10)
    assert "exact inversion fails every replication" in caplog.text
    for cell in report.cells:
        assert cell.failures == 3
        assert cell.flagged
        assert math.isnan(cell.mean)
    assert all(c["mean"] is None for c in report.summary()["cells"])


def test_default_run_fills_cells_with_singular_covariance(monkeypatch):
    # pL*pR = 100 = n: the sample covariance has rank 99
    monkeypatch.setattr(settings, "restarts", 1)
    monkeypatch.setattr(settings, "max_iters", 15)
    report = monte_carlo(1, n_list=[100], p_list=[10], N=2, seed=3, benchmark_reps=20)
    for method in TABLE_METHODS[1]:
        cell = report.cell(method, 100, 10)
        assert cell.failures == 0
        assert math.isfinite(cell.mean)


def test_standard_errors_shrink_with_replications():
    config = FoldingConfig(ml=2, mr=2, restarts=1, max_iters=50, inversion=InversionMode.pseudo())
    few = monte_carlo(1, n_list=[60], p_list=[3], N=50, config=config, seed=9, benchmark_reps=20)
    many = monte_carlo(1, n_list=[60], p_list=[3], N=200, config=config, seed=9, benchmark_reps=20)

    # four times the replications halves the SE
    ratios = [many.cell(m, 60, 3).se / few.cell(m, 60, 3).se for m in TABLE_METHODS[1]]
    assert math.exp(np.mean(np.log(ratios))) == pytest.approx(0.5, rel=0.3)

    rng = np.random.default_rng(4)
    _, se_small = benchmark_distance(5, 5, 2, 2, 1000, rng)
    _, se_large = benchmark_distance(5, 5, 2, 2, 4000, rng)
    assert se_large / se_small == pytest.approx(0.5, rel=0.3)


def test_distances_stay_inside_the_benchmark_band(caplog):
    report = monte_carlo(2, n_list=[60, 120], p_list=[3], N=4, seed=8, benchmark_reps=500)
    bench_mean, bench_se = report.benchmark[3]
    for cell in report.cells:
        assert 0.0 <= cell.mean <= bench_mean + 3 * bench_se
    assert "above the benchmark band" not in caplog.text

    spec = MixtureModelSpec(variant="example2", p=3)
    config = FoldingConfig(ml=2, mr=2, restarts=2, inversion=InversionMode.pseudo())
    for rep in range(4):
        distances = _replication(2, spec, 60, rep, config, seed=8)
        assert all(0.0 <= d <= math.sqrt(8.0) for d in distances.values())


# -- desk-scale reproductions ------------------------------------------------

@pytest.mark.slow
def test_benchmark_distances_at_desk_scale():
    rng = np.random.default_rng(0)
    assert benchmark_distance(5, 5, 2, 2, 10_000, rng)[0] == pytest.approx(2.586, abs=0.02)
    assert benchmark_distance(10, 10, 2, 2, 10_000, rng)[0] == pytest.approx(2.772, abs=0.02)


@pytest.mark.slow
def test_table1_folded_dr_and_sir():
    report = monte_carlo(1, n_list=[100, 500, 800], p_list=[5], N=100, seed=2024)
    assert report.cell("folded-dr", 100, 5).mean == pytest.approx(0.531, abs=0.05)
    assert report.cell("folded-dr", 500, 5).mean == pytest.approx(0.158, abs=0.05)
    assert report.cell("folded-dr", 800, 5).mean == pytest.approx(0.119, abs=0.05)
    assert report.cell("folded-sir", 100, 5).mean == pytest.approx(1.115, abs=0.12)


@pytest.mark.slow
def test_table2_folded_methods_dominate():
    report = monte_carlo(2, n_list=[500, 800], p_list=[5], N=100, seed=2024)
    for method in ("sir", "save", "dr"):
        folded = report.cell(f"folded-{method}", 500, 5).mean
        conventional = report.cell(method, 500, 5).mean
        assert folded < 0.5 * conventional
    assert report.cell("sir", 800, 5).mean == pytest.approx(1.753, abs=0.1)
    assert report.cell("dr", 800, 5).mean == pytest.approx(0.574, abs=0.05)
