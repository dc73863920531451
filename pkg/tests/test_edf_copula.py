import numpy as np
import pytest
from scipy import stats

from newsflow.errors import ConstantColumn, DimensionMismatch, NonPSDMatrix, TooFewPoints
from newsflow.simulate import (
    GaussianCopula,
    fit_edf,
    fit_gaussian_copula,
    normal_scores,
    sample_copula,
)


# edf ---------------------------------------------------------------------------

def test_edf_counting_formula():
    dist = fit_edf([1.0, 2.0, 3.0])
    assert dist.cdf(2.0) == pytest.approx(0.5)
    assert dist.cdf(1.0) == pytest.approx(0.25)
    assert dist.cdf(3.0) == pytest.approx(0.75)
    assert dist.cdf(2.5) == pytest.approx(0.5)


def test_edf_below_minimum_clipped():
    dist = fit_edf([1.0, 2.0, 3.0])
    assert dist.cdf(0.0) == pytest.approx(1.0 / 4.0)


def test_edf_above_maximum_clipped():
    dist = fit_edf([1.0, 2.0, 3.0])
    assert dist.cdf(10.0) == pytest.approx(3.0 / 4.0)


def test_edf_quantile_inverse_property():
    rng = np.random.default_rng(0)
    sample = rng.normal(0, 1, 57)
    dist = fit_edf(sample)
    for x in sample:
        assert dist.quantile(dist.cdf(x)) == pytest.approx(x)


def test_edf_quantile_domain():
    dist = fit_edf([1.0, 2.0])
    with pytest.raises(ValueError):
        dist.quantile(0.0)
    with pytest.raises(ValueError):
        dist.quantile(1.0)


def test_edf_too_few_points():
    with pytest.raises(TooFewPoints):
        fit_edf([1.0])


# copula fitting ------------------------------------------------------------------

def test_copula_one_dimension():
    cop = fit_gaussian_copula(np.random.default_rng(1).normal(0, 1, (50, 1)))
    assert cop.correlation.shape == (1, 1)
    assert cop.correlation[0, 0] == 1.0


def test_copula_independent_columns():
    rng = np.random.default_rng(2)
    data = rng.normal(0, 1, (10_000, 3))
    cop = fit_gaussian_copula(data)
    off = cop.correlation[~np.eye(3, dtype=bool)]
    assert np.all(np.abs(off) < 0.05)


def test_copula_comonotone_columns():
    rng = np.random.default_rng(3)
    x = rng.normal(0, 1, 5000)
    cop = fit_gaussian_copula(np.column_stack([x, np.exp(x)]))
    assert cop.correlation[0, 1] == pytest.approx(1.0, abs=0.01)


def test_copula_rank_invariance():
    rng = np.random.default_rng(4)
    x = rng.normal(0, 1, 4000)
    y = 0.6 * x + 0.8 * rng.normal(0, 1, 4000)
    raw = fit_gaussian_copula(np.column_stack([x, y]))
    transformed = fit_gaussian_copula(np.column_stack([np.exp(x), y**3]))
    assert transformed.correlation[0, 1] == pytest.approx(raw.correlation[0, 1], abs=1e-10)


def test_copula_constant_column():
    with pytest.raises(ConstantColumn):
        fit_gaussian_copula(np.column_stack([np.ones(100), np.arange(100.0)]))


def test_copula_needs_enough_rows():
    with pytest.raises(DimensionMismatch):
        fit_gaussian_copula(np.random.default_rng(5).normal(0, 1, (3, 4)))


def test_copula_validation():
    with pytest.raises(NonPSDMatrix):
        GaussianCopula(correlation=np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NonPSDMatrix):
        GaussianCopula(correlation=np.array([[1.0, 0.5], [0.4, 1.0]]))


# sampling -----------------------------------------------------------------------

def _normal_scores_corr(data):
    return np.corrcoef(normal_scores(data), rowvar=False)


def test_sample_identity_correlation():
    rng = np.random.default_rng(6)
    marginals = [fit_edf(rng.normal(0, 1, 500)), fit_edf(rng.uniform(0, 1, 500))]
    cop = GaussianCopula(correlation=np.eye(2))
    out = sample_copula(cop, marginals, 10_000, rng_seed=7)
    corr = _normal_scores_corr(out)
    assert abs(corr[0, 1]) < 0.05


def test_sample_target_correlation_recovered():
    rng = np.random.default_rng(8)
    marginals = [fit_edf(rng.gamma(2.0, 1.0, 800)), fit_edf(rng.normal(0, 2, 800))]
    cop = GaussianCopula(correlation=np.array([[1.0, 0.8], [0.8, 1.0]]))
    out = sample_copula(cop, marginals, 10_000, rng_seed=9)
    corr = _normal_scores_corr(out)
    assert corr[0, 1] == pytest.approx(0.8, abs=0.05)


def test_sample_marginal_ks_distance():
    rng = np.random.default_rng(10)
    source = rng.gamma(2.0, 1.5, 2000)
    marginals = [fit_edf(source), fit_edf(rng.normal(0, 1, 2000))]
    cop = GaussianCopula(correlation=np.array([[1.0, 0.5], [0.5, 1.0]]))
    out = sample_copula(cop, marginals, 10_000, rng_seed=11)
    ks = stats.ks_2samp(out[:, 0], source).statistic
    assert ks < 0.03


def test_sample_stays_in_marginal_range():
    jitter = fit_edf([0.03, 0.030001, 0.029999])
    cop = GaussianCopula(correlation=np.eye(2))
    out = sample_copula(cop, [jitter, jitter], 500, rng_seed=12)
    assert out.min() >= 0.029999
    assert out.max() <= 0.030001


def test_sample_dimension_mismatch():
    cop = GaussianCopula(correlation=np.eye(2))
    with pytest.raises(DimensionMismatch):
        sample_copula(cop, [fit_edf([0.0, 1.0])], 10, rng_seed=0)


def test_sample_reproducible():
    rng = np.random.default_rng(13)
    marginals = [fit_edf(rng.normal(0, 1, 100)), fit_edf(rng.normal(0, 1, 100))]
    cop = GaussianCopula(correlation=np.array([[1.0, 0.3], [0.3, 1.0]]))
    a = sample_copula(cop, marginals, 200, rng_seed=99)
    b = sample_copula(cop, marginals, 200, rng_seed=99)
    assert np.array_equal(a, b)


def test_singular_correlation_sampling_falls_back():
    # perfectly correlated: Cholesky fails, eigen factor should work
    cop = GaussianCopula(correlation=np.ones((2, 2)))
    rng = np.random.default_rng(14)
    marginals = [fit_edf(rng.normal(0, 1, 100)), fit_edf(rng.normal(0, 1, 100))]
    out = sample_copula(cop, marginals, 1000, rng_seed=15)
    corr = _normal_scores_corr(out)
    assert corr[0, 1] == pytest.approx(1.0, abs=0.01)
