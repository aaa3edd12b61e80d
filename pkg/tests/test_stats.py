"""Empirical CDF and KS machinery tests."""

import math

import numpy as np
import pytest

from cogmac.stats import (
    EmpiricalDist,
    empirical_cdf,
    frechet_cdf,
    ks_test,
    max_normalization_check,
)


class TestEmpiricalCdf:
    def test_outside_range(self):
        d = EmpiricalDist.from_samples([1.0, 2.0, 3.0])
        assert empirical_cdf(d, 0.5) == 0.0
        assert empirical_cdf(d, 3.0) == 1.0
        assert empirical_cdf(d, 99.0) == 1.0

    def test_rank_at_median(self):
        d = EmpiricalDist.from_samples([5.0, 1.0, 3.0, 9.0, 7.0])
        assert empirical_cdf(d, 5.0) == pytest.approx(3.0 / 5.0)  # exact rank/n

    def test_right_continuity(self):
        d = EmpiricalDist.from_samples([0.0, 1.0, 1.0, 2.0])
        assert empirical_cdf(d, 1.0) == pytest.approx(0.75)
        assert empirical_cdf(d, 1.0 - 1e-12) == pytest.approx(0.25)

    def test_uniform_midpoint(self):
        rng = np.random.default_rng(55)
        d = EmpiricalDist.from_samples(rng.uniform(0.0, 1.0, size=10**6))
        assert abs(empirical_cdf(d, 0.5) - 0.5) < 0.002

    def test_requires_samples(self):
        with pytest.raises(ValueError):
            EmpiricalDist.from_samples([])


class TestKsTest:
    def test_null_distribution_passes(self):
        rng = np.random.default_rng(60)
        samples = -np.log(rng.uniform(size=10**4))  # inverse-transform Exp(1)
        report = ks_test(EmpiricalDist.from_samples(samples), lambda x: 1.0 - np.exp(-x))
        assert report.passed
        assert report.threshold_1pct == pytest.approx(1.628 / 100.0)

    def test_gross_mismatch_fails(self):
        rng = np.random.default_rng(61)
        samples = rng.exponential(1.0, size=10**4)
        report = ks_test(
            EmpiricalDist.from_samples(samples), lambda x: 1.0 - np.exp(-2.0 * np.asarray(x))
        )
        assert not report.passed

    def test_monotone_guard(self):
        d = EmpiricalDist.from_samples([0.1, 0.5, 0.9])
        with pytest.raises(ValueError):
            ks_test(d, lambda x: -np.asarray(x))

    def test_invariance_under_monotone_transform(self):
        rng = np.random.default_rng(62)
        samples = rng.exponential(1.0, size=5000)
        base = ks_test(EmpiricalDist.from_samples(samples), lambda x: 1.0 - np.exp(-x))
        mapped = ks_test(
            EmpiricalDist.from_samples(np.sqrt(samples)),
            lambda x: 1.0 - np.exp(-np.asarray(x) ** 2),
        )
        assert mapped.statistic == pytest.approx(base.statistic, abs=1e-12)

    def test_false_rejection_rate_calibrated(self):
        rng = np.random.default_rng(63)
        rejections = 0
        for _ in range(100):
            samples = rng.uniform(size=2000)
            report = ks_test(EmpiricalDist.from_samples(samples), lambda x: np.asarray(x))
            rejections += 0 if report.passed else 1
        assert rejections <= 2

    def test_scalar_cdf_fallback(self):
        d = EmpiricalDist.from_samples(np.linspace(0.01, 0.99, 500))
        report = ks_test(d, lambda x: float(x))  # scalar-only callable
        assert report.passed


class TestMaxNormalization:
    def test_synthetic_frechet_passes(self):
        rng = np.random.default_rng(64)
        maxima = 1.0 / -np.log(rng.uniform(size=10**4))  # exact unit Frechet
        assert max_normalization_check(maxima, 1.0).passed

    def test_scale_mismatch_fails(self):
        rng = np.random.default_rng(65)
        maxima = 1.0 / -np.log(rng.uniform(size=10**4))
        assert not max_normalization_check(maxima, 10.0).passed

    def test_rejects_bad_scale(self):
        with pytest.raises(ValueError):
            max_normalization_check([1.0, 2.0], 0.0)

    def test_frechet_cdf_shape(self):
        assert frechet_cdf(-1.0) == 0.0
        assert frechet_cdf(1.0) == pytest.approx(math.exp(-1.0))
        arr = frechet_cdf(np.array([0.5, 1.0, 2.0]))
        assert np.all(np.diff(arr) > 0.0)
