"""Empirical-versus-analytic validation helpers: empirical CDFs,
one-sample Kolmogorov-Smirnov tests, and the extreme-value normalization
check used throughout the acceptance suite.

Critical values are asymptotic (valid for n >= ~1000); the suite always
uses n >= 1e4.  The goodness-of-fit level is fixed at 1%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KS_COEFF_1PCT",
    "EmpiricalDist",
    "KsReport",
    "empirical_cdf",
    "ks_test",
    "max_normalization_check",
    "frechet_cdf",
]

# Asymptotic 1% KS critical value: sqrt(-ln(0.005)/2) = 1.6276...
KS_COEFF_1PCT = 1.628


@dataclass(frozen=True)
class EmpiricalDist:
    """Sorted sample set with its size."""

    sorted_samples: np.ndarray
    n: int

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDist":
        arr = np.sort(np.asarray(samples, dtype=float))
        if arr.size < 1:
            raise ValueError("need at least one sample")
        return cls(sorted_samples=arr, n=int(arr.size))


@dataclass(frozen=True)
class KsReport:
    """One KS comparison: statistic, sample size, 1% threshold, verdict."""

    statistic: float
    n: int
    threshold_1pct: float
    passed: bool


def empirical_cdf(dist: EmpiricalDist, x: float) -> float:
    """Right-continuous empirical CDF: fraction of samples <= x."""
    return float(np.searchsorted(dist.sorted_samples, x, side="right")) / dist.n


def ks_test(dist: EmpiricalDist, analytic_cdf) -> KsReport:
    """One-sample KS statistic against a callable CDF.

    Uses both one-sided step corrections: sup over sample points of
    max(i/n - F(x_i), F(x_i) - (i-1)/n).  The analytic CDF must be
    nondecreasing along the samples or a ValueError is raised.
    """
    x = dist.sorted_samples
    n = dist.n
    try:
        f = np.asarray(analytic_cdf(x), dtype=float)
        if f.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.asarray([analytic_cdf(v) for v in x], dtype=float)
    if np.any(np.diff(f) < -1e-12):
        raise ValueError("analytic cdf is not monotone over the sample range")
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    stat = float(max(upper.max(), lower.max()))
    threshold = KS_COEFF_1PCT / math.sqrt(n)
    return KsReport(statistic=stat, n=n, threshold_1pct=threshold, passed=stat < threshold)


def frechet_cdf(x):
    """Unit Frechet CDF exp(-1/x) for x > 0, zero otherwise."""
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    pos = arr > 0.0
    out[pos] = np.exp(-1.0 / arr[pos])
    return float(out) if np.isscalar(x) else out


def max_normalization_check(samples_of_max, a_n: float) -> KsReport:
    """KS of normalized maxima against the unit Frechet law exp(-1/x)."""
    if not a_n > 0.0:
        raise ValueError(f"a_n must be > 0, got {a_n}")
    scaled = np.asarray(samples_of_max, dtype=float) / a_n
    return ks_test(EmpiricalDist.from_samples(scaled), frechet_cdf)
