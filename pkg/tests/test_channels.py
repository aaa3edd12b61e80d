"""Channel sampler tests: moment calibration, distribution fits,
independence, and stream determinism."""

import math

import numpy as np
import pytest
from scipy import special

from cogmac.channels import (
    ChannelRealization,
    FadingSpec,
    draw_los_phases,
    draw_slot,
    sample_fading,
    sample_rayleigh,
    sample_rician,
)
from cogmac.simulator import NetworkConfig
from cogmac.stats import EmpiricalDist, ks_test


def rician_power_cdf_oracle(k, mean_power, grid_max, grid_size=20000):
    """Quadrature oracle: cumulative trapezoid of the noncentral power pdf."""
    g = np.linspace(0.0, grid_max, grid_size)
    arg = 2.0 * np.sqrt(k * (1.0 + k) * g / mean_power)
    # Scaled Bessel keeps the product finite for large arguments.
    pdf = (
        (1.0 + k)
        / mean_power
        * np.exp(-k - (1.0 + k) * g / mean_power + arg)
        * special.i0e(arg)
    )
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(g))])
    return lambda x: np.interp(x, g, cdf)


class TestRayleigh:
    def test_mean_power_calibration(self):
        rng = np.random.default_rng(101)
        for mean_power in [0.25, 1.0, 4.0]:
            h = sample_rayleigh(mean_power, rng, size=10**6)
            power = np.abs(h) ** 2
            se = power.std() / math.sqrt(power.size)
            assert abs(power.mean() - mean_power) < 3.0 * se

    def test_zero_mean(self):
        rng = np.random.default_rng(102)
        h = sample_rayleigh(1.0, rng, size=10**6)
        bound = 3.0 / math.sqrt(2.0 * h.size)  # each component has variance 1/2
        assert abs(h.real.mean()) < bound and abs(h.imag.mean()) < bound

    def test_power_is_exponential(self):
        rng = np.random.default_rng(103)
        power = np.abs(sample_rayleigh(2.0, rng, size=10**4)) ** 2
        report = ks_test(
            EmpiricalDist.from_samples(power), lambda x: 1.0 - np.exp(-np.asarray(x) / 2.0)
        )
        assert report.passed

    def test_scalar_mode_and_errors(self):
        rng = np.random.default_rng(0)
        assert isinstance(sample_rayleigh(1.0, rng), complex)
        with pytest.raises(ValueError):
            sample_rayleigh(0.0, rng)
        with pytest.raises(ValueError):
            sample_rayleigh(-1.0, rng)


class TestRician:
    def test_k_zero_reduces_to_rayleigh(self):
        rng = np.random.default_rng(104)
        spec = FadingSpec(kind="rician", mean_power=1.0, k_factor=0.0)
        power = np.abs(sample_rician(spec, rng, size=10**4)) ** 2
        assert ks_test(EmpiricalDist.from_samples(power), lambda x: 1.0 - np.exp(-x)).passed

    def test_pure_los_limit(self):
        rng = np.random.default_rng(105)
        spec = FadingSpec(kind="rician", mean_power=1.0, k_factor=1e9, los_phase=0.0)
        h = sample_rician(spec, rng, size=100)
        assert np.max(np.abs(h - 1.0)) < 1e-4

    def test_mean_and_power(self):
        rng = np.random.default_rng(106)
        for k, mean_power in [(0.5, 1.0), (2.0, 0.25), (10.0, 4.0)]:
            phase = 0.7
            spec = FadingSpec(kind="rician", mean_power=mean_power, k_factor=k, los_phase=phase)
            h = sample_rician(spec, rng, size=10**6)
            power = np.abs(h) ** 2
            se = power.std() / math.sqrt(power.size)
            assert abs(power.mean() - mean_power) < 3.0 * se
            expected_mean = math.sqrt(k * mean_power / (k + 1.0)) * np.exp(1j * phase)
            comp_se = 3.0 * math.sqrt(mean_power / (k + 1.0) / 2.0 / h.size)
            assert abs(h.mean() - expected_mean) < 3.0 * comp_se

    @pytest.mark.parametrize("k", [0.5, 2.0, 10.0])
    def test_power_pdf_matches_noncentral_form(self, k):
        rng = np.random.default_rng(int(107 + 10 * k))
        spec = FadingSpec(kind="rician", mean_power=1.0, k_factor=k)
        power = np.abs(sample_rician(spec, rng, size=10**5)) ** 2
        oracle = rician_power_cdf_oracle(k, 1.0, grid_max=float(power.max()) * 1.05)
        assert ks_test(EmpiricalDist.from_samples(power), oracle).passed

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            FadingSpec(kind="rayleigh", mean_power=1.0, k_factor=2.0)
        with pytest.raises(ValueError):
            FadingSpec(kind="nakagami", mean_power=1.0)
        with pytest.raises(ValueError):
            sample_rician(FadingSpec(kind="rayleigh", mean_power=1.0), np.random.default_rng(0))

    def test_deterministic_kind(self):
        rng = np.random.default_rng(0)
        spec = FadingSpec(kind="deterministic", mean_power=4.0, los_phase=math.pi / 2.0)
        h = sample_fading(spec, rng)
        assert h == pytest.approx(2.0j)


class TestDrawSlot:
    def test_degenerate_dimensions(self):
        cfg = NetworkConfig(n_users=1, m_patterns=1, mode="baseline", trials=100)
        real = draw_slot(cfg, np.random.default_rng(1))
        assert real.secondary.shape == (1, 1)
        assert real.interference.shape == (1, 1)

    def test_seed_determinism(self):
        cfg = NetworkConfig(n_users=4, m_patterns=2, k_factor=3.0, trials=100)
        a = draw_slot(cfg, np.random.default_rng(cfg.seed))
        b = draw_slot(cfg, np.random.default_rng(cfg.seed))
        assert np.array_equal(a.secondary, b.secondary)
        assert np.array_equal(a.interference, b.interference)
        assert a.primary_to_secondary_power == b.primary_to_secondary_power

    def test_cross_user_independence(self):
        cfg = NetworkConfig(n_users=2, m_patterns=2, k_factor=2.0, trials=100)
        rng = np.random.default_rng(9)
        phases = draw_los_phases(cfg.n_users, cfg.m_patterns, rng)
        n_slots = 30000
        sec = np.empty((n_slots, 2, 2), dtype=complex)
        inter = np.empty((n_slots, 2, 2), dtype=complex)
        for t in range(n_slots):
            real = draw_slot(cfg, rng, phases)
            sec[t] = real.secondary
            inter[t] = real.interference
        bound = 3.0 / math.sqrt(n_slots)
        # Cross-user and cross-pattern correlations of the scattered parts.
        for arr in (sec, inter - inter.mean(axis=0, keepdims=True)):
            u0 = arr[:, 0, 0]
            for other in (arr[:, 1, 0], arr[:, 0, 1], arr[:, 1, 1]):
                corr = np.mean(u0 * np.conj(other)) / (u0.std() * other.std())
                assert abs(corr) < bound

    def test_interference_uses_frozen_phases(self):
        cfg = NetworkConfig(
            n_users=2, m_patterns=2, k_factor=1e9, trials=100, mean_interference_power=1.0
        )
        rng = np.random.default_rng(3)
        phases = draw_los_phases(cfg.n_users, cfg.m_patterns, rng)
        real = draw_slot(cfg, rng, phases)
        # At huge K the channel is essentially the pure LoS phasor.
        assert np.max(np.abs(real.interference - np.exp(1j * phases))) < 1e-4

    def test_phase_shape_mismatch_rejected(self):
        cfg = NetworkConfig(n_users=2, m_patterns=2, trials=100)
        with pytest.raises(ValueError):
            draw_slot(cfg, np.random.default_rng(0), np.zeros((3, 2)))

    def test_realization_validation(self):
        with pytest.raises(ValueError):
            ChannelRealization(
                secondary=np.zeros((2, 1), dtype=complex),
                interference=np.zeros((1, 1), dtype=complex),
                primary_to_secondary_power=0.0,
            )
