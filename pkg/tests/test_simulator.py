"""Scheduler and Monte-Carlo engine tests."""

import math

import numpy as np
import pytest
from scipy import integrate

from cogmac.analytic import RatioDistParams, ratio_pdf
from cogmac.channels import draw_los_phases, draw_slot
from cogmac.rab import draw_weights
from cogmac.simulator import (
    NetworkConfig,
    growth_flatness,
    loglog_control_slope,
    run_experiment,
    run_slot,
    slot_sinr,
    sweep,
)


def small_cfg(**kw):
    base = dict(n_users=2, m_patterns=1, mode="baseline", trials=200, seed=5)
    base.update(kw)
    return NetworkConfig(**base)


class TestConfigValidation:
    def test_baseline_forces_single_pattern(self):
        with pytest.raises(ValueError):
            NetworkConfig(mode="baseline", m_patterns=2)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(n_users=0),
            dict(trials=0),
            dict(k_factor=-1.0),
            dict(mean_secondary_power=0.0),
            dict(peak_interference=0.0),
            dict(mode="duplex"),
            dict(log_base="dB"),
            dict(seed=-1),
            dict(primary_power=-0.1),
        ],
    )
    def test_invalid_fields(self, kw):
        with pytest.raises(ValueError):
            NetworkConfig(**kw)


class TestSlotSinr:
    def test_unit_case(self):
        cfg = small_cfg(n_users=1)
        rng = np.random.default_rng(0)
        real = draw_slot(cfg, rng)
        real.secondary[0, 0] = 1.0 + 0.0j
        real.interference[0, 0] = 1.0 + 0.0j
        assert slot_sinr(real, cfg)[0] == pytest.approx(1.0)

    def test_qp_scaling_preserves_argmax(self):
        rng = np.random.default_rng(1)
        cfg1 = small_cfg(n_users=8, peak_interference=1.0)
        cfg2 = small_cfg(n_users=8, peak_interference=7.5)
        real = draw_slot(cfg1, rng)
        s1 = slot_sinr(real, cfg1)
        s2 = slot_sinr(real, cfg2)
        assert np.allclose(s2, 7.5 * s1)
        assert np.argmax(s1) == np.argmax(s2)

    def test_argmax_matches_ratio_oracle(self):
        cfg = small_cfg(n_users=2)
        rng = np.random.default_rng(2)
        for _ in range(100):
            real = draw_slot(cfg, rng)
            sinr = slot_sinr(real, cfg)
            ratios = np.abs(real.secondary[:, 0]) ** 2 / np.abs(real.interference[:, 0]) ** 2
            assert np.argmax(sinr) == np.argmax(ratios)

    def test_common_denominator(self):
        cfg = small_cfg(n_users=4, primary_power=2.0)
        rng = np.random.default_rng(3)
        real = draw_slot(cfg, rng)
        sinr = slot_sinr(real, cfg)
        ratios = np.abs(real.secondary[:, 0]) ** 2 / np.abs(real.interference[:, 0]) ** 2
        denom = ratios * cfg.peak_interference / sinr
        assert np.allclose(denom, denom[0])

    def test_weight_mode_coupling(self):
        cfg = small_cfg(n_users=2)
        rng = np.random.default_rng(4)
        real = draw_slot(cfg, rng)
        with pytest.raises(ValueError):
            slot_sinr(real, cfg, weights=[draw_weights(1, rng) for _ in range(2)])
        rab_cfg = small_cfg(n_users=2, m_patterns=2, mode="rab")
        rab_real = draw_slot(rab_cfg, rng)
        with pytest.raises(ValueError):
            slot_sinr(rab_real, rab_cfg)  # missing weights

    def test_rab_matches_manual_combination(self):
        cfg = small_cfg(n_users=3, m_patterns=2, mode="rab")
        rng = np.random.default_rng(5)
        real = draw_slot(cfg, rng)
        weights = [draw_weights(2, rng) for _ in range(3)]
        sinr = slot_sinr(real, cfg, weights)
        for u in range(3):
            w = weights[u].as_complex()
            gs = abs(np.sum(w * real.secondary[u])) ** 2
            gsp = abs(np.sum(w * real.interference[u])) ** 2
            expected = gs * cfg.peak_interference / gsp
            assert sinr[u] == pytest.approx(expected, rel=1e-12)


class TestRunSlot:
    def test_single_user_always_selected(self):
        cfg = small_cfg(n_users=1)
        rng = np.random.default_rng(6)
        for _ in range(20):
            assert run_slot(cfg, rng).selected_user == 0

    def test_peak_interference_identity(self):
        rng = np.random.default_rng(7)
        for mode, m in [("baseline", 1), ("rab", 2), ("rab", 4)]:
            cfg = small_cfg(n_users=4, m_patterns=m, mode=mode, k_factor=3.0)
            phases = draw_los_phases(cfg.n_users, cfg.m_patterns, rng)
            for _ in range(200):
                out = run_slot(cfg, rng, phases)
                assert abs(out.interference_power_at_pu - cfg.peak_interference) <= 1e-12
                assert out.capacity_nats == pytest.approx(math.log1p(out.sinr))
                assert not out.degenerate

    def test_selection_symmetry(self):
        cfg = small_cfg(n_users=2)
        rng = np.random.default_rng(8)
        phases = draw_los_phases(2, 1, rng)
        wins = sum(run_slot(cfg, rng, phases).selected_user for _ in range(10**4))
        assert abs(wins / 10**4 - 0.5) < 0.015


class TestErgodicCapacity:
    def test_single_user_quadrature_oracle(self):
        # E log(1 + z) for z a ratio of unit exponentials is exactly 1 nat.
        p = RatioDistParams(0.0, 1.0)
        oracle, _ = integrate.quad(lambda z: math.log1p(z) * ratio_pdf(z, p), 0.0, np.inf,
                                   limit=200)
        assert oracle == pytest.approx(1.0, abs=1e-9)
        cfg = NetworkConfig(n_users=1, m_patterns=1, mode="baseline", trials=10**5, seed=11)
        est = run_experiment(cfg)
        assert abs(est.mean_nats - oracle) < 3.0 * est.stderr_nats

    def test_monotone_in_users(self):
        est8 = run_experiment(
            NetworkConfig(n_users=8, m_patterns=1, mode="baseline", trials=2 * 10**4, seed=12)
        )
        est64 = run_experiment(
            NetworkConfig(n_users=64, m_patterns=1, mode="baseline", trials=2 * 10**4, seed=12)
        )
        margin = 3.0 * math.hypot(est8.stderr_nats, est64.stderr_nats)
        assert est64.mean_nats > est8.mean_nats + margin

    def test_los_interference_hurts_baseline(self):
        k0 = run_experiment(
            NetworkConfig(n_users=200, m_patterns=1, mode="baseline", k_factor=0.0,
                          trials=2 * 10**4, seed=13)
        )
        k10 = run_experiment(
            NetworkConfig(n_users=200, m_patterns=1, mode="baseline", k_factor=10.0,
                          trials=2 * 10**4, seed=13)
        )
        assert k10.mean_nats < k0.mean_nats

    def test_seed_determinism_and_threads(self):
        cfg = NetworkConfig(n_users=16, m_patterns=2, mode="rab", k_factor=2.0,
                            trials=5000, seed=14)
        a = run_experiment(cfg, threads=1)
        b = run_experiment(cfg, threads=1)
        c = run_experiment(cfg, threads=4)
        assert a == b == c

    def test_mode_reduction_single_pattern(self):
        # RAB with one pattern only rotates phases: capacity matches baseline.
        base = run_experiment(
            NetworkConfig(n_users=8, m_patterns=1, mode="baseline", k_factor=2.0,
                          trials=4 * 10**4, seed=15)
        )
        rab1 = run_experiment(
            NetworkConfig(n_users=8, m_patterns=1, mode="rab", k_factor=2.0,
                          trials=4 * 10**4, seed=16)
        )
        margin = 3.0 * math.hypot(base.stderr_nats, rab1.stderr_nats)
        assert abs(base.mean_nats - rab1.mean_nats) < margin

    def test_jensen_bound_dominates(self):
        cfg = NetworkConfig(n_users=32, m_patterns=1, mode="baseline", trials=10**4, seed=17)
        est = run_experiment(cfg)
        assert est.jensen_bound_nats >= est.mean_nats

    def test_trials_guard(self):
        with pytest.raises(ValueError):
            run_experiment(small_cfg(trials=50))

    def test_power_cap_reduces_capacity(self):
        base = run_experiment(
            NetworkConfig(n_users=8, m_patterns=1, mode="baseline", trials=10**4, seed=18)
        )
        capped = run_experiment(
            NetworkConfig(n_users=8, m_patterns=1, mode="baseline", trials=10**4, seed=18,
                          max_power_cap=1.0)
        )
        assert capped.mean_nats < base.mean_nats


class TestSweep:
    def test_singleton_matches_direct(self):
        cfg = small_cfg(trials=2000, n_users=4)
        result = sweep(cfg, [4], [0.0], [1], ["baseline"])
        assert len(result.points) == 1
        assert not result.partial
        direct = run_experiment(NetworkConfig(**{**cfg.__dict__, "n_users": 4}))
        assert result.points[0].estimate == direct

    def test_grid_shape_and_modes(self):
        cfg = small_cfg(trials=500)
        result = sweep(cfg, [2, 4], [0.0, 2.0], [2, 3], ["baseline", "rab"])
        base_points = [p for p in result.points if p.mode == "baseline"]
        rab_points = [p for p in result.points if p.mode == "rab"]
        assert len(base_points) == 4  # m_list ignored for baseline
        assert len(rab_points) == 8
        assert all(p.m_patterns == 1 for p in base_points)

    def test_partial_failure_flagged(self):
        cfg = small_cfg(trials=500)
        result = sweep(cfg, [2, 0], [0.0], [1], ["baseline"])  # N=0 invalid
        assert result.partial
        errs = [p for p in result.points if p.error is not None]
        assert len(errs) == 1 and errs[0].n_users == 0
        assert result.points[0].estimate is not None

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            sweep(small_cfg(), [], [0.0], [1], ["baseline"])


class TestGrowthFlatness:
    def test_exact_log_growth(self):
        ns = [8, 16, 32, 64, 128, 256]
        vals = [3.7 * math.log(n) for n in ns]
        assert abs(growth_flatness(ns, vals, "logN")) < 1e-12

    def test_undernormalized_loglog_decays(self):
        ns = [8, 16, 32, 64, 128, 256]
        vals = [2.0 * math.log(math.log(n)) for n in ns]
        assert growth_flatness(ns, vals, "logN") < -1e-3

    def test_rayleigh_capacities_flat_vs_control(self):
        ns = [8, 16, 32, 64, 128, 256, 512]
        caps = [
            run_experiment(
                NetworkConfig(n_users=n, m_patterns=1, mode="baseline", trials=2 * 10**4,
                              seed=19)
            ).mean_nats
            for n in ns
        ]
        assert abs(growth_flatness(ns, caps, "logN")) < abs(loglog_control_slope(ns, caps))

    def test_guards(self):
        with pytest.raises(ValueError):
            growth_flatness([8, 16, 32], [1.0, 2.0, 3.0], "logN")  # too few
        with pytest.raises(ValueError):
            growth_flatness([8, 16, 32, 64], [1.0, 2.0, 3.0, 4.0], "cube")
        with pytest.raises(ValueError):
            growth_flatness([8, 16, 32, 40], [1.0, 2.0, 3.0, 4.0], "logN")  # < decade
