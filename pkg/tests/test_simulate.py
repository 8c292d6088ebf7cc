"""Tests for the SIC decoder, channel inversion and the Monte Carlo engine.

The statistical checks run against fixed seeds, so the suite is deterministic;
under a fresh seed each 3-sigma comparison would fail spuriously about 0.3%
of the time.
"""

import csv
import math

import numpy as np
import pytest

from noma_aloha.model import (
    CountPair,
    PowerProfile,
    Scenario,
    average_throughput,
    cond_sum_rate_high,
    cond_sum_rate_low,
    decode_feasibility,
    joint_pmf,
    success_probability,
)
from noma_aloha.simulate import (
    ChannelModel,
    SimConfig,
    UserAction,
    run_simulation,
    sic_decode,
    tx_power_for,
)
from support import all_pairs, random_profile, random_scenario

DEFAULTS = Scenario(m=10, v1=4.0, v2=1.5, gamma=1.5)


class TestTxPower:
    def test_inversion_examples(self):
        assert tx_power_for(UserAction.HIGH, 2.0, DEFAULTS) == 2.0
        assert tx_power_for(UserAction.LOW, 0.5, DEFAULTS) == 3.0
        assert tx_power_for(UserAction.HIGH, 1.0, DEFAULTS) == 4.0

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            tx_power_for(UserAction.HIGH, 0.0, DEFAULTS)
        with pytest.raises(ValueError):
            tx_power_for(UserAction.HIGH, -1.0, DEFAULTS)
        with pytest.raises(ValueError):
            tx_power_for(UserAction.IDLE, 1.0, DEFAULTS)

    def test_channel_model_accepts_custom_fading(self):
        channel = ChannelModel(radius_R=50.0, L0=1.0, alpha=2.0,
                               fading=lambda rng, n: np.full(n, 2.0))
        gains = channel.sample_gains(np.random.default_rng(0), 8)
        assert gains.shape == (8,)
        assert (gains > 0).all()
        # r <= R and |h|^2 = 2 bound the gain below by 2 * L0 * R^-alpha
        assert (gains >= 2.0 * 50.0**-2.0).all()

    def test_channel_model_validates_fields(self):
        with pytest.raises(ValueError):
            ChannelModel(radius_R=0.0)
        with pytest.raises(ValueError):
            ChannelModel(alpha=-1.0)

    def test_received_power_reconstructs_target_within_one_ulp(self):
        rng = np.random.default_rng(42)
        channel = ChannelModel(radius_R=250.0, L0=1e-3, alpha=3.5)
        gains = channel.sample_gains(rng, 500)
        for g in gains:
            g = float(g)
            for level, target in ((UserAction.HIGH, DEFAULTS.v1), (UserAction.LOW, DEFAULTS.v2)):
                received = tx_power_for(level, g, DEFAULTS) * g
                assert abs(received - target) <= math.ulp(target)


class TestSicDecode:
    def test_both_layers_decode(self):
        out = sic_decode(DEFAULTS, 1, 1)
        assert out.high_decoded and out.low_decoded
        assert out.sum_rate == pytest.approx(
            math.log2(2.6) + math.log2(2.5), rel=1e-12
        )
        assert out.per_user_success == (True, True)

    def test_high_collision_decodes_nothing(self):
        out = sic_decode(DEFAULTS, 2, 0)
        assert not out.high_decoded and not out.low_decoded
        assert out.sum_rate == 0.0
        assert out.per_user_success == (False, False)

    def test_empty_slot(self):
        out = sic_decode(DEFAULTS, 0, 0)
        assert not out.high_decoded and not out.low_decoded
        assert out.sum_rate == 0.0
        assert out.per_user_success == ()

    def test_low_layer_blocked_by_high_failure(self):
        # two high users jam each other, so the lone low user stays buried
        out = sic_decode(DEFAULTS, 2, 1)
        assert not out.high_decoded and not out.low_decoded
        assert out.sum_rate == 0.0

    def test_high_layer_rate_counts_when_low_layer_fails(self):
        # at gamma=0.3, (n1=1, n2=4): the high signal clears 4/7 >= 0.3, but
        # the first low signal sees 1.5/5.5 < 0.3 - the slot still earns the
        # high layer's rate
        s = Scenario(m=10, v1=4.0, v2=1.5, gamma=0.3)
        out = sic_decode(s, 1, 4)
        assert out.high_decoded and not out.low_decoded
        assert out.sum_rate == pytest.approx(
            cond_sum_rate_high(s, CountPair(1, 4)), rel=1e-15
        )
        assert out.per_user_success == (True, False, False, False, False)

    def test_counts_validated(self):
        with pytest.raises(ValueError):
            sic_decode(DEFAULTS, 6, 5)
        with pytest.raises(ValueError):
            sic_decode(DEFAULTS, -1, 0)

    def test_sum_rate_matches_conditional_rates(self):
        for s in (DEFAULTS, Scenario(m=10, v1=4.0, v2=1.5, gamma=0.3)):
            for n1, n2 in all_pairs(s.m):
                out = sic_decode(s, n1, n2)
                flags = decode_feasibility(s, CountPair(n1, n2))
                assert out.high_decoded == flags.high_ok
                assert out.low_decoded == flags.low_ok
                expected = 0.0
                if flags.high_ok:
                    expected += cond_sum_rate_high(s, CountPair(n1, n2))
                if flags.low_ok:
                    expected += cond_sum_rate_low(s, CountPair(n1, n2))
                assert out.sum_rate == pytest.approx(expected, rel=0, abs=1e-12)


class TestSimConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(slots=0, seed=1)
        with pytest.raises(ValueError):
            SimConfig(slots=10, seed=1, replications=0)
        with pytest.raises(ValueError):
            SimConfig(slots=10, seed=-1)
        with pytest.raises(ValueError):
            SimConfig(slots=10, seed=1, success_estimator="median")


class TestRunSimulation:
    def test_silent_profile_yields_zeros(self):
        stats = run_simulation(
            DEFAULTS, PowerProfile(0.0, 0.0), SimConfig(slots=1000, seed=1)
        )
        assert stats.p_success_hat == 0.0
        assert stats.throughput_hat == 0.0

    def test_single_user_always_high_is_deterministic(self):
        s = Scenario(m=1, v1=4.0, v2=1.5, gamma=1.5)
        stats = run_simulation(
            s, PowerProfile(1.0, 0.0), SimConfig(slots=10_000, seed=3, replications=4)
        )
        assert stats.throughput_hat == pytest.approx(math.log2(5.0), rel=1e-12)
        assert stats.p_success_hat == 1.0
        assert stats.stderr_th == 0.0

    def test_seed_determinism(self):
        cfg = SimConfig(slots=20_000, seed=99, replications=3)
        prof = PowerProfile(0.15, 0.1)
        a = run_simulation(DEFAULTS, prof, cfg)
        b = run_simulation(DEFAULTS, prof, cfg)
        assert a.p_success_hat == b.p_success_hat
        assert a.throughput_hat == b.throughput_hat
        assert a.stderr_p == b.stderr_p
        assert np.array_equal(a.pair_counts, b.pair_counts)

    def test_different_seeds_differ(self):
        prof = PowerProfile(0.15, 0.1)
        a = run_simulation(DEFAULTS, prof, SimConfig(slots=20_000, seed=1))
        b = run_simulation(DEFAULTS, prof, SimConfig(slots=20_000, seed=2))
        assert a.p_success_hat != b.p_success_hat

    def test_replications_use_distinct_streams(self):
        prof = PowerProfile(0.2, 0.2)
        stats = run_simulation(
            DEFAULTS, prof, SimConfig(slots=5_000, seed=11, replications=5)
        )
        assert stats.stderr_p > 0.0
        assert stats.stderr_th > 0.0

    def test_matches_analytics_within_three_sigma(self):
        prof = PowerProfile(0.1, 0.1)
        stats = run_simulation(
            DEFAULTS, prof, SimConfig(slots=100_000, seed=7, replications=8)
        )
        p = success_probability(DEFAULTS, prof)
        th = average_throughput(DEFAULTS, prof)
        assert abs(stats.p_success_hat - p) <= 3.0 * stats.stderr_p
        assert abs(stats.throughput_hat - th) <= 3.0 * stats.stderr_th

    def test_randomized_pairs_match_analytics_within_three_sigma(self):
        # 20 random (scenario, profile) pairs; pairs are screened on the
        # analytic value alone so each quantity is either exactly zero or
        # estimable (>= 50 expected events) at this slot budget
        slots, reps = 10_000, 12
        budget = slots * reps
        rng = np.random.default_rng(700)
        for k in range(20):
            while True:
                s = random_scenario(rng, m_max=8)
                prof = random_profile(rng)
                p = success_probability(s, prof)
                if p == 0.0 or p * budget >= 50.0:
                    break
            th = average_throughput(s, prof)
            stats = run_simulation(
                s, prof, SimConfig(slots=slots, seed=700_000 + k, replications=reps)
            )
            if p == 0.0:
                assert stats.p_success_hat == 0.0
                assert stats.throughput_hat == 0.0
                continue
            assert abs(stats.p_success_hat - p) <= 3.0 * stats.stderr_p, (s, prof)
            assert abs(stats.throughput_hat - th) <= 3.0 * stats.stderr_th, (s, prof)

    def test_all_users_estimator_agrees(self):
        prof = PowerProfile(0.1, 0.1)
        stats = run_simulation(
            DEFAULTS,
            prof,
            SimConfig(slots=100_000, seed=5, replications=8, success_estimator="all-users"),
        )
        p = success_probability(DEFAULTS, prof)
        assert abs(stats.p_success_hat - p) <= 3.0 * stats.stderr_p

    def test_pair_counts_cover_all_slots(self):
        cfg = SimConfig(slots=7_500, seed=13, replications=2)
        stats = run_simulation(DEFAULTS, PowerProfile(0.3, 0.2), cfg)
        assert stats.pair_counts.sum() == stats.slots_run == 15_000

    def test_empirical_frequencies_match_pmf(self):
        # cells with expected count >= 10; chi-square style screen
        prof = PowerProfile(0.1, 0.1)
        cfg = SimConfig(slots=200_000, seed=17, replications=5)
        stats = run_simulation(DEFAULTS, prof, cfg)
        n = stats.slots_run
        for n1, n2 in all_pairs(DEFAULTS.m):
            p = joint_pmf(DEFAULTS, prof, CountPair(n1, n2))
            if n * p < 10.0:
                continue
            freq = stats.pair_counts[n1, n2] / n
            sigma = math.sqrt(p * (1.0 - p) / n)
            assert abs(freq - p) <= 3.0 * sigma, (n1, n2)


class TestSlotTrace:
    def test_trace_file_layout(self, tmp_path):
        path = tmp_path / "trace.csv"
        cfg = SimConfig(slots=64, seed=21, replications=2)
        prof = PowerProfile(0.3, 0.3)
        run_simulation(DEFAULTS, prof, cfg, trace_path=path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["slot", "n1", "n2", "high_decoded", "low_decoded", "sum_rate"]
        body = rows[1:]
        assert len(body) == 128
        # slot index restarts for the second replication
        assert [int(r[0]) for r in body[:64]] == list(range(64))
        assert [int(r[0]) for r in body[64:]] == list(range(64))
        for r in body:
            n1, n2 = int(r[1]), int(r[2])
            assert 0 <= n1 + n2 <= DEFAULTS.m
            assert r[3] in ("true", "false") and r[4] in ("true", "false")
            out = sic_decode(DEFAULTS, n1, n2)
            assert float(r[5]) == pytest.approx(out.sum_rate, rel=1e-15, abs=1e-15)
            assert (r[3] == "true") == out.high_decoded
            assert (r[4] == "true") == out.low_decoded
