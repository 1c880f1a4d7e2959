import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liqgame import core
from liqgame.sim import (
    HIGH_STRATEGY,
    LOW_STRATEGY,
    SimConfig,
    StrategySpec,
    analytic_hit_ratio,
    iter_trials,
    parcel_size,
    run_simulation,
)

FULL = StrategySpec("full_balance")
RANDOM = StrategySpec("uniform_random")


def fixed_pair_config(b_i, b_j, **overrides):
    defaults = dict(
        trials=1,
        balance_range_i=(b_i, b_i),
        balance_range_j=(b_j, b_j),
        strategy_i=FULL,
        strategy_j=FULL,
        seed=7,
    )
    defaults.update(overrides)
    return SimConfig(**defaults)


class TestStrategySpec:
    def test_high_low_are_config_values(self):
        assert HIGH_STRATEGY.fraction == 0.9
        assert LOW_STRATEGY.fraction == 0.3

    def test_fraction_required_iff_fixed(self):
        with pytest.raises(ValueError):
            StrategySpec("fixed_fraction")
        with pytest.raises(ValueError):
            StrategySpec("full_balance", fraction=0.5)
        with pytest.raises(ValueError):
            StrategySpec("fixed_fraction", fraction=0.0)

    def test_parcel_rounds_half_up_with_floor_one(self):
        assert parcel_size(StrategySpec("fixed_fraction", 0.5), 5) == 3
        assert parcel_size(StrategySpec("fixed_fraction", 0.3), 1) == 1
        assert parcel_size(StrategySpec("fixed_fraction", 0.1), 4) == 1
        assert parcel_size(FULL, 9) == 9


class TestOneShot:
    def test_oversized_offer_never_trades(self):
        report = run_simulation(fixed_pair_config(5, -3))
        assert report.trades_executed == 0
        assert report.hit_ratio == 0.0
        assert report.total_volume == 0

    def test_fitting_offer_trades_full_balance(self):
        report = run_simulation(fixed_pair_config(3, -5))
        assert report.trades_executed == 1
        assert report.total_volume == 3
        assert report.hit_ratio == 1.0

    def test_report_echoes_seed_and_mode(self):
        report = run_simulation(fixed_pair_config(3, -5, seed=123))
        assert report.seed == 123
        assert report.mode == "one_shot"
        assert report.rounds_to_clear_histogram == {}
        assert report.uncleared_trials is None

    def test_determinism_bytes(self):
        config = SimConfig(trials=500, seed=42)
        assert run_simulation(config).to_json() == run_simulation(config).to_json()

    def test_different_seeds_differ(self):
        a = run_simulation(SimConfig(trials=2000, seed=1))
        b = run_simulation(SimConfig(trials=2000, seed=2))
        assert a.to_json() != b.to_json()


class TestRepeated:
    def test_repeated_clears_fixed_pair(self):
        report = run_simulation(
            fixed_pair_config(6, -6, mode="repeated", strategy_i=FULL, strategy_j=FULL)
        )
        assert report.total_volume == 6
        assert report.rounds_to_clear_histogram == {1: 1}
        assert report.uncleared_trials == 0

    def test_repeated_stuck_pair_hits_round_budget(self):
        report = run_simulation(
            fixed_pair_config(5, -3, mode="repeated", max_rounds=11)
        )
        assert report.uncleared_trials == 1
        assert report.opportunities == 11
        assert report.trades_executed == 0

    def test_first_round_matches_one_shot_per_trial(self):
        base = dict(trials=300, seed=99, strategy_i=RANDOM, strategy_j=RANDOM)
        one_shot = list(iter_trials(SimConfig(mode="one_shot", **base)))
        repeated = list(iter_trials(SimConfig(mode="repeated", **base)))
        for single, multi in zip(one_shot, repeated):
            assert (single.balance_i, single.balance_j) == (
                multi.balance_i,
                multi.balance_j,
            )
            assert multi.volume >= single.volume

    def test_replay_against_core_trade_rule(self):
        # re-drive each trial's successful rounds through apply_trade and
        # check conservation plus sign preservation at every step
        config = SimConfig(
            trials=50,
            balance_range_i=(1, 40),
            balance_range_j=(-40, -1),
            strategy_i=RANDOM,
            strategy_j=RANDOM,
            seed=5,
            mode="repeated",
            max_rounds=30,
        )
        for record in iter_trials(config):
            instance = core.build_instance(record.balance_i, record.balance_j, 40)
            total = instance.balance_i + instance.balance_j
            remaining = record.volume
            while remaining > 0:
                step = min(
                    remaining, abs(instance.balance_i), abs(instance.balance_j)
                )
                instance = core.apply_trade(instance, step)
                remaining -= step
                assert instance.balance_i + instance.balance_j == total
                assert instance.balance_i >= 0 >= instance.balance_j
            if record.cleared:
                assert instance.balance_i == 0 or instance.balance_j == 0

    def test_volume_bounded_by_smaller_side(self):
        config = SimConfig(
            trials=200,
            balance_range_i=(1, 30),
            balance_range_j=(-10, -1),
            strategy_i=RANDOM,
            strategy_j=RANDOM,
            seed=11,
            mode="repeated",
        )
        for record in iter_trials(config):
            assert record.volume <= min(record.balance_i, -record.balance_j)
        report = run_simulation(config)
        assert report.total_volume <= config.trials * 10


class TestAnalyticHitRatio:
    def test_equal_deterministic_sizes(self):
        assert analytic_hit_ratio((2, 2), (-2, -2), FULL, FULL) == 1.0

    def test_small_enumerated_case(self):
        # pairs (1,1) (1,2) (2,1) (2,2): the offer fits in all but (2,1)
        assert analytic_hit_ratio((1, 2), (-2, -1), FULL, FULL) == 0.75

    def test_thousand_range_full_balance(self):
        value = analytic_hit_ratio((1, 1000), (-1000, -1), FULL, FULL)
        assert value == pytest.approx(500500 / 1_000_000, abs=0)

    def test_fixed_fraction_matches_enumeration(self):
        # brute-force the 3x3 joint distribution of deterministic parcels
        strategy = StrategySpec("fixed_fraction", 0.5)
        hits = 0
        for b_i in (1, 2, 3):
            for b_j in (1, 2, 3):
                if parcel_size(strategy, b_i) <= parcel_size(strategy, b_j):
                    hits += 1
        expected = Fraction(hits, 9)
        got = analytic_hit_ratio((1, 3), (-3, -1), strategy, strategy)
        assert got == pytest.approx(float(expected), abs=1e-15)

    def test_uniform_random_small_case_against_double_sum(self):
        # direct joint enumeration over balances and parcels for 1..2 ranges
        total = Fraction(0)
        for b_i in (1, 2):
            for b_j in (1, 2):
                weight = Fraction(1, 4)
                for a_i in range(1, b_i + 1):
                    for a_j in range(1, b_j + 1):
                        if a_i <= a_j:
                            total += weight * Fraction(1, b_i) * Fraction(1, b_j)
        got = analytic_hit_ratio((1, 2), (-2, -1), RANDOM, RANDOM)
        assert got == pytest.approx(float(total), abs=1e-15)


class TestConvergence:
    def test_uniform_random_hit_ratio_within_three_sigma(self):
        trials = 20_000
        config = SimConfig(trials=trials, seed=2024)
        report = run_simulation(config)
        expected = analytic_hit_ratio((1, 1000), (-1000, -1), RANDOM, RANDOM)
        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert abs(report.hit_ratio - expected) < 3 * sigma


class TestConfigAndReportSerialization:
    def test_config_round_trip(self):
        config = SimConfig(
            trials=10,
            strategy_i=HIGH_STRATEGY,
            strategy_j=LOW_STRATEGY,
            seed=9,
            mode="repeated",
            max_rounds=12,
        )
        again = SimConfig.from_json(json.dumps(config.to_jsonable()))
        assert again == config

    def test_report_json_shape(self):
        report = run_simulation(fixed_pair_config(3, -5))
        payload = json.loads(report.to_json())
        assert payload["trials"] == 1
        assert payload["hit_ratio"] == 1.0
        assert payload["seed"] == 7

    def test_histogram_csv(self):
        report = run_simulation(
            fixed_pair_config(6, -6, mode="repeated", strategy_i=FULL, strategy_j=FULL)
        )
        assert report.histogram_csv() == "rounds,count\n1,1\n"

    @pytest.mark.parametrize(
        "overrides",
        [
            {"trials": 0},
            {"balance_range_i": (0, 5)},
            {"balance_range_j": (-5, 0)},
            {"balance_range_i": (5, 1)},
            {"mode": "forever"},
            {"max_rounds": 0},
            {"seed": -1},
        ],
    )
    def test_invalid_configs_rejected(self, overrides):
        base = dict(trials=1, seed=1)
        base.update(overrides)
        with pytest.raises(ValueError):
            SimConfig(**base)


@settings(max_examples=25, deadline=None)
@given(
    b_i=st.integers(1, 20),
    b_j=st.integers(1, 20),
    seed=st.integers(0, 2**32),
)
def test_one_shot_trade_iff_offer_fits(b_i, b_j, seed):
    config = fixed_pair_config(b_i, -b_j, seed=seed)
    report = run_simulation(config)
    if b_i <= b_j:
        assert report.trades_executed == 1 and report.total_volume == b_i
    else:
        assert report.trades_executed == 0 and report.total_volume == 0
