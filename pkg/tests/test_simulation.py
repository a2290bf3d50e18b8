import dataclasses

import numpy as np
import pytest

from pdcch_blocking import (AlDistribution, CoresetConfig, ScenarioConfig,
                            SearchSpaceConfig, SimulationResult, apply_axis,
                            iteration_rng, run_scenario, run_sweep)
from pdcch_blocking.scheduler import STRATEGY_HIGH_TO_LOW, STRATEGY_UNORDERED

MIXED = (0.4, 0.3, 0.2, 0.05, 0.05)


def scenario(**overrides):
    base = dict(ue_count=10,
                coreset=CoresetConfig.from_cce_count(54),
                search_space=SearchSpaceConfig((6, 6, 4, 2, 1)),
                al_distribution=AlDistribution(MIXED),
                iterations=500,
                master_seed=123)
    base.update(overrides)
    return ScenarioConfig(**base)


# --- distribution and config validation -------------------------------------

def test_distribution_must_sum_to_one():
    with pytest.raises(ValueError):
        AlDistribution((0.4, 0.3, 0.2, 0.05, 0.0))
    with pytest.raises(ValueError):
        AlDistribution((0.5, 0.5, 0.2, -0.1, -0.1))
    AlDistribution((0.2, 0.2, 0.2, 0.2, 0.2 + 1e-12))  # within tolerance


def test_distribution_fixed_point_mass():
    dist = AlDistribution.fixed(8)
    assert dist.probabilities == (0.0, 0.0, 0.0, 1.0, 0.0)
    assert dist.probability_of(8) == 1.0
    with pytest.raises(ValueError):
        AlDistribution.fixed(3)


def test_distribution_mapping_form():
    dist = AlDistribution({1: 0.5, 2: 0.5})
    assert dist.probabilities == (0.5, 0.5, 0.0, 0.0, 0.0)


def test_scenario_config_validation():
    with pytest.raises(ValueError):
        scenario(ue_count=0)
    with pytest.raises(ValueError):
        scenario(iterations=0)
    with pytest.raises(ValueError):
        scenario(strategy="fastest_first")
    with pytest.raises(ValueError):
        scenario(candidate_choice="random")
    with pytest.raises(ValueError):
        scenario(master_seed=-1)


def test_result_counts_and_stderr():
    result = SimulationResult.from_counts(30, ue_count=10, iterations=100)
    assert result.blocking_probability == pytest.approx(0.03)
    assert result.blocked_total == 30
    assert result.scheduled_total == 970
    assert result.stderr == pytest.approx((0.03 * 0.97 / 1000) ** 0.5)


# --- run_scenario ------------------------------------------------------------

def test_single_ue_never_blocks():
    result = run_scenario(scenario(ue_count=1, iterations=300))
    assert result.blocking_probability == 0.0
    assert result.blocked_total == 0


def test_analytic_oracle_identical_candidates():
    # AL 16 only, M=1, C=16: every UE hashes to the one 16-CCE block,
    # so exactly U-1 UEs are blocked in every single iteration
    for u in (2, 6):
        cfg = scenario(ue_count=u,
                       coreset=CoresetConfig.from_cce_count(16),
                       search_space=SearchSpaceConfig({16: 1}),
                       al_distribution=AlDistribution.fixed(16),
                       iterations=400)
        result = run_scenario(cfg, keep_per_iteration=True)
        assert set(result.per_iteration_blocked) == {u - 1}
        assert result.blocked_total == (u - 1) * 400


def test_reproducible_and_order_free():
    cfg = scenario(iterations=400)
    serial = run_scenario(cfg, keep_per_iteration=True)
    again = run_scenario(cfg, keep_per_iteration=True)
    assert serial.blocked_total == again.blocked_total
    assert serial.per_iteration_blocked == again.per_iteration_blocked
    parallel = run_scenario(cfg, workers=3, keep_per_iteration=True)
    assert parallel.blocked_total == serial.blocked_total
    assert parallel.per_iteration_blocked == serial.per_iteration_blocked


def test_different_seeds_differ():
    a = run_scenario(scenario(master_seed=1, iterations=400))
    b = run_scenario(scenario(master_seed=2, iterations=400))
    assert a.blocked_total != b.blocked_total


def test_iteration_rng_streams_are_stable():
    a = iteration_rng(99, 5).integers(0, 1 << 30, size=4)
    b = iteration_rng(99, 5).integers(0, 1 << 30, size=4)
    c = iteration_rng(99, 6).integers(0, 1 << 30, size=4)
    assert (a == b).all()
    assert (a != c).any()


def test_blocking_grows_with_ue_count():
    low = run_scenario(scenario(ue_count=5, iterations=3000))
    high = run_scenario(scenario(ue_count=30, iterations=3000))
    margin = 2 * (low.stderr + high.stderr)
    assert high.blocking_probability > low.blocking_probability - margin
    assert high.blocking_probability > 0.1


def test_unschedulable_al_counts_as_blocked():
    # AL 16 cannot fit into 8 CCEs: those UEs are blocked by definition
    cfg = scenario(ue_count=4,
                   coreset=CoresetConfig.from_cce_count(8),
                   al_distribution=AlDistribution.fixed(16),
                   iterations=50)
    result = run_scenario(cfg)
    assert result.blocking_probability == 1.0


def test_zero_candidate_al_counts_as_blocked():
    # the sampled AL has no configured candidates: nothing to monitor
    cfg = scenario(ue_count=3,
                   search_space=SearchSpaceConfig({1: 6}),
                   al_distribution=AlDistribution.fixed(2),
                   iterations=50)
    result = run_scenario(cfg)
    assert result.blocking_probability == 1.0


def test_unique_rntis_flag():
    cfg = scenario(unique_rntis=True, iterations=200)
    result = run_scenario(cfg)
    again = run_scenario(cfg)
    assert result.blocked_total == again.blocked_total
    with pytest.raises(ValueError):
        scenario(ue_count=70000, unique_rntis=True)


# --- sweeps ------------------------------------------------------------------

def test_sweep_ue_count_axis():
    points = run_sweep(scenario(iterations=300), "ue_count", [5, 10, 20])
    assert [sp.label for sp in points] == ["5", "10", "20"]
    assert all(sp.result is not None for sp in points)


def test_sweep_coreset_axis_builds_geometry():
    cfg = apply_axis(scenario(), "coreset_size", 30)
    assert cfg.coreset.cce_count == 30
    assert cfg.coreset.rb_count == 180


def test_sweep_candidate_count_axis_needs_al():
    cfg = apply_axis(scenario(), "candidate_count", 3, al=2)
    assert cfg.search_space.candidates_per_al == (6, 3, 4, 2, 1)
    with pytest.raises(ValueError):
        apply_axis(scenario(), "candidate_count", 3)


def test_sweep_candidate_counts_axis_full_list():
    cfg = apply_axis(scenario(), "candidate_counts",
                     {"name": "reduced", "counts": [1, 1, 1, 1, 1]})
    assert cfg.search_space.candidates_per_al == (1, 1, 1, 1, 1)


def test_sweep_al_fixed_axis():
    cfg = apply_axis(scenario(), "al_fixed", 4)
    assert cfg.al_distribution.probabilities == (0.0, 0.0, 1.0, 0.0, 0.0)


def test_sweep_al_distribution_axis():
    cfg = apply_axis(scenario(), "al_distribution",
                     {"name": "good", "probabilities": [0.5, 0.4, 0.07, 0.02, 0.01]})
    assert cfg.al_distribution.probabilities[0] == 0.5


def test_sweep_strategy_axis():
    cfg = apply_axis(scenario(), "strategy", STRATEGY_HIGH_TO_LOW)
    assert cfg.strategy == STRATEGY_HIGH_TO_LOW


def test_sweep_continues_past_invalid_point():
    points = run_sweep(scenario(iterations=100), "coreset_size", [6, 0, 12])
    assert points[0].result is not None
    assert points[1].result is None and "cce_count" in points[1].error
    assert points[2].result is not None


def test_sweep_rejects_unknown_axis_and_empty_points():
    with pytest.raises(ValueError):
        run_sweep(scenario(), "bandwidth", [1])
    with pytest.raises(ValueError):
        run_sweep(scenario(), "ue_count", [])


def test_sweep_points_share_master_seed():
    # common random numbers: a sweep point must equal a direct run
    sp = run_sweep(scenario(iterations=300), "ue_count", [7])[0]
    direct = run_scenario(dataclasses.replace(scenario(iterations=300), ue_count=7))
    assert sp.result.blocked_total == direct.blocked_total


def test_unordered_strategy_runs():
    result = run_scenario(scenario(strategy=STRATEGY_UNORDERED, iterations=300))
    assert 0.0 <= result.blocking_probability <= 1.0
