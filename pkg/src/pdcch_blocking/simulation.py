"""Monte Carlo estimation of PDCCH blocking probability.

Every iteration draws its own RNG stream from (master_seed, iteration index),
so results are bit-identical no matter how iterations are ordered or spread
over workers. Within an iteration the stream is consumed in a fixed order:
C-RNTIs, then aggregation levels, then the scheduler's tie-break permutation.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .coreset import AGGREGATION_LEVELS, CoresetConfig
from .scheduler import (CANDIDATE_CHOICES, CHOICE_LEFTMOST_CCE, STRATEGIES,
                        STRATEGY_LOW_TO_HIGH, _allocation_order, _greedy_assign)
from .search_space import RNTI_MAX, SearchSpaceConfig, candidate_starts, y_value

AXIS_UE_COUNT = "ue_count"
AXIS_CORESET_SIZE = "coreset_size"
AXIS_CANDIDATE_COUNT = "candidate_count"
AXIS_CANDIDATE_COUNTS = "candidate_counts"
AXIS_AL_FIXED = "al_fixed"
AXIS_AL_DISTRIBUTION = "al_distribution"
AXIS_STRATEGY = "strategy"
SWEEP_AXES = (AXIS_UE_COUNT, AXIS_CORESET_SIZE, AXIS_CANDIDATE_COUNT,
              AXIS_CANDIDATE_COUNTS, AXIS_AL_FIXED, AXIS_AL_DISTRIBUTION,
              AXIS_STRATEGY)

PROBABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class AlDistribution:
    """Probability of each aggregation level, ordered as ALs (1, 2, 4, 8, 16)."""

    probabilities: tuple

    def __post_init__(self):
        probs = self.probabilities
        if isinstance(probs, dict):
            unknown = set(probs) - set(AGGREGATION_LEVELS)
            if unknown:
                raise ValueError(f"unknown aggregation levels: {sorted(unknown)}")
            probs = tuple(float(probs.get(al, 0.0)) for al in AGGREGATION_LEVELS)
        else:
            probs = tuple(float(p) for p in probs)
            if len(probs) != len(AGGREGATION_LEVELS):
                raise ValueError(
                    f"distribution needs {len(AGGREGATION_LEVELS)} probabilities "
                    f"(ALs {AGGREGATION_LEVELS}), got {len(probs)}")
        object.__setattr__(self, "probabilities", probs)
        if any(p < 0 for p in probs):
            raise ValueError(f"probabilities must be >= 0, got {probs}")
        total = sum(probs)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")

    @classmethod
    def fixed(cls, aggregation_level: int) -> "AlDistribution":
        """Point mass: every UE uses the one given aggregation level."""
        if aggregation_level not in AGGREGATION_LEVELS:
            raise ValueError(
                f"aggregation level must be one of {AGGREGATION_LEVELS}, got {aggregation_level}")
        return cls(tuple(1.0 if al == aggregation_level else 0.0
                         for al in AGGREGATION_LEVELS))

    def probability_of(self, aggregation_level: int) -> float:
        return self.probabilities[AGGREGATION_LEVELS.index(aggregation_level)]


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one blocking-probability estimate needs."""

    ue_count: int
    coreset: CoresetConfig
    search_space: SearchSpaceConfig
    al_distribution: AlDistribution
    strategy: str = STRATEGY_LOW_TO_HIGH
    iterations: int = 10000
    master_seed: int = 0
    unique_rntis: bool = False
    candidate_choice: str = CHOICE_LEFTMOST_CCE

    def __post_init__(self):
        if self.ue_count < 1:
            raise ValueError(f"ue_count must be >= 1, got {self.ue_count}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.candidate_choice not in CANDIDATE_CHOICES:
            raise ValueError(
                f"candidate_choice must be one of {CANDIDATE_CHOICES}, "
                f"got {self.candidate_choice!r}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be >= 0, got {self.master_seed}")
        if self.unique_rntis and self.ue_count > RNTI_MAX:
            raise ValueError(
                f"cannot draw {self.ue_count} distinct C-RNTIs from [1, {RNTI_MAX}]")


@dataclass(frozen=True)
class SimulationResult:
    """Aggregate blocking estimate over all iterations.

    ``scheduled_total`` counts successfully assigned UEs, so
    blocked_total + scheduled_total == ue_count * iterations. The stderr is
    the binomial normal approximation over those trials; per-iteration UE
    outcomes are correlated, so treat it as indicative.
    """

    blocking_probability: float
    blocked_total: int
    scheduled_total: int
    stderr: float
    per_iteration_blocked: tuple = None

    @classmethod
    def from_counts(cls, blocked_total: int, ue_count: int, iterations: int,
                    per_iteration_blocked=None) -> "SimulationResult":
        trials = ue_count * iterations
        b = blocked_total / trials
        stderr = math.sqrt(b * (1.0 - b) / trials)
        per_iter = None if per_iteration_blocked is None else tuple(per_iteration_blocked)
        return cls(blocking_probability=b, blocked_total=blocked_total,
                   scheduled_total=trials - blocked_total, stderr=stderr,
                   per_iteration_blocked=per_iter)


def iteration_rng(master_seed: int, iteration: int):
    """Independent, order-free RNG stream for one iteration."""
    return np.random.default_rng([master_seed, iteration])


def _simulate_iteration(cfg: ScenarioConfig, cumulative, iteration: int) -> int:
    """Run one scheduling opportunity; returns the number of blocked UEs."""
    rng = iteration_rng(cfg.master_seed, iteration)
    u = cfg.ue_count
    if cfg.unique_rntis:
        rntis = rng.choice(RNTI_MAX, size=u, replace=False) + 1
    else:
        rntis = rng.integers(1, RNTI_MAX + 1, size=u)
    al_idx = np.searchsorted(cumulative, rng.random(u), side="right")
    al_idx = np.minimum(al_idx, len(AGGREGATION_LEVELS) - 1)

    cce_count = cfg.coreset.cce_count
    counts = cfg.search_space.candidates_per_al
    leftmost = cfg.candidate_choice == CHOICE_LEFTMOST_CCE
    als = []
    masks = []
    for i in range(u):
        level = AGGREGATION_LEVELS[al_idx[i]]
        als.append(level)
        m = counts[al_idx[i]]
        if m == 0 or cce_count < level:
            masks.append(())  # nothing schedulable: this UE is always blocked
            continue
        y = y_value(int(rntis[i]), cfg.coreset.coreset_index,
                    cfg.search_space.slot_index, cfg.search_space.space_type)
        full = (1 << level) - 1
        ue_masks = [full << start for start in
                    candidate_starts(level, cce_count, m, y)]
        if leftmost:
            ue_masks.sort()  # same-AL masks order by start CCE
        masks.append(tuple(ue_masks))

    order = _allocation_order(als, cfg.strategy, rng)
    _, blocked, _ = _greedy_assign(order, masks)
    return len(blocked)


def _run_range(cfg: ScenarioConfig, start: int, stop: int, keep: bool):
    cumulative = np.cumsum(cfg.al_distribution.probabilities)
    per_iter = [] if keep else None
    blocked_total = 0
    for iteration in range(start, stop):
        blocked = _simulate_iteration(cfg, cumulative, iteration)
        blocked_total += blocked
        if keep:
            per_iter.append(blocked)
    return blocked_total, per_iter


def _run_range_args(args):
    return _run_range(*args)


def run_scenario(cfg: ScenarioConfig, workers: int = None,
                 keep_per_iteration: bool = False) -> SimulationResult:
    """Estimate the blocking probability for one scenario.

    ``workers`` > 1 spreads iterations over processes; because every
    iteration seeds its own stream from (master_seed, iteration), the result
    is bit-identical to a serial run.
    """
    if workers is not None and workers > 1:
        bounds = np.linspace(0, cfg.iterations, workers + 1, dtype=int)
        tasks = [(cfg, int(lo), int(hi), keep_per_iteration)
                 for lo, hi in zip(bounds[:-1], bounds[1:]) if lo < hi]
        with ProcessPoolExecutor(max_workers=len(tasks)) as pool:
            parts = list(pool.map(_run_range_args, tasks))
        blocked_total = sum(p[0] for p in parts)
        per_iter = None
        if keep_per_iteration:
            per_iter = [b for p in parts for b in p[1]]
    else:
        blocked_total, per_iter = _run_range(cfg, 0, cfg.iterations, keep_per_iteration)
    return SimulationResult.from_counts(blocked_total, cfg.ue_count, cfg.iterations,
                                        per_iteration_blocked=per_iter)


@dataclass(frozen=True)
class SweepPoint:
    """One sweep evaluation: the axis point, a printable label, and either a
    result or the error that prevented it."""

    point: object
    label: str
    result: SimulationResult = None
    error: str = None


def _named_point(point, builder):
    """Points on list-valued axes may be {"name": ..., <key>: [...]}."""
    if isinstance(point, dict):
        extra = set(point) - {"name", builder}
        if extra or builder not in point:
            raise ValueError(f"point must have keys ('name', {builder!r}), got {sorted(point)}")
        return point.get("name"), point[builder]
    return None, point


def _point_label(point) -> str:
    if isinstance(point, dict):
        if point.get("name"):
            return str(point["name"])
        point = point.get("counts") or point.get("probabilities") or point
    if isinstance(point, (list, tuple)):
        return "/".join(f"{v:g}" if isinstance(v, float) else str(v) for v in point)
    return str(point)


def apply_axis(base: ScenarioConfig, axis: str, point, al: int = None) -> ScenarioConfig:
    """Return ``base`` with one parameter replaced according to the sweep axis."""
    if axis == AXIS_UE_COUNT:
        return replace(base, ue_count=int(point))
    if axis == AXIS_CORESET_SIZE:
        coreset = CoresetConfig.from_cce_count(int(point), base.coreset.coreset_index)
        return replace(base, coreset=coreset)
    if axis == AXIS_CANDIDATE_COUNT:
        if al not in AGGREGATION_LEVELS:
            raise ValueError(f"candidate_count sweeps need al in {AGGREGATION_LEVELS}, got {al}")
        counts = list(base.search_space.candidates_per_al)
        counts[AGGREGATION_LEVELS.index(al)] = int(point)
        space = replace(base.search_space, candidates_per_al=tuple(counts))
        return replace(base, search_space=space)
    if axis == AXIS_CANDIDATE_COUNTS:
        _, counts = _named_point(point, "counts")
        space = replace(base.search_space, candidates_per_al=tuple(counts))
        return replace(base, search_space=space)
    if axis == AXIS_AL_FIXED:
        return replace(base, al_distribution=AlDistribution.fixed(int(point)))
    if axis == AXIS_AL_DISTRIBUTION:
        _, probs = _named_point(point, "probabilities")
        return replace(base, al_distribution=AlDistribution(tuple(probs)))
    if axis == AXIS_STRATEGY:
        return replace(base, strategy=str(point))
    raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")


def run_sweep(base: ScenarioConfig, axis: str, points, al: int = None,
              workers: int = None) -> list:
    """Run one scenario per point, in input order, all from the same master
    seed (common random numbers across points). A point that fails validation
    is reported in its SweepPoint; the sweep continues."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    if not points:
        raise ValueError("sweep needs at least one point")
    out = []
    for point in points:
        label = _point_label(point)
        try:
            cfg = apply_axis(base, axis, point, al=al)
            result = run_scenario(cfg, workers=workers)
            out.append(SweepPoint(point=point, label=label, result=result))
        except ValueError as exc:
            out.append(SweepPoint(point=point, label=label, error=str(exc)))
    return out
