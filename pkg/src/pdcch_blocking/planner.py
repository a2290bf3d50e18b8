"""Minimum CORESET size meeting a blocking-probability target.

Bisection over the CCE count (blocking decreases with CORESET size), then a
short downward scan to guard against local non-monotonicity from hash
effects and Monte Carlo noise. All evaluations share one master seed, so the
per-size estimates are directly comparable.
"""

from dataclasses import dataclass

from .coreset import CoresetConfig
from .scheduler import (CANDIDATE_CHOICES, CHOICE_LEFTMOST_CCE, STRATEGIES,
                        STRATEGY_LOW_TO_HIGH)
from .search_space import SearchSpaceConfig
from .simulation import AlDistribution, ScenarioConfig, run_scenario

CONFIRMATION_SCAN = 4  # CCE sizes re-checked below the bisection answer


@dataclass(frozen=True)
class PlanningRequest:
    ue_count: int
    target_blocking: float
    al_distribution: AlDistribution
    search_space: SearchSpaceConfig
    cce_min: int
    cce_max: int
    strategy: str = STRATEGY_LOW_TO_HIGH
    iterations: int = 10000
    master_seed: int = 0
    coreset_index: int = 0
    candidate_choice: str = CHOICE_LEFTMOST_CCE
    require_margin: bool = False  # compare B + 2*stderr instead of B

    def __post_init__(self):
        if self.ue_count < 1:
            raise ValueError(f"ue_count must be >= 1, got {self.ue_count}")
        if not 0.0 < self.target_blocking < 1.0:
            raise ValueError(
                f"target_blocking must be in (0, 1), got {self.target_blocking}")
        if self.cce_min < 1:
            raise ValueError(f"cce_min must be >= 1, got {self.cce_min}")
        if self.cce_max < self.cce_min:
            raise ValueError(
                f"cce_max {self.cce_max} smaller than cce_min {self.cce_min}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.candidate_choice not in CANDIDATE_CHOICES:
            raise ValueError(
                f"candidate_choice must be one of {CANDIDATE_CHOICES}, "
                f"got {self.candidate_choice!r}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")


@dataclass(frozen=True)
class PlanningResult:
    """Smallest CCE count meeting the target, or None when the range cannot.

    ``evaluations`` records every (cce_count, blocking, stderr) simulated, in
    evaluation order.
    """

    min_cces: int
    achieved_blocking: float
    evaluations: tuple

    def evaluated_blocking(self, cce_count: int) -> float:
        for cces, blocking, _ in self.evaluations:
            if cces == cce_count:
                return blocking
        raise KeyError(f"CORESET size {cce_count} was not evaluated")


def plan_min_coreset(req: PlanningRequest, workers: int = None) -> PlanningResult:
    """Find the smallest CORESET (in CCEs) with estimated blocking at or
    below the target, searching [cce_min, cce_max]."""
    cache = {}
    evaluated = []

    def estimate(cces: int):
        if cces not in cache:
            cfg = ScenarioConfig(
                ue_count=req.ue_count,
                coreset=CoresetConfig.from_cce_count(cces, req.coreset_index),
                search_space=req.search_space,
                al_distribution=req.al_distribution,
                strategy=req.strategy,
                iterations=req.iterations,
                master_seed=req.master_seed,
                candidate_choice=req.candidate_choice)
            cache[cces] = run_scenario(cfg, workers=workers)
            evaluated.append(cces)
        return cache[cces]

    def meets(cces: int) -> bool:
        result = estimate(cces)
        bound = result.blocking_probability
        if req.require_margin:
            bound += 2.0 * result.stderr
        return bound <= req.target_blocking

    def evaluations():
        return tuple((c, cache[c].blocking_probability, cache[c].stderr)
                     for c in evaluated)

    if not meets(req.cce_max):
        return PlanningResult(min_cces=None, achieved_blocking=None,
                              evaluations=evaluations())

    lo, hi = req.cce_min, req.cce_max
    while lo < hi:
        mid = (lo + hi) // 2
        if meets(mid):
            hi = mid
        else:
            lo = mid + 1
    best = lo

    # Hash-structure steps can make blocking dip below the target before the
    # bisection answer; re-check the few sizes just underneath.
    for cces in range(best - 1, max(req.cce_min, best - CONFIRMATION_SCAN) - 1, -1):
        if meets(cces):
            best = cces
    # Keep descending while the size below still meets, so min_cces - 1 is
    # always a confirmed miss (or the range floor).
    while best > req.cce_min and meets(best - 1):
        best -= 1

    return PlanningResult(min_cces=best,
                          achieved_blocking=cache[best].blocking_probability,
                          evaluations=evaluations())
