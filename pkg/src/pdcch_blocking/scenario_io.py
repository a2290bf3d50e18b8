"""Scenario files, bundled studies, and result serialization.

Scenario files are JSON with strict key checking: an unknown key is a parse
error, so typos cannot silently fall back to defaults. Results go out as CSV
(one header row, fixed column order) or JSON, and round-trip losslessly.
"""

import csv
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .coreset import CoresetConfig
from .planner import PlanningRequest
from .scheduler import CHOICE_LEFTMOST_CCE, STRATEGY_LOW_TO_HIGH
from .search_space import SPACE_TYPE_UE_SPECIFIC, SearchSpaceConfig
from .simulation import (SWEEP_AXES, AlDistribution, ScenarioConfig,
                         SimulationResult, SweepPoint)

OUTPUT_DIR_ENV = "PDCCH_SIM_OUTDIR"

CSV_COLUMNS = ("scenario", "point", "blocking_probability", "stderr",
               "blocked_total", "scheduled_total", "seed", "iterations")

FORMAT_CSV = "csv"
FORMAT_JSON = "json"
FORMATS = (FORMAT_CSV, FORMAT_JSON)

_SCENARIO_KEYS = {"name", "description", "figure", "ue_count", "coreset",
                  "search_space", "al_distribution", "strategy", "iterations",
                  "master_seed", "unique_rntis", "candidate_choice", "sweep"}
_CORESET_KEYS = {"rb_count", "symbol_duration", "cce_count", "coreset_index"}
_SEARCH_SPACE_KEYS = {"candidates_per_al", "space_type", "slot_index"}
_SWEEP_KEYS = {"axis", "points", "al"}
_PLAN_KEYS = {"name", "description", "ue_count", "target_blocking",
              "al_distribution", "search_space", "cce_range", "strategy",
              "iterations", "master_seed", "coreset_index", "candidate_choice",
              "require_margin"}


class ScenarioParseError(ValueError):
    """The file is not readable as a scenario: bad JSON, keys, or types."""


class ScenarioValidationError(ValueError):
    """The file parsed but violates a configuration invariant."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    points: tuple
    al: int = None


@dataclass(frozen=True)
class Scenario:
    """A named, fully validated configuration, optionally with a sweep."""

    name: str
    config: ScenarioConfig
    sweep: SweepSpec = None
    figure: str = None
    description: str = None


@dataclass(frozen=True)
class ResultRecord:
    """One serializable result row."""

    scenario: str
    point: str
    blocking_probability: float
    stderr: float
    blocked_total: int
    scheduled_total: int
    seed: int
    iterations: int


def _require_keys(mapping, allowed, required, context):
    if not isinstance(mapping, dict):
        raise ScenarioParseError(f"{context} must be an object, got {type(mapping).__name__}")
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioParseError(f"unknown key(s) in {context}: {sorted(unknown)}")
    missing = required - set(mapping)
    if missing:
        raise ScenarioParseError(f"missing key(s) in {context}: {sorted(missing)}")


def _coreset_from_dict(data) -> CoresetConfig:
    _require_keys(data, _CORESET_KEYS, set(), "coreset")
    index = int(data.get("coreset_index", 0))
    if "cce_count" in data:
        if "rb_count" in data or "symbol_duration" in data:
            raise ScenarioParseError(
                "coreset takes either cce_count or rb_count/symbol_duration, not both")
        return CoresetConfig.from_cce_count(int(data["cce_count"]), index)
    if "rb_count" not in data or "symbol_duration" not in data:
        raise ScenarioParseError(
            "coreset needs cce_count, or rb_count and symbol_duration")
    return CoresetConfig(rb_count=int(data["rb_count"]),
                         symbol_duration=int(data["symbol_duration"]),
                         coreset_index=index)


def _search_space_from_dict(data) -> SearchSpaceConfig:
    _require_keys(data, _SEARCH_SPACE_KEYS, {"candidates_per_al"}, "search_space")
    return SearchSpaceConfig(
        candidates_per_al=tuple(data["candidates_per_al"]),
        space_type=data.get("space_type", SPACE_TYPE_UE_SPECIFIC),
        slot_index=int(data.get("slot_index", 0)))


def scenario_from_dict(data) -> Scenario:
    """Build a validated Scenario from a parsed mapping, applying defaults."""
    _require_keys(data, _SCENARIO_KEYS,
                  {"name", "ue_count", "coreset", "search_space", "al_distribution"},
                  "scenario")
    try:
        config = ScenarioConfig(
            ue_count=int(data["ue_count"]),
            coreset=_coreset_from_dict(data["coreset"]),
            search_space=_search_space_from_dict(data["search_space"]),
            al_distribution=AlDistribution(tuple(data["al_distribution"])),
            strategy=data.get("strategy", STRATEGY_LOW_TO_HIGH),
            iterations=int(data.get("iterations", 10000)),
            master_seed=int(data.get("master_seed", 0)),
            unique_rntis=bool(data.get("unique_rntis", False)),
            candidate_choice=data.get("candidate_choice", CHOICE_LEFTMOST_CCE))
    except ScenarioParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioValidationError(str(exc)) from exc
    sweep = None
    if "sweep" in data:
        _require_keys(data["sweep"], _SWEEP_KEYS, {"axis", "points"}, "sweep")
        axis = data["sweep"]["axis"]
        if axis not in SWEEP_AXES:
            raise ScenarioValidationError(
                f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
        points = data["sweep"]["points"]
        if not isinstance(points, list) or not points:
            raise ScenarioValidationError("sweep points must be a non-empty list")
        al = data["sweep"].get("al")
        sweep = SweepSpec(axis=axis,
                          points=tuple(tuple(p) if isinstance(p, list) else p
                                       for p in points),
                          al=None if al is None else int(al))
    return Scenario(name=str(data["name"]), config=config, sweep=sweep,
                    figure=data.get("figure"), description=data.get("description"))


def _load_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def parse_scenario(path) -> Scenario:
    """Parse and validate one scenario file."""
    return scenario_from_dict(_load_json(path))


def scenario_to_dict(scenario: Scenario) -> dict:
    """Normalized mapping form of a scenario; parse(scenario_to_dict(s)) == s."""
    cfg = scenario.config
    data = {"name": scenario.name}
    if scenario.description is not None:
        data["description"] = scenario.description
    if scenario.figure is not None:
        data["figure"] = scenario.figure
    data.update({
        "ue_count": cfg.ue_count,
        "coreset": {"rb_count": cfg.coreset.rb_count,
                    "symbol_duration": cfg.coreset.symbol_duration,
                    "coreset_index": cfg.coreset.coreset_index},
        "search_space": {"candidates_per_al": list(cfg.search_space.candidates_per_al),
                         "space_type": cfg.search_space.space_type,
                         "slot_index": cfg.search_space.slot_index},
        "al_distribution": list(cfg.al_distribution.probabilities),
        "strategy": cfg.strategy,
        "iterations": cfg.iterations,
        "master_seed": cfg.master_seed,
        "unique_rntis": cfg.unique_rntis,
        "candidate_choice": cfg.candidate_choice,
    })
    if scenario.sweep is not None:
        sweep = {"axis": scenario.sweep.axis,
                 "points": [list(p) if isinstance(p, tuple) else p
                            for p in scenario.sweep.points]}
        if scenario.sweep.al is not None:
            sweep["al"] = scenario.sweep.al
        data["sweep"] = sweep
    return data


def parse_plan_request(path):
    """Parse a planning request file; returns (name, PlanningRequest)."""
    data = _load_json(path)
    _require_keys(data, _PLAN_KEYS,
                  {"name", "ue_count", "target_blocking", "al_distribution",
                   "search_space", "cce_range"},
                  "plan request")
    cce_range = data["cce_range"]
    if not isinstance(cce_range, list) or len(cce_range) != 2:
        raise ScenarioParseError("cce_range must be [min, max]")
    try:
        request = PlanningRequest(
            ue_count=int(data["ue_count"]),
            target_blocking=float(data["target_blocking"]),
            al_distribution=AlDistribution(tuple(data["al_distribution"])),
            search_space=_search_space_from_dict(data["search_space"]),
            cce_min=int(cce_range[0]),
            cce_max=int(cce_range[1]),
            strategy=data.get("strategy", STRATEGY_LOW_TO_HIGH),
            iterations=int(data.get("iterations", 10000)),
            master_seed=int(data.get("master_seed", 0)),
            coreset_index=int(data.get("coreset_index", 0)),
            candidate_choice=data.get("candidate_choice", CHOICE_LEFTMOST_CCE),
            require_margin=bool(data.get("require_margin", False)))
    except (TypeError, ValueError) as exc:
        raise ScenarioValidationError(str(exc)) from exc
    return str(data["name"]), request


def bundled_scenario_names() -> list:
    """Names of the scenario and plan-request files shipped with the package."""
    root = resources.files("pdcch_blocking").joinpath("scenarios")
    return sorted(p.name[:-len(".json")] for p in root.iterdir()
                  if p.name.endswith(".json"))


def bundled_scenario_path(name: str) -> Path:
    root = resources.files("pdcch_blocking").joinpath("scenarios")
    path = root.joinpath(f"{name}.json")
    if not path.is_file():
        raise ScenarioParseError(
            f"no bundled scenario {name!r}; available: {bundled_scenario_names()}")
    return Path(str(path))


def record_for_run(scenario_name: str, config: ScenarioConfig,
                   result: SimulationResult, point: str = "") -> ResultRecord:
    return ResultRecord(scenario=scenario_name, point=point,
                        blocking_probability=result.blocking_probability,
                        stderr=result.stderr,
                        blocked_total=result.blocked_total,
                        scheduled_total=result.scheduled_total,
                        seed=config.master_seed,
                        iterations=config.iterations)


def records_for_sweep(scenario_name: str, base: ScenarioConfig, points) -> list:
    """ResultRecords for the successful points of a sweep, in sweep order."""
    records = []
    for sp in points:
        if sp.result is None:
            continue
        records.append(ResultRecord(
            scenario=scenario_name, point=sp.label,
            blocking_probability=sp.result.blocking_probability,
            stderr=sp.result.stderr,
            blocked_total=sp.result.blocked_total,
            scheduled_total=sp.result.scheduled_total,
            seed=base.master_seed, iterations=base.iterations))
    return records


def resolve_output_path(path) -> Path:
    """Relative output paths land in $PDCCH_SIM_OUTDIR when it is set."""
    path = Path(path)
    outdir = os.environ.get(OUTPUT_DIR_ENV)
    if outdir and not path.is_absolute():
        return Path(outdir) / path
    return path


def emit_results(records, fmt: str, path) -> Path:
    """Write records to ``path``. CSV: header plus one row per record, columns
    in CSV_COLUMNS order; JSON: an array of record objects. Floats keep full
    precision (shortest round-trip form)."""
    if not records:
        raise ValueError("no records to emit")
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    path = resolve_output_path(path)
    rows = [{col: getattr(r, col) for col in CSV_COLUMNS} for r in records]
    if fmt == FORMAT_CSV:
        with open(path, "w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for row in rows:
                row["blocking_probability"] = repr(row["blocking_probability"])
                row["stderr"] = repr(row["stderr"])
                writer.writerow(row)
    else:
        with open(path, "w") as handle:
            json.dump(rows, handle, indent=2)
            handle.write("\n")
    return path


def load_results(path, fmt: str = None) -> list:
    """Read records written by emit_results."""
    path = Path(path)
    if fmt is None:
        fmt = FORMAT_JSON if path.suffix == ".json" else FORMAT_CSV
    if fmt == FORMAT_JSON:
        rows = json.loads(path.read_text())
    else:
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
    return [ResultRecord(scenario=row["scenario"], point=row["point"],
                         blocking_probability=float(row["blocking_probability"]),
                         stderr=float(row["stderr"]),
                         blocked_total=int(row["blocked_total"]),
                         scheduled_total=int(row["scheduled_total"]),
                         seed=int(row["seed"]),
                         iterations=int(row["iterations"]))
            for row in rows]
