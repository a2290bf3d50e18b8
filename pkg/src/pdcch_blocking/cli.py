"""Command-line front end: simulate, sweep, plan, validate-limits.

Exit codes: 0 success, 1 validation or parse error, 2 runtime error.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .planner import plan_min_coreset
from .scenario_io import (FORMAT_CSV, FORMATS, ResultRecord, Scenario,
                          ScenarioParseError, bundled_scenario_names,
                          bundled_scenario_path, emit_results, parse_plan_request,
                          parse_scenario, record_for_run, records_for_sweep,
                          resolve_output_path)
from .scheduler import MonitoringLimits, validate_limits
from .simulation import run_scenario, run_sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdcch-sim",
        description="PDCCH blocking-probability simulator and CORESET planner")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="override the file's master seed")
        p.add_argument("--iterations", type=int, default=None,
                       help="override the file's iteration count")
        p.add_argument("--out", default=None,
                       help="write results to this file (relative paths go to "
                            "$PDCCH_SIM_OUTDIR when set)")
        p.add_argument("--format", choices=FORMATS, default=FORMAT_CSV,
                       help="output file format (default csv)")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel worker processes (default serial)")

    p_sim = sub.add_parser("simulate", help="run one scenario's base configuration")
    p_sim.add_argument("scenario", help="scenario file path or bundled scenario name")
    add_common(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run a scenario's parameter sweep")
    p_sweep.add_argument("scenario", help="scenario file path or bundled scenario name")
    add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_plan = sub.add_parser("plan",
                            help="minimum CORESET size for a blocking target")
    p_plan.add_argument("request", help="plan request file path or bundled name")
    add_common(p_plan)
    p_plan.set_defaults(func=_cmd_plan)

    p_lim = sub.add_parser("validate-limits",
                           help="check a scenario's search space against BD/CCE limits")
    p_lim.add_argument("scenario", help="scenario file path or bundled scenario name")
    p_lim.add_argument("--rnti", type=int, default=1,
                       help="C-RNTI of the UE to report on (default 1)")
    p_lim.add_argument("--scs", type=int, choices=(15, 30, 60, 120), default=15,
                       help="subcarrier spacing in kHz (default 15)")
    p_lim.add_argument("--max-bd", type=int, default=None,
                       help="override the blind-decode limit")
    p_lim.add_argument("--max-cce", type=int, default=None,
                       help="override the non-overlapping-CCE limit")
    p_lim.set_defaults(func=_cmd_validate_limits)

    p_list = sub.add_parser("list", help="list bundled scenarios")
    p_list.set_defaults(func=_cmd_list)
    return parser


def _resolve_file(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    return bundled_scenario_path(name)


def _load_scenario(args) -> Scenario:
    scenario = parse_scenario(_resolve_file(args.scenario))
    config = scenario.config
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    if args.iterations is not None:
        config = dataclasses.replace(config, iterations=args.iterations)
    return dataclasses.replace(scenario, config=config)


def _emit(records, args):
    if args.out:
        path = emit_results(records, args.format, args.out)
        print(f"wrote {len(records)} record(s) to {path}")


def _cmd_simulate(args) -> int:
    scenario = _load_scenario(args)
    result = run_scenario(scenario.config, workers=args.workers)
    print(f"{scenario.name}: B={result.blocking_probability:.6g} "
          f"stderr={result.stderr:.3g} blocked={result.blocked_total} "
          f"scheduled={result.scheduled_total} "
          f"(U={scenario.config.ue_count}, C={scenario.config.coreset.cce_count}, "
          f"iterations={scenario.config.iterations}, seed={scenario.config.master_seed})")
    _emit([record_for_run(scenario.name, scenario.config, result)], args)
    return 0


def _cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    if scenario.sweep is None:
        raise ScenarioParseError(
            f"scenario {scenario.name!r} has no sweep section; use `simulate`")
    points = run_sweep(scenario.config, scenario.sweep.axis,
                       scenario.sweep.points, al=scenario.sweep.al,
                       workers=args.workers)
    print(f"{scenario.name}: sweep over {scenario.sweep.axis}")
    failures = 0
    for sp in points:
        if sp.result is not None:
            print(f"  {sp.label:>24}  B={sp.result.blocking_probability:.6g}  "
                  f"stderr={sp.result.stderr:.3g}")
        else:
            failures += 1
            print(f"  {sp.label:>24}  error: {sp.error}", file=sys.stderr)
    records = records_for_sweep(scenario.name, scenario.config, points)
    if records:
        _emit(records, args)
    return 0 if failures == 0 else 1


def _cmd_plan(args) -> int:
    name, request = parse_plan_request(_resolve_file(args.request))
    if args.seed is not None:
        request = dataclasses.replace(request, master_seed=args.seed)
    if args.iterations is not None:
        request = dataclasses.replace(request, iterations=args.iterations)
    result = plan_min_coreset(request, workers=args.workers)
    if result.min_cces is None:
        print(f"{name}: no CORESET size in [{request.cce_min}, {request.cce_max}] "
              f"meets target B <= {request.target_blocking}")
    else:
        print(f"{name}: min CORESET size = {result.min_cces} CCEs "
              f"(B={result.achieved_blocking:.6g}, target {request.target_blocking}, "
              f"U={request.ue_count}, {len(result.evaluations)} evaluations)")
    if args.out:
        path = resolve_output_path(args.out)
        if args.format == FORMAT_CSV:
            records = [ResultRecord(scenario=name, point=str(cces),
                                    blocking_probability=blocking, stderr=stderr,
                                    blocked_total=round(blocking * request.ue_count
                                                        * request.iterations),
                                    scheduled_total=round((1 - blocking) * request.ue_count
                                                          * request.iterations),
                                    seed=request.master_seed,
                                    iterations=request.iterations)
                       for cces, blocking, stderr in result.evaluations]
            emit_results(records, FORMAT_CSV, args.out)
        else:
            payload = {"name": name, "min_cces": result.min_cces,
                       "achieved_blocking": result.achieved_blocking,
                       "target_blocking": request.target_blocking,
                       "evaluations": [list(e) for e in result.evaluations]}
            with open(path, "w") as handle:
                json.dump(payload, handle, indent=2)
                handle.write("\n")
        print(f"wrote evaluations to {path}")
    return 0


def _cmd_validate_limits(args) -> int:
    scenario = parse_scenario(_resolve_file(args.scenario))
    limits = MonitoringLimits.for_scs(args.scs)
    if args.max_bd is not None or args.max_cce is not None:
        limits = MonitoringLimits(
            max_blind_decodes=args.max_bd if args.max_bd is not None
            else limits.max_blind_decodes,
            max_nonoverlap_cces=args.max_cce if args.max_cce is not None
            else limits.max_nonoverlap_cces,
            scs_khz=args.scs)
    report = validate_limits(scenario.config.search_space, scenario.config.coreset,
                             args.rnti, limits)
    bd_flag = "EXCEEDED" if report.blind_decodes_exceeded else "ok"
    cce_flag = "EXCEEDED" if report.cces_exceeded else "ok"
    print(f"{scenario.name}: blind decodes {report.blind_decodes}/"
          f"{report.max_blind_decodes} [{bd_flag}], distinct CCEs "
          f"{report.distinct_cces}/{report.max_nonoverlap_cces} [{cce_flag}] "
          f"(rnti={args.rnti}, scs={args.scs} kHz)")
    return 0


def _cmd_list(args) -> int:
    for name in bundled_scenario_names():
        print(name)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
