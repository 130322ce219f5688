"""Command-line front-end.

Subcommands: run, simulate, tune, evaluate, report. Exit codes:
0 success, 1 validation/config, 2 I/O, 3 backend load failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .classify import ConfusionModel
from .config import RunnerConfig, load_config
from .errors import BackendLoadError, ValidationError, XwalkError
from .evaluate import (
    LocationReport,
    display_accuracy,
    format_location_table,
    location_report_to_dict,
    score_episodes,
)
from .runner import parse_event_log, run_live, summarize_log, trigger_timestamps
from .simulate import (
    SimConfig,
    full_policy_grid,
    generate_scenario,
    read_episode_file,
    sweep_policies,
    write_sweep_csv,
)
from .tune import grid_search, write_results_csv

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_BACKEND = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xwalk",
        description="Crosswalk trigger engine: live loop, simulation, tuning, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the live capture/decide loop")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None)

    p_sim = sub.add_parser("simulate", help="sweep (n, t) policies over simulated scenarios")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", required=True, help="sweep CSV path")
    p_sim.add_argument("--seed", type=int, default=None)

    p_tune = sub.add_parser("tune", help="grid-search policies and rank them")
    p_tune.add_argument("--config", required=True)
    p_tune.add_argument("--out", required=True, help="ranked CSV path")
    p_tune.add_argument("--seed", type=int, default=None)

    p_eval = sub.add_parser("evaluate", help="score an event log against episodes")
    p_eval.add_argument("--log", required=True, help="JSON-lines event log")
    p_eval.add_argument("--episodes", required=True, help="episode file")
    p_eval.add_argument("--out", default=None, help="report output path (default stdout)")

    p_rep = sub.add_parser("report", help="summarize an event log")
    p_rep.add_argument("--log", required=True)
    return parser


def _sim_inputs(config: RunnerConfig, seed_override):
    seed = config.seed if seed_override is None else seed_override
    confusion = config.confusion if config.confusion is not None else ConfusionModel.identity()
    policies = full_policy_grid(config.sim_n_values)
    sim = SimConfig(
        confusion=confusion,
        policies=policies,
        seed=seed,
        passing_dwell=config.sim_passing_dwell,
        crossing_dwell=config.sim_crossing_dwell,
        pedestrian_fraction=config.sim_pedestrian_fraction,
        gap_extra=config.sim_gap_extra,
    )
    scenario = generate_scenario(sim, config.sim_passing, config.sim_crossing)
    return scenario, confusion, policies, seed


def cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_live(config, seed=args.seed)
    print(f"{len(result.records)} prediction(s), {len(result.events)} trigger(s)"
          + (f", log written to {result.log_path}" if result.log_path else ""))
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    scenario, confusion, policies, seed = _sim_inputs(config, args.seed)
    rows = sweep_policies([scenario], confusion, policies=policies, seed=seed)
    write_sweep_csv(rows, args.out)
    print(f"wrote {len(rows)} sweep row(s) to {args.out}")
    return EXIT_OK


def cmd_tune(args) -> int:
    config = load_config(args.config)
    scenario, confusion, _, seed = _sim_inputs(config, args.seed)
    results = grid_search([scenario], confusion, n_values=config.sim_n_values, seed=seed)
    write_results_csv(results, args.out)
    best = results[0]
    print(f"wrote {len(results)} ranked row(s) to {args.out}; "
          f"best policy n={best.policy.n} t={best.policy.t} "
          f"accuracy={display_accuracy(best.combined_accuracy)}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    records = parse_event_log(args.log)
    if not records:
        raise ValidationError(f"event log {args.log} is empty")
    episodes = read_episode_file(args.episodes)
    outcomes, false_alarms = score_episodes(trigger_timestamps(records), episodes)
    report = LocationReport.from_outcomes(
        outcomes, false_alarms, predictions_made=len(records)
    )
    payload = json.dumps(location_report_to_dict(report), indent=2)
    text = format_location_table(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        print(text)
        print(f"report written to {args.out}")
    else:
        print(text)
        print(payload)
    return EXIT_OK


def cmd_report(args) -> int:
    records = parse_event_log(args.log)
    if not records:
        print("no events")
        return EXIT_OK
    summary = summarize_log(records)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


_HANDLERS = {
    "run": cmd_run,
    "simulate": cmd_simulate,
    "tune": cmd_tune,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except BackendLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except XwalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
