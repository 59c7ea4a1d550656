"""Command-line interface: run scenarios and emit plot-ready CSV files.

Exit codes: 0 success, 1 validation error (bad scenario, unknown suite,
failed check), 2 runtime/I-O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, UnsupportedModeError
from .grid_field import save_field_csv, save_labels_csv
from .locational import fd_gradient_oracle, gradient
from .partition import AgentState, assign
from .scenario import (
    Scenario,
    list_builtin_scenarios,
    parse_scenario,
    resolve_scenario_path,
    with_grid_resolution,
)
from .strategy import Trace, run_hcds, run_hsds, summarize
from .verify import SUITES, run_suite


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetsearch",
        description="Heterogeneous multi-agent search on a gridded region.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario and write CSV outputs")
    run_p.add_argument("--scenario", required=True,
                       help="scenario file path or bundled scenario name")
    run_p.add_argument("--strategy", choices=("hsds", "hcds"),
                       help="override the scenario's strategy kind")
    run_p.add_argument("--out", help="output directory (default from scenario or ./out)")
    run_p.add_argument("--seed", type=int, help="override the scenario seed")
    run_p.add_argument("--grid", type=int, help="override the grid to n-by-n cells")
    run_p.add_argument("--range-mode", choices=("on", "off"),
                       help="override range-limited sensing")
    run_p.add_argument("--check-gradient", action="store_true",
                       help="check the analytic gradient against finite differences "
                            "at the initial configuration instead of running")
    run_p.add_argument("--field-snapshots", action="store_true",
                       help="also write a field CSV at every search event")

    verify_p = sub.add_parser("verify", help="run a named verification suite")
    verify_p.add_argument("suite", help=f"one of: {', '.join([*SUITES, 'all'])}")
    verify_p.add_argument("--grid", type=int, help="grid resolution for the suite")
    return parser


def _load_scenario(args) -> Scenario:
    scenario = parse_scenario(resolve_scenario_path(args.scenario))
    if args.grid is not None:
        scenario = with_grid_resolution(scenario, args.grid)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    if args.strategy is not None:
        scenario = replace(
            scenario, strategy=replace(scenario.strategy, kind=args.strategy)
        )
    if args.range_mode is not None:
        turn_on = args.range_mode == "on"
        control = scenario.strategy.control
        if turn_on and control.mode == "proportional":
            control = replace(control, mode="range_limited_proportional")
        if not turn_on and control.mode == "range_limited_proportional":
            control = replace(control, mode="proportional")
        scenario = replace(
            scenario,
            strategy=replace(scenario.strategy, range_mode=turn_on, control=control),
        )
        if turn_on:
            from .sensing import check_equal_cutoff

            check_equal_cutoff(scenario.sensors)
    return scenario


def check_gradient(scenario: Scenario) -> float:
    """Max relative error between the analytic and finite-difference gradients
    at the scenario's initial configuration."""
    grid = scenario.grid
    fld = scenario.build_field()
    agents = scenario.initial_agents()
    part = assign(grid, agents, scenario.sensors)
    g = gradient(grid, fld, part, agents, scenario.sensors)
    delta = 2.0 * max(grid.hx, grid.hy)
    worst = 0.0
    for i in range(len(agents)):
        fd = fd_gradient_oracle(grid, fld, agents, scenario.sensors, i, delta)
        scale = max(float(np.hypot(*g[i])), 1e-9)
        worst = max(worst, float(np.max(np.abs(g[i] - fd))) / scale)
    return worst


def write_outputs(scenario: Scenario, trace: Trace, out_dir: Path,
                  field_snapshots: bool = False) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "trajectory.csv"
    with open(path, "w") as fh:
        fh.write("step,time,agent_id,x,y,is_search_event\n")
        search = set(trace.search_steps)
        for t in range(trace.steps + 1):
            flag = 1 if t in search else 0
            for i in range(trace.n_agents):
                x, y = trace.positions[t, i]
                fh.write(f"{t},{t * trace.dt:.17g},{i},{x:.17g},{y:.17g},{flag}\n")
    written.append(path)

    path = out_dir / "uncertainty.csv"
    counts = trace.search_counts_by_step()
    with open(path, "w") as fh:
        fh.write("step,phi_total,phi_avg,H,search_count\n")
        for t in range(trace.steps + 1):
            fh.write(
                f"{t},{trace.phi_total[t]:.17g},{trace.phi_avg[t]:.17g},"
                f"{trace.objective[t]:.17g},{counts[t]}\n"
            )
    written.append(path)

    for ev in trace.events:
        agents = [AgentState(i, p) for i, p in enumerate(ev.positions)]
        part = assign(scenario.grid, agents, scenario.sensors)
        path = out_dir / f"labels_step{ev.step:05d}.csv"
        save_labels_csv(scenario.grid, part.labels, ev.step, path)
        written.append(path)
        if field_snapshots:
            from .grid_field import UncertaintyField

            path = out_dir / f"field_step{ev.step:05d}.csv"
            save_field_csv(
                scenario.grid, UncertaintyField(ev.field_before, ev.step), path
            )
            written.append(path)

    path = out_dir / "report.txt"
    report = summarize(trace)
    with open(path, "w") as fh:
        fh.write(f"scenario: {scenario.name}\n")
        fh.write(f"strategy: {report['strategy']}\n")
        fh.write(f"time steps: {report['time_steps']}\n")
        fh.write(f"search events: {report['search_events']}\n")
        fh.write(f"stop threshold: {report['stop_threshold']:.17g}\n")
        fh.write(f"reached threshold: {'yes' if report['reached_threshold'] else 'no'}\n")
        fh.write(f"steps to threshold: {_fmt(report['steps_to_threshold'])}\n")
        fh.write(f"searches to threshold: {_fmt(report['searches_to_threshold'])}\n")
        fh.write(f"final average uncertainty: {report['final_phi_avg']:.17g}\n")
        for i, d in enumerate(report["distance_per_agent"]):
            fh.write(f"agent {i} distance traveled: {d:.17g}\n")
        for w in trace.warnings:
            fh.write(f"warning: {w}\n")
    written.append(path)
    return written


def _fmt(value):
    return "n/a" if value is None else str(value)


def run_command(args) -> int:
    scenario = _load_scenario(args)
    if args.check_gradient:
        worst = check_gradient(scenario)
        ok = worst <= 5e-2
        print(f"max relative gradient error: {worst:.6g} (tolerance 0.05)")
        print("PASS" if ok else "FAIL")
        return 0 if ok else 1
    runner = run_hsds if scenario.strategy.kind == "hsds" else run_hcds
    trace = runner(
        scenario.grid, scenario.build_field(), scenario.initial_agents(),
        scenario.sensors, scenario.strategy,
    )
    out_dir = Path(args.out or scenario.out_dir or "out")
    written = write_outputs(scenario, trace, out_dir, args.field_snapshots)
    report = summarize(trace)
    print(
        f"{scenario.name} [{scenario.strategy.kind}] finished: "
        f"{report['time_steps']} steps, {report['search_events']} searches, "
        f"final avg uncertainty {report['final_phi_avg']:.6g}"
    )
    for w in trace.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {len(written)} files to {out_dir}")
    return 0


def verify_command(args) -> int:
    try:
        results = run_suite(args.suite, args.grid)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 1
    for r in results:
        print(r.line())
    failed = sum(1 for r in results if not r.passed)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return run_command(args)
        return verify_command(args)
    except (ConfigurationError, UnsupportedModeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 2


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
