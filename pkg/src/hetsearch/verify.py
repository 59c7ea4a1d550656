"""Named verification suites behind the command-line `verify` subcommand.

Each suite re-derives an expected result with an independent oracle (brute
force, closed form, or finite differences) and checks the main implementation
against it at a fixed tolerance, reporting machine-readable PASS/FAIL lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from .control import ControlParams
from .grid_field import UniformDensity, build_grid, init_field
from .locational import fd_gradient_oracle, gradient, neighbor_local_gradient
from .partition import AgentState, assign, boundary_cells
from .scenario import parse_scenario, resolve_scenario_path, with_grid_resolution
from .sensing import SensorModel
from .strategy import StrategyConfig, decay_bound, run_hcds, run_hsds


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}: {self.name} ({self.detail})"


def random_agents(rng, grid, count, k_range=(0.4, 0.9), alpha_range=(0.05, 0.4),
                  margin=0.8, min_separation=0.5):
    """Seeded random configuration: positions kept off the region border and
    pairwise separated, sensors drawn from moderate parameter ranges."""
    agents, sensors = [], []
    while len(agents) < count:
        p = np.array([
            rng.uniform(grid.xmin + margin, grid.xmax - margin),
            rng.uniform(grid.ymin + margin, grid.ymax - margin),
        ])
        if all(np.hypot(*(p - a.position)) >= min_separation for a in agents):
            agents.append(AgentState(len(agents), p))
            sensors.append(
                SensorModel(
                    k=rng.uniform(*k_range), alpha=rng.uniform(*alpha_range)
                )
            )
    return agents, sensors


def _square_grid(n):
    return build_grid((0.0, 10.0, 0.0, 10.0), n, n)


def suite_partition_oracle(grid_n=100, configs=5, seed=7):
    grid = _square_grid(grid_n)
    rng = np.random.default_rng(seed)
    results = []
    for mode in ("gaussian", "quadratic"):
        mismatches = 0
        for _ in range(configs):
            agents, sensors = random_agents(rng, grid, int(rng.integers(2, 7)))
            got = assign(grid, agents, sensors, mode).labels
            want = oracle.brute_force_labels(grid, agents, sensors, mode)
            mismatches += int(np.count_nonzero(got != want))
        results.append(
            CheckResult(
                "partition-oracle", f"{mode} labels equal brute-force argmax",
                mismatches == 0, f"{configs} configs, {mismatches} mismatched cells",
            )
        )
    return results


def suite_case1_weights(grid_n=200):
    scenario = with_grid_resolution(
        parse_scenario(resolve_scenario_path("case1_varying_alpha")), grid_n
    )
    grid = scenario.grid
    part = assign(grid, scenario.agents, scenario.sensors)
    h = max(grid.hx, grid.hy)
    worst = 0.0
    for (i, j) in sorted(part.adjacency):
        ai, aj = scenario.sensors[i].alpha, scenario.sensors[j].alpha
        lip = math.sqrt(ai) + math.sqrt(aj)
        for a, b in ((i, j), (j, i)):
            mask = boundary_cells(part, a, b)
            if not mask.any():
                continue
            X, Y = grid.center_mesh
            ra = np.hypot(X[mask] - scenario.agents[a].position[0],
                          Y[mask] - scenario.agents[a].position[1])
            rb = np.hypot(X[mask] - scenario.agents[b].position[0],
                          Y[mask] - scenario.agents[b].position[1])
            dev = np.abs(
                math.sqrt(scenario.sensors[a].alpha) * ra
                - math.sqrt(scenario.sensors[b].alpha) * rb
            )
            worst = max(worst, float(dev.max()) / (2.0 * lip * h))
    results = [
        CheckResult(
            "case1-weights",
            "boundary cells obey the sqrt(alpha)-weighted distance relation",
            worst <= 1.0, f"worst deviation {worst:.3f} of the 2*L*h allowance",
        )
    ]
    idx = max(range(len(scenario.sensors)), key=lambda i: scenario.sensors[i].alpha)
    mask = part.mask(idx)
    touches_border = bool(
        mask[0, :].any() or mask[-1, :].any() or mask[:, 0].any() or mask[:, -1].any()
    )
    neighbor_alphas = sorted(scenario.sensors[j].alpha for j in part.neighbors(idx))
    results.append(
        CheckResult(
            "case1-weights", "weakest agent's cell is bounded and embedded",
            mask.any() and not touches_border and neighbor_alphas == [0.08],
            f"cells={int(mask.sum())}, neighbors alpha={neighbor_alphas}",
        )
    )
    return results


def suite_case2_line(grid_n=200):
    scenario = with_grid_resolution(
        parse_scenario(resolve_scenario_path("case2_varying_k")), grid_n
    )
    grid = scenario.grid
    part = assign(grid, scenario.agents, scenario.sensors)
    slope, intercept = oracle.case2_line(
        scenario.agents[0].position, scenario.agents[1].position,
        scenario.sensors[0].k, scenario.sensors[1].k, scenario.sensors[0].alpha,
    )
    mask = boundary_cells(part, 0, 1) | boundary_cells(part, 1, 0)
    X, Y = grid.center_mesh
    points = np.column_stack([X[mask], Y[mask]])
    residual = oracle.line_fit_residual(points, slope, intercept)
    tol = math.hypot(grid.hx, grid.hy)
    return [
        CheckResult(
            "case2-line", "boundary cells fit the closed-form straight line",
            residual <= tol,
            f"max residual {residual:.4f} <= {tol:.4f}, line y = {slope:g} x + {intercept:.6g}",
        )
    ]


def suite_case4_voronoi(grid_n=100, configs=5, seed=11):
    grid = _square_grid(grid_n)
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(configs):
        agents, sensors = random_agents(rng, grid, int(rng.integers(2, 7)))
        got = assign(grid, agents, sensors, "quadratic").labels
        want = oracle.nearest_neighbor_labels(grid, agents)
        mismatches += int(np.count_nonzero(got != want))
    return [
        CheckResult(
            "case4-voronoi", "quadratic mode equals nearest-neighbor assignment",
            mismatches == 0, f"{configs} configs, {mismatches} mismatched cells",
        )
    ]


def suite_decay_bound(grid_n=100):
    scenario = with_grid_resolution(
        parse_scenario(resolve_scenario_path("comparison_5agents")), grid_n
    )
    results = []
    for kind, runner in (("hsds", run_hsds), ("hcds", run_hcds)):
        config = StrategyConfig(
            kind=kind, control=scenario.strategy.control,
            stop_threshold=scenario.strategy.stop_threshold,
            max_search_steps=scenario.strategy.max_search_steps,
            deploy_tol=scenario.strategy.deploy_tol,
            deploy_max_iters=scenario.strategy.deploy_max_iters,
        )
        trace = runner(scenario.grid, scenario.build_field(), scenario.initial_agents(),
                       scenario.sensors, config)
        ok_bound = all(
            ev.max_ratio <= decay_bound(scenario.sensors, scenario.grid, n + 1)
            + (n + 1) * 1e-12
            for n, ev in enumerate(trace.events)
        )
        ok_strict = all(ev.phi_after < ev.phi_before for ev in trace.events)
        results.append(
            CheckResult(
                "decay-bound", f"{kind} pointwise ratios below l^n and strictly decreasing",
                ok_bound and ok_strict,
                f"{len(trace.events)} search events",
            )
        )
    return results


def suite_distributedness(grid_n=100, configs=5, seed=23):
    grid = _square_grid(grid_n)
    fld = init_field(grid, UniformDensity(1.0))
    rng = np.random.default_rng(seed)
    exact = 0
    total = 0
    for _ in range(configs):
        agents, sensors = random_agents(rng, grid, int(rng.integers(3, 7)))
        part = assign(grid, agents, sensors)
        g = gradient(grid, fld, part, agents, sensors)
        for i in range(len(agents)):
            local = neighbor_local_gradient(
                grid, fld, agents, sensors, i, part.neighbors(i)
            )
            total += 1
            exact += int(np.array_equal(local, g[i]))
    return [
        CheckResult(
            "distributedness", "neighbor-only gradients are bit-identical",
            exact == total, f"{exact}/{total} agents exact",
        )
    ]


def suite_speed_caps(grid_n=100):
    scenario = with_grid_resolution(
        parse_scenario(resolve_scenario_path("comparison_5agents")), grid_n
    )
    caps = [0.4, 0.5, 0.6, 0.7, 0.8]
    results = []
    for mode, attr in (("saturated", "u_max"), ("constant_speed", "u_const")):
        sensors = [
            SensorModel(k=s.k, alpha=s.alpha, **{attr: c})
            for s, c in zip(scenario.sensors, caps)
        ]
        control = ControlParams(mode=mode, k_prop=scenario.strategy.control.k_prop)
        config = StrategyConfig(
            kind="hsds", control=control,
            stop_threshold=scenario.strategy.stop_threshold,
            max_search_steps=scenario.strategy.max_search_steps,
            deploy_tol=scenario.strategy.deploy_tol, deploy_max_iters=2000,
        )
        trace = run_hsds(scenario.grid, scenario.build_field(),
                         scenario.initial_agents(), sensors, config)
        moves = np.diff(trace.positions, axis=0)
        speeds = np.hypot(moves[..., 0], moves[..., 1]) / control.dt
        margin = 1e-12
        ok_caps = all(
            float(speeds[:, i].max(initial=0.0)) <= caps[i] + margin
            for i in range(len(caps))
        )
        ok_converged = not trace.warnings
        results.append(
            CheckResult(
                "speed-caps", f"{mode} speeds capped and deployments converged",
                ok_caps and ok_converged,
                f"max speed ratio {max(float(speeds[:, i].max(initial=0.0)) / caps[i] for i in range(len(caps))):.6f}",
            )
        )
    return results


def suite_gradient(grid_n=200, configs=3, seed=5):
    grid = _square_grid(grid_n)
    fld = init_field(grid, UniformDensity(1.0))
    rng = np.random.default_rng(seed)
    delta = 2.0 * max(grid.hx, grid.hy)
    worst = 0.0
    for _ in range(configs):
        agents, sensors = random_agents(rng, grid, 3)
        part = assign(grid, agents, sensors)
        g = gradient(grid, fld, part, agents, sensors)
        for i in range(len(agents)):
            fd = fd_gradient_oracle(grid, fld, agents, sensors, i, delta)
            scale = max(float(np.hypot(*g[i])), 1e-9)
            worst = max(worst, float(np.max(np.abs(g[i] - fd))) / scale)
    return [
        CheckResult(
            "gradient", "analytic gradient matches finite differences",
            worst <= 5e-2, f"worst relative error {worst:.4f} (tol 0.05)",
        )
    ]


SUITES = {
    "partition-oracle": suite_partition_oracle,
    "case1-weights": suite_case1_weights,
    "case2-line": suite_case2_line,
    "case4-voronoi": suite_case4_voronoi,
    "decay-bound": suite_decay_bound,
    "distributedness": suite_distributedness,
    "speed-caps": suite_speed_caps,
    "gradient": suite_gradient,
}


def run_suite(name: str, grid_n: int | None = None) -> list:
    """Run one named suite (or 'all'); unknown names raise with the list."""
    if name == "all":
        out = []
        for fn in SUITES.values():
            out.extend(fn() if grid_n is None else fn(grid_n))
        return out
    if name not in SUITES:
        raise KeyError(
            f"unknown suite {name!r}; available: {', '.join([*SUITES, 'all'])}"
        )
    fn = SUITES[name]
    return fn() if grid_n is None else fn(grid_n)
