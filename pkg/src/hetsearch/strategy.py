"""Search update rule and the two deploy-and-search strategies.

A search pass multiplies each cell's uncertainty by the owning agent's
detection factor. The sequential strategy deploys to convergence between
passes, so every pass happens at a (locally) optimal configuration; the
combined strategy interleaves one control step with a pass every
search-period steps, trading per-pass effectiveness for frequency.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .control import ControlParams, control_velocity, deploy_until_converged, step_all
from .errors import ConfigurationError, UnsupportedModeError
from .grid_field import Grid, UncertaintyField, diameter, integrate
from .locational import cell_centroids, objective
from .partition import assign, restrict_to_range
from .sensing import beta

logger = logging.getLogger(__name__)

STRATEGY_KINDS = ("hsds", "hcds")


@dataclass
class StrategyConfig:
    kind: str
    control: ControlParams
    stop_threshold: float
    max_search_steps: int = 100
    deploy_tol: float = 1e-2
    deploy_max_iters: int = 500
    search_period: int = 1
    latency: float = 1.0
    range_mode: bool = False

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ConfigurationError(f"unknown strategy kind {self.kind!r}")
        if not 0.0 < self.stop_threshold < 1.0:
            raise ConfigurationError(
                f"stop_threshold must lie in (0,1), got {self.stop_threshold}"
            )
        if self.max_search_steps < 1:
            raise ConfigurationError("max_search_steps must be at least 1")
        if self.deploy_tol <= 0 or self.deploy_max_iters < 1:
            raise ConfigurationError("deploy tolerance and iteration cap must be positive")
        if self.search_period < 1:
            raise ConfigurationError(
                f"search_period must be a positive number of steps, got {self.search_period}"
            )
        if self.latency < 0:
            raise ConfigurationError(f"latency must be nonnegative, got {self.latency}")
        if self.search_period * self.control.dt < self.latency:
            raise ConfigurationError(
                f"search period {self.search_period * self.control.dt} is shorter "
                f"than the latency {self.latency}"
            )


@dataclass
class SearchEvent:
    """One search pass: when it ran, from where, and what it achieved."""

    step: int
    positions: np.ndarray
    reduction: float
    phi_before: float
    phi_after: float
    max_ratio: float
    deploy_converged: bool
    field_before: np.ndarray = field(repr=False, default=None)


@dataclass
class Trace:
    """Per-time-step history of a strategy run.

    Row t describes the state after t control steps: positions, total and
    average uncertainty after any search executed at t, and the objective of
    the configuration against the field as it stood before that search.
    """

    kind: str
    stop_threshold: float
    area: float
    dt: float
    positions: np.ndarray
    phi_total: np.ndarray
    phi_avg: np.ndarray
    objective: np.ndarray
    search_steps: list
    events: list
    warnings: list
    reached_threshold: bool
    field: UncertaintyField

    @property
    def steps(self) -> int:
        return len(self.positions) - 1

    @property
    def n_agents(self) -> int:
        return self.positions.shape[1]

    def search_counts_by_step(self) -> np.ndarray:
        counts = np.zeros(self.steps + 1, dtype=int)
        for t in self.search_steps:
            counts[t:] += 1
        return counts


def search_update(grid, fld, partition, agents, sensors, range_mode=False) -> UncertaintyField:
    """Apply one search pass: each cell is scaled by its owner's detection
    factor; in range mode cells beyond the owner's range are untouched."""
    values = fld.values
    X, Y = grid.center_mesh
    new = values.copy()
    for i, (a, s) in enumerate(zip(agents, sensors)):
        mask = partition.labels == i
        r = np.hypot(X[mask] - a.position[0], Y[mask] - a.position[1])
        b = beta(s, r)
        if range_mode:
            if s.range_limit is None:
                raise UnsupportedModeError(f"sensor {i} has no range limit")
            b = np.where(r <= s.range_limit, b, 1.0)
        new[mask] = values[mask] * b
    return UncertaintyField(new, fld.step_count + 1)


def decay_bound(sensors, grid: Grid, n: int) -> float:
    """Worst-case uncertainty ratio after n search passes, l^n with
    l = 1 - min(k) exp(-max(alpha) D^2) and D the region diameter.

    Valid only for unlimited-range sensors: with a range limit some points
    may see no reduction at all.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    for i, s in enumerate(sensors):
        if s.range_limit is not None:
            raise UnsupportedModeError(
                f"decay bound assumes unlimited range; sensor {i} has a limit"
            )
    d = diameter(grid)
    l = 1.0 - min(s.k for s in sensors) * math.exp(
        -max(s.alpha for s in sensors) * d * d
    )
    return l**n


class _Recorder:
    """Accumulates the per-step rows and search events of a run."""

    def __init__(self, grid, field0, agents0):
        self.grid = grid
        self.ref_values = field0.values.copy()
        self.pos_rows = [np.array([a.position for a in agents0])]
        self.phi_rows = [integrate(grid, field0.values)]
        self.h_rows = [0.0]
        self.search_steps = []
        self.events = []
        self.warnings = []

    @property
    def phi(self) -> float:
        return self.phi_rows[-1]

    def avg(self) -> float:
        return self.phi_rows[-1] / self.grid.area

    def add_step(self, positions, h_value):
        self.pos_rows.append(np.asarray(positions))
        self.phi_rows.append(self.phi_rows[-1])
        self.h_rows.append(h_value)

    def add_event(self, step, agents, reduction, field_before, field_after, converged):
        phi_before = self.phi_rows[step]
        phi_after = integrate(self.grid, field_after.values)
        positive = self.ref_values > 0
        if positive.any():
            ratio = float(np.max(field_after.values[positive] / self.ref_values[positive]))
        else:
            ratio = 0.0
        self.events.append(
            SearchEvent(
                step=step,
                positions=np.array([a.position for a in agents]),
                reduction=reduction,
                phi_before=phi_before,
                phi_after=phi_after,
                max_ratio=ratio,
                deploy_converged=converged,
                field_before=field_before,
            )
        )
        self.search_steps.append(step)
        self.phi_rows[step] = phi_after
        # searches never run mid-history; the event step is always the last row
        assert step == len(self.phi_rows) - 1

    def to_trace(self, config, final_field, reached) -> Trace:
        return Trace(
            kind=config.kind,
            stop_threshold=config.stop_threshold,
            area=self.grid.area,
            dt=config.control.dt,
            positions=np.array(self.pos_rows),
            phi_total=np.array(self.phi_rows),
            phi_avg=np.array(self.phi_rows) / self.grid.area,
            objective=np.array(self.h_rows),
            search_steps=self.search_steps,
            events=self.events,
            warnings=self.warnings,
            reached_threshold=reached,
            field=final_field,
        )


def run_hsds(grid, field0, agents0, sensors, config: StrategyConfig) -> Trace:
    """Sequential deploy and search: deploy to convergence, search once,
    repeat until the average uncertainty falls to the stop threshold.

    If a deployment hits its iteration cap the search still executes at the
    reached configuration and the trace carries a warning.
    """
    if config.kind != "hsds":
        raise ConfigurationError(f"config kind is {config.kind!r}, expected 'hsds'")
    fld = field0.copy()
    agents = list(agents0)
    rec = _Recorder(grid, fld, agents)
    part = assign(grid, agents, sensors)
    masks = restrict_to_range(grid, part, agents, sensors) if config.range_mode else None
    rec.h_rows[0] = objective(grid, fld, part, agents, sensors, masks)
    reached = rec.avg() <= config.stop_threshold
    t = 0
    while not reached and len(rec.events) < config.max_search_steps:
        dep = deploy_until_converged(
            grid, fld, agents, sensors, config.control,
            config.deploy_tol, config.deploy_max_iters, config.range_mode,
        )
        for s in range(1, dep.iterations + 1):
            t += 1
            rec.add_step(dep.positions_history[s], dep.objective_history[s])
        agents = dep.agents
        if not dep.converged:
            msg = (
                f"deployment before search {len(rec.events)} stopped at "
                f"max_iters={config.deploy_max_iters} without reaching tol"
            )
            logger.warning(msg)
            rec.warnings.append(msg)
        field_before = fld.values.copy()
        fld = search_update(grid, fld, dep.partition, agents, sensors, config.range_mode)
        rec.add_event(
            t, agents, dep.objective_history[-1], field_before, fld, dep.converged
        )
        reached = rec.avg() <= config.stop_threshold
    return rec.to_trace(config, fld, reached)


def run_hcds(grid, field0, agents0, sensors, config: StrategyConfig) -> Trace:
    """Combined deploy and search: at every search-period instant the current
    configuration searches, then every agent takes one control step toward
    the centroid of the freshly updated field."""
    if config.kind != "hcds":
        raise ConfigurationError(f"config kind is {config.kind!r}, expected 'hcds'")
    fld = field0.copy()
    agents = list(agents0)
    rec = _Recorder(grid, fld, agents)
    reached = rec.avg() <= config.stop_threshold
    t = 0
    while True:
        part = assign(grid, agents, sensors)
        masks = restrict_to_range(grid, part, agents, sensors) if config.range_mode else None
        rec.h_rows[t] = objective(grid, fld, part, agents, sensors, masks)
        if not reached and t % config.search_period == 0:
            field_before = fld.values.copy()
            fld = search_update(grid, fld, part, agents, sensors, config.range_mode)
            rec.add_event(t, agents, rec.h_rows[t], field_before, fld, True)
            reached = rec.avg() <= config.stop_threshold
        if reached or len(rec.events) >= config.max_search_steps:
            break
        cents = cell_centroids(grid, fld, part, agents, sensors, masks)
        velocities = [
            control_velocity(config.control, a, cd, s)
            for a, cd, s in zip(agents, cents, sensors)
        ]
        agents = step_all(grid, agents, velocities, config.control.dt)
        t += 1
        rec.add_step([a.position for a in agents], 0.0)
    return rec.to_trace(config, fld, reached)


def summarize(trace: Trace) -> dict:
    """Step and search counts to the stop threshold, distance traveled per
    agent, and the final average uncertainty."""
    below = np.nonzero(trace.phi_avg <= trace.stop_threshold)[0]
    steps_to = int(below[0]) if below.size else None
    searches_to = (
        sum(1 for s in trace.search_steps if s <= steps_to)
        if steps_to is not None
        else None
    )
    moves = np.diff(trace.positions, axis=0)
    distances = np.hypot(moves[..., 0], moves[..., 1]).sum(axis=0)
    return {
        "strategy": trace.kind,
        "time_steps": trace.steps,
        "search_events": len(trace.events),
        "reached_threshold": trace.reached_threshold,
        "stop_threshold": trace.stop_threshold,
        "steps_to_threshold": steps_to,
        "searches_to_threshold": searches_to,
        "final_phi_avg": float(trace.phi_avg[-1]),
        "distance_per_agent": [float(d) for d in distances],
    }
