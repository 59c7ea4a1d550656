"""Control laws moving agents toward their weighted centroids.

Positions update by forward Euler, p' = p + u dt, clamped to the region
(the clamp is a defensive no-op for the implemented laws because centroids
lie inside the region). With the default gain 0.5 and dt 1 an agent moves
halfway to its current centroid each step, which cannot overshoot.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .grid_field import Grid
from .locational import cell_centroids, is_critical, objective
from .partition import AgentState, assign, restrict_to_range

logger = logging.getLogger(__name__)

CONTROL_MODES = (
    "proportional",
    "saturated",
    "constant_speed",
    "range_limited_proportional",
)


@dataclass(frozen=True)
class ControlParams:
    mode: str = "proportional"
    k_prop: float = 0.5
    dt: float = 1.0
    slowdown_radius: float = 1.0

    def __post_init__(self):
        if self.mode not in CONTROL_MODES:
            raise ConfigurationError(f"unknown control mode {self.mode!r}")
        if self.k_prop <= 0:
            raise ConfigurationError(f"k_prop must be positive, got {self.k_prop}")
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.slowdown_radius <= 0:
            raise ConfigurationError(
                f"slowdown_radius must be positive, got {self.slowdown_radius}"
            )


def control_velocity(params: ControlParams, agent, centroid_data, sensor) -> np.ndarray:
    """Velocity command for one agent given its cell centroid.

    A zero-mass cell commands zero velocity. The constant-speed law runs at
    u_const down to the slowdown radius and then scales linearly with the
    remaining distance, so its magnitude is continuous at the boundary.
    """
    if centroid_data.mass == 0.0 or centroid_data.centroid is None:
        return np.zeros(2)
    d_vec = agent.position - centroid_data.centroid
    if params.mode in ("proportional", "range_limited_proportional"):
        return -params.k_prop * d_vec
    if params.mode == "saturated":
        if sensor.u_max is None:
            raise ConfigurationError(
                f"saturated mode needs u_max on agent {agent.id}'s sensor"
            )
        u = -params.k_prop * d_vec
        speed = float(np.hypot(*u))
        if speed > sensor.u_max:
            return -sensor.u_max * d_vec / float(np.hypot(*d_vec))
        return u
    # constant_speed
    if sensor.u_const is None:
        raise ConfigurationError(
            f"constant_speed mode needs u_const on agent {agent.id}'s sensor"
        )
    dist = float(np.hypot(*d_vec))
    if dist >= params.slowdown_radius:
        return -sensor.u_const * d_vec / dist
    return -sensor.u_const * d_vec / params.slowdown_radius


def step_position(grid: Grid, agent, velocity, dt: float, occupied=()) -> AgentState:
    """Advance one agent by u dt, clamp into the region, and resolve exact
    coincidences with already-placed agents by one-cell displacements along
    the shorter domain axis."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    pos = grid.clamp(agent.position + np.asarray(velocity, dtype=float) * dt)
    if (grid.xmax - grid.xmin) <= (grid.ymax - grid.ymin):
        axis, spacing, lo, hi = 0, grid.hx, grid.xmin, grid.xmax
    else:
        axis, spacing, lo, hi = 1, grid.hy, grid.ymin, grid.ymax
    guard = 0
    while any(np.array_equal(pos, q) for q in occupied):
        step = spacing if pos[axis] + spacing <= hi else -spacing
        pos = pos.copy()
        pos[axis] = min(max(pos[axis] + step, lo), hi)
        guard += 1
        logger.warning(
            "agent %d landed on an occupied point; displaced by %g along axis %d",
            agent.id, step, axis,
        )
        if guard > 1000:
            raise RuntimeError("could not resolve agent coincidence")
    return AgentState(agent.id, pos)


def step_all(grid: Grid, agents, velocities, dt: float) -> list:
    """Synchronous batch update: every agent moves off the same previous
    configuration; coincidences are resolved in agent order."""
    moved: list[AgentState] = []
    for a, u in zip(agents, velocities):
        moved.append(
            step_position(grid, a, u, dt, occupied=[m.position for m in moved])
        )
    return moved


@dataclass
class DeployResult:
    agents: list
    iterations: int
    converged: bool
    objective_history: np.ndarray
    max_distance_history: np.ndarray
    positions_history: np.ndarray
    centroids: list = field(repr=False, default=None)
    partition: object = field(repr=False, default=None)


def deploy_until_converged(
    grid,
    fld,
    agents,
    sensors,
    params: ControlParams,
    tol: float,
    max_iters: int,
    range_mode: bool = False,
) -> DeployResult:
    """Iterate {partition, centroids, control, move} until every agent is
    within tol of its centroid or max_iters movement steps have been taken.

    Non-convergence is reported through the flag, not an exception. The
    histories include the starting configuration, so they hold
    iterations + 1 entries; the returned partition and centroids describe the
    final configuration.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    agents = list(agents)
    h_hist, dist_hist, pos_hist = [], [], []
    converged = False
    steps = 0
    while True:
        part = assign(grid, agents, sensors)
        masks = restrict_to_range(grid, part, agents, sensors) if range_mode else None
        cents = cell_centroids(grid, fld, part, agents, sensors, masks)
        h_hist.append(objective(grid, fld, part, agents, sensors, masks))
        crit, dists = is_critical(agents, cents, tol)
        dist_hist.append(float(dists.max()))
        pos_hist.append(np.array([a.position for a in agents]))
        if crit:
            converged = True
            break
        if steps >= max_iters:
            break
        velocities = [
            control_velocity(params, a, cd, s)
            for a, cd, s in zip(agents, cents, sensors)
        ]
        agents = step_all(grid, agents, velocities, params.dt)
        steps += 1
    return DeployResult(
        agents=agents,
        iterations=steps,
        converged=converged,
        objective_history=np.array(h_hist),
        max_distance_history=np.array(dist_hist),
        positions_history=np.array(pos_hist),
        centroids=cents,
        partition=part,
    )
