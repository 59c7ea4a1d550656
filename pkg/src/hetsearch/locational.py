"""Multi-center search objective, weighted cell mass/centroid, and gradients.

The objective is H = sum_i of the integral over agent i's cell of
phi * k_i exp(-alpha_i r_i^2). With the centroid weight
w = alpha k phi exp(-alpha r^2) the gradient with respect to agent i is

    g_i = -2 M_i (p_i - C_i),

where M_i and C_i are the mass and centroid of the cell under w. The factor
2 comes from the chain rule through r^2: moving the agent by dp changes
r^2 by 2 (p - q) . dp. Cell-boundary motion contributes nothing because the
competing node functions agree on shared boundaries.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedModeError
from .grid_field import Grid, UncertaintyField
from .partition import AgentState, assign, node_values
from .sensing import node_fn, tilde_weight

logger = logging.getLogger(__name__)


@dataclass
class CentroidData:
    """Weighted mass of a cell and its centroid; centroid is None at mass 0."""

    mass: float
    centroid: np.ndarray | None


def mass_centroid(grid: Grid, fld, mask, sensor, p) -> CentroidData:
    """Mass and centroid of the masked cells under the weight
    alpha * k * phi * exp(-alpha r^2) * cell_area."""
    values = fld.values if isinstance(fld, UncertaintyField) else fld
    X, Y = grid.center_mesh
    xs = X[mask]
    ys = Y[mask]
    phis = values[mask]
    r = np.hypot(xs - p[0], ys - p[1])
    w = tilde_weight(sensor, r, phis) * grid.cell_area
    mass = float(np.sum(w))
    if mass == 0.0:
        return CentroidData(0.0, None)
    cx = float(np.sum(w * xs)) / mass
    cy = float(np.sum(w * ys)) / mass
    return CentroidData(mass, np.array([cx, cy]))


def cell_centroids(grid, fld, partition, agents, sensors, range_masks=None) -> list:
    """CentroidData for every agent over its (optionally range-restricted) cell."""
    out = []
    for i, (a, s) in enumerate(zip(agents, sensors)):
        mask = range_masks[i] if range_masks is not None else partition.mask(i)
        cd = mass_centroid(grid, fld, mask, s, a.position)
        if cd.mass == 0.0:
            logger.info("agent %d has an empty or zero-mass cell; it will hold position", a.id)
        out.append(cd)
    return out


def objective(grid, fld, partition, agents, sensors, range_masks=None) -> float:
    """One-step uncertainty reduction H achievable at this configuration.

    With range masks the integral runs only over the in-range part of each
    cell, which is exactly the reduction a range-limited search delivers.
    """
    values = fld.values if isinstance(fld, UncertaintyField) else fld
    X, Y = grid.center_mesh
    total = 0.0
    for i, (a, s) in enumerate(zip(agents, sensors)):
        mask = range_masks[i] if range_masks is not None else partition.mask(i)
        r = np.hypot(X[mask] - a.position[0], Y[mask] - a.position[1])
        total += float(np.sum(values[mask] * node_fn(s, r))) * grid.cell_area
    return total


def gradient(grid, fld, partition, agents, sensors, range_masks=None) -> np.ndarray:
    """Analytic gradient of the objective, one 2-D row per agent.

    Agents with zero cell mass get a zero gradient (they sit at a degenerate
    critical point and hold position).
    """
    cents = cell_centroids(grid, fld, partition, agents, sensors, range_masks)
    return gradient_from_centroids(agents, cents)


def gradient_from_centroids(agents, centroid_data) -> np.ndarray:
    g = np.zeros((len(agents), 2))
    for i, (a, cd) in enumerate(zip(agents, centroid_data)):
        if cd.mass > 0.0:
            g[i] = -2.0 * cd.mass * (a.position - cd.centroid)
    return g


def fd_gradient_oracle(grid, fld, agents, sensors, i, delta, mode="gaussian") -> np.ndarray:
    """Central finite difference of the objective with respect to agent i.

    The partition is recomputed at every perturbed configuration, so this
    measures the total derivative including cell-boundary motion. If a
    perturbation would leave the region, the step is halved (with a warning)
    until it fits.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    out = np.zeros(2)
    for axis in range(2):
        d = float(delta)
        for _ in range(60):
            plus = agents[i].position.copy()
            minus = agents[i].position.copy()
            plus[axis] += d
            minus[axis] -= d
            if grid.contains(plus) and grid.contains(minus):
                break
            d *= 0.5
            logger.warning(
                "agent %d axis %d perturbation leaves the region; shrinking to %g",
                i, axis, d,
            )
        else:
            raise ValueError("could not fit a symmetric perturbation inside the region")
        h_vals = []
        for pos in (plus, minus):
            moved = [
                a if j != i else AgentState(a.id, pos) for j, a in enumerate(agents)
            ]
            part = assign(grid, moved, sensors, mode)
            h_vals.append(objective(grid, fld, part, moved, sensors))
        out[axis] = (h_vals[0] - h_vals[1]) / (2.0 * d)
    return out


def is_critical(agents, centroid_data, tol: float):
    """Whether every agent sits within tol of its centroid.

    Returns (flag, distances); agents with zero mass count as critical and
    report distance 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    dists = np.zeros(len(agents))
    for i, (a, cd) in enumerate(zip(agents, centroid_data)):
        if cd.mass > 0.0:
            dists[i] = float(np.hypot(*(a.position - cd.centroid)))
    return bool(np.all(dists <= tol)), dists


def restricted_centroids(grid, fld, range_masks, agents, sensors) -> list:
    """Mass/centroid of each agent's in-range cell portion."""
    if range_masks is None:
        raise UnsupportedModeError("range masks not computed; range mode is off")
    return [
        mass_centroid(grid, fld, m, s, a.position)
        for m, a, s in zip(range_masks, agents, sensors)
    ]


def neighbor_local_gradient(grid, fld, agents, sensors, i, neighbors, mode="gaussian") -> np.ndarray:
    """Gradient of agent i recomputed from itself and the given neighbors only.

    All other agents are deleted and agent i's cell is rebuilt by argmax over
    the remaining node functions; with `neighbors` the Delaunay neighbors of
    i this must reproduce the global gradient bit for bit.
    """
    keep = [i] + sorted(neighbors)
    sub_agents = [agents[j] for j in keep]
    sub_sensors = [sensors[j] for j in keep]
    vals = node_values(grid, sub_agents, sub_sensors, mode)
    local_mask = np.argmax(vals, axis=0) == 0
    cd = mass_centroid(grid, fld, local_mask, sensors[i], agents[i].position)
    if cd.mass == 0.0:
        return np.zeros(2)
    return -2.0 * cd.mass * (agents[i].position - cd.centroid)
