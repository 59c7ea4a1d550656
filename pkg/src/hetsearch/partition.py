"""Generalized Voronoi partition of the grid and its Delaunay adjacency.

Each cell is owned by the agent whose node function is largest at the cell
center (ties to the lowest agent index). Ownership is computed by per-cell
argmax rather than geometric construction: with heterogeneous sensors the
cells can be curved, disconnected, or nested, so the grid is the honest
representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .grid_field import Grid
from .sensing import check_equal_cutoff

MODES = ("gaussian", "quadratic")


@dataclass
class AgentState:
    """An agent: integer id and 2-D position inside the search region."""

    id: int
    position: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(2)


@dataclass
class Partition:
    """Owner labels per cell plus the adjacency of the induced cells."""

    labels: np.ndarray
    mode: str
    adjacency: frozenset
    n_agents: int
    range_masks: list | None = field(default=None, repr=False)

    def mask(self, i: int) -> np.ndarray:
        return self.labels == i

    def neighbors(self, i: int) -> tuple[int, ...]:
        out = [b if a == i else a for (a, b) in self.adjacency if i in (a, b)]
        return tuple(sorted(out))

    def empty_cells(self) -> tuple[int, ...]:
        """Agents that currently own no grid cell."""
        owned = np.unique(self.labels)
        return tuple(i for i in range(self.n_agents) if i not in owned)


def _validate_configuration(grid: Grid, agents, sensors):
    if len(agents) < 1:
        raise ConfigurationError("need at least one agent")
    if len(sensors) != len(agents):
        raise ConfigurationError(
            f"{len(agents)} agents but {len(sensors)} sensors; they pair by index"
        )
    for a in agents:
        if not grid.contains(a.position):
            raise ConfigurationError(
                f"agent {a.id} position {tuple(a.position)} lies outside the region"
            )
    for i in range(len(agents)):
        for j in range(i + 1, len(agents)):
            if np.array_equal(agents[i].position, agents[j].position):
                raise ConfigurationError(
                    f"agents {agents[i].id} and {agents[j].id} coincide at "
                    f"{tuple(agents[i].position)}"
                )


def node_values(grid: Grid, agents, sensors, mode: str) -> np.ndarray:
    """Node-function values of every agent at every cell center, (N, ny, nx)."""
    X, Y = grid.center_mesh
    vals = np.empty((len(agents), grid.ny, grid.nx))
    for idx, (a, s) in enumerate(zip(agents, sensors)):
        d2 = (X - a.position[0]) ** 2 + (Y - a.position[1]) ** 2
        if mode == "gaussian":
            vals[idx] = s.k * np.exp(-s.alpha * d2)
        else:
            vals[idx] = -d2
    return vals


def assign(grid: Grid, agents, sensors, mode: str = "gaussian") -> Partition:
    """Label every cell with the agent whose node function wins there.

    In quadratic mode the node function is -r^2 for every agent, which makes
    the labels the standard nearest-agent Voronoi assignment.
    """
    if mode not in MODES:
        raise ConfigurationError(f"unknown partition mode {mode!r}")
    _validate_configuration(grid, agents, sensors)
    vals = node_values(grid, agents, sensors, mode)
    labels = np.argmax(vals, axis=0).astype(np.int32)
    return Partition(
        labels=labels,
        mode=mode,
        adjacency=_adjacency_from_labels(labels),
        n_agents=len(agents),
    )


def _adjacency_from_labels(labels: np.ndarray) -> frozenset:
    pairs = set()
    for a, b in ((labels[:, :-1], labels[:, 1:]), (labels[:-1, :], labels[1:, :])):
        diff = a != b
        lo = np.minimum(a[diff], b[diff])
        hi = np.maximum(a[diff], b[diff])
        pairs.update(zip(lo.tolist(), hi.tolist()))
    return frozenset(pairs)


def delaunay_adjacency(grid: Grid, partition: Partition) -> frozenset:
    """Agent pairs whose cells share a 4-connected grid edge, as (i, j), i < j."""
    return _adjacency_from_labels(partition.labels)


def restrict_to_range(grid: Grid, partition: Partition, agents, sensors) -> list:
    """Per-agent masks of the owned cells within sensor range of the agent.

    Requires every sensor to carry a range limit and the limits to satisfy
    the shared-cutoff assumption. The masks are also stored on the partition.
    """
    check_equal_cutoff(sensors)
    masks = []
    for i, (a, s) in enumerate(zip(agents, sensors)):
        dist = grid.distances_from(a.position)
        masks.append((partition.labels == i) & (dist <= s.range_limit))
    partition.range_masks = masks
    return masks


def boundary_cells(partition: Partition, i: int, j: int) -> np.ndarray:
    """Mask of cells labeled i that touch a cell labeled j (4-connectivity)."""
    mi = partition.labels == i
    mj = partition.labels == j
    near_j = np.zeros_like(mj)
    near_j[1:, :] |= mj[:-1, :]
    near_j[:-1, :] |= mj[1:, :]
    near_j[:, 1:] |= mj[:, :-1]
    near_j[:, :-1] |= mj[:, 1:]
    return mi & near_j
