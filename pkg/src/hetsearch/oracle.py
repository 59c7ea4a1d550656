"""Independent oracles used by tests and the verify suites.

Each function is a direct, deliberately naive translation of a definition
and shares no code with the module it validates; clarity over speed.
"""

from __future__ import annotations

import math

import numpy as np


def brute_force_labels(grid, agents, sensors, mode: str = "gaussian") -> np.ndarray:
    """Per-cell argmax of the node functions, ties to the lowest agent index."""
    labels = np.empty((grid.ny, grid.nx), dtype=np.int32)
    for row in range(grid.ny):
        y = grid.ymin + (row + 0.5) * grid.hy
        for col in range(grid.nx):
            x = grid.xmin + (col + 0.5) * grid.hx
            best, best_val = 0, -math.inf
            for idx, (a, s) in enumerate(zip(agents, sensors)):
                dx = x - a.position[0]
                dy = y - a.position[1]
                r2 = dx * dx + dy * dy
                if mode == "gaussian":
                    val = s.k * math.exp(-s.alpha * r2)
                else:
                    val = -r2
                if val > best_val:
                    best, best_val = idx, val
            labels[row, col] = best
    return labels


def nearest_neighbor_labels(grid, agents) -> np.ndarray:
    """Standard Voronoi assignment: per-cell argmin of squared distance."""
    labels = np.empty((grid.ny, grid.nx), dtype=np.int32)
    for row in range(grid.ny):
        y = grid.ymin + (row + 0.5) * grid.hy
        for col in range(grid.nx):
            x = grid.xmin + (col + 0.5) * grid.hx
            best, best_val = 0, math.inf
            for idx, a in enumerate(agents):
                r2 = (x - a.position[0]) ** 2 + (y - a.position[1]) ** 2
                if r2 < best_val:
                    best, best_val = idx, r2
            labels[row, col] = best
    return labels


def dense_mass_centroid(grid, fld, labels, i, sensor, p):
    """Mass and centroid of agent i's cell by a plain full-grid accumulation.

    Returns (mass, centroid-or-None) with the same weight convention as the
    main implementation: alpha * k * phi * exp(-alpha r^2) * cell_area.
    """
    values = fld.values if hasattr(fld, "values") else fld
    area = grid.hx * grid.hy
    mass = sx = sy = 0.0
    for row in range(grid.ny):
        y = grid.ymin + (row + 0.5) * grid.hy
        for col in range(grid.nx):
            if labels[row, col] != i:
                continue
            x = grid.xmin + (col + 0.5) * grid.hx
            r2 = (x - p[0]) ** 2 + (y - p[1]) ** 2
            w = sensor.alpha * sensor.k * values[row, col] * math.exp(-sensor.alpha * r2) * area
            mass += w
            sx += w * x
            sy += w * y
    if mass == 0.0:
        return 0.0, None
    return mass, np.array([sx / mass, sy / mass])


def case2_line(p_i, p_j, k_i: float, k_j: float, alpha: float):
    """Slope and intercept of the straight cell boundary between two sensors
    that differ only in strength k (equal alpha)."""
    p11, p12 = float(p_i[0]), float(p_i[1])
    p21, p22 = float(p_j[0]), float(p_j[1])
    if p22 == p12:
        raise ValueError("boundary is vertical; use x = const instead")
    slope = (p11 - p21) / (p22 - p12)
    intercept = (
        (1.0 / alpha) * math.log(k_i / k_j) + (p21**2 + p22**2) - (p11**2 + p12**2)
    ) / (2.0 * (p22 - p12))
    return slope, intercept


def line_fit_residual(points, slope=None, intercept=None, vertical_x=None) -> float:
    """Maximum perpendicular distance from the points to a line.

    Pass slope/intercept for y = slope*x + intercept, or vertical_x for the
    vertical line x = const.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least 2 points")
    if vertical_x is not None:
        return float(np.max(np.abs(pts[:, 0] - vertical_x)))
    return float(
        np.max(np.abs(pts[:, 1] - slope * pts[:, 0] - intercept))
        / math.hypot(1.0, slope)
    )
