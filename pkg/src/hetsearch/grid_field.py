"""Rectangular grid over the search region and the per-cell uncertainty field.

The region is an axis-aligned rectangle discretized into nx-by-ny uniform
cells; every region integral in the package is a midpoint sum over cell
centers, value * weight * hx * hy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on [xmin, xmax] x [ymin, ymax].

    Cell (row j, col i) has its center at
    (xmin + (i + 0.5) hx, ymin + (j + 0.5) hy); arrays over the grid are
    indexed [row, col] = [y, x].
    """

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ConfigurationError(
                f"grid bounds must be well ordered, got x=({self.xmin}, {self.xmax}), "
                f"y=({self.ymin}, {self.ymax})"
            )
        if self.nx < 2 or self.ny < 2:
            raise ConfigurationError(
                f"grid needs at least 2 cells per axis, got nx={self.nx}, ny={self.ny}"
            )

    @property
    def hx(self) -> float:
        return (self.xmax - self.xmin) / self.nx

    @property
    def hy(self) -> float:
        return (self.ymax - self.ymin) / self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    @cached_property
    def x_centers(self) -> np.ndarray:
        return self.xmin + (np.arange(self.nx) + 0.5) * self.hx

    @cached_property
    def y_centers(self) -> np.ndarray:
        return self.ymin + (np.arange(self.ny) + 0.5) * self.hy

    @cached_property
    def center_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) arrays of cell-center coordinates, each shaped (ny, nx)."""
        return np.meshgrid(self.x_centers, self.y_centers)

    def distances_from(self, p) -> np.ndarray:
        """Euclidean distance from point p to every cell center, shape (ny, nx)."""
        X, Y = self.center_mesh
        return np.hypot(X - p[0], Y - p[1])

    def contains(self, p) -> bool:
        return (self.xmin <= p[0] <= self.xmax) and (self.ymin <= p[1] <= self.ymax)

    def clamp(self, p) -> np.ndarray:
        return np.array(
            [
                min(max(float(p[0]), self.xmin), self.xmax),
                min(max(float(p[1]), self.ymin), self.ymax),
            ]
        )


def build_grid(bounds, nx: int, ny: int) -> Grid:
    """Create a Grid from bounds (xmin, xmax, ymin, ymax) and cell counts."""
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    return Grid(xmin, xmax, ymin, ymax, int(nx), int(ny))


def diameter(grid: Grid) -> float:
    """Length of the region diagonal, the largest distance between two points."""
    return math.hypot(grid.xmax - grid.xmin, grid.ymax - grid.ymin)


@dataclass(frozen=True)
class UniformDensity:
    """Constant initial uncertainty, value in [0, 1]."""

    value: float = 1.0


@dataclass(frozen=True)
class GaussianBump:
    amplitude: float
    cx: float
    cy: float
    width: float


@dataclass(frozen=True)
class BumpDensity:
    """Sum of isotropic Gaussian bumps, clipped into [0, 1] at evaluation."""

    bumps: tuple[GaussianBump, ...]


@dataclass
class UncertaintyField:
    """Per-cell uncertainty in [0, 1] plus the number of search updates applied."""

    values: np.ndarray
    step_count: int = 0

    def copy(self) -> "UncertaintyField":
        return UncertaintyField(self.values.copy(), self.step_count)


def init_field(grid: Grid, spec) -> UncertaintyField:
    """Evaluate a density specification on the grid.

    Uniform values must already lie in [0, 1]; bump sums may exceed the range
    and are clipped, but a nonpositive bump width is rejected.
    """
    if isinstance(spec, UniformDensity):
        if not 0.0 <= spec.value <= 1.0:
            raise ConfigurationError(
                f"uniform density value must lie in [0, 1], got {spec.value}"
            )
        values = np.full((grid.ny, grid.nx), float(spec.value))
    elif isinstance(spec, BumpDensity):
        X, Y = grid.center_mesh
        values = np.zeros((grid.ny, grid.nx))
        for b in spec.bumps:
            if b.width <= 0:
                raise ConfigurationError(f"bump width must be positive, got {b.width}")
            r2 = (X - b.cx) ** 2 + (Y - b.cy) ** 2
            values += b.amplitude * np.exp(-r2 / (2.0 * b.width**2))
        values = np.clip(values, 0.0, 1.0)
    else:
        raise ConfigurationError(f"unknown density specification {spec!r}")
    return UncertaintyField(values)


def integrate(grid: Grid, values, weight=None, mask=None) -> float:
    """Midpoint-rule integral: sum of value * weight * hx * hy over masked cells.

    `values` may be an UncertaintyField or a (ny, nx) array; `weight` may be
    None (constant 1), a (ny, nx) array, or a callable weight(X, Y) evaluated
    at cell centers. An empty mask integrates to 0.
    """
    if isinstance(values, UncertaintyField):
        values = values.values
    arr = values
    if weight is not None:
        if callable(weight):
            X, Y = grid.center_mesh
            weight = weight(X, Y)
        arr = arr * weight
    if mask is not None:
        total = float(arr[mask].sum())
    else:
        total = float(arr.sum())
    return total * grid.cell_area


def save_field_csv(grid: Grid, fld: UncertaintyField, path) -> None:
    """Write a field snapshot: header `# nx,ny,xmin,xmax,ymin,ymax,step`, then
    one comma-separated row of cell values per grid row."""
    _save_grid_csv(grid, fld.values, fld.step_count, path, "%.17g")


def save_labels_csv(grid: Grid, labels: np.ndarray, step: int, path) -> None:
    """Write an owner-label map using the same header convention as fields."""
    _save_grid_csv(grid, labels, step, path, "%d")


def _save_grid_csv(grid, array, step, path, fmt):
    with open(path, "w") as fh:
        fh.write(
            "# %d,%d,%.17g,%.17g,%.17g,%.17g,%d\n"
            % (grid.nx, grid.ny, grid.xmin, grid.xmax, grid.ymin, grid.ymax, step)
        )
        for row in array:
            fh.write(",".join(fmt % v for v in row))
            fh.write("\n")
