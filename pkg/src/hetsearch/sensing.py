"""Per-agent sensor models.

Every sensor in the package belongs to the Gaussian family: the detection
factor at distance r is 1 - k exp(-alpha r^2), so a search pass multiplies
the local uncertainty by a number in (1-k, 1), and the matching node
function k exp(-alpha r^2) measures how much reduction the sensor could
still deliver at that distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UnsupportedModeError


@dataclass(frozen=True)
class SensorModel:
    """Sensor strength k in (0,1), falloff rate alpha > 0, optional range and
    speed limits. Speed limits constrain the carrying agent's motion, not the
    sensing itself; they live here so each agent has one parameter record."""

    k: float
    alpha: float
    range_limit: float | None = None
    u_max: float | None = None
    u_const: float | None = None

    def __post_init__(self):
        if not 0.0 < self.k < 1.0:
            raise ConfigurationError(f"k must lie in (0,1), got {self.k}")
        if self.alpha <= 0.0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if self.range_limit is not None and self.range_limit <= 0.0:
            raise ConfigurationError(
                f"range limit must be positive, got {self.range_limit}"
            )
        for name in ("u_max", "u_const"):
            v = getattr(self, name)
            if v is not None and v <= 0.0:
                raise ConfigurationError(f"{name} must be positive, got {v}")


def _check_nonnegative(x, name):
    if np.any(np.asarray(x) < 0):
        raise ValueError(f"{name} must be nonnegative")


def beta(sensor: SensorModel, r):
    """Detection factor 1 - k exp(-alpha r^2); scalar or elementwise on arrays."""
    _check_nonnegative(r, "distance")
    r = np.asarray(r, dtype=float)
    out = 1.0 - sensor.k * np.exp(-sensor.alpha * r * r)
    return float(out) if out.ndim == 0 else out


def node_fn(sensor: SensorModel, r):
    """Node function k exp(-alpha r^2) = 1 - beta; strictly decreasing in r."""
    _check_nonnegative(r, "distance")
    r = np.asarray(r, dtype=float)
    out = sensor.k * np.exp(-sensor.alpha * r * r)
    return float(out) if out.ndim == 0 else out


def tilde_weight(sensor: SensorModel, r, phi):
    """Centroid weight alpha * k * phi * exp(-alpha r^2).

    This is -phi times the derivative of the node function with respect to
    r^2, and is nonnegative because the node function is decreasing.
    """
    _check_nonnegative(r, "distance")
    _check_nonnegative(phi, "phi")
    r = np.asarray(r, dtype=float)
    out = sensor.alpha * sensor.k * np.asarray(phi, dtype=float) * np.exp(
        -sensor.alpha * r * r
    )
    return float(out) if out.ndim == 0 else out


def range_limited_fn(sensor: SensorModel, r):
    """Range-limited node functions (f_tilde, f_hat) for a sensor with a cutoff.

    f_tilde freezes the node function at its cutoff value beyond the range;
    f_hat shifts that down by the cutoff value so the sensor contributes
    exactly zero beyond range. f_hat >= 0 with equality iff r >= range.
    """
    if sensor.range_limit is None:
        raise UnsupportedModeError("sensor has no range limit")
    _check_nonnegative(r, "distance")
    r = np.asarray(r, dtype=float)
    clipped = np.minimum(r, sensor.range_limit)
    f_tilde = sensor.k * np.exp(-sensor.alpha * clipped * clipped)
    f_hat = f_tilde - node_fn(sensor, sensor.range_limit)
    if f_tilde.ndim == 0:
        return float(f_tilde), float(f_hat)
    return f_tilde, f_hat


def check_equal_cutoff(sensors, rel_tol: float = 1e-9) -> float:
    """Validate the shared-cutoff assumption f_i(R_i) = f_j(R_j) for all pairs.

    Returns the common cutoff value. Raises UnsupportedModeError if any sensor
    lacks a range limit and ConfigurationError naming the first offending pair.
    """
    for i, s in enumerate(sensors):
        if s.range_limit is None:
            raise UnsupportedModeError(f"sensor {i} has no range limit")
    cutoffs = [node_fn(s, s.range_limit) for s in sensors]
    for i in range(len(sensors)):
        for j in range(i + 1, len(sensors)):
            scale = max(abs(cutoffs[i]), abs(cutoffs[j]))
            if abs(cutoffs[i] - cutoffs[j]) > rel_tol * scale:
                raise ConfigurationError(
                    f"sensors {i} and {j} have unequal cutoff values "
                    f"f({i})={cutoffs[i]:.12g} vs f({j})={cutoffs[j]:.12g}"
                )
    return cutoffs[0] if cutoffs else 0.0
