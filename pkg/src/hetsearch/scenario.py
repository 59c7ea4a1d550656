"""Scenario files: a line-oriented `key = value` format with sections.

A scenario looks like

    [grid]
    xmin = 0.0
    xmax = 10.0
    ymin = 0.0
    ymax = 10.0
    nx = 200
    ny = 200

    [field]
    kind = uniform        # or bumps, with repeated `bump = amp, cx, cy, width`
    value = 1.0

    [strategy]
    kind = hsds
    stop_threshold = 0.8
    ...

    [run]
    seed = 42

    [agent]               # repeated once per agent
    x = 1.0
    y = 1.0
    k = 0.8
    alpha = 0.05

Unknown sections or keys are rejected, and every invariant violation is
reported with the offending field and value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .control import CONTROL_MODES, ControlParams
from .errors import ConfigurationError
from .grid_field import BumpDensity, GaussianBump, Grid, UniformDensity, build_grid, init_field
from .partition import AgentState
from .sensing import SensorModel, check_equal_cutoff
from .strategy import STRATEGY_KINDS, StrategyConfig

_GRID_KEYS = {"xmin", "xmax", "ymin", "ymax", "nx", "ny"}
_FIELD_KEYS = {"kind", "value", "bump"}
_STRATEGY_KEYS = {
    "kind", "stop_threshold", "max_search_steps", "deploy_tol", "deploy_max_iters",
    "search_period", "latency", "range_mode", "control", "k_prop", "dt",
    "slowdown_radius",
}
_RUN_KEYS = {"seed", "randomize_positions", "out"}
_AGENT_KEYS = {"x", "y", "k", "alpha", "range", "u_max", "u_const"}


@dataclass
class Scenario:
    name: str
    grid: Grid
    field_spec: object
    agents: list
    sensors: list
    strategy: StrategyConfig
    seed: int = 0
    randomize_positions: bool = False
    out_dir: str | None = None

    def build_field(self):
        return init_field(self.grid, self.field_spec)

    def initial_agents(self) -> list:
        """Agent states for a run; redrawn uniformly from the seed when the
        scenario asks for randomized positions."""
        if not self.randomize_positions:
            return [AgentState(a.id, a.position.copy()) for a in self.agents]
        rng = np.random.default_rng(self.seed)
        margin = 2.0 * max(self.grid.hx, self.grid.hy)
        min_sep = max(self.grid.hx, self.grid.hy)
        placed = []
        while len(placed) < len(self.agents):
            p = np.array(
                [
                    rng.uniform(self.grid.xmin + margin, self.grid.xmax - margin),
                    rng.uniform(self.grid.ymin + margin, self.grid.ymax - margin),
                ]
            )
            if all(np.hypot(*(p - q)) >= min_sep for q in placed):
                placed.append(p)
        return [AgentState(i, p) for i, p in enumerate(placed)]


def _parse_sections(path) -> list:
    """Raw parse into an ordered list of (section, [(key, value), ...])."""
    sections = []
    current = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = (line[1:-1].strip(), [])
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigurationError(f"{path}:{lineno}: key outside any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        current[1].append((key, value))
    return sections


def _to_dict(section, pairs, allowed, where):
    out = {}
    for key, value in pairs:
        if key not in allowed:
            raise ConfigurationError(f"{where}: unknown key {key!r} in [{section}]")
        if key in out and key != "bump":
            raise ConfigurationError(f"{where}: duplicate key {key!r} in [{section}]")
        out[key] = value
    return out


def _as_float(d, key, where):
    try:
        return float(d[key])
    except KeyError:
        raise ConfigurationError(f"{where}: missing key {key!r}") from None
    except ValueError:
        raise ConfigurationError(f"{where}: {key} = {d[key]!r} is not a number") from None


def _as_int(d, key, where):
    try:
        return int(d[key])
    except KeyError:
        raise ConfigurationError(f"{where}: missing key {key!r}") from None
    except ValueError:
        raise ConfigurationError(f"{where}: {key} = {d[key]!r} is not an integer") from None


def _as_bool(value, key, where):
    lowered = value.lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise ConfigurationError(f"{where}: {key} = {value!r} is not on/off")


def parse_scenario(path) -> Scenario:
    """Parse and fully validate a scenario file."""
    where = str(path)
    sections = _parse_sections(path)
    seen = {}
    agent_dicts = []
    for name, pairs in sections:
        if name == "agent":
            agent_dicts.append(_to_dict(name, pairs, _AGENT_KEYS, where))
        elif name in ("grid", "field", "strategy", "run"):
            if name in seen:
                raise ConfigurationError(f"{where}: duplicate section [{name}]")
            allowed = {
                "grid": _GRID_KEYS, "field": _FIELD_KEYS,
                "strategy": _STRATEGY_KEYS, "run": _RUN_KEYS,
            }[name]
            if name == "field":
                seen[name] = pairs  # bump may repeat; keep raw pairs too
            seen[name + "_dict"] = _to_dict(name, pairs, allowed, where)
        else:
            raise ConfigurationError(f"{where}: unknown section [{name}]")
    for required in ("grid_dict", "field_dict", "strategy_dict"):
        if required not in seen:
            raise ConfigurationError(f"{where}: missing section [{required[:-5]}]")
    if not agent_dicts:
        raise ConfigurationError(f"{where}: at least one [agent] section is required")

    g = seen["grid_dict"]
    grid = build_grid(
        (
            _as_float(g, "xmin", where), _as_float(g, "xmax", where),
            _as_float(g, "ymin", where), _as_float(g, "ymax", where),
        ),
        _as_int(g, "nx", where), _as_int(g, "ny", where),
    )

    f = seen["field_dict"]
    kind = f.get("kind", "uniform")
    if kind == "uniform":
        field_spec = UniformDensity(_as_float(f, "value", where))
    elif kind == "bumps":
        bumps = []
        for key, value in seen["field"]:
            if key != "bump":
                continue
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != 4:
                raise ConfigurationError(
                    f"{where}: bump needs 'amp, cx, cy, width', got {value!r}"
                )
            try:
                amp, cx, cy, width = (float(p) for p in parts)
            except ValueError:
                raise ConfigurationError(f"{where}: bump = {value!r} is not numeric") from None
            bumps.append(GaussianBump(amp, cx, cy, width))
        if not bumps:
            raise ConfigurationError(f"{where}: field kind 'bumps' needs bump lines")
        field_spec = BumpDensity(tuple(bumps))
    else:
        raise ConfigurationError(f"{where}: unknown field kind {kind!r}")
    init_field(grid, field_spec)  # validate value ranges and widths now

    s = seen["strategy_dict"]
    mode = s.get("control", "proportional")
    if mode not in CONTROL_MODES:
        raise ConfigurationError(f"{where}: unknown control mode {mode!r}")
    range_mode = _as_bool(s["range_mode"], "range_mode", where) if "range_mode" in s else False
    if range_mode and mode == "proportional":
        mode = "range_limited_proportional"
    control = ControlParams(
        mode=mode,
        k_prop=_as_float(s, "k_prop", where) if "k_prop" in s else 0.5,
        dt=_as_float(s, "dt", where) if "dt" in s else 1.0,
        slowdown_radius=(
            _as_float(s, "slowdown_radius", where) if "slowdown_radius" in s else 1.0
        ),
    )
    strategy = StrategyConfig(
        kind=s.get("kind", "hsds"),
        control=control,
        stop_threshold=_as_float(s, "stop_threshold", where),
        max_search_steps=(
            _as_int(s, "max_search_steps", where) if "max_search_steps" in s else 100
        ),
        deploy_tol=_as_float(s, "deploy_tol", where) if "deploy_tol" in s else 1e-2,
        deploy_max_iters=(
            _as_int(s, "deploy_max_iters", where) if "deploy_max_iters" in s else 500
        ),
        search_period=_as_int(s, "search_period", where) if "search_period" in s else 1,
        latency=_as_float(s, "latency", where) if "latency" in s else 1.0,
        range_mode=range_mode,
    )

    agents, sensors = [], []
    for i, a in enumerate(agent_dicts):
        label = f"{where} agent {i}"
        sensors.append(
            SensorModel(
                k=_as_float(a, "k", label),
                alpha=_as_float(a, "alpha", label),
                range_limit=_as_float(a, "range", label) if "range" in a else None,
                u_max=_as_float(a, "u_max", label) if "u_max" in a else None,
                u_const=_as_float(a, "u_const", label) if "u_const" in a else None,
            )
        )
        agents.append(
            AgentState(i, np.array([_as_float(a, "x", label), _as_float(a, "y", label)]))
        )

    r = seen.get("run_dict", {})
    scenario = Scenario(
        name=Path(path).stem,
        grid=grid,
        field_spec=field_spec,
        agents=agents,
        sensors=sensors,
        strategy=strategy,
        seed=_as_int(r, "seed", where) if "seed" in r else 0,
        randomize_positions=(
            _as_bool(r["randomize_positions"], "randomize_positions", where)
            if "randomize_positions" in r
            else False
        ),
        out_dir=r.get("out"),
    )
    validate_scenario(scenario, where)
    return scenario


def validate_scenario(scenario: Scenario, where: str) -> None:
    grid = scenario.grid
    for a in scenario.agents:
        if not grid.contains(a.position):
            raise ConfigurationError(
                f"{where}: agent {a.id} position {tuple(a.position)} is outside the region"
            )
    for i in range(len(scenario.agents)):
        for j in range(i + 1, len(scenario.agents)):
            if np.array_equal(scenario.agents[i].position, scenario.agents[j].position):
                raise ConfigurationError(
                    f"{where}: agents {i} and {j} share the position "
                    f"{tuple(scenario.agents[i].position)}"
                )
    if scenario.strategy.range_mode:
        check_equal_cutoff(scenario.sensors)


def with_grid_resolution(scenario: Scenario, n: int) -> Scenario:
    """Same scenario on an n-by-n grid (bounds unchanged)."""
    grid = build_grid(
        (scenario.grid.xmin, scenario.grid.xmax, scenario.grid.ymin, scenario.grid.ymax),
        n, n,
    )
    return replace(scenario, grid=grid)


def builtin_scenario_dir():
    return resources.files("hetsearch") / "scenarios"


def list_builtin_scenarios() -> list[str]:
    return sorted(p.name[: -len(".scn")] for p in builtin_scenario_dir().iterdir()
                  if p.name.endswith(".scn"))


def resolve_scenario_path(name_or_path) -> Path:
    """Accept a filesystem path, a bundled scenario name, or a unique prefix
    of a bundled name (e.g. 'case1')."""
    p = Path(name_or_path)
    if p.exists():
        return p
    names = list_builtin_scenarios()
    if name_or_path in names:
        return Path(str(builtin_scenario_dir() / f"{name_or_path}.scn"))
    prefixed = [n for n in names if n.startswith(str(name_or_path))]
    if len(prefixed) == 1:
        return Path(str(builtin_scenario_dir() / f"{prefixed[0]}.scn"))
    raise ConfigurationError(
        f"no scenario file or unique bundled scenario matches {name_or_path!r}; "
        f"bundled: {', '.join(names)}"
    )
