"""Heterogeneous multi-agent search on a gridded region.

Agents with unequal Gaussian-family sensors partition the region by
node-function dominance, deploy toward the weighted centroids of their
cells, and iteratively multiply down an uncertainty field; the sequential
strategy searches only at converged deployments while the combined strategy
searches as the agents move.
"""

from .control import ControlParams, DeployResult, deploy_until_converged, control_velocity, step_position
from .errors import ConfigurationError, UnsupportedModeError
from .grid_field import (
    BumpDensity,
    GaussianBump,
    Grid,
    UncertaintyField,
    UniformDensity,
    build_grid,
    diameter,
    init_field,
    integrate,
    save_field_csv,
    save_labels_csv,
)
from .locational import (
    CentroidData,
    cell_centroids,
    fd_gradient_oracle,
    gradient,
    is_critical,
    mass_centroid,
    neighbor_local_gradient,
    objective,
    restricted_centroids,
)
from .partition import (
    AgentState,
    Partition,
    assign,
    boundary_cells,
    delaunay_adjacency,
    restrict_to_range,
)
from .scenario import Scenario, parse_scenario, resolve_scenario_path
from .sensing import (
    SensorModel,
    beta,
    check_equal_cutoff,
    node_fn,
    range_limited_fn,
    tilde_weight,
)
from .strategy import (
    SearchEvent,
    StrategyConfig,
    Trace,
    decay_bound,
    run_hcds,
    run_hsds,
    search_update,
    summarize,
)

__all__ = [
    "AgentState", "BumpDensity", "CentroidData", "ConfigurationError",
    "ControlParams", "DeployResult", "GaussianBump", "Grid", "Partition",
    "Scenario", "SearchEvent", "SensorModel", "StrategyConfig", "Trace",
    "UncertaintyField", "UniformDensity", "UnsupportedModeError", "assign",
    "beta", "boundary_cells", "build_grid", "cell_centroids",
    "check_equal_cutoff", "control_velocity", "decay_bound",
    "delaunay_adjacency", "deploy_until_converged", "diameter",
    "fd_gradient_oracle", "gradient", "init_field", "integrate",
    "is_critical", "mass_centroid", "neighbor_local_gradient", "node_fn",
    "objective", "parse_scenario", "range_limited_fn", "resolve_scenario_path",
    "restrict_to_range", "restricted_centroids", "run_hcds", "run_hsds",
    "save_field_csv", "save_labels_csv", "search_update", "step_position",
    "summarize", "tilde_weight",
]
