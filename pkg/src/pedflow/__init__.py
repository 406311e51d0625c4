"""pedflow: grid path planning with static jump points, coupled to a
social-force pedestrian movement model through a plan/move state machine."""

__version__ = "0.1.0"

from pedflow.bench import BenchReport, bench_pathfinding, random_block_map
from pedflow.config import ConfigError, load_scenario_file, scenario_from_config
from pedflow.control import (
    AgentController,
    ControlState,
    HandlerParams,
    PathSpine,
    WorldView,
    tick,
)
from pedflow.engine import SimulationResult, audit_trace, run_simulation
from pedflow.forces import ForceParams, Pedestrian, PointOfInterest
from pedflow.grid import Cell, Direction, GridMap, WorldPoint, load_map, load_map_file
from pedflow.obstacles import Obstacle, Segment, extract_obstacles
from pedflow.pathfinding import (
    Path,
    SearchStats,
    SearchWorkspace,
    StaticJumpPointIndex,
    dijkstra_oracle,
    jps_s_search,
    jps_search,
    precompute_sjp,
    validate_path,
)
from pedflow.scenarios import PedestrianSpec, Scenario, build_scenario

__all__ = [
    "AgentController",
    "BenchReport",
    "Cell",
    "ConfigError",
    "ControlState",
    "Direction",
    "ForceParams",
    "GridMap",
    "HandlerParams",
    "Obstacle",
    "Path",
    "PathSpine",
    "Pedestrian",
    "PedestrianSpec",
    "PointOfInterest",
    "Scenario",
    "SearchStats",
    "SearchWorkspace",
    "Segment",
    "SimulationResult",
    "StaticJumpPointIndex",
    "WorldPoint",
    "WorldView",
    "audit_trace",
    "bench_pathfinding",
    "build_scenario",
    "dijkstra_oracle",
    "extract_obstacles",
    "jps_s_search",
    "jps_search",
    "load_map",
    "load_map_file",
    "load_scenario_file",
    "precompute_sjp",
    "random_block_map",
    "run_simulation",
    "scenario_from_config",
    "tick",
    "validate_path",
    "__version__",
]
