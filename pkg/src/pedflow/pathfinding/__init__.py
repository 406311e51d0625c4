"""Optimal grid path planning: jump-point search, the static-jump-point
variant with offline preprocessing, and a Dijkstra verification oracle."""

from pedflow.pathfinding.paths import (
    JumpPoint,
    Path,
    parse_path,
    path_from_points,
    serialize_path,
    validate_path,
)
from pedflow.pathfinding.rules import (
    forced_directions,
    has_forced_neighbor,
    jump,
    natural_directions,
    prune_neighbors,
)
from pedflow.pathfinding.search import (
    SearchStats,
    SearchWorkspace,
    dijkstra_oracle,
    dijkstra_steps,
    jps_s_search,
    jps_search,
)
from pedflow.pathfinding.sjp import (
    StaticJumpPoint,
    StaticJumpPointIndex,
    filter_sjp,
    precompute_sjp,
)

__all__ = [
    "JumpPoint",
    "Path",
    "SearchStats",
    "SearchWorkspace",
    "StaticJumpPoint",
    "StaticJumpPointIndex",
    "dijkstra_oracle",
    "dijkstra_steps",
    "filter_sjp",
    "forced_directions",
    "has_forced_neighbor",
    "jps_s_search",
    "jps_search",
    "jump",
    "natural_directions",
    "parse_path",
    "path_from_points",
    "precompute_sjp",
    "prune_neighbors",
    "serialize_path",
    "validate_path",
]
