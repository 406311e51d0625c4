"""Transition handler: the per-pedestrian finite state machine that
decides whether the path planner or the motion controller is in charge.

A Planning tick plans a route to the goal and converts it into a spine
(the polyline through the route's cell centers plus a lateral radius).
A Moving tick lets the force model propose the next position; if that
position strays beyond the spine radius the motion is discarded and
control shifts back to the planner, otherwise it is committed and the
waypoint cursor advances. Done and Failed are terminal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

from pedflow.forces import ForceParams, Pedestrian, integrate_step
from pedflow.grid import Cell, GridMap, WorldPoint
from pedflow.pathfinding import Path


class ControlState(Enum):
    PLANNING = "PLANNING"
    MOVING = "MOVING"
    DONE = "DONE"
    FAILED = "FAILED"


TERMINAL_STATES = frozenset({ControlState.DONE, ControlState.FAILED})


@dataclass(frozen=True)
class PathSpine:
    """A route as connected segments through its points, plus a radius."""

    points: tuple[WorldPoint, ...]
    radius: float

    def __post_init__(self):
        if not self.points:
            raise ValueError("spine needs at least one point")
        if self.radius <= 0:
            raise ValueError("spine radius must be positive")


@dataclass(frozen=True)
class HandlerParams:
    spine_radius: float = 1.0
    waypoint_tolerance: float = 0.5
    max_replans: int = 10

    def __post_init__(self):
        if self.spine_radius <= 0:
            raise ValueError("spine_radius must be positive")
        if self.waypoint_tolerance <= 0:
            raise ValueError("waypoint_tolerance must be positive")
        if self.max_replans < 0:
            raise ValueError("max_replans must be >= 0")

    @staticmethod
    def for_cell_size(cell_size: float, max_replans: int = 10) -> "HandlerParams":
        """Defaults scaled to the map: radius two cells, tolerance one."""
        return HandlerParams(
            spine_radius=2.0 * cell_size,
            waypoint_tolerance=cell_size,
            max_replans=max_replans,
        )


@dataclass
class AgentController:
    pedestrian_id: int
    goal: Cell
    state: ControlState = ControlState.PLANNING
    spine: Optional[PathSpine] = None
    waypoint_index: int = 0
    replan_count: int = 0


@dataclass(frozen=True)
class WorldView:
    """Everything a tick may consult: the map, a planner, the per-tick
    force for a pedestrian, and the model parameters."""

    grid: GridMap
    plan: Callable[[Cell, Cell], Optional[Path]]
    force: Callable[[Pedestrian], tuple[float, float]]
    params: ForceParams
    handler: HandlerParams


def spine_from_path(path: Path, grid: GridMap, radius: float) -> PathSpine:
    points = tuple(grid.cell_to_world(c) for c in path.points)
    return PathSpine(points, radius)


def nearest_point_on_spine(
    spine: PathSpine, p: WorldPoint
) -> tuple[WorldPoint, float]:
    """Closest point over all spine segments; ties keep the earliest."""
    pts = spine.points
    if len(pts) == 1:
        q = pts[0]
        return q, math.hypot(p.x - q.x, p.y - q.y)
    best_q = None
    best_d = math.inf
    for a, b in zip(pts, pts[1:]):
        abx, aby = b.x - a.x, b.y - a.y
        t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / (abx * abx + aby * aby)
        t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
        qx, qy = a.x + t * abx, a.y + t * aby
        d = math.hypot(p.x - qx, p.y - qy)
        if d < best_d:
            best_d = d
            best_q = WorldPoint(qx, qy)
    return best_q, best_d


def detect_deviation(spine: PathSpine, next_pos: WorldPoint) -> bool:
    """True iff next_pos lies strictly beyond the spine radius."""
    return nearest_point_on_spine(spine, next_pos)[1] > spine.radius


def advance_waypoint(
    agent: AgentController, ped: Pedestrian, tolerance: float
) -> AgentController:
    """Move the waypoint cursor past every point already reached.

    Retargets ped (in place) to the new current waypoint; reaching the
    final point puts the agent in Done.
    """
    if agent.state is not ControlState.MOVING:
        raise ValueError(
            f"advance_waypoint on agent {agent.pedestrian_id} "
            f"in state {agent.state.name}"
        )
    pts = agent.spine.points
    while True:
        wp = pts[agent.waypoint_index]
        if math.hypot(ped.position.x - wp.x, ped.position.y - wp.y) > tolerance:
            return agent
        if agent.waypoint_index == len(pts) - 1:
            agent.state = ControlState.DONE
            agent.spine = None
            return agent
        agent.waypoint_index += 1
        ped.target = pts[agent.waypoint_index]


def tick(
    agent: AgentController, ped: Pedestrian, world: WorldView, dt: float
) -> tuple[AgentController, Pedestrian]:
    """One control step. Returns the updated controller and pedestrian;
    the passed-in pedestrian is never mutated, so callers can tick a whole
    crowd against one immutable snapshot and commit the results afterward.
    """
    if agent.state in TERMINAL_STATES:
        raise ValueError(
            f"tick on agent {agent.pedestrian_id} in terminal state "
            f"{agent.state.name}"
        )

    if agent.state is ControlState.PLANNING:
        start = world.grid.world_to_cell(ped.position)
        path = world.plan(start, agent.goal)
        if path is None:
            agent.state = ControlState.FAILED
            agent.spine = None
            return agent, ped
        agent.spine = spine_from_path(path, world.grid, world.handler.spine_radius)
        agent.waypoint_index = 1 if len(agent.spine.points) > 1 else 0
        agent.state = ControlState.MOVING
        ped = replace(ped, target=agent.spine.points[agent.waypoint_index])
        return agent, ped

    # Moving: propose a step, drop it on deviation, else commit.
    candidate = integrate_step(ped, world.force(ped), dt, world.params)
    if detect_deviation(agent.spine, candidate.position):
        agent.spine = None
        if agent.replan_count >= world.handler.max_replans:
            agent.state = ControlState.FAILED
        else:
            agent.replan_count += 1
            agent.state = ControlState.PLANNING
        return agent, ped

    grid = world.grid
    if grid.contains_world(candidate.position) and grid.is_traversable(
        grid.world_to_cell(candidate.position)
    ):
        ped = candidate
    else:
        # hold against the wall: blocked cells are never entered even if
        # the force model pushes that way for one step
        ped = replace(ped, velocity=(0.0, 0.0))
    advance_waypoint(agent, ped, world.handler.waypoint_tolerance)
    return agent, ped
