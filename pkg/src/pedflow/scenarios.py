"""The three movement benchmarks and the Scenario container.

Geometry defaults: a 40 m x 4 m corridor for narrow_walkway, a
24 m x 12 m room split by a wall with a 1.2 m door for narrow_passage,
and a 50 m x 30 m field with fixed rectangular blocks for
path_following. All geometry, crowd size, force, and handler settings
are overridable because crowd outcomes are sensitive to them.

All randomness (spawn cells, goals, desired speeds) is drawn from one
seeded generator at build time in a fixed order; the simulation loop
itself draws no random numbers, so a (scenario name, seed) pair pins the
whole run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from pedflow.control import HandlerParams
from pedflow.forces import ForceParams, PointOfInterest
from pedflow.grid import Cell, GridMap, WorldPoint

SCENARIO_NAMES = ("narrow_walkway", "narrow_passage", "path_following")

SPEED_MEAN = 1.34
SPEED_SD = 0.26
SPEED_MIN = 0.6
SPEED_MAX = 2.0


@dataclass(frozen=True)
class PedestrianSpec:
    spawn: WorldPoint
    goal: Cell
    group_id: Optional[int]
    desired_speed: float


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: GridMap
    pedestrians: tuple[PedestrianSpec, ...]
    pois: tuple[PointOfInterest, ...] = ()
    params: ForceParams = field(default_factory=ForceParams)
    handler: HandlerParams = field(default_factory=HandlerParams)
    dt: float = 0.05
    max_steps: int = 20000

    @property
    def spine_radius(self) -> float:
        return self.handler.spine_radius

    def validate(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        for i, spec in enumerate(self.pedestrians):
            if not self.grid.contains_world(spec.spawn):
                raise ValueError(f"pedestrian {i}: spawn outside the map")
            cell = self.grid.world_to_cell(spec.spawn)
            if not self.grid.is_traversable(cell):
                raise ValueError(f"pedestrian {i}: spawn cell {cell} blocked")
            if not self.grid.is_traversable(spec.goal):
                raise ValueError(f"pedestrian {i}: goal {spec.goal} blocked")


def _merge(defaults: dict, overrides: Mapping | None, name: str) -> dict:
    merged = dict(defaults)
    for key, value in (overrides or {}).items():
        if key not in merged:
            raise ValueError(
                f"unknown {name} option {key!r}; valid options: "
                + ", ".join(sorted(merged))
            )
        merged[key] = value
    return merged


def _perimeter(width: int, height: int) -> set[Cell]:
    cells = set()
    for x in range(width):
        cells.add(Cell(x, 0))
        cells.add(Cell(x, height - 1))
    for y in range(height):
        cells.add(Cell(0, y))
        cells.add(Cell(width - 1, y))
    return cells


def _band(x0: int, x1: int, y0: int, y1: int) -> list[Cell]:
    return [Cell(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1)]


def _speeds(rng: random.Random, n: int) -> list[float]:
    return [
        min(SPEED_MAX, max(SPEED_MIN, rng.gauss(SPEED_MEAN, SPEED_SD)))
        for _ in range(n)
    ]


def _specs(
    grid: GridMap,
    rng: random.Random,
    spawn_cells: Sequence[Cell],
    goal_cells: Sequence[Cell],
    count: int,
    distinct_goals: bool,
) -> list[PedestrianSpec]:
    if len(spawn_cells) < count:
        raise ValueError(
            f"spawn region has {len(spawn_cells)} cells for {count} pedestrians"
        )
    spawns = rng.sample(list(spawn_cells), count)
    if distinct_goals and len(goal_cells) >= count:
        goals = rng.sample(list(goal_cells), count)
    else:
        goals = [rng.choice(list(goal_cells)) for _ in range(count)]
    speeds = _speeds(rng, count)
    return [
        PedestrianSpec(grid.cell_to_world(s), g, None, v)
        for s, g, v in zip(spawns, goals, speeds)
    ]


def _common(merged: dict) -> tuple[ForceParams, dict, float, int, int]:
    params = ForceParams(**merged["forces"])
    handler_over = dict(merged["handler"])
    return params, handler_over, merged["dt"], merged["max_steps"], merged["seed"]


def _handler(cell_size: float, overrides: dict) -> HandlerParams:
    base = HandlerParams.for_cell_size(cell_size)
    fields = {
        "spine_radius": base.spine_radius,
        "waypoint_tolerance": base.waypoint_tolerance,
        "max_replans": base.max_replans,
    }
    for key, value in overrides.items():
        if key not in fields:
            raise ValueError(f"unknown handler option {key!r}")
        fields[key] = value
    return HandlerParams(**fields)


def _narrow_walkway(overrides: Mapping | None) -> Scenario:
    merged = _merge(
        {
            "corridor_length": 40.0,
            "corridor_width": 4.0,
            "group_size": 50,
            "cell_size": 0.5,
            "forces": {},
            "handler": {},
            "dt": 0.05,
            "max_steps": 20000,
            "seed": 0,
        },
        overrides,
        "narrow_walkway",
    )
    cs = merged["cell_size"]
    length = round(merged["corridor_length"] / cs)
    width = round(merged["corridor_width"] / cs)
    gw, gh = length + 2, width + 2
    grid = GridMap(gw, gh, frozenset(_perimeter(gw, gh)), cs)

    n = merged["group_size"]
    rng = random.Random(merged["seed"])
    band_cols = max(2, (2 * n) // width + 1)
    left_spawn = _band(1, band_cols, 1, width)
    right_spawn = _band(length + 1 - band_cols, length, 1, width)
    east = _specs(grid, rng, left_spawn, right_spawn, n, distinct_goals=True)
    west = _specs(grid, rng, right_spawn, left_spawn, n, distinct_goals=True)
    params, handler_over, dt, max_steps, _ = _common(merged)
    return Scenario(
        name="narrow_walkway",
        grid=grid,
        pedestrians=tuple(east + west),
        params=params,
        handler=_handler(cs, handler_over),
        dt=dt,
        max_steps=max_steps,
    )


def _narrow_passage(overrides: Mapping | None) -> Scenario:
    merged = _merge(
        {
            "room_width": 24.0,
            "room_height": 12.0,
            "door_width": 1.2,
            "count": 100,
            "cell_size": 0.4,
            "forces": {},
            "handler": {},
            "dt": 0.05,
            "max_steps": 20000,
            "seed": 0,
        },
        overrides,
        "narrow_passage",
    )
    cs = merged["cell_size"]
    w = round(merged["room_width"] / cs)
    h = round(merged["room_height"] / cs)
    door_cells = max(1, round(merged["door_width"] / cs))
    gw, gh = w + 2, h + 2
    blocked = _perimeter(gw, gh)
    divider_x = gw // 2
    door_start = 1 + (h - door_cells) // 2
    for y in range(1, h + 1):
        if not door_start <= y < door_start + door_cells:
            blocked.add(Cell(divider_x, y))
    grid = GridMap(gw, gh, frozenset(blocked), cs)

    n = merged["count"]
    rng = random.Random(merged["seed"])
    spawn = _band(1, divider_x - 4, 1, h)
    goals = _band(gw - 1 - max(2, w // 8), gw - 2, 1, h)
    specs = _specs(grid, rng, spawn, goals, n, distinct_goals=True)
    params, handler_over, dt, max_steps, _ = _common(merged)
    return Scenario(
        name="narrow_passage",
        grid=grid,
        pedestrians=tuple(specs),
        params=params,
        handler=_handler(cs, handler_over),
        dt=dt,
        max_steps=max_steps,
    )


_FIELD_BLOCKS = (
    (25, 12, 10, 10),
    (25, 40, 10, 10),
    (50, 25, 12, 12),
    (75, 10, 8, 14),
    (75, 38, 8, 14),
)


def _path_following(overrides: Mapping | None) -> Scenario:
    merged = _merge(
        {
            "field_width": 50.0,
            "field_height": 30.0,
            "group_size": 100,
            "cell_size": 0.5,
            "forces": {},
            "handler": {},
            "dt": 0.05,
            "max_steps": 20000,
            "seed": 0,
        },
        overrides,
        "path_following",
    )
    cs = merged["cell_size"]
    w = round(merged["field_width"] / cs)
    h = round(merged["field_height"] / cs)
    gw, gh = w + 2, h + 2
    blocked = _perimeter(gw, gh)
    sx, sy = w / 100.0, h / 60.0  # blocks scale with the field
    for bx, by, bw, bh in _FIELD_BLOCKS:
        x0, y0 = 1 + round(bx * sx), 1 + round(by * sy)
        for x in range(x0, min(gw - 1, x0 + round(bw * sx))):
            for y in range(y0, min(gh - 1, y0 + round(bh * sy))):
                blocked.add(Cell(x, y))
    grid = GridMap(gw, gh, frozenset(blocked), cs)

    n = merged["group_size"]
    rng = random.Random(merged["seed"])
    mid = h // 2
    spawn_top = _band(1, max(2, w // 9), mid + 1, h)
    spawn_bottom = _band(1, max(2, w // 9), 1, mid)
    goal_band = _band(
        gw - 1 - max(2, w // 11), gw - 2, max(1, mid - h // 4), min(h, mid + h // 4)
    )
    top = _specs(grid, rng, spawn_top, goal_band, n, distinct_goals=False)
    bottom = _specs(grid, rng, spawn_bottom, goal_band, n, distinct_goals=False)
    params, handler_over, dt, max_steps, _ = _common(merged)
    return Scenario(
        name="path_following",
        grid=grid,
        pedestrians=tuple(top + bottom),
        params=params,
        handler=_handler(cs, handler_over),
        dt=dt,
        max_steps=max_steps,
    )


_BUILDERS = {
    "narrow_walkway": _narrow_walkway,
    "narrow_passage": _narrow_passage,
    "path_following": _path_following,
}


def build_scenario(name: str, overrides: Mapping | None = None) -> Scenario:
    """Construct one of the named benchmarks, with optional overrides.

    Overrides are scenario options (geometry, counts, seed) plus nested
    "forces" and "handler" dicts for model parameters.
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; valid names: "
            + ", ".join(SCENARIO_NAMES)
        ) from None
    scenario = builder(overrides)
    scenario.validate()
    return scenario
