"""Scenario configuration files.

A config is a JSON document in one of two shapes. The shortcut form
names a built-in benchmark:

    {"benchmark": "narrow_walkway", "overrides": {"seed": 7}}

The explicit form describes everything, with sections ``map``,
``pedestrians``, ``forces``, ``handler``, ``run``, and optional
``pois``::

    {
      "map": {"text": "....\\n.##.\\n....", "cell_size": 0.5},
      "pedestrians": [
        {"spawn": [0, 0], "goal": [3, 2], "desired_speed": 1.34}
      ],
      "forces": {"tau": 0.5},
      "handler": {"spine_radius": 1.0},
      "run": {"dt": 0.05, "max_steps": 20000}
    }

``map`` accepts ``file`` (path, relative to the config file), ``text``
(inline rows of ``.``/``#``), or ``width``/``height``/``blocked``.
``spawn`` is a cell index pair placed at the cell center; ``spawn_world``
gives metric coordinates directly. Every loading problem raises
ConfigError with enough context to locate the offending entry.
"""

from __future__ import annotations

import json
from pathlib import Path as FsPath
from typing import Any, Mapping, Optional

from pedflow.control import HandlerParams
from pedflow.forces import ForceParams, PointOfInterest
from pedflow.grid import Cell, GridMap, WorldPoint, load_map, load_map_file
from pedflow.scenarios import PedestrianSpec, Scenario, build_scenario


class ConfigError(Exception):
    """A scenario config file is malformed or inconsistent."""


def _require(section: Mapping, key: str, where: str) -> Any:
    if key not in section:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return section[key]


def _pair(value: Any, where: str) -> tuple[float, float]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) for v in value)
    ):
        raise ConfigError(f"{where}: expected a [x, y] number pair, got {value!r}")
    return (value[0], value[1])


def _load_grid(section: Mapping, base_dir: Optional[FsPath]) -> GridMap:
    if not isinstance(section, Mapping):
        raise ConfigError("map: expected an object")
    cell_size = section.get("cell_size", 0.5)
    try:
        if "file" in section:
            path = FsPath(section["file"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return load_map_file(path, cell_size=cell_size)
        if "text" in section:
            return load_map(section["text"], cell_size=cell_size)
        if "width" in section or "height" in section:
            width = int(_require(section, "width", "map"))
            height = int(_require(section, "height", "map"))
            blocked = frozenset(
                Cell(int(x), int(y))
                for x, y in (
                    _pair(b, "map.blocked") for b in section.get("blocked", ())
                )
            )
            return GridMap(width, height, blocked, cell_size)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"map: {exc}") from exc
    raise ConfigError("map: needs one of 'file', 'text', or 'width'/'height'")


def _load_pedestrians(entries: Any, grid: GridMap) -> tuple[PedestrianSpec, ...]:
    if not isinstance(entries, list):
        raise ConfigError("pedestrians: expected a list")
    specs = []
    for i, entry in enumerate(entries):
        where = f"pedestrians[{i}]"
        if not isinstance(entry, Mapping):
            raise ConfigError(f"{where}: expected an object")
        if "spawn_world" in entry:
            spawn = WorldPoint(*_pair(entry["spawn_world"], where + ".spawn_world"))
        else:
            cx, cy = _pair(_require(entry, "spawn", where), where + ".spawn")
            spawn = grid.cell_to_world(Cell(int(cx), int(cy)))
        gx, gy = _pair(_require(entry, "goal", where), where + ".goal")
        group = entry.get("group_id")
        if group is not None and not isinstance(group, int):
            raise ConfigError(f"{where}: group_id must be an integer or null")
        speed = entry.get("desired_speed", 1.34)
        if not isinstance(speed, (int, float)) or speed <= 0:
            raise ConfigError(f"{where}: desired_speed must be positive")
        specs.append(
            PedestrianSpec(spawn, Cell(int(gx), int(gy)), group, float(speed))
        )
    return tuple(specs)


def _load_pois(entries: Any) -> tuple[PointOfInterest, ...]:
    if not isinstance(entries, list):
        raise ConfigError("pois: expected a list")
    pois = []
    for i, entry in enumerate(entries):
        where = f"pois[{i}]"
        if not isinstance(entry, Mapping):
            raise ConfigError(f"{where}: expected an object")
        try:
            pois.append(
                PointOfInterest(
                    position=WorldPoint(
                        *_pair(_require(entry, "position", where), where)
                    ),
                    strength0=entry.get("strength0", 1.0),
                    range=entry.get("range", 5.0),
                    duration=entry.get("duration", 60.0),
                    activated_at=entry.get("activated_at", 0.0),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    return tuple(pois)


def _params(section: Any, cls, name: str):
    if not isinstance(section, Mapping):
        raise ConfigError(f"{name}: expected an object")
    try:
        return cls(**section)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def scenario_from_config(
    data: Mapping,
    base_dir: Optional[FsPath] = None,
    seed: Optional[int] = None,
) -> Scenario:
    """Build a Scenario from parsed config data.

    ``seed`` overrides the seed of a benchmark-shortcut config; explicit
    configs contain no randomness, so it is ignored for them.
    """
    if not isinstance(data, Mapping):
        raise ConfigError("top level: expected an object")
    if "benchmark" in data:
        overrides = dict(data.get("overrides") or {})
        if seed is not None:
            overrides["seed"] = seed
        try:
            return build_scenario(data["benchmark"], overrides)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    grid = _load_grid(_require(data, "map", "top level"), base_dir)
    pedestrians = _load_pedestrians(
        _require(data, "pedestrians", "top level"), grid
    )
    params = _params(data.get("forces", {}), ForceParams, "forces")
    handler = _params(data.get("handler", {}), HandlerParams, "handler")
    run = data.get("run", {})
    if not isinstance(run, Mapping):
        raise ConfigError("run: expected an object")
    scenario = Scenario(
        name=str(data.get("name", "custom")),
        grid=grid,
        pedestrians=pedestrians,
        pois=_load_pois(data.get("pois", [])),
        params=params,
        handler=handler,
        dt=run.get("dt", 0.05),
        max_steps=run.get("max_steps", 20000),
    )
    try:
        scenario.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return scenario


def load_scenario_file(path, seed: Optional[int] = None) -> Scenario:
    """Load a scenario config from a JSON file.

    JSON syntax problems are reported with the file name and line number.
    """
    fs_path = FsPath(path)
    try:
        text = fs_path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return scenario_from_config(data, base_dir=fs_path.parent, seed=seed)
