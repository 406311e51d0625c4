"""Occupancy-grid world model.

Cells are integer (x, y) with x growing rightward and y growing upward;
world coordinates are metric, cell (x, y) covering the square
[x*cell_size, (x+1)*cell_size) x [y*cell_size, (y+1)*cell_size).

Movement is 8-connected. Diagonal steps must not cut corners: the step
(dx, dy) from a cell is legal only when the target and BOTH flanking
cells (x+dx, y) and (x, y+dy) are traversable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np


class Cell(NamedTuple):
    x: int
    y: int


class Direction(NamedTuple):
    dx: int
    dy: int

    @property
    def is_diagonal(self) -> bool:
        return self.dx != 0 and self.dy != 0

    @property
    def step_length(self) -> float:
        """Length of one step in cells: 1 for straight, sqrt(2) diagonal."""
        return math.sqrt(2.0) if self.is_diagonal else 1.0


class WorldPoint(NamedTuple):
    x: float
    y: float


STRAIGHT_DIRECTIONS = (
    Direction(1, 0),
    Direction(-1, 0),
    Direction(0, 1),
    Direction(0, -1),
)
DIAGONAL_DIRECTIONS = (
    Direction(1, 1),
    Direction(1, -1),
    Direction(-1, 1),
    Direction(-1, -1),
)
ALL_DIRECTIONS = STRAIGHT_DIRECTIONS + DIAGONAL_DIRECTIONS

# 0.5 m cells resolve door widths and body sizes at pedestrian scale.
DEFAULT_CELL_SIZE = 0.5


class MapFormatError(ValueError):
    """Raised when map text cannot be parsed into a grid."""


_FREE_CHARS = frozenset(".S")
_BLOCKED_CHARS = frozenset("#@T")


@dataclass(frozen=True)
class GridMap:
    """Immutable rectangular occupancy grid.

    Attributes:
        width: number of columns (> 0).
        height: number of rows (> 0).
        blocked: set of non-traversable cells, all inside the bounds.
        cell_size: edge length of one cell in meters (> 0).
    """

    width: int
    height: int
    blocked: frozenset[Cell] = frozenset()
    cell_size: float = DEFAULT_CELL_SIZE

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"grid dimensions must be positive, got {self.width}x{self.height}")
        if self.cell_size <= 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        blocked = frozenset(Cell(x, y) for x, y in self.blocked)
        object.__setattr__(self, "blocked", blocked)
        for c in blocked:
            if not self.in_bounds(c):
                raise ValueError(f"blocked cell {c} outside {self.width}x{self.height} grid")

    # -- traversability ----------------------------------------------------

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def is_traversable(self, cell: Cell) -> bool:
        """True when cell is inside the grid and not blocked."""
        return self.in_bounds(cell) and Cell(*cell) not in self.blocked

    def legal_step(self, cell: Cell, direction: Direction) -> bool:
        """True when moving one step from cell along direction is allowed.

        The source cell itself is not checked. Straight steps need a
        traversable target; diagonal steps additionally need both
        flanking cells free (no corner cutting).
        """
        x, y = cell
        dx, dy = direction
        if not self.is_traversable(Cell(x + dx, y + dy)):
            return False
        if dx != 0 and dy != 0:
            return self.is_traversable(Cell(x + dx, y)) and self.is_traversable(Cell(x, y + dy))
        return True

    def step_neighbors(self, cell: Cell) -> list[tuple[Direction, Cell]]:
        """All legal single-step moves from a traversable cell.

        Returns (direction, target) pairs in the fixed ALL_DIRECTIONS
        order (four straight, then four diagonal).
        """
        cell = Cell(*cell)
        if not self.is_traversable(cell):
            raise ValueError(f"step_neighbors called on non-traversable cell {cell}")
        out = []
        for d in ALL_DIRECTIONS:
            if self.legal_step(cell, d):
                out.append((d, Cell(cell.x + d.dx, cell.y + d.dy)))
        return out

    # -- world <-> cell ----------------------------------------------------

    def cell_to_world(self, cell: Cell) -> WorldPoint:
        """Metric center point of a cell."""
        if not self.in_bounds(cell):
            raise ValueError(f"cell {cell} outside {self.width}x{self.height} grid")
        return WorldPoint((cell[0] + 0.5) * self.cell_size, (cell[1] + 0.5) * self.cell_size)

    def world_to_cell(self, point: WorldPoint) -> Cell:
        """Cell containing a world point.

        Points up to one cell outside the map extent are clamped to the
        nearest edge cell; anything farther out is an error.
        """
        px, py = point
        cs = self.cell_size
        if not (-cs <= px <= (self.width + 1) * cs and -cs <= py <= (self.height + 1) * cs):
            raise ValueError(
                f"point ({px}, {py}) more than one cell outside "
                f"{self.width * cs}x{self.height * cs} m extent"
            )
        cx = min(max(int(math.floor(px / cs)), 0), self.width - 1)
        cy = min(max(int(math.floor(py / cs)), 0), self.height - 1)
        return Cell(cx, cy)

    def contains_world(self, point: WorldPoint) -> bool:
        """True when the point lies inside the metric extent of the map."""
        px, py = point
        return 0.0 <= px < self.width * self.cell_size and 0.0 <= py < self.height * self.cell_size

    @property
    def world_width(self) -> float:
        return self.width * self.cell_size

    @property
    def world_height(self) -> float:
        return self.height * self.cell_size

    # -- array views (row y, column x) --------------------------------------

    @cached_property
    def walkable(self) -> np.ndarray:
        """uint8 [height, width] view: 1 traversable, 0 blocked. Do not mutate."""
        arr = np.ones((self.height, self.width), dtype=np.uint8)
        for x, y in self.blocked:
            arr[y, x] = 0
        arr.setflags(write=False)
        return arr

    @cached_property
    def walkable_padded(self) -> np.ndarray:
        """walkable with a one-cell border of zeros, for probe-safe scanning."""
        arr = np.zeros((self.height + 2, self.width + 2), dtype=np.uint8)
        arr[1:-1, 1:-1] = self.walkable
        arr.setflags(write=False)
        return arr

    # -- text round-trip -----------------------------------------------------

    def to_text(self) -> str:
        """Serialize to the headered ASCII form load_map accepts."""
        rows = []
        for y in range(self.height):
            rows.append("".join("#" if Cell(x, y) in self.blocked else "." for x in range(self.width)))
        return f"{self.width} {self.height}\n" + "\n".join(rows) + "\n"


def _parse_rows(rows: Iterable[tuple[int, str]], width: int | None) -> tuple[int, int, set[Cell]]:
    """Parse (lineno, row) pairs into dimensions and a blocked set."""
    blocked: set[Cell] = set()
    parsed = 0
    for y, (lineno, row) in enumerate(rows):
        if width is None:
            width = len(row)
        if len(row) != width:
            raise MapFormatError(f"line {lineno}: expected {width} characters, got {len(row)}")
        for x, ch in enumerate(row):
            if ch in _BLOCKED_CHARS:
                blocked.add(Cell(x, y))
            elif ch not in _FREE_CHARS:
                raise MapFormatError(f"line {lineno}: unknown map character {ch!r}")
        parsed += 1
    if width is None or parsed == 0 or width == 0:
        raise MapFormatError("map has no cells")
    return width, parsed, blocked


def load_map(text: str, cell_size: float = DEFAULT_CELL_SIZE) -> GridMap:
    """Parse ASCII map text.

    Three forms are accepted:
      * "W H" header line followed by H rows of W characters,
      * movingai .map ("type ..."/"height H"/"width W"/"map" header),
      * bare rows with no header.
    '.' and 'S' are traversable; '#', '@' and 'T' are blocked.
    """
    numbered = [(i + 1, line.rstrip("\r")) for i, line in enumerate(text.splitlines())]
    numbered = [(n, line) for n, line in numbered if line.strip() != ""]
    if not numbered:
        raise MapFormatError("empty map text")

    first = numbered[0][1].strip()
    if first.lower().startswith("type"):
        header: dict[str, str] = {}
        body_at = None
        for idx, (lineno, line) in enumerate(numbered):
            key, _, val = line.strip().partition(" ")
            key = key.lower()
            if key == "map":
                body_at = idx + 1
                break
            header[key] = val.strip()
        if body_at is None:
            raise MapFormatError("movingai header is missing the 'map' line")
        try:
            h = int(header["height"])
            w = int(header["width"])
        except (KeyError, ValueError) as exc:
            raise MapFormatError(f"movingai header missing integer height/width: {exc}") from exc
        rows = numbered[body_at:]
        if len(rows) != h:
            raise MapFormatError(f"expected {h} map rows, got {len(rows)}")
        width, height, blocked = _parse_rows(rows, w)
        return GridMap(width, height, frozenset(blocked), cell_size)

    parts = first.split()
    if len(parts) == 2 and all(p.lstrip("-").isdigit() for p in parts):
        w, h = int(parts[0]), int(parts[1])
        if w <= 0 or h <= 0:
            raise MapFormatError(f"line {numbered[0][0]}: non-positive dimensions {w}x{h}")
        rows = numbered[1:]
        if len(rows) != h:
            raise MapFormatError(f"expected {h} map rows after header, got {len(rows)}")
        width, height, blocked = _parse_rows(rows, w)
        return GridMap(width, height, frozenset(blocked), cell_size)

    width, height, blocked = _parse_rows(numbered, None)
    return GridMap(width, height, frozenset(blocked), cell_size)


def load_map_file(path, cell_size: float = DEFAULT_CELL_SIZE) -> GridMap:
    with open(path, "r", encoding="utf-8") as fh:
        return load_map(fh.read(), cell_size)
