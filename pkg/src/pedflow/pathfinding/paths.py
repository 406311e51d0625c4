"""Path and jump-point value types, path validation, and serialization.

A path is an ordered sequence of cells where consecutive points lie on a
common ray along one of the 8 step directions; its length is the octile
metric (straight step 1, diagonal step sqrt(2)) scaled by cell size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from pedflow.grid import Cell, Direction, GridMap

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class JumpPoint:
    cell: Cell
    arrival_direction: Direction | None = None  # None for the start node


@dataclass(frozen=True)
class Path:
    """Sequence of waypoint cells, start first, goal last.

    straight_steps/diagonal_steps are the exact unit-step counts along the
    whole path, so length is reproducible without float accumulation:
    length = (straight + diagonal*sqrt(2)) * cell_size.
    """

    points: tuple[Cell, ...]
    cell_size: float
    straight_steps: int
    diagonal_steps: int

    @property
    def length(self) -> float:
        return (self.straight_steps + self.diagonal_steps * SQRT2) * self.cell_size

    def __len__(self) -> int:
        return len(self.points)


def segment_direction(a: Cell, b: Cell) -> Direction | None:
    """Unit direction of the ray a->b if collinear along one of the 8
    directions (a != b), else None."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    if dx == 0 and dy == 0:
        return None
    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    if dx != 0 and dy != 0 and abs(dx) != abs(dy):
        return None
    return Direction(sx, sy)


def path_from_points(points, cell_size: float) -> Path:
    """Build a Path, counting exact straight/diagonal steps per segment.

    Segments that violate the collinearity invariant still get a length
    (octile distance) so invalid paths can be constructed and then
    rejected by validate_path.
    """
    pts = tuple(Cell(*p) for p in points)
    if not pts:
        raise ValueError("path needs at least one point")
    straight = diagonal = 0
    for a, b in zip(pts, pts[1:]):
        adx, ady = abs(b.x - a.x), abs(b.y - a.y)
        diagonal += min(adx, ady)
        straight += max(adx, ady) - min(adx, ady)
    return Path(pts, cell_size, straight, diagonal)


def validate_path(grid: GridMap, path: Path) -> bool:
    """Check every Path invariant against the map.

    True iff all points are traversable, consecutive points are collinear
    along a single step direction, every intermediate step of every
    segment is a legal move (corner rule included), and the stored length
    matches the octile sum of the segments to 1e-9 relative.
    """
    if len(path.points) == 0:
        return False
    if not all(grid.is_traversable(p) for p in path.points):
        return False
    straight = diagonal = 0
    for a, b in zip(path.points, path.points[1:]):
        d = segment_direction(a, b)
        if d is None:
            return False
        steps = max(abs(b.x - a.x), abs(b.y - a.y))
        cur = a
        for _ in range(steps):
            if not grid.legal_step(cur, d):
                return False
            cur = Cell(cur.x + d.dx, cur.y + d.dy)
        if d.is_diagonal:
            diagonal += steps
        else:
            straight += steps
    expected = (straight + diagonal * SQRT2) * grid.cell_size
    if not math.isclose(path.length, expected, rel_tol=1e-9, abs_tol=1e-12):
        return False
    return True


def serialize_path(path: Path) -> str:
    """One header line `length=<float>`, then one `x,y` line per point."""
    lines = [f"length={path.length!r}"]
    lines.extend(f"{p.x},{p.y}" for p in path.points)
    return "\n".join(lines) + "\n"


def parse_path(text: str, cell_size: float) -> Path:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("length="):
        raise ValueError("path text must start with a length= header")
    points = []
    for ln in lines[1:]:
        xs, _, ys = ln.partition(",")
        points.append(Cell(int(xs), int(ys)))
    return path_from_points(points, cell_size)
