"""Obstacle geometry for the movement model.

Blocked cells are grouped into connected components and each component
becomes one Obstacle: the set of its boundary edges that face walkable
space, merged into maximal straight segments with outward normals. A
pedestrian is repelled once per obstacle, from the nearest point of that
obstacle's boundary, so the wall of a corridor acts as a single surface
rather than as a row of per-cell point charges.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from pedflow.grid import Cell, GridMap, WorldPoint


@dataclass(frozen=True)
class Segment:
    """Directed wall segment in world coordinates with outward normal."""

    x1: float
    y1: float
    x2: float
    y2: float
    nx: float
    ny: float

    def __post_init__(self):
        if self.x1 == self.x2 and self.y1 == self.y2:
            raise ValueError("degenerate segment")

    def nearest_point(self, px: float, py: float) -> tuple[float, float, float]:
        """Closest point on the segment to (px, py) and its distance."""
        ax, ay = self.x1, self.y1
        bx, by = self.x2 - ax, self.y2 - ay
        t = ((px - ax) * bx + (py - ay) * by) / (bx * bx + by * by)
        t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
        qx, qy = ax + t * bx, ay + t * by
        return qx, qy, math.hypot(px - qx, py - qy)


@dataclass(frozen=True)
class Obstacle:
    """One connected blocked region, represented by its exposed boundary."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("obstacle needs at least one segment")

    def nearest_point(
        self, px: float, py: float
    ) -> tuple[float, float, float, Segment]:
        """Globally nearest boundary point; ties keep the earliest segment."""
        best = None
        for seg in self.segments:
            qx, qy, d = seg.nearest_point(px, py)
            if best is None or d < best[2]:
                best = (qx, qy, d, seg)
        return best


_BLOCK_NEIGHBORS = (
    (1, 0), (-1, 0), (0, 1), (0, -1),
    (1, 1), (1, -1), (-1, 1), (-1, -1),
)


def _blocked_components(grid: GridMap) -> list[list[Cell]]:
    """8-connected components of blocked cells, in deterministic order.

    Diagonal adjacency joins cells into one component so a staircase wall
    repels as a single surface instead of one force per cell.
    """
    seen: set[Cell] = set()
    components = []
    for y in range(grid.height):
        for x in range(grid.width):
            c = Cell(x, y)
            if c not in grid.blocked or c in seen:
                continue
            seen.add(c)
            queue = deque([c])
            cells = []
            while queue:
                cur = queue.popleft()
                cells.append(cur)
                for dx, dy in _BLOCK_NEIGHBORS:
                    nb = Cell(cur.x + dx, cur.y + dy)
                    if nb in grid.blocked and nb not in seen:
                        seen.add(nb)
                        queue.append(nb)
            components.append(sorted(cells))
    return components


def _merge_runs(values: list[int]) -> list[tuple[int, int]]:
    """Merge sorted integers into [start, end) runs of consecutive values."""
    runs = []
    start = prev = values[0]
    for v in values[1:]:
        if v != prev + 1:
            runs.append((start, prev + 1))
            start = v
        prev = v
    runs.append((start, prev + 1))
    return runs


def _component_segments(grid: GridMap, cells: list[Cell]) -> tuple[Segment, ...]:
    cs = grid.cell_size
    # vertical faces keyed by (x edge coordinate, normal sign), holding the
    # y cell index of each exposed unit edge; horizontal faces likewise
    vertical: dict[tuple[int, int], list[int]] = {}
    horizontal: dict[tuple[int, int], list[int]] = {}
    for c in cells:
        if grid.is_traversable(Cell(c.x + 1, c.y)):
            vertical.setdefault((c.x + 1, 1), []).append(c.y)
        if grid.is_traversable(Cell(c.x - 1, c.y)):
            vertical.setdefault((c.x, -1), []).append(c.y)
        if grid.is_traversable(Cell(c.x, c.y + 1)):
            horizontal.setdefault((c.y + 1, 1), []).append(c.x)
        if grid.is_traversable(Cell(c.x, c.y - 1)):
            horizontal.setdefault((c.y, -1), []).append(c.x)
    segments = []
    for (xe, sign), ys in sorted(vertical.items()):
        for y0, y1 in _merge_runs(sorted(ys)):
            segments.append(
                Segment(xe * cs, y0 * cs, xe * cs, y1 * cs, float(sign), 0.0)
            )
    for (ye, sign), xs in sorted(horizontal.items()):
        for x0, x1 in _merge_runs(sorted(xs)):
            segments.append(
                Segment(x0 * cs, ye * cs, x1 * cs, ye * cs, 0.0, float(sign))
            )
    segments.sort(key=lambda s: (s.x1, s.y1, s.x2, s.y2, s.nx, s.ny))
    return tuple(segments)


def extract_obstacles(grid: GridMap) -> tuple[Obstacle, ...]:
    """One Obstacle per connected blocked component.

    Components whose every boundary edge faces outside the map (or other
    blocked cells) produce no obstacle: nothing walkable can ever be near
    them.
    """
    obstacles = []
    for cells in _blocked_components(grid):
        segments = _component_segments(grid, cells)
        if segments:
            obstacles.append(Obstacle(segments))
    return tuple(obstacles)


def distance_to_obstacles(
    obstacles: tuple[Obstacle, ...], p: WorldPoint
) -> float:
    """Smallest distance from p to any obstacle boundary (inf if none)."""
    best = math.inf
    for obs in obstacles:
        d = obs.nearest_point(p.x, p.y)[2]
        if d < best:
            best = d
    return best
