"""Neighbor pruning and jumping rules for 8-connected grids.

These are the scalar reference implementations; the search kernels mirror
them and are tested to agree exactly.

Pruning compares path lengths around an arriving node x with parent
p = x - d: a neighbor n is pruned when some detour avoiding x is no longer
(strictly shorter for diagonal arrivals) than the path through x. Under
the no-corner-cutting movement rule this has a closed form:

* straight arrival d: the natural neighbor is straight ahead; for each
  perpendicular side s, if the diagonal-behind cell x-d+s is blocked while
  x+s is free, the detour that bypassed x is gone, forcing (0,s)-ward and,
  when legal, the diagonal-ahead d+s.
* diagonal arrival d: naturals are d and its two straight components.
  No neighbor can be forced: arriving diagonally at x is only legal when
  both flanking cells are free, and those two cells re-open every detour
  the length comparison considers.
"""

from __future__ import annotations

from pedflow.grid import Cell, Direction, GridMap
from pedflow.pathfinding.paths import JumpPoint


def natural_directions(direction: Direction) -> tuple[Direction, ...]:
    """Directions kept by pruning on an obstacle-free grid."""
    if direction.is_diagonal:
        return (direction, Direction(direction.dx, 0), Direction(0, direction.dy))
    return (Direction(*direction),)


def forced_directions(grid: GridMap, cell: Cell, arrival: Direction) -> list[Direction]:
    """Forced (non-natural, must-examine) directions at cell for an arrival."""
    if arrival.is_diagonal:
        return []
    x, y = cell
    dx, dy = arrival
    out: list[Direction] = []
    if dx != 0:
        sides = (Direction(0, 1), Direction(0, -1))
    else:
        sides = (Direction(1, 0), Direction(-1, 0))
    for s in sides:
        behind = Cell(x - dx + s.dx, y - dy + s.dy)
        beside = Cell(x + s.dx, y + s.dy)
        if not grid.is_traversable(behind) and grid.is_traversable(beside):
            out.append(s)
            ahead = Direction(dx + s.dx, dy + s.dy)
            if grid.legal_step(cell, ahead):
                out.append(ahead)
    return out


def has_forced_neighbor(grid: GridMap, cell: Cell, arrival: Direction) -> bool:
    """Existence test equivalent to forced_directions(...) != []."""
    if arrival.is_diagonal:
        return False
    x, y = cell
    dx, dy = arrival
    if dx != 0:
        return (
            not grid.is_traversable(Cell(x - dx, y + 1)) and grid.is_traversable(Cell(x, y + 1))
        ) or (not grid.is_traversable(Cell(x - dx, y - 1)) and grid.is_traversable(Cell(x, y - 1)))
    return (
        not grid.is_traversable(Cell(x + 1, y - dy)) and grid.is_traversable(Cell(x + 1, y))
    ) or (not grid.is_traversable(Cell(x - 1, y - dy)) and grid.is_traversable(Cell(x - 1, y)))


def prune_neighbors(grid: GridMap, cell: Cell, parent_dir: Direction | None = None) -> list[Direction]:
    """Successor directions to scan from cell, given the arrival direction.

    No parent: all legal step directions. Otherwise the natural set
    (filtered for legality) plus any forced directions.
    """
    cell = Cell(*cell)
    if not grid.is_traversable(cell):
        raise ValueError(f"prune_neighbors called on non-traversable cell {cell}")
    if parent_dir is None:
        return [d for d, _ in grid.step_neighbors(cell)]
    out = [d for d in natural_directions(parent_dir) if grid.legal_step(cell, d)]
    out.extend(forced_directions(grid, cell, parent_dir))
    return out


def jump(grid: GridMap, cell: Cell, direction: Direction, goal: Cell) -> JumpPoint | None:
    """Scan the ray from cell along direction for the next jump point.

    Stops at the goal, at a cell with a forced neighbor, or (diagonal
    rays) at a cell from which a straight jump point is reachable along
    either component direction. Returns None when an obstacle or the
    boundary ends the ray first, or when the very first step is illegal.
    """
    cell = Cell(*cell)
    goal = Cell(*goal)
    dx, dy = direction
    if not direction.is_diagonal:
        cur = cell
        while True:
            cur = Cell(cur.x + dx, cur.y + dy)
            if not grid.is_traversable(cur):
                return None
            if cur == goal or has_forced_neighbor(grid, cur, direction):
                return JumpPoint(cur, Direction(dx, dy))
    cur = cell
    while grid.legal_step(cur, direction):
        cur = Cell(cur.x + dx, cur.y + dy)
        if cur == goal:
            return JumpPoint(cur, Direction(dx, dy))
        # Diagonal arrivals force nothing (see module docstring); only the
        # component sub-scans can make cur a jump point.
        if jump(grid, cur, Direction(dx, 0), goal) is not None:
            return JumpPoint(cur, Direction(dx, dy))
        if jump(grid, cur, Direction(0, dy), goal) is not None:
            return JumpPoint(cur, Direction(dx, dy))
    return None
