"""Static jump points: offline detection and the ray-lookup index.

A static jump point (SJP) is a traversable cell that has a forced neighbor
for at least one possible arrival direction; these depend only on the map,
so they are computed once and reused by every query. The index stores them
three ways:

* by cell, with the full set of valid arrival directions,
* as a per-cell direction bitmask array (padded like the occupancy grid)
  so scans can test "does this cell force anything for direction d" with
  one read,
* per diagonal line (two families, keyed x-y and x+y, sorted along the
  line) so a diagonal scan can look up the nearest candidate ahead of it
  in logarithmic time. Only entries with >= 1 diagonal valid arrival
  participate; with corner cutting forbidden no map produces such entries
  (diagonal arrivals force nothing), so the tables are populated only by
  hand-built indexes, but lookup stays part of the search contract.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from pedflow.grid import ALL_DIRECTIONS, Cell, Direction, GridMap

DIRECTION_BITS: dict[Direction, int] = {d: i for i, d in enumerate(ALL_DIRECTIONS)}
_DIAG_MASK_ALL = sum(1 << DIRECTION_BITS[d] for d in ALL_DIRECTIONS if d.is_diagonal)


@dataclass(frozen=True)
class StaticJumpPoint:
    cell: Cell
    valid_arrival_directions: frozenset[Direction]

    def __post_init__(self):
        if not self.valid_arrival_directions:
            raise ValueError(f"static jump point {self.cell} with empty direction set")

    @property
    def direction_mask(self) -> int:
        return sum(1 << DIRECTION_BITS[d] for d in self.valid_arrival_directions)


class StaticJumpPointIndex:
    """Immutable lookup structure over a map's static jump points."""

    def __init__(self, width: int, height: int, points: Iterable[StaticJumpPoint]):
        self.width = width
        self.height = height
        by_cell: dict[Cell, StaticJumpPoint] = {}
        for p in points:
            if not (0 <= p.cell.x < width and 0 <= p.cell.y < height):
                raise ValueError(f"static jump point {p.cell} outside {width}x{height} grid")
            if p.cell in by_cell:
                raise ValueError(f"duplicate static jump point at {p.cell}")
            by_cell[p.cell] = p
        self._by_cell = by_cell
        # Diagonal-line tables: (coordinate along line, diagonal-direction
        # bits) sorted by x, for entries stopping diagonal scans.
        diff: dict[int, list[tuple[int, int]]] = {}
        summ: dict[int, list[tuple[int, int]]] = {}
        for p in by_cell.values():
            dmask = p.direction_mask & _DIAG_MASK_ALL
            if not dmask:
                continue
            diff.setdefault(p.cell.x - p.cell.y, []).append((p.cell.x, dmask))
            summ.setdefault(p.cell.x + p.cell.y, []).append((p.cell.x, dmask))
        for table in (diff, summ):
            for entries in table.values():
                entries.sort()
        self._diff_lines = diff
        self._sum_lines = summ
        self._fused: tuple[GridMap, np.ndarray] | None = None

    @property
    def has_ray_entries(self) -> bool:
        """True when any entry can stop a diagonal scan via ray lookup."""
        return bool(self._diff_lines)

    # -- basic lookup --------------------------------------------------------

    def __len__(self) -> int:
        return len(self._by_cell)

    def __contains__(self, cell: Cell) -> bool:
        return Cell(*cell) in self._by_cell

    def __iter__(self) -> Iterator[StaticJumpPoint]:
        return iter(sorted(self._by_cell.values(), key=lambda p: (p.cell.y, p.cell.x)))

    def get(self, cell: Cell) -> StaticJumpPoint | None:
        return self._by_cell.get(Cell(*cell))

    def direction_mask(self, cell: Cell) -> int:
        p = self._by_cell.get(Cell(*cell))
        return p.direction_mask if p else 0

    def as_dict(self) -> dict[Cell, frozenset[Direction]]:
        return {c: p.valid_arrival_directions for c, p in self._by_cell.items()}

    # -- diagonal ray lookup ---------------------------------------------------

    def nearest_on_ray(self, cell: Cell, direction: Direction) -> tuple[Cell, int] | None:
        """Nearest indexed point strictly ahead on the diagonal ray from cell
        whose valid arrivals include direction, as (cell, steps).

        Pure table lookup: obstacles between are NOT considered here; the
        caller must verify the ray is actually traversable.
        """
        if not direction.is_diagonal:
            raise ValueError(f"ray lookup is defined for diagonal directions, got {direction}")
        x, y = Cell(*cell)
        dx, dy = direction
        table = self._diff_lines if dx == dy else self._sum_lines
        entries = table.get(x - y if dx == dy else x + y)
        if not entries:
            return None
        bit = 1 << DIRECTION_BITS[Direction(dx, dy)]
        xs = [e[0] for e in entries]
        if dx > 0:
            i = bisect.bisect_right(xs, x)
            rng = range(i, len(entries))
        else:
            i = bisect.bisect_left(xs, x)
            rng = range(i - 1, -1, -1)
        for j in rng:
            ex, emask = entries[j]
            if emask & bit:
                steps = abs(ex - x)
                return Cell(ex, y + dy * steps), steps
        return None

    # -- array exports for the search kernels ----------------------------------

    @cached_property
    def padded_mask(self) -> np.ndarray:
        """uint8 [(height+2), (width+2)] of per-cell direction bitmasks."""
        arr = np.zeros((self.height + 2, self.width + 2), dtype=np.uint8)
        for c, p in self._by_cell.items():
            arr[c.y + 1, c.x + 1] = p.direction_mask
        arr.setflags(write=False)
        return arr

    def fused_scan_grid(self, grid: GridMap) -> np.ndarray:
        """Occupancy and straight-arrival force bits in one padded array.

        Encoding per cell: 0 when blocked, else bit 7 set plus bits 0..3
        for straight arrival directions with a forced neighbor. Scans can
        then answer both "is this cell traversable" and "does it stop a
        straight scan" from a single load. Diagonal arrival bits live only
        in the ray tables, never here. Cached for the last grid seen.
        """
        cached = self._fused
        if cached is not None and cached[0] is grid:
            return cached[1]
        if (grid.width, grid.height) != (self.width, self.height):
            raise ValueError(
                f"index is for a {self.width}x{self.height} map, "
                f"grid is {grid.width}x{grid.height}"
            )
        arr = (grid.walkable_padded << 7) | (self.padded_mask & 0x0F)
        arr.setflags(write=False)
        self._fused = (grid, arr)
        return arr

    @cached_property
    def ray_tables(self) -> tuple[np.ndarray, ...]:
        """CSR-style arrays for in-kernel diagonal ray lookup.

        Returns (diff_starts, diff_xs, diff_masks, sum_starts, sum_xs,
        sum_masks); diff rows are keyed x-y+height-1, sum rows x+y.
        """
        def build(table: dict[int, list[tuple[int, int]]], nrows: int, row_of):
            starts = np.zeros(nrows + 1, dtype=np.int64)
            for key, entries in table.items():
                starts[row_of(key) + 1] = len(entries)
            starts = np.cumsum(starts)
            xs = np.zeros(starts[-1], dtype=np.int32)
            masks = np.zeros(starts[-1], dtype=np.uint8)
            for key, entries in table.items():
                at = starts[row_of(key)]
                for k, (ex, emask) in enumerate(entries):
                    xs[at + k] = ex
                    masks[at + k] = emask
            return starts, xs, masks

        nlines = self.width + self.height - 1
        d_starts, d_xs, d_masks = build(self._diff_lines, nlines, lambda k: k + self.height - 1)
        s_starts, s_xs, s_masks = build(self._sum_lines, nlines, lambda k: k)
        return d_starts, d_xs, d_masks, s_starts, s_xs, s_masks

    # -- filtering ---------------------------------------------------------------

    def filtered(self, start: Cell, goal: Cell, margin: int) -> "StaticJumpPointIndex":
        if margin < 0:
            raise ValueError("margin must be >= 0")
        sx, sy = Cell(*start)
        gx, gy = Cell(*goal)
        x0, x1 = min(sx, gx) - margin, max(sx, gx) + margin
        y0, y1 = min(sy, gy) - margin, max(sy, gy) + margin
        kept = [
            p
            for p in self._by_cell.values()
            if x0 <= p.cell.x <= x1 and y0 <= p.cell.y <= y1
        ]
        return StaticJumpPointIndex(self.width, self.height, kept)


def precompute_sjp(grid: GridMap) -> StaticJumpPointIndex:
    """Find every static jump point of a map with its valid arrival set.

    Vectorized restatement of the pruning rules: a cell has a forced
    neighbor for straight arrival d exactly when it is traversable, the
    parent cell behind it is traversable, and on some perpendicular side
    the diagonal-behind cell is blocked while the side cell is free.
    Diagonal arrivals force nothing (rules module invariant), so bits
    4..7 are always zero here.
    """
    H, W = grid.height, grid.width
    P = grid.walkable_padded

    def sh(dx: int, dy: int) -> np.ndarray:
        return P[1 + dy : H + 1 + dy, 1 + dx : W + 1 + dx]

    here = sh(0, 0)
    masks = np.zeros((H, W), dtype=np.uint8)
    for d in ALL_DIRECTIONS:
        if d.is_diagonal:
            continue
        dx, dy = d
        arrival_ok = here & sh(-dx, -dy)
        sides = ((0, 1), (0, -1)) if dx != 0 else ((1, 0), (-1, 0))
        forced = np.zeros((H, W), dtype=np.uint8)
        for sx, sy in sides:
            forced |= (1 - sh(sx - dx, sy - dy)) & sh(sx, sy)
        masks |= (arrival_ok & forced) << DIRECTION_BITS[d]

    ys, xs = np.nonzero(masks)
    points = []
    for x, y, m in zip(xs.tolist(), ys.tolist(), masks[ys, xs].tolist()):
        dirs = frozenset(d for d, b in DIRECTION_BITS.items() if m & (1 << b))
        points.append(StaticJumpPoint(Cell(x, y), dirs))
    return StaticJumpPointIndex(W, H, points)


def filter_sjp(
    index: StaticJumpPointIndex, start: Cell, goal: Cell, margin: int
) -> StaticJumpPointIndex:
    """Restrict an index to the bounding box of {start, goal} plus margin.

    Filtering can discard jump points an optimal detour needs, so searches
    over a filtered index may return longer paths; keep it off (or the
    margin at map diameter) when optimality matters.
    """
    return index.filtered(start, goal, margin)
