"""Grid searches: jump-point search, its static-jump-point variant, and a
plain Dijkstra oracle, all backed by the jitted kernels."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from pedflow.grid import Cell, Direction, GridMap
from pedflow.pathfinding import _kernels as K
from pedflow.pathfinding.paths import Path, path_from_points
from pedflow.pathfinding.sjp import DIRECTION_BITS, StaticJumpPointIndex

SQRT2 = K.SQRT2


@dataclass
class SearchStats:
    expanded_nodes: int = 0
    jump_scan_steps: int = 0
    elapsed: float = 0.0


class SearchWorkspace:
    """Reusable scratch arrays for one map size.

    Node bookkeeping is epoch-stamped so consecutive queries skip
    reinitialization. Not safe for concurrent use; give each thread its
    own instance (searches allocate a private one when none is passed).
    """

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        n = (width + 2) * (height + 2)
        self.g = np.zeros(n, dtype=np.float64)
        self.ga = np.zeros(n, dtype=np.int32)
        self.gb = np.zeros(n, dtype=np.int32)
        self.par = np.zeros(n, dtype=np.int64)
        self.gep = np.zeros(n, dtype=np.int32)
        self.cep = np.zeros(n, dtype=np.int32)
        self.epoch = 0
        self._alloc_heap(9 * n)
        self.out_pts = np.zeros(2 * n, dtype=np.int32)

    def _alloc_heap(self, cap: int):
        self.hf = np.zeros(cap, dtype=np.float64)
        self.hg = np.zeros(cap, dtype=np.float64)
        self.hid = np.zeros(cap, dtype=np.int64)

    def next_epoch(self) -> int:
        self.epoch += 1
        if self.epoch >= 2**31 - 1:
            self.gep[:] = 0
            self.cep[:] = 0
            self.epoch = 1
        return self.epoch

    def grow_heap(self):
        self._alloc_heap(2 * self.hf.shape[0])


_EMPTY_STARTS = np.zeros(2, dtype=np.int64)
_EMPTY_XS = np.zeros(0, dtype=np.int32)
_EMPTY_MASKS = np.zeros(0, dtype=np.uint8)


def _endpoints(grid: GridMap, start: Cell, goal: Cell) -> tuple[Cell, Cell]:
    start, goal = Cell(*start), Cell(*goal)
    for name, c in (("start", start), ("goal", goal)):
        if not grid.is_traversable(c):
            raise ValueError(f"{name} cell {c} is not traversable")
    return start, goal


def _workspace_for(grid: GridMap, workspace: SearchWorkspace | None) -> SearchWorkspace:
    if workspace is None:
        return SearchWorkspace(grid.width, grid.height)
    if (workspace.width, workspace.height) != (grid.width, grid.height):
        raise ValueError(
            f"workspace is sized {workspace.width}x{workspace.height}, "
            f"map is {grid.width}x{grid.height}"
        )
    return workspace


def _run_jps(
    grid: GridMap,
    start: Cell,
    goal: Cell,
    workspace: SearchWorkspace | None,
    index: StaticJumpPointIndex | None,
) -> tuple[Path | None, SearchStats]:
    start, goal = _endpoints(grid, start, goal)
    ws = _workspace_for(grid, workspace)
    if index is not None:
        walk = index.fused_scan_grid(grid).ravel()
        d_starts, d_xs, d_masks, s_starts, s_xs, s_masks = index.ray_tables
        use_sjp = True
        have_ray = index.has_ray_entries
    else:
        walk = grid.walkable_padded.ravel()
        d_starts = s_starts = _EMPTY_STARTS
        d_xs = s_xs = _EMPTY_XS
        d_masks = s_masks = _EMPTY_MASKS
        use_sjp = False
        have_ray = False
    Wp = grid.width + 2
    t0 = time.perf_counter()
    while True:
        epoch = ws.next_epoch()
        status, n_pts, expanded, scans = K._jps_kernel(
            walk, Wp, grid.height,
            start.x + 1, start.y + 1, goal.x + 1, goal.y + 1,
            use_sjp, have_ray,
            d_starts, d_xs, d_masks, s_starts, s_xs, s_masks,
            ws.g, ws.par, ws.gep, ws.cep, epoch,
            ws.hf, ws.hg, ws.hid, ws.out_pts,
        )
        if status != K.STATUS_HEAP_FULL:
            break
        ws.grow_heap()
    elapsed = time.perf_counter() - t0
    stats = SearchStats(expanded_nodes=expanded, jump_scan_steps=scans, elapsed=elapsed)
    if status == K.STATUS_NO_PATH:
        return None, stats
    pts = [Cell(int(ws.out_pts[2 * i]), int(ws.out_pts[2 * i + 1])) for i in range(n_pts)]
    return path_from_points(pts, grid.cell_size), stats


def jps_search(
    grid: GridMap, start: Cell, goal: Cell, *, workspace: SearchWorkspace | None = None
) -> tuple[Path | None, SearchStats]:
    """Optimal octile-metric path between two traversable cells.

    A* over jump points with the octile heuristic; deterministic
    tie-breaking (larger g first, then lexicographic cell order).
    Returns (None, stats) when the goal is unreachable.
    """
    return _run_jps(grid, start, goal, workspace, None)


def jps_s_search(
    grid: GridMap,
    index: StaticJumpPointIndex,
    start: Cell,
    goal: Cell,
    *,
    workspace: SearchWorkspace | None = None,
) -> tuple[Path | None, SearchStats]:
    """jps_search accelerated by a precomputed static-jump-point index.

    Diagonal scans first ask the index for the nearest valid entry along
    the ray (component rule-3 sub-scans are still performed), and every
    straight scan answers its forced-neighbor test from the per-cell
    direction mask instead of probing the occupancy grid. With an
    unfiltered index the result is identical to jps_search.
    """
    if (index.width, index.height) != (grid.width, grid.height):
        raise ValueError(
            f"index is for a {index.width}x{index.height} map, "
            f"grid is {grid.width}x{grid.height}"
        )
    return _run_jps(grid, start, goal, workspace, index)


def dijkstra_oracle(
    grid: GridMap, start: Cell, goal: Cell, *, workspace: SearchWorkspace | None = None
) -> float | None:
    """Exact shortest octile distance in cells (not meters), or None.

    Uniform-cost expansion over step neighbors with no heuristic and no
    pruning; used to verify the jump-point searches.
    """
    steps = dijkstra_steps(grid, start, goal, workspace=workspace)
    if steps is None:
        return None
    a, b = steps
    return a + b * SQRT2


def dijkstra_steps(
    grid: GridMap, start: Cell, goal: Cell, *, workspace: SearchWorkspace | None = None
) -> tuple[int, int] | None:
    """Exact (straight, diagonal) step counts of a shortest path."""
    start, goal = _endpoints(grid, start, goal)
    ws = _workspace_for(grid, workspace)
    walk = grid.walkable_padded.ravel()
    Wp = grid.width + 2
    while True:
        epoch = ws.next_epoch()
        status, a, b = K._dijkstra_kernel(
            walk, Wp,
            start.x + 1, start.y + 1, goal.x + 1, goal.y + 1,
            ws.g, ws.ga, ws.gb, ws.gep, ws.cep, epoch,
            ws.hf, ws.hg, ws.hid,
        )
        if status != K.STATUS_HEAP_FULL:
            break
        ws.grow_heap()
    if status == K.STATUS_NO_PATH:
        return None
    return int(a), int(b)


def scan_from(
    grid: GridMap,
    cell: Cell,
    direction: Direction,
    goal: Cell,
    index: StaticJumpPointIndex | None = None,
) -> Cell | None:
    """Single kernel ray scan from cell (testing hook mirroring rules.jump)."""
    cell, goal = Cell(*cell), Cell(*goal)
    use_sjp = index is not None
    walk = (index.fused_scan_grid(grid) if use_sjp else grid.walkable_padded).ravel()
    Wp = grid.width + 2
    bit = np.uint8(1 << DIRECTION_BITS[Direction(*direction)])
    if not direction.is_diagonal:
        found, jx, jy, _ = K._scan_straight(
            walk, Wp, cell.x + 1, cell.y + 1, direction.dx, direction.dy,
            goal.x + 1, goal.y + 1, use_sjp, bit,
        )
    else:
        limit = 0
        if index is not None:
            hit = index.nearest_on_ray(cell, Direction(*direction))
            if hit is not None:
                limit = hit[1]
        bit_dx = np.uint8(1 << DIRECTION_BITS[Direction(direction.dx, 0)])
        bit_dy = np.uint8(1 << DIRECTION_BITS[Direction(0, direction.dy)])
        found, jx, jy, _ = K._scan_diag(
            walk, Wp, cell.x + 1, cell.y + 1, direction.dx, direction.dy,
            goal.x + 1, goal.y + 1, use_sjp, bit_dx, bit_dy, limit,
        )
    return Cell(int(jx) - 1, int(jy) - 1) if found else None
