"""Pathfinding benchmark harness.

Times JPS against JPS-S over a batch of random solvable queries on a
procedurally generated obstacle map, repeating the whole batch several
times and reporting aggregate statistics. Preprocessing (static
jump-point computation) is timed separately from querying because it is
an offline, per-map cost.
"""

from __future__ import annotations

import random
import statistics
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from pedflow.grid import Cell, GridMap
from pedflow.pathfinding import (
    SearchWorkspace,
    jps_s_search,
    jps_search,
    precompute_sjp,
)

_WARMUP_QUERIES = 32


def random_block_map(
    size: int,
    seed: int,
    block_count: int = 60,
    min_side: int = 3,
    max_side: int = 30,
    cell_size: float = 0.5,
) -> GridMap:
    """Square map with randomly placed rectangular blocks.

    Rectangular obstacles (rooms, pillars, building footprints) are the
    structured kind of clutter pedestrian environments are made of, as
    opposed to per-cell noise. With the defaults on a 250x250 map the
    blocks cover roughly a fifth of the area.
    """
    if size < 2:
        raise ValueError("block map needs size >= 2")
    rng = random.Random(seed)
    blocked = set()
    for _ in range(block_count):
        w = rng.randint(min_side, max_side)
        h = rng.randint(min_side, max_side)
        x0 = rng.randrange(max(1, size - w))
        y0 = rng.randrange(max(1, size - h))
        for x in range(x0, min(size, x0 + w)):
            for y in range(y0, min(size, y0 + h)):
                blocked.add(Cell(x, y))
    if len(blocked) > size * size - 2:
        raise ValueError("block map left fewer than two traversable cells")
    return GridMap(size, size, frozenset(blocked), cell_size)


def _component_labels(grid: GridMap) -> dict[Cell, int]:
    """Label traversable cells by connected component.

    Under the no-corner-cutting rule a legal diagonal step requires both
    adjacent straight cells to be free, so it never connects anything
    4-connectivity does not; components under legal moves are exactly
    the 4-connected components.
    """
    labels: dict[Cell, int] = {}
    next_label = 0
    for y in range(grid.height):
        for x in range(grid.width):
            c = Cell(x, y)
            if not grid.is_traversable(c) or c in labels:
                continue
            labels[c] = next_label
            queue = deque([c])
            while queue:
                cur = queue.popleft()
                for nb in (
                    Cell(cur.x + 1, cur.y),
                    Cell(cur.x - 1, cur.y),
                    Cell(cur.x, cur.y + 1),
                    Cell(cur.x, cur.y - 1),
                ):
                    if grid.is_traversable(nb) and nb not in labels:
                        labels[nb] = next_label
                        queue.append(nb)
            next_label += 1
    return labels


def generate_queries(
    grid: GridMap, count: int, seed: int
) -> list[tuple[Cell, Cell]]:
    """Random solvable (start, goal) pairs, rejection-sampled.

    Pairs in different connected components (or with start == goal) are
    redrawn, so every returned query has a path.
    """
    if count <= 0:
        raise ValueError("query count must be positive")
    free = [
        Cell(x, y)
        for y in range(grid.height)
        for x in range(grid.width)
        if grid.is_traversable(Cell(x, y))
    ]
    labels = _component_labels(grid)
    sizes: dict[int, int] = {}
    for lab in labels.values():
        sizes[lab] = sizes.get(lab, 0) + 1
    if not sizes or max(sizes.values()) < 2:
        raise ValueError("map has no two connected traversable cells")
    rng = random.Random(seed)
    queries: list[tuple[Cell, Cell]] = []
    attempts = 0
    limit = 1000 * count
    while len(queries) < count:
        attempts += 1
        if attempts > limit:
            raise ValueError(
                "could not sample enough connected query pairs "
                f"({len(queries)} of {count} after {attempts} attempts)"
            )
        a = rng.choice(free)
        b = rng.choice(free)
        if a == b or labels[a] != labels[b]:
            continue
        queries.append((a, b))
    return queries


@dataclass(frozen=True)
class AlgoStats:
    """Batch wall times (seconds) of one algorithm over the repetitions."""

    mean: float
    min: float
    max: float
    stddev: float

    @staticmethod
    def from_samples(samples: list[float]) -> "AlgoStats":
        return AlgoStats(
            mean=statistics.fmean(samples),
            min=min(samples),
            max=max(samples),
            stddev=statistics.stdev(samples) if len(samples) > 1 else 0.0,
        )


@dataclass(frozen=True)
class BenchReport:
    map_width: int
    map_height: int
    query_count: int
    repetitions: int
    preprocess_seconds: float
    static_jump_points: int
    jps: AlgoStats
    jpss: AlgoStats

    @property
    def speedup_percent(self) -> float:
        """How much less time JPS-S needed than JPS, in percent."""
        return (self.jps.mean - self.jpss.mean) / self.jps.mean * 100.0

    def table(self) -> str:
        rows = [
            f"map {self.map_width}x{self.map_height}, "
            f"{self.query_count} queries, {self.repetitions} repetitions",
            f"preprocessing: {self.preprocess_seconds:.4f} s "
            f"({self.static_jump_points} static jump points)",
            f"{'algorithm':<10}{'mean s':>12}{'min s':>12}"
            f"{'max s':>12}{'stddev s':>12}",
        ]
        for name, s in (("jps", self.jps), ("jpss", self.jpss)):
            rows.append(
                f"{name:<10}{s.mean:>12.4f}{s.min:>12.4f}"
                f"{s.max:>12.4f}{s.stddev:>12.4f}"
            )
        rows.append(f"speedup: jpss is {self.speedup_percent:.2f}% "
                    "faster than jps (mean over repetitions)")
        return "\n".join(rows)

    def to_csv(self) -> str:
        header = (
            "algorithm,mean_seconds,min_seconds,max_seconds,stddev_seconds,"
            "query_count,repetitions,preprocess_seconds,speedup_percent"
        )
        lines = [header]
        for name, s in (("jps", self.jps), ("jpss", self.jpss)):
            pre = self.preprocess_seconds if name == "jpss" else 0.0
            lines.append(
                f"{name},{s.mean!r},{s.min!r},{s.max!r},{s.stddev!r},"
                f"{self.query_count},{self.repetitions},{pre!r},"
                f"{self.speedup_percent!r}"
            )
        return "\n".join(lines) + "\n"


def bench_pathfinding(
    grid: GridMap,
    query_count: int,
    repetitions: int,
    seed: int,
    parallel: int = 0,
) -> BenchReport:
    """Time JPS and JPS-S over the same random solvable query batch.

    Each repetition runs the full JPS batch and then the full JPS-S batch
    (interleaved at repetition granularity so slow drift in machine load
    hits both algorithms alike). Per-query path lengths are asserted equal
    between the algorithms on every repetition. With parallel > 1 the
    batch is split across that many threads and the concurrent batch is
    timed as a whole; the default times a single thread so the reported
    speedup isolates the algorithmic difference.
    """
    if repetitions <= 0:
        raise ValueError("repetitions must be positive")
    queries = generate_queries(grid, query_count, seed)

    t0 = time.perf_counter()
    index = precompute_sjp(grid)
    preprocess = time.perf_counter() - t0

    n_threads = max(1, parallel)
    workspaces = [
        SearchWorkspace(grid.width, grid.height) for _ in range(n_threads)
    ]

    def run_jps(batch, ws):
        out = []
        for a, b in batch:
            p, _ = jps_search(grid, a, b, workspace=ws)
            out.append(p.length)
        return out

    def run_jpss(batch, ws):
        out = []
        for a, b in batch:
            p, _ = jps_s_search(grid, index, a, b, workspace=ws)
            out.append(p.length)
        return out

    # Warm-up outside the timed region: compiles the kernels on first use
    # and fills the per-map caches single-threaded.
    warm = queries[: min(_WARMUP_QUERIES, len(queries))]
    run_jps(warm, workspaces[0])
    run_jpss(warm, workspaces[0])

    if n_threads == 1:
        def timed(fn):
            t = time.perf_counter()
            lengths = fn(queries, workspaces[0])
            return time.perf_counter() - t, lengths
    else:
        chunks = [queries[i::n_threads] for i in range(n_threads)]
        pool = ThreadPoolExecutor(max_workers=n_threads)

        def timed(fn):
            t = time.perf_counter()
            futures = [
                pool.submit(fn, chunk, ws)
                for chunk, ws in zip(chunks, workspaces)
            ]
            parts = [f.result() for f in futures]
            elapsed = time.perf_counter() - t
            lengths = [0.0] * len(queries)
            for i, part in enumerate(parts):
                lengths[i :: n_threads] = part
            return elapsed, lengths

    try:
        jps_times: list[float] = []
        jpss_times: list[float] = []
        for _ in range(repetitions):
            dt1, len1 = timed(run_jps)
            dt2, len2 = timed(run_jpss)
            jps_times.append(dt1)
            jpss_times.append(dt2)
            for q, (l1, l2) in zip(queries, zip(len1, len2)):
                if abs(l1 - l2) > 1e-9 * max(abs(l1), abs(l2), 1e-30):
                    raise AssertionError(
                        f"length mismatch on query {q[0]}->{q[1]}: "
                        f"jps={l1!r} jpss={l2!r}"
                    )
    finally:
        if n_threads > 1:
            pool.shutdown(wait=False)

    return BenchReport(
        map_width=grid.width,
        map_height=grid.height,
        query_count=len(queries),
        repetitions=repetitions,
        preprocess_seconds=preprocess,
        static_jump_points=len(index),
        jps=AlgoStats.from_samples(jps_times),
        jpss=AlgoStats.from_samples(jpss_times),
    )
