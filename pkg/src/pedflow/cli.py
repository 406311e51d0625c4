"""Command-line interface: plan, simulate, bench, and validate.

Exit codes are a stable contract: 0 success, 1 usage or config error,
2 no path found (plan), 3 optimality violation (validate). Every
command is deterministic given identical arguments and seed. Set the
PEDFLOW_LOG environment variable (DEBUG/INFO/WARNING/ERROR) to control
log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import random
import sys
import time
from pathlib import Path as FsPath

from pedflow.bench import bench_pathfinding, random_block_map
from pedflow.config import ConfigError, load_scenario_file
from pedflow.engine import run_simulation
from pedflow.grid import Cell, GridMap, load_map, load_map_file
from pedflow.pathfinding import (
    SearchWorkspace,
    StaticJumpPointIndex,
    dijkstra_steps,
    filter_sjp,
    jps_s_search,
    jps_search,
    precompute_sjp,
    serialize_path,
    validate_path,
)
from pedflow.scenarios import SCENARIO_NAMES, build_scenario

log = logging.getLogger("pedflow.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_PATH = 2
EXIT_VIOLATION = 3


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we promise 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_cell(text: str) -> Cell:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y', got {text!r}")
    return Cell(int(parts[0]), int(parts[1]))


def _map_text(grid: GridMap) -> str:
    rows = []
    for y in range(grid.height):
        rows.append(
            "".join(
                "#" if not grid.is_traversable(Cell(x, y)) else "."
                for x in range(grid.width)
            )
        )
    return "\n".join(rows)


def cmd_plan(args) -> int:
    try:
        grid = load_map_file(args.map_file, cell_size=args.cell_size)
        start = _parse_cell(args.start)
        goal = _parse_cell(args.goal)
    except (ValueError, OSError) as exc:
        print(f"pedflow plan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        t0 = time.perf_counter()
        if args.algorithm == "jps":
            path, stats = jps_search(grid, start, goal)
        elif args.algorithm == "jpss":
            index = precompute_sjp(grid)
            if args.sjp_margin is not None:
                index = filter_sjp(index, start, goal, args.sjp_margin)
            path, stats = jps_s_search(grid, index, start, goal)
        else:
            steps = dijkstra_steps(grid, start, goal)
            elapsed = time.perf_counter() - t0
            if steps is None:
                print("no path", file=sys.stderr)
                return EXIT_NO_PATH
            length = (steps[0] + steps[1] * math.sqrt(2.0)) * grid.cell_size
            print(f"algorithm=oracle length={length!r} expanded=-1 time={elapsed!r}")
            return EXIT_OK
        elapsed = time.perf_counter() - t0
    except ValueError as exc:
        print(f"pedflow plan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if path is None:
        print("no path", file=sys.stderr)
        return EXIT_NO_PATH
    serialized = serialize_path(path)
    if args.out:
        FsPath(args.out).write_text(serialized + "\n")
    else:
        print(serialized)
    print(
        f"algorithm={args.algorithm} length={path.length!r} "
        f"expanded={stats.expanded_nodes} time={elapsed!r}"
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        if args.scenario in SCENARIO_NAMES:
            overrides = {} if args.seed is None else {"seed": args.seed}
            scenario = build_scenario(args.scenario, overrides)
        elif os.path.exists(args.scenario):
            scenario = load_scenario_file(args.scenario, seed=args.seed)
        else:
            raise ConfigError(
                f"{args.scenario!r} is neither a scenario name "
                f"({', '.join(SCENARIO_NAMES)}) nor a config file"
            )
    except (ConfigError, ValueError) as exc:
        print(f"pedflow simulate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    trace = None
    try:
        if args.trace_out:
            trace = open(args.trace_out, "w", newline="\n")
        result = run_simulation(scenario, trace=trace)
    finally:
        if trace is not None:
            trace.close()
    log.info(
        "%s: %d steps in %.2fs wall", scenario.name, result.steps_used,
        result.wall_time,
    )
    print(
        f"completed={result.completed} failed={result.failed} "
        f"steps={result.steps_used}"
    )
    return EXIT_OK if result.failed == 0 else EXIT_USAGE


def cmd_bench(args) -> int:
    try:
        if args.map_file:
            grid = load_map_file(args.map_file, cell_size=args.cell_size)
        else:
            grid = random_block_map(args.size, seed=args.seed)
        report = bench_pathfinding(
            grid,
            query_count=args.queries,
            repetitions=args.reps,
            seed=args.seed,
            parallel=args.parallel,
        )
    except ValueError as exc:
        print(f"pedflow bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(report.table())
    print()
    csv_text = report.to_csv()
    print(csv_text, end="")
    if args.csv_out:
        FsPath(args.csv_out).write_text(csv_text)
    return EXIT_OK


def _random_noise_map(rng: random.Random, size: int, density: float) -> GridMap:
    while True:
        rows = "\n".join(
            "".join("#" if rng.random() < density else "." for _ in range(size))
            for _ in range(size)
        )
        grid = load_map(rows)
        free = size * size - len(grid.blocked)
        if free >= 2:
            return grid


def _corrupted(index: StaticJumpPointIndex, drop: int) -> StaticJumpPointIndex:
    points = list(index)[drop:]
    return StaticJumpPointIndex(index.width, index.height, points)


def cmd_validate(args) -> int:
    if args.trials == 0:
        print("warning: --trials 0, vacuous pass", file=sys.stderr)
        print("trials=0 passed=0 failed=0")
        return EXIT_OK
    rng = random.Random(args.seed)
    densities = (0.10, 0.20, 0.35)

    fixed_grid = None
    fixed_index = None
    if args.map_file:
        try:
            fixed_grid = load_map_file(args.map_file, cell_size=args.cell_size)
        except (ValueError, OSError) as exc:
            print(f"pedflow validate: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        fixed_index = precompute_sjp(fixed_grid)
        if args.corrupt_sjp:
            fixed_index = _corrupted(fixed_index, args.corrupt_sjp)

    workspace = None
    for trial in range(args.trials):
        density = densities[trial % len(densities)]
        if fixed_grid is not None:
            grid, index = fixed_grid, fixed_index
        else:
            grid = _random_noise_map(rng, 64, density)
            index = precompute_sjp(grid)
            if args.corrupt_sjp:
                index = _corrupted(index, args.corrupt_sjp)
        if workspace is None or (workspace.width, workspace.height) != (
            grid.width,
            grid.height,
        ):
            workspace = SearchWorkspace(grid.width, grid.height)

        free = [
            Cell(x, y)
            for y in range(grid.height)
            for x in range(grid.width)
            if grid.is_traversable(Cell(x, y))
        ]
        start, goal = rng.sample(free, 2)

        jps_path, _ = jps_search(grid, start, goal, workspace=workspace)
        jpss_path, _ = jps_s_search(
            grid, index, start, goal, workspace=workspace
        )
        oracle = dijkstra_steps(grid, start, goal, workspace=workspace)

        jps_steps = (
            None
            if jps_path is None
            else (jps_path.straight_steps, jps_path.diagonal_steps)
        )
        jpss_steps = (
            None
            if jpss_path is None
            else (jpss_path.straight_steps, jpss_path.diagonal_steps)
        )
        ok = jps_steps == oracle and jpss_steps == oracle
        if ok and jps_path is not None:
            ok = validate_path(grid, jps_path) and validate_path(grid, jpss_path)
        if not ok:
            print(f"VIOLATION at trial {trial}", file=sys.stderr)
            print(
                f"map ({grid.width}x{grid.height}, cell_size={grid.cell_size}):",
                file=sys.stderr,
            )
            print(_map_text(grid), file=sys.stderr)
            print(
                f"start={start.x},{start.y} goal={goal.x},{goal.y}",
                file=sys.stderr,
            )
            print(
                f"jps={jps_steps} jpss={jpss_steps} oracle={oracle} "
                "(straight, diagonal) steps",
                file=sys.stderr,
            )
            print(f"trials={trial + 1} passed={trial} failed=1")
            return EXIT_VIOLATION
        log.debug("trial %d ok (density %.2f)", trial, density)

    print(f"trials={args.trials} passed={args.trials} failed=0")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pedflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="find a path on a grid map")
    p.add_argument("map_file", help="map file (ASCII rows of . and #)")
    p.add_argument("start", help="start cell as 'x,y'")
    p.add_argument("goal", help="goal cell as 'x,y'")
    p.add_argument(
        "--algorithm", choices=("jps", "jpss", "oracle"), default="jpss"
    )
    p.add_argument("--out", help="write the path here instead of stdout")
    p.add_argument("--cell-size", type=float, default=0.5)
    p.add_argument(
        "--sjp-margin",
        type=int,
        default=None,
        help="restrict the static index to the query bounding box plus "
        "this margin (may lose optimality; off by default)",
    )
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="run a crowd scenario")
    p.add_argument(
        "scenario",
        help="benchmark name (%s) or JSON config file" % ", ".join(SCENARIO_NAMES),
    )
    p.add_argument("--trace-out", help="write the CSV trace here")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="time JPS vs JPS-S on batched queries")
    p.add_argument("map_file", nargs="?", help="map file; omit for a random map")
    p.add_argument("--size", type=int, default=250, help="random map side")
    p.add_argument("--queries", type=int, default=10000)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--parallel",
        type=int,
        default=0,
        help="worker threads (default 0: single-threaded timing)",
    )
    p.add_argument("--cell-size", type=float, default=0.5)
    p.add_argument("--csv-out", help="also write the CSV report here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser(
        "validate", help="check JPS and JPS-S against the exact oracle"
    )
    p.add_argument("map_file", nargs="?", help="fixed map; omit for random maps")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cell-size", type=float, default=0.5)
    p.add_argument("--corrupt-sjp", type=int, default=0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("PEDFLOW_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
