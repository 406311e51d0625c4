"""The nine running acceptance criteria, one test each, in order.

Each test prints exactly one verdict line of the form
``CRITERION n (<name>): PASS`` (or FAIL) directly to the terminal,
bypassing capture, so a verbose run always shows the verdicts.
Tolerances and time budgets are pinned here as constants.
"""

import io
import math
import random
import time

import pytest

from pedflow.bench import bench_pathfinding, random_block_map
from pedflow.cli import main as cli_main
from pedflow.control import (
    AgentController,
    ControlState,
    HandlerParams,
    WorldView,
    tick,
)
from pedflow.engine import audit_trace, run_simulation
from pedflow.forces import (
    ForceParams,
    Pedestrian,
    PointOfInterest,
    acceleration_force,
    attraction_poi,
    integrate_step,
    repulsion_pedestrian,
    total_force,
)
from pedflow.grid import Cell, GridMap, WorldPoint
from pedflow.pathfinding import (
    jps_s_search,
    precompute_sjp,
    validate_path,
)
from pedflow.scenarios import build_scenario

from tests.oracles import brute_sjp, random_map
from tests.sweeps import run_sweep

REL_TOL = 1e-9
SEED = 20260819

SWEEP_MAPS = 1002  # >= 1000 and divisible by the three densities
SWEEP_BUDGET_S = 120.0
SJP_BUDGET_S = 60.0
BENCH_BUDGET_S = 600.0
SIM_BUDGET_S = 300.0
PROPERTY_BUDGET_S = 30.0

BENCHMARKS = ("narrow_walkway", "narrow_passage", "path_following")
EXPECTED_AGENTS = {"narrow_walkway": 100, "narrow_passage": 100, "path_following": 200}


def _verdict(capsys, number: int, name: str, failures: list[str]) -> None:
    with capsys.disabled():
        status = "PASS" if not failures else "FAIL"
        print(f"CRITERION {number} ({name}): {status}")
    if failures:
        pytest.fail(f"criterion {number} ({name}): " + "; ".join(failures))


@pytest.fixture(scope="module")
def sweep():
    started = time.perf_counter()
    records = run_sweep(SWEEP_MAPS, seed=SEED)
    return records, time.perf_counter() - started


@pytest.fixture(scope="module")
def bench_report():
    grid = random_block_map(250, seed=SEED)
    started = time.perf_counter()
    report = bench_pathfinding(
        grid, query_count=10000, repetitions=30, seed=SEED
    )
    return report, time.perf_counter() - started


@pytest.fixture(scope="module")
def benchmark_runs():
    runs = {}
    started = time.perf_counter()
    for name in BENCHMARKS:
        scenario = build_scenario(name)
        buf = io.StringIO()
        result = run_simulation(scenario, trace=buf)
        runs[name] = (scenario, result, buf.getvalue())
    return runs, time.perf_counter() - started


def test_criterion_1_optimality_equivalence(sweep, capsys):
    records, elapsed = sweep
    failures = []
    if len(records) < 1000:
        failures.append(f"only {len(records)} sweep instances")
    densities = {r.density for r in records}
    if densities != {0.10, 0.20, 0.35}:
        failures.append(f"density mix {sorted(densities)}")
    solvable = [r for r in records if r.solvable]
    if not solvable:
        failures.append("no solvable instances")
    bad = [r for r in records if not r.agree]
    if bad:
        r = bad[0]
        failures.append(
            f"{len(bad)} disagreements; first: start={r.start} goal={r.goal} "
            f"jps={r.jps_length} jpss={r.jpss_length} oracle={r.oracle_length}"
        )
    for r in solvable:
        if r.jps_length is not None and r.oracle_length:
            if abs(r.jps_length - r.oracle_length) > REL_TOL * r.oracle_length:
                failures.append(f"jps off tolerance at {r.start}->{r.goal}")
                break
    if elapsed > SWEEP_BUDGET_S:
        failures.append(f"sweep took {elapsed:.1f}s > {SWEEP_BUDGET_S}s")
    _verdict(capsys, 1, "optimality_equivalence", failures)


def test_criterion_2_jump_point_dominance(sweep, capsys):
    records, _ = sweep
    failures = []
    solvable = [r for r in records if r.solvable and r.jps_length is not None]
    offenders = [r for r in solvable if r.jpss_points > r.jps_points]
    if offenders:
        r = offenders[0]
        failures.append(
            f"{len(offenders)} instances with more JPS-S points; first: "
            f"start={r.start} goal={r.goal} jps={r.jps_points} jpss={r.jpss_points}"
        )
    if not solvable:
        failures.append("no solvable instances to compare")
    _verdict(capsys, 2, "jump_point_dominance", failures)


def test_criterion_3_preprocessing_soundness(capsys):
    rng = random.Random(SEED + 3)
    # the brute-force oracle is deliberately naive (~0.5 ms per cell), so
    # the trial mix keeps the largest size sparse to respect the budget
    trial_plan = [(16, 20), (32, 20), (64, 10)]
    densities = (0.10, 0.20, 0.35)
    failures = []
    started = time.perf_counter()
    trial = 0
    for size, count in trial_plan:
        for k in range(count):
            density = densities[k % len(densities)]
            grid = random_map(rng, size, size, density)
            fast = precompute_sjp(grid).as_dict()
            slow = brute_sjp(grid)
            if fast != slow:
                only_fast = set(fast) - set(slow)
                only_slow = set(slow) - set(fast)
                failures.append(
                    f"trial {trial} ({size}x{size} @ {density}): "
                    f"extra={sorted(only_fast)[:3]} missing={sorted(only_slow)[:3]}"
                )
                break
            trial += 1
        if failures:
            break
    if not failures:
        empty = GridMap(16, 16, frozenset(), 0.5)
        if precompute_sjp(empty).as_dict() != {} or brute_sjp(empty) != {}:
            failures.append("empty map should have no static jump points")
        wall = GridMap(16, 16, frozenset(Cell(8, y) for y in range(1, 15)), 0.5)
        if precompute_sjp(wall).as_dict() != brute_sjp(wall):
            failures.append("single-wall map mismatch")
    elapsed = time.perf_counter() - started
    if elapsed > SJP_BUDGET_S:
        failures.append(f"enumeration took {elapsed:.1f}s > {SJP_BUDGET_S}s")
    _verdict(capsys, 3, "preprocessing_soundness", failures)


def test_criterion_4_performance_direction(bench_report, capsys):
    report, elapsed = bench_report
    failures = []
    if report.query_count != 10000 or report.repetitions != 30:
        failures.append("wrong benchmark configuration")
    if not report.jpss.mean < report.jps.mean:
        failures.append(
            f"jpss mean {report.jpss.mean!r} not below jps mean {report.jps.mean!r}"
        )
    if elapsed > BENCH_BUDGET_S:
        failures.append(f"benchmark took {elapsed:.1f}s > {BENCH_BUDGET_S}s")
    _verdict(capsys, 4, "performance_direction", failures)
    with capsys.disabled():
        print(
            f"    jps mean {report.jps.mean:.4f} s, "
            f"jpss mean {report.jpss.mean:.4f} s, "
            f"measured speedup {report.speedup_percent:.2f}%"
        )


def test_criterion_5_benchmark_termination(benchmark_runs, capsys):
    runs, elapsed = benchmark_runs
    failures = []
    for name in BENCHMARKS:
        scenario, result, _ = runs[name]
        total = len(scenario.pedestrians)
        if total != EXPECTED_AGENTS[name]:
            failures.append(f"{name}: {total} agents, expected {EXPECTED_AGENTS[name]}")
        if scenario.max_steps != 20000:
            failures.append(f"{name}: max_steps {scenario.max_steps} is not default")
        if result.completed != total or result.failed != 0:
            failures.append(
                f"{name}: completed={result.completed} failed={result.failed} "
                f"of {total} within {result.steps_used} steps"
            )
    if elapsed > SIM_BUDGET_S:
        failures.append(f"simulations took {elapsed:.1f}s > {SIM_BUDGET_S}s")
    _verdict(capsys, 5, "benchmark_termination", failures)


def test_criterion_6_social_force_properties(capsys):
    params = ForceParams()
    rng = random.Random(SEED + 6)
    failures = []
    started = time.perf_counter()

    # zero-deviation fixpoint: moving exactly at the desired velocity
    for _ in range(25):
        pos = WorldPoint(rng.uniform(-5, 5), rng.uniform(-5, 5))
        target = WorldPoint(rng.uniform(-5, 5), rng.uniform(-5, 5))
        if pos == target:
            continue
        speed = rng.uniform(0.6, 2.0)
        rest = Pedestrian(0, pos, (0.0, 0.0), speed, target)
        fx, fy = acceleration_force(rest, params)
        w = (fx * params.tau, fy * params.tau)
        moving = Pedestrian(0, pos, w, speed, target)
        if acceleration_force(moving, params) != (0.0, 0.0):
            failures.append(f"nonzero acceleration at fixpoint {pos}->{target}")
            break

    # repulsion magnitude strictly decreases with distance (fixed direction,
    # other pedestrian straight ahead so anisotropy stays 1)
    previous = None
    for k in range(1, 120):
        d = 0.05 * k
        a = Pedestrian(0, WorldPoint(0, 0), (0.0, 1.0), 1.34, WorldPoint(0, 10))
        b = Pedestrian(1, WorldPoint(0, d), (0.0, 0.0), 1.34, WorldPoint(0, 0))
        fx, fy = repulsion_pedestrian(a, b, params)
        mag = math.hypot(fx, fy)
        if previous is not None and not mag < previous:
            failures.append(f"repulsion not decreasing at d={d}")
            break
        previous = mag

    # reciprocity with anisotropy disabled
    flat = ForceParams(anisotropy_floor=1.0)
    for _ in range(60):
        pa = WorldPoint(rng.uniform(-4, 4), rng.uniform(-4, 4))
        pb = WorldPoint(rng.uniform(-4, 4), rng.uniform(-4, 4))
        if pa == pb:
            continue
        a = Pedestrian(0, pa, (1.0, 0.0), 1.34, WorldPoint(5, 5))
        b = Pedestrian(1, pb, (-1.0, 0.0), 1.34, WorldPoint(-5, -5))
        fab = repulsion_pedestrian(a, b, flat)
        fba = repulsion_pedestrian(b, a, flat)
        if fab != (-fba[0], -fba[1]):
            failures.append(f"reciprocity broken at {pa} vs {pb}")
            break

    # translation invariance of the full force sum
    pois = (PointOfInterest(WorldPoint(2.0, 1.0), 1.5, 6.0, 50.0),)
    crowd = [
        Pedestrian(
            i,
            WorldPoint(rng.uniform(0, 6), rng.uniform(0, 6)),
            (rng.uniform(-1, 1), rng.uniform(-1, 1)),
            1.34,
            WorldPoint(rng.uniform(0, 6), rng.uniform(0, 6)),
            group_id=i % 2,
        )
        for i in range(6)
    ]
    shift = (12.5, -7.25)
    moved_pois = (
        PointOfInterest(
            WorldPoint(pois[0].position.x + shift[0], pois[0].position.y + shift[1]),
            1.5, 6.0, 50.0,
        ),
    )
    moved = [
        Pedestrian(
            p.id,
            WorldPoint(p.position.x + shift[0], p.position.y + shift[1]),
            p.velocity,
            p.desired_speed,
            WorldPoint(p.target.x + shift[0], p.target.y + shift[1]),
            group_id=p.group_id,
        )
        for p in crowd
    ]
    for i in range(len(crowd)):
        f0 = total_force(
            crowd[i], crowd[:i] + crowd[i + 1:], (), pois, 10.0, params
        )
        f1 = total_force(
            moved[i], moved[:i] + moved[i + 1:], (), moved_pois, 10.0, params
        )
        scale = max(1.0, abs(f0[0]), abs(f0[1]))
        if max(abs(f0[0] - f1[0]), abs(f0[1] - f1[1])) > REL_TOL * scale:
            failures.append(f"translation changed force on pedestrian {i}")
            break

    # speed clamp after every integration step
    for _ in range(300):
        ped = Pedestrian(
            3,
            WorldPoint(0, 0),
            (rng.uniform(-2, 2), rng.uniform(-2, 2)),
            rng.uniform(0.6, 2.0),
            WorldPoint(4, 4),
        )
        force = (rng.uniform(-80, 80), rng.uniform(-80, 80))
        after = integrate_step(ped, force, 0.05, params)
        if math.hypot(*after.velocity) > params.max_speed_factor * ped.desired_speed:
            failures.append(f"speed clamp exceeded with force {force}")
            break

    # POI attraction decays linearly in time
    poi = PointOfInterest(WorldPoint(3.0, 0.0), 2.0, 10.0, duration=40.0)
    ped = Pedestrian(4, WorldPoint(0, 0), (0.0, 0.0), 1.34, WorldPoint(9, 9))
    base = math.hypot(*attraction_poi(ped, poi, 0.0, params))
    for t in (0.0, 10.0, 20.0, 30.0, 39.0, 40.0, 55.0):
        expected = base * max(0.0, 1.0 - t / 40.0)
        got = math.hypot(*attraction_poi(ped, poi, t, params))
        if abs(got - expected) > 1e-12 * max(1.0, expected):
            failures.append(f"POI decay at t={t}: {got} != {expected}")
            break

    elapsed = time.perf_counter() - started
    if elapsed > PROPERTY_BUDGET_S:
        failures.append(f"suite took {elapsed:.1f}s > {PROPERTY_BUDGET_S}s")
    _verdict(capsys, 6, "social_force_properties", failures)


def _corridor_grid(length=30, width=5, cell=0.5):
    blocked = set()
    for x in range(length + 2):
        blocked.add(Cell(x, 0))
        blocked.add(Cell(x, width + 1))
    for y in range(width + 2):
        blocked.add(Cell(0, y))
        blocked.add(Cell(length + 1, y))
    return GridMap(length + 2, width + 2, frozenset(blocked), cell)


def _make_world(grid, handler, force_fn):
    index = precompute_sjp(grid)
    planned = []

    def plan(start, goal):
        path, _ = jps_s_search(grid, index, start, goal)
        planned.append(path)
        return path

    world = WorldView(
        grid=grid,
        plan=plan,
        force=force_fn,
        params=ForceParams(),
        handler=handler,
    )
    return world, planned


def test_criterion_7_transition_handler_properties(capsys):
    failures = []
    started = time.perf_counter()
    params = ForceParams()
    grid = _corridor_grid()
    handler = HandlerParams(spine_radius=1.0, waypoint_tolerance=0.5, max_replans=4)

    # free flow: goal-directed force only, liveness within the kinematic bound
    world, planned = _make_world(
        grid, handler, lambda p: acceleration_force(p, params)
    )
    agent = AgentController(pedestrian_id=0, goal=Cell(28, 3))
    ped = Pedestrian(0, grid.cell_to_world(Cell(1, 3)), (0.0, 0.0), 1.34,
                     grid.cell_to_world(Cell(1, 3)))
    dt = 0.05
    transitions = []
    goal_center = grid.cell_to_world(Cell(28, 3))
    for step in range(2000):
        before = agent.state
        agent, ped = tick(agent, ped, world, dt)
        if agent.state is not before:
            transitions.append((before, agent.state, step, ped))
            if (before, agent.state) == (ControlState.PLANNING, ControlState.MOVING):
                if planned[-1] is None or not validate_path(grid, planned[-1]):
                    failures.append("entered Moving without a valid path")
                if agent.spine is None:
                    failures.append("Moving without a spine")
            if (before, agent.state) == (ControlState.MOVING, ControlState.DONE):
                arrival = math.hypot(
                    ped.position.x - goal_center.x, ped.position.y - goal_center.y
                )
                if arrival > handler.waypoint_tolerance * (1 + 1e-9):
                    failures.append(f"Done {arrival:.3f}m from the goal")
        if agent.state in (ControlState.DONE, ControlState.FAILED):
            break
    if agent.state is not ControlState.DONE:
        failures.append(f"free flow ended in {agent.state}")
    else:
        distance = 27 * grid.cell_size
        bound = (distance / 1.34) * 1.2
        if (step + 1) * dt > bound:
            failures.append(f"arrival {(step + 1) * dt:.2f}s > bound {bound:.2f}s")

    # forced deviation: strong lateral force; each deviation event yields
    # exactly one Moving->Planning and one replan_count increment, and the
    # replan budget forces Failed at the bound. The corridor is tall enough
    # that every deviation cycle stays clear of the walls.
    tall = _corridor_grid(length=30, width=24)
    lateral = lambda p: (0.0, 60.0)
    world2, _ = _make_world(tall, handler, lateral)
    agent2 = AgentController(pedestrian_id=1, goal=Cell(28, 2))
    start_pos = tall.cell_to_world(Cell(1, 2))
    ped2 = Pedestrian(1, start_pos, (0.0, 0.0), 1.34, start_pos)
    moving_to_planning = 0
    seq = []
    prev_ped = ped2
    for _ in range(3000):
        before = agent2.state
        agent2, ped2 = tick(agent2, ped2, world2, dt)
        if agent2.state is not before:
            seq.append((before, agent2.state))
            if (before, agent2.state) == (
                ControlState.MOVING, ControlState.PLANNING
            ):
                moving_to_planning += 1
                if ped2.position != prev_ped.position:
                    failures.append("deviation tick committed motion")
        prev_ped = ped2
        if agent2.state in (ControlState.DONE, ControlState.FAILED):
            break
    if agent2.state is not ControlState.FAILED:
        failures.append(f"perpetual deviation ended in {agent2.state}")
    if agent2.replan_count != handler.max_replans:
        failures.append(
            f"replan_count {agent2.replan_count} != bound {handler.max_replans}"
        )
    if moving_to_planning != handler.max_replans:
        failures.append(
            f"{moving_to_planning} Moving->Planning transitions for "
            f"{handler.max_replans} allowed replans"
        )
    for first, second in zip(seq, seq[1:]):
        if first[1] is not second[0]:
            failures.append(f"non-adjacent transition pair {first} then {second}")
            break

    elapsed = time.perf_counter() - started
    if elapsed > PROPERTY_BUDGET_S:
        failures.append(f"suite took {elapsed:.1f}s > {PROPERTY_BUDGET_S}s")
    _verdict(capsys, 7, "transition_handler_properties", failures)


def test_criterion_8_no_wall_penetration(benchmark_runs, capsys):
    runs, _ = benchmark_runs
    failures = []
    for name in BENCHMARKS:
        scenario, _, trace_text = runs[name]
        lines = trace_text.splitlines()
        if len(lines) < 100:
            failures.append(f"{name}: trace suspiciously short ({len(lines)} lines)")
        violations = audit_trace(scenario.grid, lines)
        if violations:
            failures.append(f"{name}: {len(violations)} violations; " + violations[0])
    _verdict(capsys, 8, "no_wall_penetration", failures)


def test_criterion_9_determinism(tmp_path, capsys):
    failures = []
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        code = cli_main(
            ["simulate", "narrow_walkway", "--seed", "7",
             "--trace-out", str(out)]
        )
        if code != 0:
            failures.append(f"run {i} exited {code}")
        outputs.append(out.read_bytes())
    if not outputs[0]:
        failures.append("empty trace")
    if outputs[0] != outputs[1]:
        failures.append("traces differ between identical runs")
    _verdict(capsys, 9, "determinism", failures)
