"""Simulation loop tying planning, forces, and the control handler together.

Each step is two-phase: crowd forces are computed once from the
pre-step snapshot, every live agent is ticked against that snapshot,
and only then are the results committed. Agent update order therefore
cannot change the outcome. Agents whose controller reaches a terminal
state are despawned after their final trace row so they stop exerting
social forces.

Trace format is CSV with header
``step,agent_id,x,y,vx,vy,state,waypoint_index``. Floats are written
with repr() so a trace is a bit-exact record of the run; two runs of
the same seeded scenario produce byte-identical traces. When an agent
changes state during a step, an extra row whose state column is
``OLD->NEW`` follows that agent's regular row.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence

from pedflow.control import (
    TERMINAL_STATES,
    AgentController,
    ControlState,
    WorldView,
    tick,
)
from pedflow.crowd import CrowdModel
from pedflow.forces import Pedestrian
from pedflow.grid import GridMap, WorldPoint
from pedflow.pathfinding import SearchWorkspace, jps_s_search, precompute_sjp
from pedflow.scenarios import Scenario

TRACE_HEADER = "step,agent_id,x,y,vx,vy,state,waypoint_index"


@dataclass(frozen=True)
class TraceRow:
    agent_id: int
    x: float
    y: float
    vx: float
    vy: float
    state: str
    waypoint_index: int


@dataclass(frozen=True)
class SimulationResult:
    completed: int
    failed: int
    steps_used: int
    wall_time: float
    trace: Optional[IO[str]] = None

    @property
    def all_done(self) -> bool:
        return self.failed == 0


def emit_trace(stream: IO[str], step: int, rows: Iterable[TraceRow]) -> None:
    """Append one step's rows to an open trace stream."""
    for r in rows:
        stream.write(
            f"{step},{r.agent_id},{r.x!r},{r.y!r},{r.vx!r},{r.vy!r},"
            f"{r.state},{r.waypoint_index}\n"
        )


def run_simulation(
    scenario: Scenario, trace: Optional[IO[str]] = None
) -> SimulationResult:
    """Run a scenario to completion or to its step budget.

    Returns counts of agents that reached their goal versus agents whose
    controller gave up (no path, or replanning budget exhausted); agents
    still moving when max_steps is hit count as failed. If ``trace`` is
    given, every step appends one CSV row per live agent.
    """
    scenario.validate()
    grid = scenario.grid
    index = precompute_sjp(grid)
    workspace = SearchWorkspace(grid.width, grid.height)

    def plan(start, goal):
        path, _ = jps_s_search(grid, index, start, goal, workspace=workspace)
        return path

    model = CrowdModel(grid, scenario.params, scenario.pois)

    peds: list[Pedestrian] = []
    controllers: list[AgentController] = []
    for i, spec in enumerate(scenario.pedestrians):
        peds.append(
            Pedestrian(
                id=i,
                position=spec.spawn,
                velocity=(0.0, 0.0),
                desired_speed=spec.desired_speed,
                target=spec.spawn,
                group_id=spec.group_id,
            )
        )
        controllers.append(AgentController(pedestrian_id=i, goal=spec.goal))

    force_ctx: dict = {"forces": None, "row": None}

    def force(ped: Pedestrian) -> tuple[float, float]:
        f = force_ctx["forces"][force_ctx["row"][ped.id]]
        return (float(f[0]), float(f[1]))

    world = WorldView(
        grid=grid,
        plan=plan,
        force=force,
        params=scenario.params,
        handler=scenario.handler,
    )

    live = list(range(len(peds)))
    steps_used = 0
    started = time.perf_counter()
    if trace is not None:
        trace.write(TRACE_HEADER + "\n")

    for step in range(scenario.max_steps):
        if not live:
            break
        steps_used = step + 1
        snapshot = [peds[i] for i in live]
        force_ctx["forces"] = model.forces_for(snapshot, now=step * scenario.dt)
        force_ctx["row"] = {p.id: k for k, p in enumerate(snapshot)}

        results = []
        for i in live:
            before = controllers[i].state
            try:
                agent, ped = tick(controllers[i], peds[i], world, scenario.dt)
            except ValueError as exc:
                raise RuntimeError(
                    f"step {step}: agent {i}: {exc}"
                ) from exc
            results.append((i, before, agent, ped))

        rows: list[TraceRow] = []
        next_live: list[int] = []
        for i, before, agent, ped in results:
            controllers[i] = agent
            peds[i] = ped
            rows.append(
                TraceRow(
                    agent_id=i,
                    x=ped.position.x,
                    y=ped.position.y,
                    vx=ped.velocity[0],
                    vy=ped.velocity[1],
                    state=agent.state.name,
                    waypoint_index=agent.waypoint_index,
                )
            )
            if agent.state is not before:
                rows.append(
                    TraceRow(
                        agent_id=i,
                        x=ped.position.x,
                        y=ped.position.y,
                        vx=ped.velocity[0],
                        vy=ped.velocity[1],
                        state=f"{before.name}->{agent.state.name}",
                        waypoint_index=agent.waypoint_index,
                    )
                )
            if agent.state not in TERMINAL_STATES:
                next_live.append(i)
        if trace is not None:
            emit_trace(trace, step, rows)
        live = next_live

    completed = sum(1 for c in controllers if c.state is ControlState.DONE)
    failed = len(controllers) - completed
    return SimulationResult(
        completed=completed,
        failed=failed,
        steps_used=steps_used,
        wall_time=time.perf_counter() - started,
        trace=trace,
    )


def audit_trace(grid: GridMap, lines: Sequence[str]) -> list[str]:
    """Check every trace position against the map; return violations.

    Each data row's (x, y) must lie inside the map and inside a
    traversable cell. The returned list holds one human-readable string
    per offending row; an empty list means the trace is clean.
    """
    violations = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line == TRACE_HEADER:
            continue
        parts = line.split(",")
        if len(parts) != 8:
            violations.append(f"line {lineno}: expected 8 fields, got {len(parts)}")
            continue
        step, agent_id, xs, ys = parts[0], parts[1], parts[2], parts[3]
        point = WorldPoint(float(xs), float(ys))
        if not grid.contains_world(point):
            violations.append(
                f"line {lineno}: step {step} agent {agent_id} "
                f"at ({xs}, {ys}) is outside the map"
            )
            continue
        cell = grid.world_to_cell(point)
        if not grid.is_traversable(cell):
            violations.append(
                f"line {lineno}: step {step} agent {agent_id} "
                f"at ({xs}, {ys}) is inside blocked cell {tuple(cell)}"
            )
    return violations
