"""Social-force movement model: per-pedestrian force terms and the
velocity/position update.

Every operation here is a pure function of an immutable snapshot of the
world, so per-pedestrian forces can be evaluated in any order (or
concurrently); applying the motion results is the caller's serialized
commit phase. The scalar functions in this module are the reference
semantics; crowd.py evaluates the same formulas vectorized over all
pedestrians at once and is cross-checked against these term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from pedflow.grid import WorldPoint
from pedflow.obstacles import Obstacle


@dataclass(frozen=True)
class ForceParams:
    """Model constants.

    Defaults are the standard social-force calibration: relaxation time
    0.5 s, pedestrian repulsion 2.1 m^2/s^2 with 0.3 m range, boundary
    repulsion 10 m^2/s^2 with 0.2 m range, a 100 degree half-angle of
    view with out-of-view influences weighted 0.5, and a speed cap of
    1.3 times the desired speed.
    """

    tau: float = 0.5
    V0: float = 2.1
    sigma: float = 0.3
    U0: float = 10.0
    R: float = 0.2
    view_half_angle: float = math.radians(100.0)
    anisotropy_floor: float = 0.5
    group_strength: float = 0.5
    group_distance: float = 2.0
    max_speed_factor: float = 1.3

    def __post_init__(self):
        for name in ("tau", "V0", "sigma", "U0", "R", "view_half_angle",
                     "group_strength", "group_distance", "max_speed_factor"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 <= self.anisotropy_floor <= 1.0:
            raise ValueError("anisotropy_floor must be in [0, 1]")


@dataclass
class Pedestrian:
    id: int
    position: WorldPoint
    velocity: tuple[float, float]
    desired_speed: float
    target: WorldPoint
    group_id: Optional[int] = None

    def __post_init__(self):
        if self.desired_speed <= 0:
            raise ValueError(
                f"pedestrian {self.id}: desired_speed must be positive"
            )


@dataclass(frozen=True)
class PointOfInterest:
    """Attractor whose pull decays linearly to zero over its duration."""

    position: WorldPoint
    strength0: float
    range: float
    duration: float
    activated_at: float = 0.0

    def __post_init__(self):
        if self.strength0 <= 0:
            raise ValueError("strength0 must be positive")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.range <= 0:
            raise ValueError("range must be positive")


def _pair_direction(id_a: int, id_b: int) -> tuple[float, float]:
    """Deterministic pseudo-random unit vector for a coincident pair.

    Exactly coincident positions leave the repulsion direction undefined;
    a direction hashed from the two ids keeps the simulation deterministic
    while still separating the pair.
    """
    h = ((id_a + 1) * 2654435761 + (id_b + 1) * 97531) % (2**32)
    angle = h / 2**32 * 2.0 * math.pi
    return math.cos(angle), math.sin(angle)


def acceleration_force(ped: Pedestrian, params: ForceParams) -> tuple[float, float]:
    """Drive toward the desired velocity over the relaxation time."""
    dx = ped.target.x - ped.position.x
    dy = ped.target.y - ped.position.y
    d = math.hypot(dx, dy)
    if d == 0.0:
        wx, wy = 0.0, 0.0
    else:
        wx = ped.desired_speed * dx / d
        wy = ped.desired_speed * dy / d
    return (wx - ped.velocity[0]) / params.tau, (wy - ped.velocity[1]) / params.tau


def anisotropy(ped: Pedestrian, other_pos: WorldPoint, params: ForceParams) -> float:
    """Weight of an influence at other_pos: full in view, floored outside.

    A stationary pedestrian has no gaze direction and weights everything
    fully.
    """
    vx, vy = ped.velocity
    speed = math.hypot(vx, vy)
    if speed == 0.0:
        return 1.0
    rx = other_pos.x - ped.position.x
    ry = other_pos.y - ped.position.y
    rd = math.hypot(rx, ry)
    if rd == 0.0:
        return 1.0
    cos_angle = (vx * rx + vy * ry) / (speed * rd)
    if cos_angle >= math.cos(params.view_half_angle):
        return 1.0
    return params.anisotropy_floor


def repulsion_pedestrian(
    a: Pedestrian, b: Pedestrian, params: ForceParams
) -> tuple[float, float]:
    """Exponential repulsion of a away from b, anisotropically weighted."""
    rx = a.position.x - b.position.x
    ry = a.position.y - b.position.y
    d = math.hypot(rx, ry)
    if d == 0.0:
        ux, uy = _pair_direction(a.id, b.id)
        return params.V0 * ux, params.V0 * uy
    mag = params.V0 * math.exp(-d / params.sigma) * anisotropy(a, b.position, params)
    return mag * rx / d, mag * ry / d


def repulsion_boundary(
    a: Pedestrian, obs: Obstacle, params: ForceParams
) -> tuple[float, float]:
    """Exponential repulsion away from the nearest point of one obstacle."""
    qx, qy, d, seg = obs.nearest_point(a.position.x, a.position.y)
    if d == 0.0:
        return params.U0 * seg.nx, params.U0 * seg.ny
    mag = params.U0 * math.exp(-d / params.R)
    return mag * (a.position.x - qx) / d, mag * (a.position.y - qy) / d


def attraction_poi(
    a: Pedestrian, poi: PointOfInterest, now: float, params: ForceParams
) -> tuple[float, float]:
    """Pull toward a point of interest, decaying linearly to zero."""
    if now < poi.activated_at:
        return 0.0, 0.0
    decay = 1.0 - (now - poi.activated_at) / poi.duration
    if decay <= 0.0:
        return 0.0, 0.0
    rx = poi.position.x - a.position.x
    ry = poi.position.y - a.position.y
    d = math.hypot(rx, ry)
    if d == 0.0:
        return 0.0, 0.0
    mag = poi.strength0 * decay * math.exp(-d / poi.range)
    return mag * rx / d, mag * ry / d


def group_join_force(
    a: Pedestrian, b: Pedestrian, params: ForceParams
) -> tuple[float, float]:
    """Constant pull toward a group member that drifted too far away."""
    if a.group_id is None or a.group_id != b.group_id or a.id == b.id:
        return 0.0, 0.0
    rx = b.position.x - a.position.x
    ry = b.position.y - a.position.y
    d = math.hypot(rx, ry)
    if d == 0.0 or d <= params.group_distance:
        return 0.0, 0.0
    c = params.group_strength
    return c * rx / d, c * ry / d


def total_force(
    a: Pedestrian,
    others: Iterable[Pedestrian],
    obstacles: Sequence[Obstacle],
    pois: Sequence[PointOfInterest],
    now: float,
    params: ForceParams,
) -> tuple[float, float]:
    """Sum of all force terms acting on pedestrian a."""
    fx, fy = acceleration_force(a, params)
    for b in others:
        if b.id == a.id:
            continue
        gx, gy = repulsion_pedestrian(a, b, params)
        fx += gx
        fy += gy
        gx, gy = group_join_force(a, b, params)
        fx += gx
        fy += gy
    for obs in obstacles:
        gx, gy = repulsion_boundary(a, obs, params)
        fx += gx
        fy += gy
    for poi in pois:
        gx, gy = attraction_poi(a, poi, now, params)
        fx += gx
        fy += gy
    return fx, fy


def integrate_step(
    a: Pedestrian, force: tuple[float, float], dt: float, params: ForceParams
) -> Pedestrian:
    """Explicit Euler update with a hard speed cap.

    Velocity first: v' = v + f dt, clamped to max_speed_factor times the
    desired speed with direction preserved; then x' = x + v' dt.
    """
    fx, fy = force
    if not (math.isfinite(fx) and math.isfinite(fy)):
        raise ValueError(f"non-finite force {force!r} on pedestrian {a.id}")
    vx = a.velocity[0] + fx * dt
    vy = a.velocity[1] + fy * dt
    speed = math.hypot(vx, vy)
    cap = params.max_speed_factor * a.desired_speed
    if speed > cap:
        scale = cap / speed
        vx *= scale
        vy *= scale
        # rescaling rounds each component; an overshoot of one ulp can
        # survive, so nudge toward zero until the bound holds exactly
        while math.hypot(vx, vy) > cap:
            vx = math.nextafter(vx, 0.0)
            vy = math.nextafter(vy, 0.0)
    return replace(
        a,
        position=WorldPoint(a.position.x + vx * dt, a.position.y + vy * dt),
        velocity=(vx, vy),
    )
