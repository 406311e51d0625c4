"""Vectorized evaluation of the social-force model over a whole crowd.

CrowdModel computes, in one numpy pass, the same per-pedestrian total
force that composing the scalar functions in forces.py yields; the test
suite checks the two against each other term by term. Obstacle segment
geometry is prepared once per map.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from pedflow.forces import ForceParams, Pedestrian, PointOfInterest, _pair_direction
from pedflow.grid import GridMap
from pedflow.obstacles import extract_obstacles


class CrowdModel:
    def __init__(
        self,
        grid: GridMap,
        params: ForceParams,
        pois: Sequence[PointOfInterest] = (),
    ):
        self.params = params
        self.pois = tuple(pois)
        self.obstacles = extract_obstacles(grid)
        self._obs_geometry = []
        for obs in self.obstacles:
            a = np.array([(s.x1, s.y1) for s in obs.segments], dtype=np.float64)
            b = np.array([(s.x2, s.y2) for s in obs.segments], dtype=np.float64)
            ab = b - a
            inv_len2 = 1.0 / (ab * ab).sum(axis=1)
            normals = np.array(
                [(s.nx, s.ny) for s in obs.segments], dtype=np.float64
            )
            self._obs_geometry.append((a, ab, inv_len2, normals))

    def forces(
        self,
        positions: np.ndarray,
        velocities: np.ndarray,
        desired_speeds: np.ndarray,
        targets: np.ndarray,
        group_ids: np.ndarray,
        ids: np.ndarray,
        now: float,
    ) -> np.ndarray:
        """Total force on every pedestrian, [N, 2].

        group_ids uses -1 for pedestrians not in any group.
        """
        n = positions.shape[0]
        if n == 0:
            return np.zeros((0, 2))
        p = self.params

        # goal-directed acceleration
        delta = targets - positions
        dist = np.hypot(delta[:, 0], delta[:, 1])
        inv = np.divide(1.0, dist, out=np.zeros_like(dist), where=dist > 0)
        desired_vel = desired_speeds[:, None] * delta * inv[:, None]
        out = (desired_vel - velocities) / p.tau

        if n > 1:
            out += self._pairwise(positions, velocities, group_ids, ids)

        for a, ab, inv_len2, normals in self._obs_geometry:
            out += self._boundary(positions, a, ab, inv_len2, normals)

        for poi in self.pois:
            out += self._poi(positions, poi, now)

        return out

    def _pairwise(self, positions, velocities, group_ids, ids) -> np.ndarray:
        p = self.params
        diff = positions[:, None, :] - positions[None, :, :]
        d = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(d, np.inf)
        coincident = d == 0.0
        if coincident.any():
            d = np.where(coincident, np.inf, d)
        unit = diff / d[..., None]

        # anisotropy: weight 1 inside the view cone, floor outside;
        # stationary pedestrians weight everything fully
        speed = np.hypot(velocities[:, 0], velocities[:, 1])
        toward = -(velocities[:, 0, None] * diff[..., 0]
                   + velocities[:, 1, None] * diff[..., 1])
        with np.errstate(invalid="ignore"):
            in_view = toward >= math.cos(p.view_half_angle) * speed[:, None] * d
        weight = np.where(in_view, 1.0, p.anisotropy_floor)
        weight[speed == 0.0, :] = 1.0

        mag = p.V0 * np.exp(-d / p.sigma) * weight
        force = (mag[..., None] * unit).sum(axis=1)

        same = (group_ids[:, None] == group_ids[None, :]) & (
            group_ids[:, None] >= 0
        )
        np.fill_diagonal(same, False)
        if same.any():
            pull = np.where(same & (d > p.group_distance), p.group_strength, 0.0)
            force -= (pull[..., None] * unit).sum(axis=1)

        if coincident.any():
            for i, j in np.argwhere(coincident):
                ux, uy = _pair_direction(int(ids[i]), int(ids[j]))
                force[i, 0] += p.V0 * ux
                force[i, 1] += p.V0 * uy
        return force

    def _boundary(self, positions, a, ab, inv_len2, normals) -> np.ndarray:
        p = self.params
        ap = positions[:, None, :] - a[None, :, :]
        t = (ap * ab[None, :, :]).sum(axis=2) * inv_len2[None, :]
        np.clip(t, 0.0, 1.0, out=t)
        q = a[None, :, :] + t[..., None] * ab[None, :, :]
        dv = positions[:, None, :] - q
        dist = np.hypot(dv[..., 0], dv[..., 1])
        nearest = dist.argmin(axis=1)
        rows = np.arange(positions.shape[0])
        d0 = dist[rows, nearest]
        dv0 = dv[rows, nearest]
        safe = np.where(d0 > 0.0, d0, 1.0)
        unit = np.where(
            (d0 > 0.0)[:, None], dv0 / safe[:, None], normals[nearest]
        )
        return (p.U0 * np.exp(-d0 / p.R))[:, None] * unit

    def _poi(self, positions, poi: PointOfInterest, now: float) -> np.ndarray:
        if now < poi.activated_at:
            return np.zeros((positions.shape[0], 2))
        decay = 1.0 - (now - poi.activated_at) / poi.duration
        if decay <= 0.0:
            return np.zeros((positions.shape[0], 2))
        r = np.array([poi.position.x, poi.position.y]) - positions
        d = np.hypot(r[:, 0], r[:, 1])
        mag = poi.strength0 * decay * np.exp(-d / poi.range)
        scale = np.divide(mag, d, out=np.zeros_like(d), where=d > 0)
        return scale[:, None] * r

    def forces_for(
        self, peds: Sequence[Pedestrian], now: float
    ) -> np.ndarray:
        """Forces for a list of Pedestrian objects, in list order."""
        n = len(peds)
        positions = np.array(
            [(pd.position.x, pd.position.y) for pd in peds], dtype=np.float64
        ).reshape(n, 2)
        velocities = np.array(
            [pd.velocity for pd in peds], dtype=np.float64
        ).reshape(n, 2)
        desired = np.array([pd.desired_speed for pd in peds], dtype=np.float64)
        targets = np.array(
            [(pd.target.x, pd.target.y) for pd in peds], dtype=np.float64
        ).reshape(n, 2)
        groups = np.array(
            [-1 if pd.group_id is None else pd.group_id for pd in peds],
            dtype=np.int64,
        )
        ids = np.array([pd.id for pd in peds], dtype=np.int64)
        return self.forces(
            positions, velocities, desired, targets, groups, ids, now
        )
