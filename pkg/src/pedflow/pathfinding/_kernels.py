"""Jitted inner loops for grid search.

All kernels work on flattened padded arrays ((height+2) x (width+2), one
zero border cell) so neighbor probes never need bounds checks. Coordinates
inside kernels are padded (real + 1); node ids are y*Wp + x, which makes
the id order lexicographic (y, x) for deterministic tie-breaking.

The `walk` array has two accepted encodings, both with 0 = blocked:
plain occupancy (values 0/1, use_sjp False) or the fused scan grid from
the static-jump-point index (bit 7 = traversable, bits 0..3 = straight
arrival directions with a forced neighbor, use_sjp True). Every
traversability test is a nonzero test, so the search logic is encoding
agnostic; only the straight-scan stop test differs: four occupancy probes
across three rows versus one bit test on the value already loaded.

The open list is a binary heap ordered by (f ascending, g descending,
id ascending). Stale entries are skipped via a closed-epoch stamp.
Direction codes follow sjp.DIRECTION_BITS: 0:(1,0) 1:(-1,0) 2:(0,1)
3:(0,-1) 4:(1,1) 5:(1,-1) 6:(-1,1) 7:(-1,-1).
"""

import numpy as np
from numba import njit

SQRT2 = np.sqrt(2.0)

_DX = np.array([1, -1, 0, 0, 1, 1, -1, -1], dtype=np.int64)
_DY = np.array([0, 0, 1, -1, 1, -1, 1, -1], dtype=np.int64)

STATUS_FOUND = 0
STATUS_NO_PATH = 1
STATUS_HEAP_FULL = 2


@njit(cache=True, nogil=True, inline="always")
def _entry_less(f1, g1, i1, f2, g2, i2):
    if f1 != f2:
        return f1 < f2
    if g1 != g2:
        return g1 > g2
    return i1 < i2


@njit(cache=True, nogil=True)
def _heap_push(hf, hg, hid, n, f, g, node):
    i = n
    hf[i] = f
    hg[i] = g
    hid[i] = node
    while i > 0:
        p = (i - 1) >> 1
        if _entry_less(hf[i], hg[i], hid[i], hf[p], hg[p], hid[p]):
            hf[i], hf[p] = hf[p], hf[i]
            hg[i], hg[p] = hg[p], hg[i]
            hid[i], hid[p] = hid[p], hid[i]
            i = p
        else:
            break
    return n + 1


@njit(cache=True, nogil=True)
def _heap_pop(hf, hg, hid, n):
    f = hf[0]
    g = hg[0]
    node = hid[0]
    n -= 1
    hf[0] = hf[n]
    hg[0] = hg[n]
    hid[0] = hid[n]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= n:
            break
        r = l + 1
        c = l
        if r < n and _entry_less(hf[r], hg[r], hid[r], hf[l], hg[l], hid[l]):
            c = r
        if _entry_less(hf[c], hg[c], hid[c], hf[i], hg[i], hid[i]):
            hf[i], hf[c] = hf[c], hf[i]
            hg[i], hg[c] = hg[c], hg[i]
            hid[i], hid[c] = hid[c], hid[i]
            i = c
        else:
            break
    return f, g, node, n


@njit(cache=True, nogil=True, inline="always")
def _octile(x, y, gx, gy):
    ax = abs(x - gx)
    ay = abs(y - gy)
    if ax < ay:
        ax, ay = ay, ax
    return ax + (SQRT2 - 1.0) * ay


@njit(cache=True, nogil=True)
def _scan_straight(walk, Wp, x, y, dx, dy, gx, gy, use_sjp, dirbit):
    """Ray scan along a straight direction from padded (x, y).

    Returns (found, jx, jy, steps). Stops at the goal or at a cell with a
    forced neighbor for this travel direction. The goal test is hoisted:
    a horizontal ray can only reach the goal when y == gy (vertical:
    x == gx), so off-line rays skip the per-cell comparison."""
    steps = 0
    if dx != 0:
        base = y * Wp
        on_goal_line = y == gy
        while True:
            x += dx
            v = walk[base + x]
            if v == 0:
                return False, 0, 0, steps
            steps += 1
            if on_goal_line and x == gx:
                return True, x, y, steps
            if use_sjp:
                if v & dirbit:
                    return True, x, y, steps
            else:
                if (walk[base + Wp + x - dx] == 0 and walk[base + Wp + x] != 0) or (
                    walk[base - Wp + x - dx] == 0 and walk[base - Wp + x] != 0
                ):
                    return True, x, y, steps
    else:
        idx = y * Wp + x
        dWp = dy * Wp
        on_goal_line = x == gx
        while True:
            y += dy
            idx += dWp
            v = walk[idx]
            if v == 0:
                return False, 0, 0, steps
            steps += 1
            if on_goal_line and y == gy:
                return True, x, y, steps
            if use_sjp:
                if v & dirbit:
                    return True, x, y, steps
            else:
                if (walk[idx - dWp + 1] == 0 and walk[idx + 1] != 0) or (
                    walk[idx - dWp - 1] == 0 and walk[idx - 1] != 0
                ):
                    return True, x, y, steps


@njit(cache=True, nogil=True)
def _scan_diag(walk, Wp, x, y, dx, dy, gx, gy, use_sjp, bit_dx, bit_dy, limit):
    """Diagonal ray scan with component sub-scans (rule 3).

    limit > 0 caps the scan at a known indexed jump point `limit` steps
    ahead on this ray; obstacles encountered earlier still end the scan.
    Diagonal arrivals have no forced neighbors of their own, so only the
    goal, the limit cell, or a component jump point can stop the ray.
    """
    steps = 0
    k = 0
    idx = y * Wp + x
    dWp = dy * Wp
    didx = dWp + dx
    while True:
        if walk[idx + dx] == 0 or walk[idx + dWp] == 0 or walk[idx + didx] == 0:
            return False, 0, 0, steps
        x += dx
        y += dy
        idx += didx
        k += 1
        steps += 1
        if x == gx and y == gy:
            return True, x, y, steps
        if k == limit:
            return True, x, y, steps
        f1, _, _, s1 = _scan_straight(walk, Wp, x, y, dx, 0, gx, gy, use_sjp, bit_dx)
        steps += s1
        if f1:
            return True, x, y, steps
        f2, _, _, s2 = _scan_straight(walk, Wp, x, y, 0, dy, gx, gy, use_sjp, bit_dy)
        steps += s2
        if f2:
            return True, x, y, steps


@njit(cache=True, nogil=True)
def _ray_limit(xr, yr, dx, dy, height, d_starts, d_xs, d_masks, s_starts, s_xs, s_masks, dirbit):
    """Steps to the nearest indexed point ahead on the diagonal ray from
    real-coordinate (xr, yr) whose arrival mask contains dirbit; 0 if none."""
    if dx == dy:
        row = xr - yr + height - 1
        starts, xs, masks = d_starts, d_xs, d_masks
    else:
        row = xr + yr
        starts, xs, masks = s_starts, s_xs, s_masks
    s = starts[row]
    e = starts[row + 1]
    if s == e:
        return np.int64(0)
    if dx > 0:
        lo, hi = s, e
        while lo < hi:
            mid = (lo + hi) >> 1
            if xs[mid] <= xr:
                lo = mid + 1
            else:
                hi = mid
        for i in range(lo, e):
            if masks[i] & dirbit:
                return np.int64(xs[i]) - xr
    else:
        lo, hi = s, e
        while lo < hi:
            mid = (lo + hi) >> 1
            if xs[mid] < xr:
                lo = mid + 1
            else:
                hi = mid
        for i in range(lo - 1, s - 1, -1):
            if masks[i] & dirbit:
                return xr - np.int64(xs[i])
    return np.int64(0)


@njit(cache=True, nogil=True)
def _jps_kernel(
    walk,
    Wp,
    height,
    sx,
    sy,
    gx,
    gy,
    use_sjp,
    have_ray,
    d_starts,
    d_xs,
    d_masks,
    s_starts,
    s_xs,
    s_masks,
    g,
    par,
    gep,
    cep,
    epoch,
    hf,
    hg,
    hid,
    out_pts,
):
    """A* over jump points. Padded start/goal coords. Returns
    (status, n_points, expanded, scan_steps)."""
    cap = hf.shape[0]
    start = sy * Wp + sx
    goal = gy * Wp + gx
    g[start] = 0.0
    gep[start] = epoch
    par[start] = -1
    heap_n = _heap_push(hf, hg, hid, 0, _octile(sx, sy, gx, gy), 0.0, start)
    expanded = 0
    scans = 0
    while heap_n > 0:
        f, gv, node, heap_n = _heap_pop(hf, hg, hid, heap_n)
        if cep[node] == epoch:
            continue
        cep[node] = epoch
        if node == goal:
            # reconstruct: walk parents, then reverse into out_pts
            n = 0
            cur = node
            while cur >= 0:
                out_pts[2 * n] = cur % Wp - 1
                out_pts[2 * n + 1] = cur // Wp - 1
                n += 1
                cur = par[cur]
            for i in range(n // 2):
                j = n - 1 - i
                tx, ty = out_pts[2 * i], out_pts[2 * i + 1]
                out_pts[2 * i] = out_pts[2 * j]
                out_pts[2 * i + 1] = out_pts[2 * j + 1]
                out_pts[2 * j] = tx
                out_pts[2 * j + 1] = ty
            return STATUS_FOUND, n, expanded, scans
        expanded += 1
        x = node % Wp
        y = node // Wp
        # successor directions by the pruning rules
        ndirs = 0
        dirs = np.empty(8, dtype=np.int64)
        pid = par[node]
        if pid < 0:
            for k in range(8):
                dirs[ndirs] = k
                ndirs += 1
        else:
            px = pid % Wp
            py = pid // Wp
            dx = 0 if x == px else (1 if x > px else -1)
            dy = 0 if y == py else (1 if y > py else -1)
            if dx != 0 and dy != 0:
                dirs[0] = 4 if (dx == 1 and dy == 1) else (5 if dx == 1 else (6 if dy == 1 else 7))
                dirs[1] = 0 if dx == 1 else 1
                dirs[2] = 2 if dy == 1 else 3
                ndirs = 3
            elif dx != 0:
                dirs[0] = 0 if dx == 1 else 1
                ndirs = 1
                if walk[(y + 1) * Wp + x - dx] == 0 and walk[(y + 1) * Wp + x] != 0:
                    dirs[ndirs] = 2
                    ndirs += 1
                    dirs[ndirs] = 4 if dx == 1 else 6
                    ndirs += 1
                if walk[(y - 1) * Wp + x - dx] == 0 and walk[(y - 1) * Wp + x] != 0:
                    dirs[ndirs] = 3
                    ndirs += 1
                    dirs[ndirs] = 5 if dx == 1 else 7
                    ndirs += 1
            else:
                dirs[0] = 2 if dy == 1 else 3
                ndirs = 1
                if walk[(y - dy) * Wp + x + 1] == 0 and walk[y * Wp + x + 1] != 0:
                    dirs[ndirs] = 0
                    ndirs += 1
                    dirs[ndirs] = 4 if dy == 1 else 5
                    ndirs += 1
                if walk[(y - dy) * Wp + x - 1] == 0 and walk[y * Wp + x - 1] != 0:
                    dirs[ndirs] = 1
                    ndirs += 1
                    dirs[ndirs] = 6 if dy == 1 else 7
                    ndirs += 1
        for di in range(ndirs):
            k = dirs[di]
            ddx = _DX[k]
            ddy = _DY[k]
            if k < 4:
                found, jx, jy, steps = _scan_straight(
                    walk, Wp, x, y, ddx, ddy, gx, gy, use_sjp, np.uint8(1 << k)
                )
                scans += steps
                dist = np.float64(steps)
            else:
                limit = np.int64(0)
                if have_ray:
                    limit = _ray_limit(
                        x - 1, y - 1, ddx, ddy, height,
                        d_starts, d_xs, d_masks, s_starts, s_xs, s_masks,
                        np.uint8(1 << k),
                    )
                bit_dx = np.uint8(1 << (0 if ddx == 1 else 1))
                bit_dy = np.uint8(1 << (2 if ddy == 1 else 3))
                found, jx, jy, steps = _scan_diag(
                    walk, Wp, x, y, ddx, ddy, gx, gy, use_sjp, bit_dx, bit_dy, limit
                )
                scans += steps
                dist = 0.0
                if found:
                    dist = SQRT2 * max(abs(jx - x), abs(jy - y))
            if not found:
                continue
            nid = jy * Wp + jx
            ng = g[node] + (dist if k >= 4 else np.float64(abs(jx - x) + abs(jy - y)))
            if gep[nid] != epoch or ng < g[nid]:
                g[nid] = ng
                gep[nid] = epoch
                par[nid] = node
                if heap_n >= cap:
                    return STATUS_HEAP_FULL, 0, expanded, scans
                heap_n = _heap_push(
                    hf, hg, hid, heap_n, ng + _octile(jx, jy, gx, gy), ng, nid
                )
    return STATUS_NO_PATH, 0, expanded, scans


@njit(cache=True, nogil=True)
def _dijkstra_kernel(
    walk, Wp, sx, sy, gx, gy, g, ga, gb, gep, cep, epoch, hf, hg, hid
):
    """Uniform-cost search over step neighbors, tracking exact
    (straight, diagonal) step counts. Returns (status, straight, diag)."""
    cap = hf.shape[0]
    start = sy * Wp + sx
    goal = gy * Wp + gx
    g[start] = 0.0
    ga[start] = 0
    gb[start] = 0
    gep[start] = epoch
    heap_n = _heap_push(hf, hg, hid, 0, 0.0, 0.0, start)
    while heap_n > 0:
        f, _, node, heap_n = _heap_pop(hf, hg, hid, heap_n)
        if cep[node] == epoch:
            continue
        cep[node] = epoch
        if node == goal:
            return STATUS_FOUND, ga[node], gb[node]
        x = node % Wp
        y = node // Wp
        gcur = g[node]
        for k in range(8):
            nx = x + _DX[k]
            ny = y + _DY[k]
            nid = ny * Wp + nx
            if walk[nid] == 0:
                continue
            if k >= 4 and (walk[y * Wp + nx] == 0 or walk[ny * Wp + x] == 0):
                continue
            if k >= 4:
                ng = gcur + SQRT2
            else:
                ng = gcur + 1.0
            if gep[nid] != epoch or ng < g[nid]:
                g[nid] = ng
                ga[nid] = ga[node] + (1 if k < 4 else 0)
                gb[nid] = gb[node] + (1 if k >= 4 else 0)
                gep[nid] = epoch
                if heap_n >= cap:
                    return STATUS_HEAP_FULL, 0, 0
                heap_n = _heap_push(hf, hg, hid, heap_n, ng, 0.0, nid)
    return STATUS_NO_PATH, 0, 0
