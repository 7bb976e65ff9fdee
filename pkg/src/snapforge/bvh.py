"""Axis-aligned BVH over triangles with numba query kernels.

The tree is built once in numpy (median split on the longest centroid
axis) and flattened into arrays so the nearest-point, segment-cast, and
voxel-fill kernels can run JIT-compiled. Distances are exact point-to-
triangle-set distances; the BVH only prunes, it never approximates.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

LEAF_SIZE = 4
_STACK = 128  # traversal stack depth; ample for median-split trees


class TriangleBVH:
    """Flattened BVH; immutable after construction, safe to share."""

    def __init__(self, vertices: np.ndarray, triangles: np.ndarray):
        if len(triangles) == 0:
            raise ValueError("empty mesh")
        self.tri_a = np.ascontiguousarray(vertices[triangles[:, 0]], dtype=np.float64)
        self.tri_b = np.ascontiguousarray(vertices[triangles[:, 1]], dtype=np.float64)
        self.tri_c = np.ascontiguousarray(vertices[triangles[:, 2]], dtype=np.float64)
        (
            self.node_lo,
            self.node_hi,
            self.node_left,
            self.node_right,
            self.node_start,
            self.node_count,
            self.order,
        ) = _build(self.tri_a, self.tri_b, self.tri_c)

    def nearest(self, point):
        """(triangle index, distance, closest point, barycentric coords)."""
        p = np.asarray(point, dtype=np.float64)
        tri, d2, cx, cy, cz, bu, bv, bw = _nearest(
            p[0], p[1], p[2], *self._args()
        )
        return (
            int(tri),
            float(np.sqrt(d2)),
            np.array([cx, cy, cz]),
            np.array([bu, bv, bw]),
        )

    def nearest_raw(self, x: float, y: float, z: float):
        """Allocation-free variant for hot loops:
        (tri, dist_sq, cx, cy, cz, bu, bv, bw)."""
        return _nearest(x, y, z, *self._args())

    def nearest_batch(self, points):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        return _nearest_batch(pts, *self._args())

    def segment_hit(self, p0, p1):
        """First intersection of segment p0->p1; (tri, t, u, v) or None."""
        p0 = np.asarray(p0, dtype=np.float64)
        p1 = np.asarray(p1, dtype=np.float64)
        tri, t, u, v = _segment_hit(
            p0[0], p0[1], p0[2], p1[0], p1[1], p1[2], *self._args()
        )
        if tri < 0:
            return None
        return int(tri), float(t), float(u), float(v)

    def fill_distance_grid(self, origin, spacing, dims):
        """Exact nearest-surface distance at every grid node."""
        origin = np.asarray(origin, dtype=np.float64)
        return _fill_grid(
            origin[0],
            origin[1],
            origin[2],
            float(spacing),
            int(dims[0]),
            int(dims[1]),
            int(dims[2]),
            *self._args(),
        )

    def _args(self):
        args = self.__dict__.get("_args_cache")
        if args is None:
            args = (
                self.node_lo,
                self.node_hi,
                self.node_left,
                self.node_right,
                self.node_start,
                self.node_count,
                self.order,
                self.tri_a,
                self.tri_b,
                self.tri_c,
            )
            self.__dict__["_args_cache"] = args
        return args


def _build(tri_a, tri_b, tri_c):
    m = len(tri_a)
    lo = np.minimum(np.minimum(tri_a, tri_b), tri_c)
    hi = np.maximum(np.maximum(tri_a, tri_b), tri_c)
    centroid = (tri_a + tri_b + tri_c) / 3.0
    order = np.arange(m, dtype=np.int64)

    node_lo, node_hi = [], []
    node_left, node_right = [], []
    node_start, node_count = [], []

    def new_node():
        node_lo.append(None)
        node_hi.append(None)
        node_left.append(-1)
        node_right.append(-1)
        node_start.append(0)
        node_count.append(0)
        return len(node_lo) - 1

    stack = [(new_node(), 0, m)]
    while stack:
        node, start, end = stack.pop()
        idx = order[start:end]
        node_lo[node] = lo[idx].min(axis=0)
        node_hi[node] = hi[idx].max(axis=0)
        if end - start <= LEAF_SIZE:
            node_start[node] = start
            node_count[node] = end - start
            continue
        cen = centroid[idx]
        axis = int(np.argmax(cen.max(axis=0) - cen.min(axis=0)))
        mid = (end - start) // 2
        part = np.argpartition(cen[:, axis], mid)
        order[start:end] = idx[part]
        left, right = new_node(), new_node()
        node_left[node] = left
        node_right[node] = right
        stack.append((left, start, start + mid))
        stack.append((right, start + mid, end))

    return (
        np.ascontiguousarray(node_lo, dtype=np.float64),
        np.ascontiguousarray(node_hi, dtype=np.float64),
        np.asarray(node_left, dtype=np.int64),
        np.asarray(node_right, dtype=np.int64),
        np.asarray(node_start, dtype=np.int64),
        np.asarray(node_count, dtype=np.int64),
        order,
    )


@njit(cache=True, inline="always")
def _aabb_dist_sq(lo, hi, node, px, py, pz):
    d = 0.0
    v = px
    if v < lo[node, 0]:
        d += (lo[node, 0] - v) ** 2
    elif v > hi[node, 0]:
        d += (v - hi[node, 0]) ** 2
    v = py
    if v < lo[node, 1]:
        d += (lo[node, 1] - v) ** 2
    elif v > hi[node, 1]:
        d += (v - hi[node, 1]) ** 2
    v = pz
    if v < lo[node, 2]:
        d += (lo[node, 2] - v) ** 2
    elif v > hi[node, 2]:
        d += (v - hi[node, 2]) ** 2
    return d


@njit(cache=True)
def _closest_on_triangle(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz):
    """Closest point on a triangle; returns (dist_sq, qx, qy, qz, u, v, w)."""
    abx, aby, abz = bx - ax, by - ay, bz - az
    acx, acy, acz = cx - ax, cy - ay, cz - az
    apx, apy, apz = px - ax, py - ay, pz - az

    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        dx, dy, dz = px - ax, py - ay, pz - az
        return dx * dx + dy * dy + dz * dz, ax, ay, az, 1.0, 0.0, 0.0

    bpx, bpy, bpz = px - bx, py - by, pz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        dx, dy, dz = px - bx, py - by, pz - bz
        return dx * dx + dy * dy + dz * dz, bx, by, bz, 0.0, 1.0, 0.0

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        t = d1 / (d1 - d3)
        qx, qy, qz = ax + t * abx, ay + t * aby, az + t * abz
        dx, dy, dz = px - qx, py - qy, pz - qz
        return dx * dx + dy * dy + dz * dz, qx, qy, qz, 1.0 - t, t, 0.0

    cpx, cpy, cpz = px - cx, py - cy, pz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        dx, dy, dz = px - cx, py - cy, pz - cz
        return dx * dx + dy * dy + dz * dz, cx, cy, cz, 0.0, 0.0, 1.0

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        t = d2 / (d2 - d6)
        qx, qy, qz = ax + t * acx, ay + t * acy, az + t * acz
        dx, dy, dz = px - qx, py - qy, pz - qz
        return dx * dx + dy * dy + dz * dz, qx, qy, qz, 1.0 - t, 0.0, t

    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        t = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        qx = bx + t * (cx - bx)
        qy = by + t * (cy - by)
        qz = bz + t * (cz - bz)
        dx, dy, dz = px - qx, py - qy, pz - qz
        return dx * dx + dy * dy + dz * dz, qx, qy, qz, 0.0, 1.0 - t, t

    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    qx = ax + abx * v + acx * w
    qy = ay + aby * v + acy * w
    qz = az + abz * v + acz * w
    dx, dy, dz = px - qx, py - qy, pz - qz
    return dx * dx + dy * dy + dz * dz, qx, qy, qz, 1.0 - v - w, v, w


@njit(cache=True)
def _nearest(
    px, py, pz, lo, hi, left, right, start, count, order, tri_a, tri_b, tri_c
):
    stack = np.empty(_STACK, dtype=np.int64)
    stack[0] = 0
    top = 1
    best_d2 = np.inf
    best_tri = -1
    qx = qy = qz = 0.0
    bu, bv, bw = 0.0, 0.0, 0.0
    while top > 0:
        top -= 1
        node = stack[top]
        if _aabb_dist_sq(lo, hi, node, px, py, pz) >= best_d2:
            continue
        if count[node] > 0:
            for k in range(start[node], start[node] + count[node]):
                t = order[k]
                d2, x, y, z, u, v, w = _closest_on_triangle(
                    px,
                    py,
                    pz,
                    tri_a[t, 0],
                    tri_a[t, 1],
                    tri_a[t, 2],
                    tri_b[t, 0],
                    tri_b[t, 1],
                    tri_b[t, 2],
                    tri_c[t, 0],
                    tri_c[t, 1],
                    tri_c[t, 2],
                )
                if d2 < best_d2:
                    best_d2 = d2
                    best_tri = t
                    qx, qy, qz = x, y, z
                    bu, bv, bw = u, v, w
        else:
            l, r = left[node], right[node]
            dl = _aabb_dist_sq(lo, hi, l, px, py, pz)
            dr = _aabb_dist_sq(lo, hi, r, px, py, pz)
            if dl < dr:  # push farther child first, visit nearer first
                if dr < best_d2:
                    stack[top] = r
                    top += 1
                if dl < best_d2:
                    stack[top] = l
                    top += 1
            else:
                if dl < best_d2:
                    stack[top] = l
                    top += 1
                if dr < best_d2:
                    stack[top] = r
                    top += 1
    return best_tri, best_d2, qx, qy, qz, bu, bv, bw


@njit(cache=True, parallel=True)
def _nearest_batch(
    pts, lo, hi, left, right, start, count, order, tri_a, tri_b, tri_c
):
    n = pts.shape[0]
    dists = np.empty(n, dtype=np.float64)
    closest = np.empty((n, 3), dtype=np.float64)
    tris = np.empty(n, dtype=np.int64)
    barys = np.empty((n, 3), dtype=np.float64)
    for i in prange(n):
        tri, d2, x, y, z, u, v, w = _nearest(
            pts[i, 0],
            pts[i, 1],
            pts[i, 2],
            lo,
            hi,
            left,
            right,
            start,
            count,
            order,
            tri_a,
            tri_b,
            tri_c,
        )
        dists[i] = np.sqrt(d2)
        closest[i, 0], closest[i, 1], closest[i, 2] = x, y, z
        tris[i] = tri
        barys[i, 0], barys[i, 1], barys[i, 2] = u, v, w
    return dists, closest, tris, barys


@njit(cache=True, parallel=True)
def _fill_grid(
    ox, oy, oz, h, nx, ny, nz, lo, hi, left, right, start, count, order,
    tri_a, tri_b, tri_c,
):
    values = np.empty((nx, ny, nz), dtype=np.float32)
    for flat in prange(nx * ny * nz):
        ix = flat // (ny * nz)
        iy = (flat // nz) % ny
        iz = flat % nz
        _, d2, _, _, _, _, _, _ = _nearest(
            ox + ix * h,
            oy + iy * h,
            oz + iz * h,
            lo,
            hi,
            left,
            right,
            start,
            count,
            order,
            tri_a,
            tri_b,
            tri_c,
        )
        values[ix, iy, iz] = np.sqrt(d2)
    return values


@njit(cache=True, inline="always")
def _aabb_segment_enter(lo, hi, node, px, py, pz, dx, dy, dz, t_max):
    """Entry parameter of the segment into the node box, or -1 if missed."""
    t0 = 0.0
    t1 = t_max
    for k in range(3):
        if k == 0:
            o, d = px, dx
        elif k == 1:
            o, d = py, dy
        else:
            o, d = pz, dz
        if abs(d) < 1e-300:
            if o < lo[node, k] or o > hi[node, k]:
                return -1.0
        else:
            inv = 1.0 / d
            ta = (lo[node, k] - o) * inv
            tb = (hi[node, k] - o) * inv
            if ta > tb:
                ta, tb = tb, ta
            if ta > t0:
                t0 = ta
            if tb < t1:
                t1 = tb
            if t0 > t1:
                return -1.0
    return t0


@njit(cache=True)
def _segment_hit(
    px, py, pz, qx, qy, qz, lo, hi, left, right, start, count, order,
    tri_a, tri_b, tri_c,
):
    """Earliest Moller-Trumbore hit along segment p->q; tri = -1 if none."""
    dx, dy, dz = qx - px, qy - py, qz - pz
    best_t = 1.0
    best_tri = -1
    best_u = 0.0
    best_v = 0.0
    eps = 1e-14
    stack = np.empty(_STACK, dtype=np.int64)
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top]
        enter = _aabb_segment_enter(lo, hi, node, px, py, pz, dx, dy, dz, best_t)
        if enter < 0.0:
            continue
        if count[node] > 0:
            for k in range(start[node], start[node] + count[node]):
                t = order[k]
                e1x = tri_b[t, 0] - tri_a[t, 0]
                e1y = tri_b[t, 1] - tri_a[t, 1]
                e1z = tri_b[t, 2] - tri_a[t, 2]
                e2x = tri_c[t, 0] - tri_a[t, 0]
                e2y = tri_c[t, 1] - tri_a[t, 1]
                e2z = tri_c[t, 2] - tri_a[t, 2]
                hx = dy * e2z - dz * e2y
                hy = dz * e2x - dx * e2z
                hz = dx * e2y - dy * e2x
                det = e1x * hx + e1y * hy + e1z * hz
                if -eps < det < eps:
                    continue
                inv = 1.0 / det
                sx = px - tri_a[t, 0]
                sy = py - tri_a[t, 1]
                sz = pz - tri_a[t, 2]
                u = (sx * hx + sy * hy + sz * hz) * inv
                if u < -1e-12 or u > 1.0 + 1e-12:
                    continue
                qcx = sy * e1z - sz * e1y
                qcy = sz * e1x - sx * e1z
                qcz = sx * e1y - sy * e1x
                v = (dx * qcx + dy * qcy + dz * qcz) * inv
                if v < -1e-12 or u + v > 1.0 + 1e-12:
                    continue
                thit = (e2x * qcx + e2y * qcy + e2z * qcz) * inv
                if 0.0 <= thit < best_t:
                    best_t = thit
                    best_tri = t
                    best_u = u
                    best_v = v
        else:
            l, r = left[node], right[node]
            stack[top] = l
            top += 1
            stack[top] = r
            top += 1
    return best_tri, best_t, best_u, best_v


@njit(cache=True, inline="always")
def _smooth_normal(tri, bu, bv, bw, tri_ids, vert_normals):
    i0, i1, i2 = tri_ids[tri, 0], tri_ids[tri, 1], tri_ids[tri, 2]
    nx = bu * vert_normals[i0, 0] + bv * vert_normals[i1, 0] + bw * vert_normals[i2, 0]
    ny = bu * vert_normals[i0, 1] + bv * vert_normals[i1, 1] + bw * vert_normals[i2, 1]
    nz = bu * vert_normals[i0, 2] + bv * vert_normals[i1, 2] + bw * vert_normals[i2, 2]
    length = np.sqrt(nx * nx + ny * ny + nz * nz)
    if length < 1e-300:
        return 0.0, 0.0, 1.0
    return nx / length, ny / length, nz / length


@njit(cache=True)
def proxy_slide(
    px, py, pz, gx, gy, gz, iters, lift, tol, tri_ids, vert_normals,
    lo, hi, left, right, start, count, order, tri_a, tri_b, tri_c,
):
    """God-object proxy update toward a stylus goal, all inside JIT.

    Free motion unless the (slightly lifted) path crosses the surface;
    otherwise iterative tangent-plane projection with lifted casts so the
    slide cannot tunnel through neighboring geometry.
    """
    tri, d2, qx, qy, qz, bu, bv, bw = _nearest(
        px, py, pz, lo, hi, left, right, start, count, order, tri_a, tri_b, tri_c
    )
    sx, sy, sz = px, py, pz
    if np.sqrt(d2) < lift:  # resting on the surface: nudge off before casting
        nx, ny, nz = _smooth_normal(tri, bu, bv, bw, tri_ids, vert_normals)
        sx = qx + lift * nx
        sy = qy + lift * ny
        sz = qz + lift * nz

    hit_tri, t, _, _ = _segment_hit(
        sx, sy, sz, gx, gy, gz, lo, hi, left, right, start, count, order,
        tri_a, tri_b, tri_c,
    )
    if hit_tri < 0:
        return gx, gy, gz

    cx = sx + t * (gx - sx)
    cy = sy + t * (gy - sy)
    cz = sz + t * (gz - sz)
    tri, d2, px, py, pz, bu, bv, bw = _nearest(
        cx, cy, cz, lo, hi, left, right, start, count, order, tri_a, tri_b, tri_c
    )
    tol2 = tol * tol
    for _ in range(iters):
        nx, ny, nz = _smooth_normal(tri, bu, bv, bw, tri_ids, vert_normals)
        dxg, dyg, dzg = gx - px, gy - py, gz - pz
        dn = dxg * nx + dyg * ny + dzg * nz
        tx = px + (dxg - dn * nx)
        ty = py + (dyg - dn * ny)
        tz = pz + (dzg - dn * nz)
        step2 = (tx - px) ** 2 + (ty - py) ** 2 + (tz - pz) ** 2
        if step2 < tol2:
            break
        ax, ay, az = px + lift * nx, py + lift * ny, pz + lift * nz
        bx, by, bz = tx + lift * nx, ty + lift * ny, tz + lift * nz
        cast_tri, ct, _, _ = _segment_hit(
            ax, ay, az, bx, by, bz, lo, hi, left, right, start, count, order,
            tri_a, tri_b, tri_c,
        )
        if cast_tri < 0:
            wx, wy, wz = tx, ty, tz
        else:
            wx = ax + ct * (bx - ax)
            wy = ay + ct * (by - ay)
            wz = az + ct * (bz - az)
        tri, d2, nx2, ny2, nz2, bu, bv, bw = _nearest(
            wx, wy, wz, lo, hi, left, right, start, count, order,
            tri_a, tri_b, tri_c,
        )
        moved2 = (nx2 - px) ** 2 + (ny2 - py) ** 2 + (nz2 - pz) ** 2
        px, py, pz = nx2, ny2, nz2
        if moved2 < tol2:
            break
    return px, py, pz


@njit(cache=True)
def trilinear(values, ox, oy, oz, h, px, py, pz):
    """Trilinear interpolation on a node grid; inf outside the node hull."""
    nx, ny, nz = values.shape
    gx = (px - ox) / h
    gy = (py - oy) / h
    gz = (pz - oz) / h
    if gx < 0.0 or gy < 0.0 or gz < 0.0:
        return np.inf
    if gx > nx - 1.0 or gy > ny - 1.0 or gz > nz - 1.0:
        return np.inf
    ix = min(int(gx), nx - 2)
    iy = min(int(gy), ny - 2)
    iz = min(int(gz), nz - 2)
    fx = gx - ix
    fy = gy - iy
    fz = gz - iz
    c00 = values[ix, iy, iz] * (1 - fx) + values[ix + 1, iy, iz] * fx
    c10 = values[ix, iy + 1, iz] * (1 - fx) + values[ix + 1, iy + 1, iz] * fx
    c01 = values[ix, iy, iz + 1] * (1 - fx) + values[ix + 1, iy, iz + 1] * fx
    c11 = values[ix, iy + 1, iz + 1] * (1 - fx) + values[ix + 1, iy + 1, iz + 1] * fx
    c0 = c00 * (1 - fy) + c10 * fy
    c1 = c01 * (1 - fy) + c11 * fy
    return c0 * (1 - fz) + c1 * fz


@njit(cache=True)
def trilinear_gradient(values, ox, oy, oz, h, px, py, pz):
    """Central-difference gradient of the interpolant at one-voxel offsets;
    one-sided next to the field borders. Returns (ok, gx, gy, gz)."""
    nx, ny, nz = values.shape
    hix = ox + (nx - 1) * h
    hiy = oy + (ny - 1) * h
    hiz = oz + (nz - 1) * h
    if not (ox <= px <= hix and oy <= py <= hiy and oz <= pz <= hiz):
        return False, 0.0, 0.0, 0.0
    g = np.empty(3, dtype=np.float64)
    for axis in range(3):
        if axis == 0:
            ax, bx = px - h, px + h
            lo_ok = ax >= ox
            hi_ok = bx <= hix
            f_lo = trilinear(values, ox, oy, oz, h, ax, py, pz)
            f_hi = trilinear(values, ox, oy, oz, h, bx, py, pz)
        elif axis == 1:
            ay, by = py - h, py + h
            lo_ok = ay >= oy
            hi_ok = by <= hiy
            f_lo = trilinear(values, ox, oy, oz, h, px, ay, pz)
            f_hi = trilinear(values, ox, oy, oz, h, px, by, pz)
        else:
            az, bz = pz - h, pz + h
            lo_ok = az >= oz
            hi_ok = bz <= hiz
            f_lo = trilinear(values, ox, oy, oz, h, px, py, az)
            f_hi = trilinear(values, ox, oy, oz, h, px, py, bz)
        f_c = trilinear(values, ox, oy, oz, h, px, py, pz)
        if lo_ok and hi_ok:
            g[axis] = (f_hi - f_lo) / (2.0 * h)
        elif hi_ok:
            g[axis] = (f_hi - f_c) / h
        elif lo_ok:
            g[axis] = (f_c - f_lo) / h
        else:
            g[axis] = 0.0
    return True, g[0], g[1], g[2]
