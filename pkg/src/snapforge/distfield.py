"""Voxel-grid distance fields and nearest-surface queries.

The field stores exact unsigned point-to-mesh distances at the nodes of a
regular grid spanning the mesh AABB isotropically scaled by 1.4 (degenerate
axes are padded so flat surfaces still get room for the snap zone above
them). Queries interpolate trilinearly; the snap direction is the negated,
normalized gradient of the interpolant.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from . import bvh as _bvh
from .surfacegen import TriMesh

AABB_SCALE = 1.4
DEFAULT_RESOLUTION = 64
GRAD_EPS_FACTOR = 1e-6  # gradient magnitudes below eps*spacing are ambiguous

SDF_MAGIC = b"SDF1"


@dataclass
class DistanceField:
    dims: tuple  # (nx, ny, nz) node counts
    origin: np.ndarray  # world position of node (0, 0, 0)
    spacing: float  # world units between nodes, same on all axes
    values: np.ndarray  # (nx, ny, nz) float32 unsigned distances

    def bounds(self):
        lo = self.origin
        hi = self.origin + (np.asarray(self.dims) - 1) * self.spacing
        return lo, hi

    def contains(self, point) -> bool:
        lo, hi = self.bounds()
        p = np.asarray(point)
        return bool((p >= lo).all() and (p <= hi).all())


@dataclass
class SurfaceHit:
    point: np.ndarray  # nearest point on the mesh
    normal: np.ndarray  # interpolated vertex normal there, unit length
    distance: float
    triangle: int = -1


def mesh_bvh(mesh: TriMesh) -> _bvh.TriangleBVH:
    """Per-mesh BVH, built once and cached on the mesh instance."""
    tree = mesh.__dict__.get("_bvh")
    if tree is None:
        tree = _bvh.TriangleBVH(mesh.vertices, mesh.triangles)
        mesh.__dict__["_bvh"] = tree
    return tree


def field_bounds(mesh: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """Mesh AABB isotropically scaled by 1.4 about its center; near-flat
    axes are padded to 20% of the longest scaled extent per side so the
    snap zone above open surfaces stays inside the field."""
    lo, hi = mesh.aabb()
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) * AABB_SCALE
    pad = 0.2 * max(2.0 * half.max(), 1e-12)
    half = np.maximum(half, pad)
    return center - half, center + half


def build_distance_field(
    mesh: TriMesh, resolution: int = DEFAULT_RESOLUTION
) -> DistanceField:
    """Exact per-node distances over the scaled AABB.

    ``resolution`` is the node count along the longest axis (>= 8). Honors
    SNAPFORGE_THREADS for the parallel fill; the result is independent of
    the thread count.
    """
    if len(mesh.triangles) == 0:
        raise ValueError("empty mesh")
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    lo, hi = field_bounds(mesh)
    extent = hi - lo
    spacing = float(extent.max()) / (resolution - 1)
    dims = tuple(int(np.ceil(e / spacing)) + 1 for e in extent)

    threads = os.environ.get("SNAPFORGE_THREADS")
    if threads:
        import numba

        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))

    values = mesh_bvh(mesh).fill_distance_grid(lo, spacing, dims)
    return DistanceField(dims, lo, spacing, values)


def sample_distance(df: DistanceField, point) -> float:
    """Trilinear distance at ``point``; +inf outside the field (no-snap)."""
    p = np.asarray(point, dtype=np.float64)
    return float(
        _bvh.trilinear(
            df.values,
            df.origin[0],
            df.origin[1],
            df.origin[2],
            df.spacing,
            p[0],
            p[1],
            p[2],
        )
    )


def sample_direction(df: DistanceField, point):
    """Unit direction toward the surface (negated field gradient).

    Returns None when the point is outside the field or the gradient is
    ambiguous (medial-axis neighborhood, magnitude < 1e-6 * spacing).
    """
    p = np.asarray(point, dtype=np.float64)
    ok, gx, gy, gz = _bvh.trilinear_gradient(
        df.values,
        df.origin[0],
        df.origin[1],
        df.origin[2],
        df.spacing,
        p[0],
        p[1],
        p[2],
    )
    if not ok:
        return None
    g = np.array([gx, gy, gz])
    norm = np.linalg.norm(g)
    if norm < GRAD_EPS_FACTOR * df.spacing:
        return None
    return -g / norm


def nearest_surface_point(mesh: TriMesh, point) -> SurfaceHit:
    """Exact closest point over all triangles, with the smooth normal
    interpolated at its barycentric coordinates."""
    tri, dist, closest, bary = mesh_bvh(mesh).nearest(point)
    ids = mesh.triangles[tri]
    normal = (
        bary[0] * mesh.normals[ids[0]]
        + bary[1] * mesh.normals[ids[1]]
        + bary[2] * mesh.normals[ids[2]]
    )
    norm = np.linalg.norm(normal)
    if norm < 1e-12:  # opposing vertex normals cancelled; use the face plane
        a, b, c = (mesh.vertices[i] for i in ids)
        normal = np.cross(b - a, c - a)
        norm = np.linalg.norm(normal)
    return SurfaceHit(closest, normal / norm, dist, tri)


def save_distance_field(path, df: DistanceField) -> None:
    with open(path, "wb") as fh:
        fh.write(SDF_MAGIC)
        fh.write(struct.pack("<3I", *df.dims))
        fh.write(struct.pack("<4d", *df.origin, df.spacing))
        fh.write(np.ascontiguousarray(df.values, dtype="<f4").tobytes())


def load_distance_field(path) -> DistanceField:
    with open(path, "rb") as fh:
        if fh.read(4) != SDF_MAGIC:
            raise ValueError(f"{path}: not a distance-field cache")
        dims = struct.unpack("<3I", fh.read(12))
        ox, oy, oz, spacing = struct.unpack("<4d", fh.read(32))
        count = dims[0] * dims[1] * dims[2]
        data = np.frombuffer(fh.read(count * 4), dtype="<f4")
        if data.size != count:
            raise ValueError(f"{path}: truncated distance-field cache")
    values = data.reshape(dims).astype(np.float32)
    return DistanceField(dims, np.array([ox, oy, oz]), spacing, values)
