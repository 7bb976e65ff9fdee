"""Band ground-truth textures and brushed-curve recording in UV space.

Bands are offsets of a medial polyline; brushing tags the texels under
the pointer, linking consecutive pointer positions with a conservative
segment rasterization so fast strokes never leave gaps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import pgm
from .distfield import mesh_bvh, nearest_surface_point
from .simulator import TrialLog
from .surfacegen import TriMesh


@dataclass
class BandSpec:
    polyline: np.ndarray  # (n, 2) ordered UV points of the medial axis
    half_width: int  # band half-width in texels
    width: int
    height: int

    def validate(self):
        poly = np.asarray(self.polyline, dtype=np.float64)
        if poly.ndim != 2 or poly.shape[1] != 2 or len(poly) < 2:
            raise ValueError("polyline needs at least two UV points")
        if (poly < 0.0).any() or (poly > 1.0).any():
            raise ValueError("polyline exits the unit square")
        if self.half_width < 1:
            raise ValueError("half_width must be >= 1 texel")
        return self

    def to_json(self) -> str:
        return json.dumps(
            {
                "polyline": np.asarray(self.polyline).tolist(),
                "half_width": self.half_width,
                "width": self.width,
                "height": self.height,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "BandSpec":
        d = json.loads(text)
        return cls(
            np.asarray(d["polyline"], dtype=np.float64),
            int(d["half_width"]),
            int(d["width"]),
            int(d["height"]),
        ).validate()


@dataclass
class BrushTexture:
    width: int
    height: int
    tags: np.ndarray = None  # (height, width) bool
    skipped: int = 0  # brush frames dropped for lack of a surface hit

    def __post_init__(self):
        if self.tags is None:
            self.tags = np.zeros((self.height, self.width), dtype=bool)


def texel_of(u: float, v: float, width: int, height: int) -> tuple[int, int]:
    """Containing texel (col, row) of a UV point; the 1.0 edge maps inward."""
    col = min(int(u * width), width - 1)
    row = min(int(v * height), height - 1)
    return col, row


def _supercover(x0: float, y0: float, x1: float, y1: float, w: int, h: int):
    """Every texel whose half-open box [j, j+1) x [i, i+1) the continuous
    segment passes through (coordinates in texel units).

    This exact cover keeps strokes 8-connected regardless of segment
    length (Bresenham would skip corner texels) and is scale-consistent:
    doubling the resolution doubles the coordinates exactly, so every
    coarse texel crossed keeps a crossed descendant.
    """
    cx = min(int(x0), w - 1)
    cy = min(int(y0), h - 1)
    ex = min(int(x1), w - 1)
    ey = min(int(y1), h - 1)
    cells = [(cx, cy)]
    dx, dy = x1 - x0, y1 - y0
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    t_max_x = ((cx + (sx > 0)) - x0) / dx if dx != 0 else np.inf
    t_max_y = ((cy + (sy > 0)) - y0) / dy if dy != 0 else np.inf
    t_dx = abs(1.0 / dx) if dx != 0 else np.inf
    t_dy = abs(1.0 / dy) if dy != 0 else np.inf
    for _ in range(2 * (w + h) + 4):
        if (cx, cy) == (ex, ey):
            break
        if t_max_x < t_max_y:
            cx += sx
            t_max_x += t_dx
            cells.append((cx, cy))
        elif t_max_y < t_max_x:
            cy += sy
            t_max_y += t_dy
            cells.append((cx, cy))
        else:
            # exact corner crossing; half-open boxes make the corner point
            # belong to the +,+ box, so same-sign steps jump diagonally
            # while mixed signs touch the corner box on the way
            if sx == sy:
                cx += sx
                cy += sy
                t_max_x += t_dx
                t_max_y += t_dy
                cells.append((cx, cy))
            elif sx > 0:
                cx += sx
                t_max_x += t_dx
                cells.append((cx, cy))
                if (cx, cy) == (ex, ey):
                    break
                cy += sy
                t_max_y += t_dy
                cells.append((cx, cy))
            else:
                cy += sy
                t_max_y += t_dy
                cells.append((cx, cy))
                if (cx, cy) == (ex, ey):
                    break
                cx += sx
                t_max_x += t_dx
                cells.append((cx, cy))
    return cells


def brush_segment(tex: BrushTexture, uv_prev, uv_cur, erase: bool = False):
    """Tag (or untag) every texel on the segment between two UV samples."""
    for uv in (uv_prev, uv_cur):
        u, v = float(uv[0]), float(uv[1])
        if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
            raise ValueError("UV sample outside the unit square")
    value = not erase
    cells = _supercover(
        float(uv_prev[0]) * tex.width,
        float(uv_prev[1]) * tex.height,
        float(uv_cur[0]) * tex.width,
        float(uv_cur[1]) * tex.height,
        tex.width,
        tex.height,
    )
    for x, y in cells:
        tex.tags[y, x] = value
    return tex


def make_band_texture(spec: BandSpec) -> tuple[np.ndarray, np.ndarray]:
    """(band mask, medial mask) for a band spec.

    The band holds every texel whose center lies within half_width texels
    (Euclidean) of the polyline; the medial mask is the rasterized
    polyline itself.
    """
    spec.validate()
    w, h = spec.width, spec.height
    poly = np.asarray(spec.polyline, dtype=np.float64)
    # texel centers and polyline in the same continuous texel frame
    cx, cy = np.meshgrid(np.arange(w) + 0.5, np.arange(h) + 0.5)
    pts = poly * np.array([w, h])

    d2 = np.full((h, w), np.inf)
    for k in range(len(pts) - 1):
        a, b = pts[k], pts[k + 1]
        ab = b - a
        denom = float(ab @ ab)
        dx, dy = cx - a[0], cy - a[1]
        if denom == 0.0:
            seg = dx * dx + dy * dy
        else:
            t = np.clip((dx * ab[0] + dy * ab[1]) / denom, 0.0, 1.0)
            ex = dx - t * ab[0]
            ey = dy - t * ab[1]
            seg = ex * ex + ey * ey
        np.minimum(d2, seg, out=d2)
    band = d2 <= float(spec.half_width) ** 2

    medial = BrushTexture(w, h)
    for k in range(len(poly) - 1):
        brush_segment(medial, poly[k], poly[k + 1])
    return band, medial.tags


def surface_uv(mesh: TriMesh, point) -> np.ndarray:
    """UV at the nearest surface point (barycentric vertex-UV blend)."""
    tri, _, _, bary = mesh_bvh(mesh).nearest(point)
    ids = mesh.triangles[tri]
    uv = (
        bary[0] * mesh.uvs[ids[0]]
        + bary[1] * mesh.uvs[ids[1]]
        + bary[2] * mesh.uvs[ids[2]]
    )
    return np.clip(uv, 0.0, 1.0)


def record_brush(log: TrialLog, mesh: TriMesh, dims: tuple[int, int]) -> BrushTexture:
    """Replay the brushing frames of a trial log into a texture.

    The pointer's surface point each frame is the logged interaction point
    p (proxy contact in haptic modes, pointer cast in no_haptic); frames
    whose p is not on the surface are skipped and counted. Consecutive
    valid samples within one stroke are linked by segment interpolation.
    """
    w, h = dims
    tex = BrushTexture(w, h)
    hit_tol = 1e-3 * mesh.aabb_diagonal()
    prev_uv = None
    for i in range(len(log)):
        if not bool(log.brush[i]):
            prev_uv = None  # stroke break
            continue
        hit = nearest_surface_point(mesh, log.p[i])
        if hit.distance > hit_tol:
            tex.skipped += 1
            continue
        uv = surface_uv(mesh, log.p[i])
        brush_segment(tex, uv if prev_uv is None else prev_uv, uv)
        prev_uv = uv
    return tex


def save_brush_texture(path, tex_or_mask) -> None:
    mask = tex_or_mask.tags if isinstance(tex_or_mask, BrushTexture) else tex_or_mask
    pgm.write_mask(path, mask)


def load_brush_texture(path) -> BrushTexture:
    mask = pgm.read_mask(path)
    h, w = mask.shape
    return BrushTexture(w, h, mask)
