"""Procedural surfaces, scalar textures, and triangle-mesh conversion.

Height fields are built by weighted blending of noise/analytic layers
(gradient noise, 2-D Gaussians, sinusoids, constants), then upsampled and
triangulated into render/simulation-ready meshes with smooth normals.
External meshes load from Wavefront OBJ. Scalar textures are anisotropic
Gaussian mixtures banded into seven contour levels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pgm

LAYER_KINDS = ("perlin", "gaussian2d", "sinusoid", "constant")

_FADE = lambda t: t * t * t * (t * (t * 6.0 - 15.0) + 10.0)  # noqa: E731
# 8 unit-ish gradient directions for 2-D gradient noise
_GRADS = np.array(
    [(1, 1), (-1, 1), (1, -1), (-1, -1), (1, 0), (-1, 0), (0, 1), (0, -1)],
    dtype=np.float64,
)


# ---------------------------------------------------------------------------
# domain types


@dataclass
class HeightField:
    """Scalar elevation grid; elevations[i, j] is the height at node
    (x = j * cell_size, y = i * cell_size)."""

    width: int
    height: int
    elevations: np.ndarray  # (height, width) float64, world units
    cell_size: float = 1.0

    def validate(self):
        if self.width < 2 or self.height < 2:
            raise ValueError("height field needs at least 2x2 nodes")
        if self.elevations.shape != (self.height, self.width):
            raise ValueError("elevation grid shape mismatch")
        if not np.isfinite(self.elevations).all():
            raise ValueError("non-finite elevation")
        return self


@dataclass
class LayerSpec:
    kind: str
    params: dict
    weight: float = 1.0


@dataclass
class HeightFieldSpec:
    layers: list[LayerSpec]
    seed: int = 0
    width: int = 100
    height: int = 100
    cell_size: float = 1.0

    def validate(self):
        if not self.layers:
            raise ValueError("spec needs at least one layer")
        for layer in self.layers:
            if layer.kind not in LAYER_KINDS:
                raise ValueError(f"unknown layer kind: {layer.kind!r}")
            if not math.isfinite(layer.weight):
                raise ValueError("layer weight must be finite")
            for key, val in layer.params.items():
                arr = np.asarray(val, dtype=np.float64)
                if not np.isfinite(arr).all():
                    raise ValueError(f"non-finite parameter {key!r}")
        return self

    def to_json(self) -> str:
        return json.dumps(
            {
                "layers": [
                    {"kind": l.kind, "params": l.params, "weight": l.weight}
                    for l in self.layers
                ],
                "seed": self.seed,
                "width": self.width,
                "height": self.height,
                "cell_size": self.cell_size,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "HeightFieldSpec":
        data = json.loads(text)
        layers = [
            LayerSpec(l["kind"], l.get("params", {}), l.get("weight", 1.0))
            for l in data["layers"]
        ]
        return cls(
            layers=layers,
            seed=data.get("seed", 0),
            width=data.get("width", 100),
            height=data.get("height", 100),
            cell_size=data.get("cell_size", 1.0),
        )


@dataclass
class TriMesh:
    """Indexed triangle mesh with per-vertex smooth normals and UVs."""

    vertices: np.ndarray  # (n, 3) float64
    triangles: np.ndarray  # (m, 3) int
    normals: np.ndarray  # (n, 3) unit vectors
    uvs: np.ndarray  # (n, 2) in [0, 1]^2
    warnings: list = field(default_factory=list)

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def aabb_diagonal(self) -> float:
        # cached: queried every servo tick, and meshes are treated as
        # immutable once simulation/queries start
        diag = self.__dict__.get("_aabb_diag")
        if diag is None:
            lo, hi = self.aabb()
            diag = float(np.linalg.norm(hi - lo))
            self.__dict__["_aabb_diag"] = diag
        return diag

    def triangle_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def validate(self, tol: float = 1e-6):
        n = len(self.vertices)
        if self.triangles.size and (
            self.triangles.min() < 0 or self.triangles.max() >= n
        ):
            raise ValueError("triangle index out of range")
        norms = np.linalg.norm(self.normals, axis=1)
        if not np.allclose(norms, 1.0, atol=tol):
            raise ValueError("non-unit vertex normal")
        if self.triangles.size and (self.triangle_areas() <= 0.0).any():
            raise ValueError("degenerate (zero-area) triangle")
        return self


@dataclass
class ScalarTexture:
    """Texel grid of a scalar function with its seven contour band edges."""

    width: int
    height: int
    values: np.ndarray  # (height, width)
    contour_levels: np.ndarray  # 7 ascending upper band edges

    def band_index(self, value) -> np.ndarray:
        """0..6, band k spans (levels[k-1], levels[k]], band 0 starts at min."""
        return np.searchsorted(self.contour_levels[:-1], value, side="left")


# ---------------------------------------------------------------------------
# height-field generation


def _perm_table(seed, layer_index) -> np.ndarray:
    rng = np.random.default_rng([int(seed), int(layer_index), 0x5EED])
    p = rng.permutation(256)
    return np.concatenate([p, p])


def _gradient_noise(u, v, perm):
    """Classic 2-D gradient noise on the doubled permutation table."""
    x0 = np.floor(u).astype(np.int64)
    y0 = np.floor(v).astype(np.int64)
    fx = u - x0
    fy = v - y0
    wx = _FADE(fx)
    wy = _FADE(fy)

    def corner(ix, iy, dx, dy):
        h = perm[perm[ix & 255] + (iy & 255)] & 7
        g = _GRADS[h]
        return g[..., 0] * dx + g[..., 1] * dy

    n00 = corner(x0, y0, fx, fy)
    n10 = corner(x0 + 1, y0, fx - 1.0, fy)
    n01 = corner(x0, y0 + 1, fx, fy - 1.0)
    n11 = corner(x0 + 1, y0 + 1, fx - 1.0, fy - 1.0)
    nx0 = n00 + wx * (n10 - n00)
    nx1 = n01 + wx * (n11 - n01)
    return nx0 + wy * (nx1 - nx0)


def _eval_layer(layer: LayerSpec, u, v, seed, layer_index):
    p = layer.params
    if layer.kind == "constant":
        return np.full_like(u, float(p.get("value", 0.0)))
    if layer.kind == "perlin":
        freq = float(p.get("frequency", 4.0))
        octaves = int(p.get("octaves", 1))
        persistence = float(p.get("persistence", 0.5))
        amplitude = float(p.get("amplitude", 1.0))
        perm = _perm_table(seed, layer_index)
        out = np.zeros_like(u)
        amp, f = 1.0, freq
        for _ in range(max(1, octaves)):
            out += amp * _gradient_noise(u * f, v * f, perm)
            amp *= persistence
            f *= 2.0
        return amplitude * out
    if layer.kind == "gaussian2d":
        cx, cy = p.get("center", (0.5, 0.5))
        sig = p.get("sigma", 0.1)
        sx, sy = (sig, sig) if np.isscalar(sig) else sig
        theta = float(p.get("theta", 0.0))
        amplitude = float(p.get("amplitude", 1.0))
        ct, st = math.cos(theta), math.sin(theta)
        du, dv = u - cx, v - cy
        a = ct * du + st * dv
        b = -st * du + ct * dv
        return amplitude * np.exp(-0.5 * ((a / sx) ** 2 + (b / sy) ** 2))
    if layer.kind == "sinusoid":
        fx, fy = p.get("frequency", (1.0, 0.0))
        phase = float(p.get("phase", 0.0))
        amplitude = float(p.get("amplitude", 1.0))
        return amplitude * np.sin(2.0 * math.pi * (fx * u + fy * v) + phase)
    raise ValueError(f"unknown layer kind: {layer.kind!r}")


def gen_heightfield(spec: HeightFieldSpec) -> HeightField:
    """Weighted blend of the spec's layers, evaluated on the node grid.

    Layers are sampled over the unit square (node j, i maps to
    u = j/(w-1), v = i/(h-1)), so the same spec rendered at different
    resolutions shows the same features. Deterministic in the seed.
    """
    spec.validate()
    u1 = np.linspace(0.0, 1.0, spec.width)
    v1 = np.linspace(0.0, 1.0, spec.height)
    u, v = np.meshgrid(u1, v1)
    elev = np.zeros((spec.height, spec.width), dtype=np.float64)
    for idx, layer in enumerate(spec.layers):
        elev += layer.weight * _eval_layer(layer, u, v, spec.seed, idx)
    return HeightField(spec.width, spec.height, elev, spec.cell_size).validate()


# ---------------------------------------------------------------------------
# meshing


def newell_face_normals(vertices, triangles):
    """Unnormalized Newell normals (per face); length is twice the area."""
    out = np.zeros((len(triangles), 3), dtype=np.float64)
    for k in range(3):
        vi = vertices[triangles[:, k]]
        vj = vertices[triangles[:, (k + 1) % 3]]
        out[:, 0] += (vi[:, 1] - vj[:, 1]) * (vi[:, 2] + vj[:, 2])
        out[:, 1] += (vi[:, 2] - vj[:, 2]) * (vi[:, 0] + vj[:, 0])
        out[:, 2] += (vi[:, 0] - vj[:, 0]) * (vi[:, 1] + vj[:, 1])
    return out


def newell_vertex_normals(vertices, triangles, up=(0.0, 0.0, 1.0)):
    """Smooth per-vertex normals: area-weighted Newell face normal sums."""
    face = newell_face_normals(vertices, triangles)
    acc = np.zeros_like(vertices)
    for k in range(3):
        np.add.at(acc, triangles[:, k], face)
    lens = np.linalg.norm(acc, axis=1)
    zero = lens < 1e-300
    acc[zero] = up  # isolated vertices keep a well-defined normal
    lens[zero] = 1.0
    return acc / lens[:, None]


def _grid_triangles(rows, cols):
    """Fixed-diagonal triangulation of a rows x cols node grid.

    Grid nodes are cocircular per cell, so the Delaunay diagonal is a tie;
    a fixed orientation keeps the meshing deterministic. Winding is CCW
    seen from +z.
    """
    r, c = np.meshgrid(np.arange(rows - 1), np.arange(cols - 1), indexing="ij")
    v00 = (r * cols + c).ravel()
    v10 = v00 + cols
    v01 = v00 + 1
    v11 = v10 + 1
    tris = np.empty((2 * v00.size, 3), dtype=np.int64)
    tris[0::2] = np.stack([v00, v11, v10], axis=1)
    tris[1::2] = np.stack([v00, v01, v11], axis=1)
    return tris


def heightfield_to_mesh(hf: HeightField, upsample_factor: int = 1) -> TriMesh:
    """Bilinear upsample to (w*f) x (h*f) nodes, triangulate, smooth normals.

    The upsampled grid spans the original extent, so interior nodes of the
    fine grid interpolate the coarse elevations and coincident nodes keep
    their original values.
    """
    hf.validate()
    if upsample_factor < 1:
        raise ValueError("upsample_factor must be >= 1")
    w2, h2 = hf.width * upsample_factor, hf.height * upsample_factor
    gx = np.linspace(0.0, hf.width - 1.0, w2)
    gy = np.linspace(0.0, hf.height - 1.0, h2)
    elev = _bilinear_grid(hf.elevations, gy, gx)

    xs = gx * hf.cell_size
    ys = gy * hf.cell_size
    px, py = np.meshgrid(xs, ys)
    vertices = np.column_stack([px.ravel(), py.ravel(), elev.ravel()])
    triangles = _grid_triangles(h2, w2)
    normals = newell_vertex_normals(vertices, triangles)
    uu, vv = np.meshgrid(np.linspace(0, 1, w2), np.linspace(0, 1, h2))
    uvs = np.column_stack([uu.ravel(), vv.ravel()])
    return TriMesh(vertices, triangles, normals, uvs).validate()


def _bilinear_grid(grid, gy, gx):
    """Sample grid at fractional row coords gy and column coords gx."""
    y0 = np.clip(np.floor(gy).astype(np.int64), 0, grid.shape[0] - 2)
    x0 = np.clip(np.floor(gx).astype(np.int64), 0, grid.shape[1] - 2)
    fy = (gy - y0)[:, None]
    fx = (gx - x0)[None, :]
    g00 = grid[np.ix_(y0, x0)]
    g01 = grid[np.ix_(y0, x0 + 1)]
    g10 = grid[np.ix_(y0 + 1, x0)]
    g11 = grid[np.ix_(y0 + 1, x0 + 1)]
    top = g00 + fx * (g01 - g00)
    bot = g10 + fx * (g11 - g10)
    return top + fy * (bot - top)


def subdivide_midpoint(mesh: TriMesh, levels: int = 1) -> TriMesh:
    """Midpoint (1-to-4) subdivision; triangle count quadruples per level."""
    vertices = mesh.vertices.copy()
    uvs = mesh.uvs.copy()
    triangles = mesh.triangles
    for _ in range(levels):
        edge_mid = {}
        verts = list(vertices)
        uv_list = list(uvs)

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in edge_mid:
                verts.append(0.5 * (vertices[i] + vertices[j]))
                uv_list.append(0.5 * (uvs[i] + uvs[j]))
                edge_mid[key] = len(verts) - 1
            return edge_mid[key]

        new_tris = []
        for a, b, c in triangles:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        vertices = np.asarray(verts)
        uvs = np.asarray(uv_list)
        triangles = np.asarray(new_tris, dtype=np.int64)
    normals = newell_vertex_normals(vertices, triangles)
    return TriMesh(vertices, triangles, normals, uvs, list(mesh.warnings))


# ---------------------------------------------------------------------------
# OBJ I/O


def load_mesh(path) -> TriMesh:
    """Load a Wavefront OBJ; recompute missing normals/UVs.

    Missing normals come from Newell's method; missing UVs from a planar
    projection along the mesh's thinnest AABB axis. Zero-area faces are
    dropped and non-manifold edges are flagged, both on ``mesh.warnings``.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    positions, texcoords, normals_in, faces = [], [], [], []
    for line_no, line in enumerate(path.read_text().splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        try:
            if tag == "v":
                positions.append([float(x) for x in parts[1:4]])
            elif tag == "vt":
                texcoords.append([float(x) for x in parts[1:3]])
            elif tag == "vn":
                normals_in.append([float(x) for x in parts[1:4]])
            elif tag == "f":
                faces.append([_parse_face_corner(tok) for tok in parts[1:]])
        except (ValueError, IndexError) as exc:
            raise ValueError(f"{path}:{line_no}: malformed OBJ record") from exc
    if not positions or not faces:
        raise ValueError(f"{path}: no geometry")

    positions = np.asarray(positions, dtype=np.float64)
    texcoords = np.asarray(texcoords, dtype=np.float64) if texcoords else None
    normals_in = np.asarray(normals_in, dtype=np.float64) if normals_in else None

    def resolve(idx, count):
        if idx is None:
            return None
        return idx - 1 if idx > 0 else count + idx

    for face in faces:
        if len(face) < 3:
            raise ValueError(f"{path}: face with fewer than 3 corners")

    # attributes indexed per vertex (ti/ni absent or equal to vi) keep the
    # file's vertex order; mixed indexing unifies corner triples instead
    aligned = all(
        (ti is None or ti == vi) and (ni is None or ni == vi)
        for face in faces
        for vi, ti, ni in face
    )
    if aligned:
        verts = list(positions)
        uv_out = [None] * len(positions)
        nrm_out = [None] * len(positions)
        tris = []
        for face in faces:
            ids = []
            for vi, ti, ni in face:
                v = resolve(vi, len(positions))
                if v is None or not (0 <= v < len(positions)):
                    raise ValueError(f"{path}: vertex index out of range")
                if ti is not None and texcoords is not None:
                    uv_out[v] = texcoords[ti - 1]
                if ni is not None and normals_in is not None:
                    nrm_out[v] = normals_in[ni - 1]
                ids.append(v)
            for k in range(1, len(ids) - 1):
                tris.append((ids[0], ids[k], ids[k + 1]))
    else:
        corner_index = {}
        verts, uv_out, nrm_out, tris = [], [], [], []
        for face in faces:
            ids = []
            for vi, ti, ni in face:
                key = (
                    resolve(vi, len(positions)),
                    resolve(ti, len(texcoords) if texcoords is not None else 0),
                    resolve(ni, len(normals_in) if normals_in is not None else 0),
                )
                if key[0] is None or not (0 <= key[0] < len(positions)):
                    raise ValueError(f"{path}: vertex index out of range")
                if key not in corner_index:
                    corner_index[key] = len(verts)
                    verts.append(positions[key[0]])
                    uv_out.append(
                        texcoords[key[1]]
                        if texcoords is not None and key[1] is not None
                        else None
                    )
                    nrm_out.append(
                        normals_in[key[2]]
                        if normals_in is not None and key[2] is not None
                        else None
                    )
                ids.append(corner_index[key])
            for k in range(1, len(ids) - 1):  # fan-triangulate polygons
                tris.append((ids[0], ids[k], ids[k + 1]))

    vertices = np.asarray(verts)
    triangles = np.asarray(tris, dtype=np.int64)
    warnings = []

    areas = 0.5 * np.linalg.norm(
        np.cross(
            vertices[triangles[:, 1]] - vertices[triangles[:, 0]],
            vertices[triangles[:, 2]] - vertices[triangles[:, 0]],
        ),
        axis=1,
    )
    if (areas <= 0.0).any():
        warnings.append(f"dropped {int((areas <= 0).sum())} zero-area faces")
        triangles = triangles[areas > 0.0]

    if all(n is None for n in nrm_out):
        normals = newell_vertex_normals(vertices, triangles)
    else:
        normals = np.array(
            [n if n is not None else (0.0, 0.0, 1.0) for n in nrm_out],
            dtype=np.float64,
        )
        lens = np.linalg.norm(normals, axis=1)
        lens[lens == 0.0] = 1.0
        normals = normals / lens[:, None]

    if all(t is None for t in uv_out):
        uvs = _planar_uvs(vertices)
    else:
        uvs = np.array(
            [t if t is not None else (0.0, 0.0) for t in uv_out], dtype=np.float64
        )

    bad_edges = _nonmanifold_edge_count(triangles)
    if bad_edges:
        warnings.append(f"{bad_edges} non-manifold edges")

    return TriMesh(vertices, triangles, normals, uvs, warnings).validate()


def _parse_face_corner(token):
    parts = token.split("/")
    vi = int(parts[0])
    ti = int(parts[1]) if len(parts) > 1 and parts[1] else None
    ni = int(parts[2]) if len(parts) > 2 and parts[2] else None
    return vi, ti, ni


def _planar_uvs(vertices):
    lo = vertices.min(axis=0)
    hi = vertices.max(axis=0)
    extents = hi - lo
    drop = int(np.argmin(extents))  # project along the thinnest axis
    keep = [a for a in range(3) if a != drop]
    spans = np.where(extents[keep] > 0.0, extents[keep], 1.0)
    return (vertices[:, keep] - lo[keep]) / spans


def _nonmanifold_edge_count(triangles) -> int:
    counts = {}
    for a, b, c in triangles:
        for i, j in ((a, b), (b, c), (c, a)):
            key = (min(i, j), max(i, j))
            counts[key] = counts.get(key, 0) + 1
    return sum(1 for n in counts.values() if n > 2)


def save_mesh(path, mesh: TriMesh) -> None:
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}")
    for t in mesh.uvs:
        lines.append(f"vt {float(t[0])!r} {float(t[1])!r}")
    for n in mesh.normals:
        lines.append(f"vn {float(n[0])!r} {float(n[1])!r} {float(n[2])!r}")
    for a, b, c in mesh.triangles + 1:
        lines.append(f"f {a}/{a}/{a} {b}/{b}/{b} {c}/{c}/{c}")
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# scalar textures


def gen_scalar_texture(mixture: list[dict], dims: tuple[int, int]) -> ScalarTexture:
    """Sum of anisotropic 2-D Gaussians over the texel grid in [0,1]^2.

    Each component: {"mean": (u, v), "cov": 2x2, "amplitude": a}. The seven
    contour levels are equal-spaced upper band edges between the texture's
    min and max.
    """
    if not mixture:
        raise ValueError("mixture needs at least one component")
    w, h = dims
    u1 = np.linspace(0.0, 1.0, w)
    v1 = np.linspace(0.0, 1.0, h)
    u, v = np.meshgrid(u1, v1)
    values = np.zeros((h, w), dtype=np.float64)
    for comp in mixture:
        mean = np.asarray(comp["mean"], dtype=np.float64)
        cov = np.asarray(comp["cov"], dtype=np.float64)
        amp = float(comp.get("amplitude", 1.0))
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
            raise ValueError("covariance must be symmetric 2x2")
        eigvals = np.linalg.eigvalsh(cov)
        if eigvals.min() <= 0.0:
            raise ValueError("degenerate covariance")
        inv = np.linalg.inv(cov)
        du, dv = u - mean[0], v - mean[1]
        quad = inv[0, 0] * du * du + 2.0 * inv[0, 1] * du * dv + inv[1, 1] * dv * dv
        values += amp * np.exp(-0.5 * quad)
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        hi = lo + 1.0
    levels = np.linspace(lo, hi, 8)[1:]
    return ScalarTexture(w, h, values, levels)


def random_gaussian_mixture(n_components: int, seed: int) -> list[dict]:
    """Random means/covariances for a texture spec; deterministic in seed."""
    rng = np.random.default_rng(seed)
    comps = []
    for _ in range(n_components):
        mean = rng.uniform(0.15, 0.85, size=2)
        sx, sy = rng.uniform(0.04, 0.2, size=2)
        theta = rng.uniform(0.0, math.pi)
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        cov = rot @ np.diag([sx**2, sy**2]) @ rot.T
        comps.append(
            {
                "mean": mean.tolist(),
                "cov": cov.tolist(),
                "amplitude": float(rng.uniform(0.5, 1.5)),
            }
        )
    return comps


def rescale(values: np.ndarray, out_lo: float = 0.0, out_hi: float = 1000.0):
    """Affine map of a value grid onto a display range."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi <= lo:
        return np.full_like(np.asarray(values, dtype=np.float64), out_lo)
    return (np.asarray(values, dtype=np.float64) - lo) / (hi - lo) * (
        out_hi - out_lo
    ) + out_lo


# ---------------------------------------------------------------------------
# PGM persistence


def save_heightfield(path_pgm, hf: HeightField) -> None:
    q, lo, hi = pgm.quantize16(hf.elevations)
    pgm.write_pgm16(path_pgm, q)
    pgm.write_sidecar(
        str(path_pgm) + ".meta",
        {"cell_size": repr(hf.cell_size), "value_lo": repr(lo), "value_hi": repr(hi)},
    )


def load_heightfield(path_pgm) -> HeightField:
    grid = pgm.read_pgm16(path_pgm)
    meta = pgm.read_sidecar(str(path_pgm) + ".meta")
    elev = pgm.dequantize16(grid, float(meta["value_lo"]), float(meta["value_hi"]))
    h, w = elev.shape
    return HeightField(w, h, elev, float(meta.get("cell_size", 1.0)))


def save_scalar_texture(path_pgm, tex: ScalarTexture) -> None:
    q, lo, hi = pgm.quantize16(tex.values)
    pgm.write_pgm16(path_pgm, q)
    pgm.write_sidecar(
        str(path_pgm) + ".meta",
        {
            "value_lo": repr(lo),
            "value_hi": repr(hi),
            "contour_levels": tex.contour_levels,
        },
    )


def load_scalar_texture(path_pgm) -> ScalarTexture:
    grid = pgm.read_pgm16(path_pgm)
    meta = pgm.read_sidecar(str(path_pgm) + ".meta")
    values = pgm.dequantize16(grid, float(meta["value_lo"]), float(meta["value_hi"]))
    levels = np.array([float(x) for x in meta["contour_levels"].split(",")])
    h, w = values.shape
    return ScalarTexture(w, h, values, levels)
