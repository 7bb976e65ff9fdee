"""Quantitative measures for brushed curves and localized points.

Curve deviation is the RMSE between the distance transforms of the
reference medial axis and the brushed curve over the band texels; curve
irregularity is the standard deviation of the Laplacian of the brushed
curve's distance transform over the same texels. Localization errors are
relative to ground truth with a 5% retention filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .surfacegen import TriMesh

_DT_INF = 1e20  # finite sentinel keeps the envelope arithmetic well-defined


@dataclass
class DistanceImage:
    width: int
    height: int
    values: np.ndarray  # (height, width) Euclidean distance to foreground


def _band_mask(band, shape) -> np.ndarray:
    """Accept a bool mask or an iterable of (row, col) pairs."""
    band = np.asarray(band)
    if band.dtype == bool:
        if band.shape != shape:
            raise ValueError("band mask dimensions mismatch")
        return band
    mask = np.zeros(shape, dtype=bool)
    idx = band.reshape(-1, 2)
    if len(idx) and (
        idx.min() < 0 or idx[:, 0].max() >= shape[0] or idx[:, 1].max() >= shape[1]
    ):
        raise ValueError("band texel outside image bounds")
    mask[idx[:, 0], idx[:, 1]] = True
    return mask


def _dt1d_sq(f: np.ndarray) -> np.ndarray:
    """1-D squared distance transform (lower envelope of parabolas)."""
    n = len(f)
    out = np.empty(n)
    v = np.zeros(n, dtype=np.int64)
    z = np.empty(n + 1)
    z[0], z[1] = -np.inf, np.inf
    k = 0
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        out[q] = (q - v[k]) ** 2 + f[v[k]]
    return out


def edt(mask: np.ndarray) -> DistanceImage:
    """Exact Euclidean distance transform of a binary foreground mask.

    Column sweep for vertical distances, then the exact parabola-envelope
    pass per row; no chamfer approximation.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError("mask must be 2-D")
    if not mask.any():
        raise ValueError("empty foreground: distance transform undefined")
    h, w = mask.shape

    g = np.where(mask, 0.0, _DT_INF)
    for i in range(1, h):
        np.minimum(g[i], g[i - 1] + 1.0, out=g[i])
    for i in range(h - 2, -1, -1):
        np.minimum(g[i], g[i + 1] + 1.0, out=g[i])

    sq = g * g
    out = np.empty((h, w))
    for i in range(h):
        out[i] = _dt1d_sq(sq[i])
    return DistanceImage(w, h, np.sqrt(out))


def curve_deviation(d_ref: DistanceImage, d_brush: DistanceImage, band) -> float:
    """RMSE between the two distance images over the band texels."""
    if (d_ref.width, d_ref.height) != (d_brush.width, d_brush.height):
        raise ValueError("distance image dimensions mismatch")
    mask = _band_mask(band, d_ref.values.shape)
    if not mask.any():
        raise ValueError("empty band")
    diff = d_ref.values[mask] - d_brush.values[mask]
    return float(np.sqrt(np.mean(diff * diff)))


def curve_irregularity(d_brush: DistanceImage, band) -> float:
    """Population SD of the discrete Laplacian of d_brush over the band.

    The 5-point stencil is evaluated only on band texels; neighbors
    outside the band (or the image) are replaced by the center value, so
    texels outside the band never influence the result.
    """
    mask = _band_mask(band, d_brush.values.shape)
    count = int(mask.sum())
    if count < 2:
        raise ValueError("band needs at least 2 texels")
    vals = d_brush.values
    h, w = vals.shape
    lap = np.zeros((h, w))
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nbr_ok = np.zeros((h, w), dtype=bool)
        shifted = np.zeros((h, w))
        src_i = slice(max(di, 0), h + min(di, 0))
        dst_i = slice(max(-di, 0), h + min(-di, 0))
        src_j = slice(max(dj, 0), w + min(dj, 0))
        dst_j = slice(max(-dj, 0), w + min(-dj, 0))
        shifted[dst_i, dst_j] = vals[src_i, src_j]
        nbr_ok[dst_i, dst_j] = mask[src_i, src_j]
        lap += np.where(nbr_ok, shifted - vals, 0.0)
    samples = lap[mask]
    return float(np.std(samples))  # population SD (divide by |band|)


def localization_error(measured: float, truth: float) -> float:
    """Relative error against the ground-truth value."""
    if truth == 0:
        raise ValueError("ground truth must be nonzero")
    return abs(measured - truth) / abs(truth)


def filter_5pct(errors) -> list:
    """Retain only errors within the 5% range."""
    return [e for e in errors if e <= 0.05]


def protrusion_value(
    mesh: TriMesh, point, display_range: tuple[float, float] = (0.0, 1000.0)
) -> float:
    """Elevation above the mesh's lowest point, affinely mapped onto the
    display range (flat meshes map everywhere to the range start)."""
    z = float(np.asarray(point)[2])
    z_min = float(mesh.vertices[:, 2].min())
    z_max = float(mesh.vertices[:, 2].max())
    lo, hi = display_range
    if z_max <= z_min:
        return lo
    return lo + (z - z_min) / (z_max - z_min) * (hi - lo)


def depression_value(
    center,
    point,
    radius: float,
    display_range: tuple[float, float] = (0.0, 1000.0),
) -> float:
    """Distance from the hemisphere's centroid, scaled so the undeformed
    radius maps to the top of the display range."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    d = float(np.linalg.norm(np.asarray(point, dtype=np.float64) - np.asarray(center)))
    lo, hi = display_range
    return lo + d / radius * (hi - lo)


METRICS_CSV_HEADER = "trial,mode,task,completion_time,deviation,irregularity,error,touch_count"


def format_metrics_row(
    trial, mode, task, completion_time, deviation, irregularity, error, touch_count
) -> str:
    def fmt(x):
        return "" if x is None else repr(float(x))

    return ",".join(
        [
            str(trial),
            mode,
            task,
            fmt(completion_time),
            fmt(deviation),
            fmt(irregularity),
            fmt(error),
            "" if touch_count is None else str(int(touch_count)),
        ]
    )
