"""PGM image I/O.

Scalar grids (height fields, scalar textures) travel as 16-bit ASCII PGM
(P2) with a key=value sidecar carrying the dequantization range and any
extra metadata. Binary masks (band / medial / brush textures) travel as
8-bit binary PGM (P5) where 0 = untagged and 255 = tagged.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

MASK_ON = 255


def write_pgm16(path, values: np.ndarray, maxval: int = 65535) -> None:
    """Write an integer grid (h, w) as ASCII P2."""
    values = np.asarray(values)
    if values.ndim != 2:
        raise ValueError("PGM grid must be 2-D")
    if values.min() < 0 or values.max() > maxval:
        raise ValueError("values out of PGM range")
    h, w = values.shape
    lines = [f"P2", f"{w} {h}", f"{maxval}"]
    for row in values:
        lines.append(" ".join(str(int(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_pgm16(path) -> np.ndarray:
    text = Path(path).read_text()
    tokens = re.sub(r"#[^\n]*", "", text).split()
    if tokens[0] != "P2":
        raise ValueError(f"not an ASCII PGM: {path}")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array(tokens[4 : 4 + w * h], dtype=np.int64)
    if data.size != w * h:
        raise ValueError(f"truncated PGM: {path}")
    if data.max() > maxval:
        raise ValueError(f"sample exceeds declared maxval: {path}")
    return data.reshape(h, w)


def quantize16(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Map a float grid onto 0..65535; returns (grid, lo, hi) for the sidecar."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        q = np.rint((values - lo) / (hi - lo) * 65535.0).astype(np.int64)
    else:
        q = np.zeros(values.shape, dtype=np.int64)
    return q, lo, hi


def dequantize16(grid: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return grid.astype(np.float64) / 65535.0 * (hi - lo) + lo


def write_mask(path, mask: np.ndarray) -> None:
    """Write a boolean grid (h, w) as binary P5."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError("mask must be 2-D")
    h, w = mask.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + (mask.astype(np.uint8) * MASK_ON).tobytes())


def read_mask(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if not raw.startswith(b"P5"):
        raise ValueError(f"not a binary PGM: {path}")
    # header: magic, width, height, maxval, then single whitespace byte
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(raw[start:pos]))
    pos += 1
    w, h, _ = fields
    data = np.frombuffer(raw[pos : pos + w * h], dtype=np.uint8)
    if data.size != w * h:
        raise ValueError(f"truncated PGM: {path}")
    return (data.reshape(h, w) > 0)


def write_sidecar(path, meta: dict) -> None:
    """key=value metadata next to a PGM; lists are comma-joined."""
    lines = []
    for key, val in meta.items():
        if isinstance(val, (list, tuple, np.ndarray)):
            val = ",".join(repr(float(v)) for v in val)
        lines.append(f"{key}={val}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_sidecar(path) -> dict:
    meta = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition("=")
        meta[key.strip()] = val.strip()
    return meta
