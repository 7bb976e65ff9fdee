"""Spring-damper and snap force mathematics.

The stylus is coupled to its on-surface proxy by a virtual spring-damper;
inside the snap zone an assistive force pulls the stylus toward the
surface with a distance-based magnitude profile. Two profiles are
implemented: the non-linear decaying profile (gentle at contact, stronger
mid-zone) and the inverse-square control profile used for comparison.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

ZONE_NO_SNAP = "no_snap"
ZONE_SNAP = "snap"
ZONE_BUFFER = "buffer"
ZONE_CONTACT = "contact"

PROFILE_KINDS = ("decay", "inverse_square")


@dataclass
class ForceParams:
    """Complete tunable parameter set for the force pipeline.

    kappa/tau are the spring constant and damping coefficient of the
    stylus-proxy coupling; amplitude_A and decay_B shape the decaying snap
    profile; sigma is the snap-zone threshold; buffer_eps the half-width of
    the near-surface buffer where the force direction switches to the
    exact surface normal; force_scale converts profile output to force
    units.
    """

    kappa: float = 500.0
    tau: float = 1.0
    amplitude_A: float = 3.0
    decay_B: float = 2.0
    sigma: float = 0.1
    buffer_eps: float = 0.02
    force_scale: float = 1.0
    profile_kind: str = "decay"

    def validate(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if not (0 < self.buffer_eps < self.sigma):
            raise ValueError("buffer_eps must be in (0, sigma)")
        # amplitude 0 is allowed: it reduces haptic_snap to plain haptic
        if self.amplitude_A < 0:
            raise ValueError("amplitude_A must be >= 0")
        if not self.decay_B > 0:
            raise ValueError("decay_B must be > 0")
        if self.force_scale < 0:
            raise ValueError("force_scale must be >= 0")
        if self.profile_kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind: {self.profile_kind!r}")
        return self

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ForceParams":
        return cls(**json.loads(text)).validate()

    @classmethod
    def defaults_for(cls, mesh, df=None, **overrides) -> "ForceParams":
        """Scene-scaled defaults: sigma = 10% of the mesh AABB diagonal,
        buffer = two voxel spacings of the active field."""
        sigma = 0.1 * mesh.aabb_diagonal()
        buffer_eps = 2.0 * df.spacing if df is not None else 0.2 * sigma
        buffer_eps = min(buffer_eps, 0.9 * sigma)
        params = cls(sigma=sigma, buffer_eps=buffer_eps)
        for key, val in overrides.items():
            setattr(params, key, val)
        return params.validate()


@dataclass
class ForceSample:
    f_spring: np.ndarray
    f_snap: np.ndarray
    total: np.ndarray
    zone: str


def f_decay(x: float, A: float, B: float) -> float:
    """Decaying snap profile A*g(x)*exp(-B*g(x)) with g(x) = 0.78x + 0.02."""
    g = 0.78 * x + 0.02
    return A * g * math.exp(-B * g)


def f_mag(x: float) -> float:
    """Inverse-square control profile 1/(2x+1)^2."""
    return 1.0 / (2.0 * x + 1.0) ** 2


def f_decay_peak(A: float, B: float) -> tuple[float, float]:
    """(argmax, max) of f_decay over x >= 0; the peak sits at g(x) = 1/B."""
    x_peak = (1.0 / B - 0.02) / 0.78
    if x_peak <= 0.0:
        return 0.0, f_decay(0.0, A, B)
    return x_peak, f_decay(x_peak, A, B)


def profile_value(params: ForceParams, x: float) -> float:
    if params.profile_kind == "inverse_square":
        return f_mag(x)
    return f_decay(x, params.amplitude_A, params.decay_B)


def spring_damper_force(s, p, s_dot, params: ForceParams) -> np.ndarray:
    """Coupling force on the stylus: -kappa*(s - p) - tau*s_dot."""
    s = np.asarray(s, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    s_dot = np.asarray(s_dot, dtype=np.float64)
    return -params.kappa * (s - p) - params.tau * s_dot


def classify_zone(r: float, params: ForceParams) -> str:
    """Half-open zones: no_snap for r >= sigma, buffer below buffer_eps."""
    if not r < params.sigma:  # inf and nan land in no_snap
        return ZONE_NO_SNAP
    if r < params.buffer_eps:
        return ZONE_BUFFER
    return ZONE_SNAP


def snap_force(r: float, dir_field, dir_normal, params: ForceParams) -> np.ndarray:
    """Assistive force at surface distance r.

    Outside the snap zone the force is zero. Inside, the magnitude is
    force_scale * profile(r / sigma); the direction follows the field
    gradient, switching to the negated surface normal inside the buffer
    zone to mask field-approximation error near the surface.
    """
    if r < 0:
        raise ValueError("distance must be >= 0")
    zone = classify_zone(r, params)
    if zone == ZONE_NO_SNAP:
        return np.zeros(3)
    magnitude = params.force_scale * profile_value(params, r / params.sigma)
    if magnitude == 0.0:
        return np.zeros(3)
    if zone == ZONE_BUFFER:
        if dir_normal is None:
            raise ValueError("no direction available inside buffer zone")
        return -magnitude * np.asarray(dir_normal, dtype=np.float64)
    if dir_field is None:
        raise ValueError("no direction available inside snap zone")
    return magnitude * np.asarray(dir_field, dtype=np.float64)


def force_sample(s, p, s_dot, r, dir_field, dir_normal, params, snap_enabled=True):
    """Compose spring-damper and snap contributions into one sample."""
    f_spring = spring_damper_force(s, p, s_dot, params)
    if snap_enabled:
        f_snap = snap_force(r, dir_field, dir_normal, params)
    else:
        f_snap = np.zeros(3)
    return ForceSample(f_spring, f_snap, f_spring + f_snap, classify_zone(r, params))


def equilibrium_depth(params: ForceParams) -> float:
    """Rest depth of the stylus below a flat surface.

    With the proxy at rest on the surface the snap pull is
    force_scale * profile(0); the spring pushes back with kappa * depth,
    so the balance sits at depth = force_scale * profile(0) / kappa.
    """
    return params.force_scale * profile_value(params, 0.0) / params.kappa


def profile_table(A: float, B: float, samples: int):
    """Uniform sampling of both profiles over x in [0, 1]."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not (math.isfinite(A) and math.isfinite(B)) or A < 0 or B <= 0:
        raise ValueError("invalid profile parameters")
    rows = []
    for i in range(samples):
        x = i / (samples - 1)
        rows.append((x, f_decay(x, A, B), f_mag(x)))
    return rows


def export_profile_csv(path, A: float, B: float, samples: int = 101) -> None:
    rows = profile_table(A, B, samples)
    with open(path, "w") as fh:
        fh.write("x,f_decay,f_mag\n")
        for x, fd, fm in rows:
            fh.write(f"{x!r},{fd!r},{fm!r}\n")
