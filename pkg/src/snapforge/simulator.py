"""Fixed-rate stylus/proxy simulation.

The servo loop runs semi-implicit Euler at 1 kHz by default. The stylus
is driven toward scripted goals by critically damped tracking dynamics
with unit virtual mass (the stand-in for the human hand), on top of which
the device forces act: the spring-damper coupling to the on-surface proxy
and, in haptic_snap mode, the assistive snap force evaluated at the proxy.
The tracking spring has a small dead zone so that at rest the hand exerts
no net force and the snap/spring equilibrium below the surface is
undisturbed.

The proxy follows the classic god-object constraint: it moves freely
until its path crosses the surface, then slides tangentially via iterative
projection and never penetrates.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import bvh, forcemodel
from .distfield import DistanceField, mesh_bvh, nearest_surface_point, sample_direction, sample_distance
from .forcemodel import ForceParams, ZONE_CONTACT, ZONE_NO_SNAP, classify_zone, force_sample
from .surfacegen import TriMesh

MODE_NO_HAPTIC = "no_haptic"
MODE_HAPTIC = "haptic"
MODE_HAPTIC_SNAP = "haptic_snap"
MODES = (MODE_NO_HAPTIC, MODE_HAPTIC, MODE_HAPTIC_SNAP)

LOG_VERSION = 1


class SimulationUnstable(RuntimeError):
    pass


@dataclass
class WorkspaceBounds:
    """Device workspace; extents and position resolution in world units."""

    extents: np.ndarray = field(
        default_factory=lambda: np.array([160.0, 120.0, 70.0])
    )
    resolution: float = 0.055
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def contains(self, point) -> bool:
        d = np.abs(np.asarray(point) - self.center)
        return bool((d <= self.extents / 2.0).all())

    def quantize(self, point) -> np.ndarray:
        rel = np.asarray(point, dtype=np.float64) - self.center
        return self.center + np.round(rel / self.resolution) * self.resolution


@dataclass
class SimState:
    s: np.ndarray  # stylus position
    s_dot: np.ndarray  # stylus velocity
    p: np.ndarray  # proxy position
    zone: str = ZONE_NO_SNAP
    touching: bool = False
    t: float = 0.0


@dataclass
class SimConfig:
    rate: float = 1000.0
    workspace: WorkspaceBounds = field(default_factory=WorkspaceBounds)
    track_omega: float = 25.0  # rad/s; tracking is critically damped
    track_deadzone: float = 4e-4  # must stay above the snap rest depth
    contact_tol: float = 1e-4
    pointer_dir: np.ndarray = field(
        default_factory=lambda: np.array([0.0, 0.0, -1.0])
    )
    proxy_iters: int = 8

    @classmethod
    def defaults_for(cls, mesh: TriMesh, **overrides) -> "SimConfig":
        """Scene-scaled tolerances and workspace.

        The device workspace (and its 0.055 mm position resolution) is
        mapped onto the scene: extents keep the device aspect ratio and
        scale so the mesh occupies half the workspace diagonal, which
        preserves the device's relative precision in scene units.
        """
        diag = mesh.aabb_diagonal()
        lo, hi = mesh.aabb()
        device = WorkspaceBounds()
        k = 2.0 * diag / float(np.linalg.norm(device.extents))
        ws = WorkspaceBounds(
            extents=device.extents * k,
            resolution=device.resolution * k,
            center=0.5 * (lo + hi),
        )
        cfg = cls(
            workspace=ws,
            track_deadzone=3e-4 * diag,
            contact_tol=1e-4 * diag,
        )
        for key, val in overrides.items():
            setattr(cfg, key, val)
        return cfg


@dataclass
class TrajectoryScript:
    """Scripted hand motion: timed goals plus button states."""

    rate: float
    times: np.ndarray  # strictly increasing
    positions: np.ndarray  # (n, 3)
    select: np.ndarray  # (n,) bool
    brush: np.ndarray  # (n,) bool

    def validate(self, workspace: WorkspaceBounds | None = None):
        if len(self.times) and (np.diff(self.times) <= 0).any():
            raise ValueError("script timestamps must be strictly increasing")
        if workspace is not None:
            for pos in self.positions:
                if not workspace.contains(pos):
                    raise ValueError("script goal outside workspace bounds")
        return self

    @property
    def duration(self) -> float:
        return float(self.times[-1]) if len(self.times) else 0.0

    def goal_at(self, t: float) -> np.ndarray:
        """Linear interpolation of goal positions; clamped at the ends."""
        times = self.times
        if t <= times[0]:
            return self.positions[0].copy()
        if t >= times[-1]:
            return self.positions[-1].copy()
        i = int(np.searchsorted(times, t, side="right")) - 1
        f = (t - times[i]) / (times[i + 1] - times[i])
        return (1.0 - f) * self.positions[i] + f * self.positions[i + 1]

    def buttons_at(self, t: float) -> tuple[bool, bool]:
        """Zero-order hold of the most recent sample."""
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        i = max(i, 0)
        return bool(self.select[i]), bool(self.brush[i])

    @classmethod
    def from_samples(cls, rate, samples) -> "TrajectoryScript":
        """samples: iterable of (t, (x, y, z), select, brush)."""
        samples = list(samples)
        times = np.array([s[0] for s in samples], dtype=np.float64)
        pos = np.array([s[1] for s in samples], dtype=np.float64).reshape(-1, 3)
        sel = np.array([bool(s[2]) for s in samples])
        bru = np.array([bool(s[3]) for s in samples])
        return cls(rate, times, pos, sel, bru).validate()

    def to_jsonl(self) -> str:
        lines = [json.dumps({"rate": self.rate})]
        for i in range(len(self.times)):
            lines.append(
                json.dumps(
                    {
                        "t": float(self.times[i]),
                        "x": float(self.positions[i, 0]),
                        "y": float(self.positions[i, 1]),
                        "z": float(self.positions[i, 2]),
                        "select": bool(self.select[i]),
                        "brush": bool(self.brush[i]),
                    }
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "TrajectoryScript":
        lines = [l for l in text.splitlines() if l.strip()]
        header = json.loads(lines[0])
        samples = []
        for line in lines[1:]:
            rec = json.loads(line)
            samples.append(
                (
                    rec["t"],
                    (rec["x"], rec["y"], rec["z"]),
                    rec.get("select", False),
                    rec.get("brush", False),
                )
            )
        return cls.from_samples(header.get("rate", 100.0), samples)


@dataclass
class TrialLog:
    mode: str
    task: str
    params_hash: str
    rate: float
    t: np.ndarray
    s: np.ndarray  # (n, 3) stylus positions (unquantized in memory)
    p: np.ndarray  # (n, 3) proxy positions
    zone: list
    touching: np.ndarray
    select: np.ndarray
    brush: np.ndarray
    workspace: WorkspaceBounds = field(default_factory=WorkspaceBounds)

    def __len__(self):
        return len(self.t)

    def to_jsonl(self) -> str:
        """Serialize; positions are quantized to the device resolution here
        (the integrator state itself is never quantized)."""
        lines = [
            json.dumps(
                {
                    "mode": self.mode,
                    "task": self.task,
                    "params_hash": self.params_hash,
                    "rate": self.rate,
                    "version": LOG_VERSION,
                }
            )
        ]
        for i in range(len(self.t)):
            qs = self.workspace.quantize(self.s[i])
            qp = self.workspace.quantize(self.p[i])
            lines.append(
                json.dumps(
                    {
                        "t": round(float(self.t[i]), 9),
                        "s": [float(v) for v in qs],
                        "p": [float(v) for v in qp],
                        "zone": self.zone[i],
                        "touching": bool(self.touching[i]),
                        "select": bool(self.select[i]),
                        "brush": bool(self.brush[i]),
                    }
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "TrialLog":
        lines = [l for l in text.splitlines() if l.strip()]
        header = json.loads(lines[0])
        recs = [json.loads(l) for l in lines[1:]]
        return cls(
            mode=header["mode"],
            task=header.get("task", ""),
            params_hash=header.get("params_hash", ""),
            rate=header.get("rate", 1000.0),
            t=np.array([r["t"] for r in recs]),
            s=np.array([r["s"] for r in recs]).reshape(-1, 3),
            p=np.array([r["p"] for r in recs]).reshape(-1, 3),
            zone=[r["zone"] for r in recs],
            touching=np.array([r["touching"] for r in recs], dtype=bool),
            select=np.array([r.get("select", False) for r in recs], dtype=bool),
            brush=np.array([r.get("brush", False) for r in recs], dtype=bool),
        )


def params_hash(params: ForceParams) -> str:
    return hashlib.sha256(params.to_json().encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# proxy constraint


def _mesh_arrays(mesh: TriMesh):
    """Contiguous triangle/normal arrays for the JIT kernels, cached."""
    cached = mesh.__dict__.get("_kernel_arrays")
    if cached is None:
        cached = (
            np.ascontiguousarray(mesh.triangles, dtype=np.int64),
            np.ascontiguousarray(mesh.normals, dtype=np.float64),
        )
        mesh.__dict__["_kernel_arrays"] = cached
    return cached


def update_proxy(
    mesh: TriMesh,
    df: DistanceField | None,
    p_prev,
    s_goal,
    iters: int = 8,
    lift_eps: float | None = None,
) -> np.ndarray:
    """God-object update: free motion unless the path crosses the surface,
    then tangential sliding via iterative projection. Never penetrates.

    The slide casts each tangential step slightly lifted off the surface so
    it cannot tunnel through neighboring geometry.
    """
    p_prev = np.asarray(p_prev, dtype=np.float64)
    s_goal = np.asarray(s_goal, dtype=np.float64)
    tree = mesh_bvh(mesh)
    diag = mesh.aabb_diagonal()
    lift = lift_eps if lift_eps is not None else 1e-5 * diag
    tri_ids, normals = _mesh_arrays(mesh)
    x, y, z = bvh.proxy_slide(
        p_prev[0],
        p_prev[1],
        p_prev[2],
        s_goal[0],
        s_goal[1],
        s_goal[2],
        iters,
        lift,
        1e-9 * diag,
        tri_ids,
        normals,
        *tree._args(),
    )
    return np.array([x, y, z])


# ---------------------------------------------------------------------------
# stepping


class Simulator:
    """One deterministic simulation instance (single-threaded).

    Mesh and distance field are shared read-only; params may be swapped
    between steps (live tuning) and take effect on the next step.
    """

    def __init__(
        self,
        mesh: TriMesh,
        df: DistanceField,
        params: ForceParams,
        mode: str = MODE_HAPTIC_SNAP,
        config: SimConfig | None = None,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown mode: {mode!r}")
        self.mesh = mesh
        self.df = df
        self.params = params.validate()
        self.mode = mode
        self.config = config if config is not None else SimConfig.defaults_for(mesh)
        self.last_force = None  # ForceSample of the most recent step

    def initial_state(self, position) -> SimState:
        s = np.asarray(position, dtype=np.float64)
        if self.mode == MODE_NO_HAPTIC:
            p = self._pointer_cast(s)
        else:
            p = s.copy()
        state = SimState(s=s, s_dot=np.zeros(3), p=p, t=0.0)
        state.touching = self._touching(p) if self.mode != MODE_NO_HAPTIC else False
        state.zone = self._zone(p, state.touching)
        return state

    def step(self, state: SimState, dt: float, goal) -> SimState:
        if dt <= 0:
            raise ValueError("dt must be > 0")
        goal = np.asarray(goal, dtype=np.float64)
        if self.mode == MODE_NO_HAPTIC:
            new = self._step_no_haptic(state, dt, goal)
        else:
            new = self._step_haptic(state, dt, goal)
        self._guard(new.s)
        return new

    def _step_no_haptic(self, state, dt, goal):
        s_new = goal.copy()
        v_new = (goal - state.s) / dt
        p_new = self._pointer_cast(s_new)
        self.last_force = forcemodel.ForceSample(
            np.zeros(3), np.zeros(3), np.zeros(3), self._zone(p_new, False)
        )
        return SimState(
            s=s_new,
            s_dot=v_new,
            p=p_new,
            zone=self.last_force.zone,
            touching=False,
            t=state.t + dt,
        )

    def _step_haptic(self, state, dt, goal):
        params = self.params
        r = sample_distance(self.df, state.p)
        r_force = r
        dir_field = None
        dir_normal = None
        if self.mode == MODE_HAPTIC_SNAP and r < params.sigma:
            if r < params.buffer_eps:
                # the trilinear field has O(spacing) error right at the
                # surface; inside the buffer the exact nearest point drives
                # the force direction and its magnitude (min keeps the zone
                # classification of the force consistent with the trigger)
                hit = nearest_surface_point(self.mesh, state.p)
                dir_normal = hit.normal
                r_force = min(hit.distance, r)
            else:
                dir_field = sample_direction(self.df, state.p)
        fs = force_sample(
            state.s,
            state.p,
            state.s_dot,
            r_force,
            dir_field,
            dir_normal,
            params,
            snap_enabled=(self.mode == MODE_HAPTIC_SNAP),
        )
        self.last_force = fs

        # hand: critically damped goal tracking with a positional dead zone
        cfg = self.config
        omega = cfg.track_omega
        delta = goal - state.s
        dist = np.linalg.norm(delta)
        if dist > cfg.track_deadzone:
            a_track = omega * omega * delta * (1.0 - cfg.track_deadzone / dist)
        else:
            a_track = np.zeros(3)
        accel = a_track - 2.0 * omega * state.s_dot + fs.total  # unit mass

        v_new = state.s_dot + dt * accel
        s_new = state.s + dt * v_new
        p_new = update_proxy(self.mesh, self.df, state.p, s_new, cfg.proxy_iters)
        touching = self._touching(p_new)
        return SimState(
            s=s_new,
            s_dot=v_new,
            p=p_new,
            zone=self._zone(p_new, touching),
            touching=touching,
            t=state.t + dt,
        )

    def _pointer_cast(self, s) -> np.ndarray:
        d = self.config.pointer_dir
        length = 4.0 * self.mesh.aabb_diagonal() + 1.0
        hit = mesh_bvh(self.mesh).segment_hit(s, s + d * length)
        if hit is None:
            return s.copy()
        _, t, _, _ = hit
        return s + t * d * length

    def _touching(self, p) -> bool:
        tree = mesh_bvh(self.mesh)
        d2 = tree.nearest_raw(p[0], p[1], p[2])[1]
        return d2 < self.config.contact_tol**2

    def _zone(self, p, touching: bool) -> str:
        if touching:
            return ZONE_CONTACT
        return classify_zone(sample_distance(self.df, p), self.params)

    def _guard(self, s):
        d = np.abs(s - self.config.workspace.center)
        if (d > 10.0 * self.config.workspace.extents / 2.0).any():
            raise SimulationUnstable("unstable integration")


def run_trajectory(
    mesh: TriMesh,
    df: DistanceField,
    params: ForceParams,
    mode: str,
    script: TrajectoryScript,
    config: SimConfig | None = None,
    task: str = "",
) -> TrialLog:
    """Replay a script at the servo rate; identical inputs give identical
    logs. Goals are interpolated linearly between script samples and
    buttons held from the most recent sample."""
    sim = Simulator(mesh, df, params, mode, config)
    cfg = sim.config
    dt = 1.0 / cfg.rate

    frames_t, frames_s, frames_p = [], [], []
    frames_zone, frames_touch, frames_sel, frames_brush = [], [], [], []

    def record(state, sel, bru):
        frames_t.append(state.t)
        frames_s.append(state.s.copy())
        frames_p.append(state.p.copy())
        frames_zone.append(state.zone)
        frames_touch.append(state.touching)
        frames_sel.append(sel)
        frames_brush.append(bru)

    if len(script.times) == 0:
        state = sim.initial_state(cfg.workspace.center)
        record(state, False, False)
    else:
        script.validate()
        state = sim.initial_state(script.positions[0])
        sel, bru = script.buttons_at(0.0)
        record(state, sel, bru)
        n_steps = int(round(script.duration * cfg.rate))
        for k in range(1, n_steps + 1):
            t = k * dt
            state = sim.step(state, dt, script.goal_at(t))
            sel, bru = script.buttons_at(t)
            record(state, sel, bru)

    return TrialLog(
        mode=mode,
        task=task,
        params_hash=params_hash(params),
        rate=cfg.rate,
        t=np.array(frames_t),
        s=np.array(frames_s).reshape(-1, 3),
        p=np.array(frames_p).reshape(-1, 3),
        zone=frames_zone,
        touching=np.array(frames_touch, dtype=bool),
        select=np.array(frames_sel, dtype=bool),
        brush=np.array(frames_brush, dtype=bool),
        workspace=cfg.workspace,
    )


# ---------------------------------------------------------------------------
# events


@dataclass
class SimEvent:
    t: float
    kind: str  # touch_enter/touch_exit/snap_enter/snap_exit/select/brush_start/brush_end
    frame: int


def detect_events(log: TrialLog) -> list[SimEvent]:
    """Boundary crossings of the touch/zone flags paired with buttons."""
    events = []
    for i in range(len(log)):
        t = float(log.t[i])
        prev_touch = bool(log.touching[i - 1]) if i else False
        prev_snap = (log.zone[i - 1] != ZONE_NO_SNAP) if i else False
        prev_sel = bool(log.select[i - 1]) if i else False
        prev_brush = bool(log.brush[i - 1]) if i else False

        if bool(log.touching[i]) and not prev_touch:
            events.append(SimEvent(t, "touch_enter", i))
        elif prev_touch and not bool(log.touching[i]):
            events.append(SimEvent(t, "touch_exit", i))

        snap_active = log.zone[i] != ZONE_NO_SNAP
        if snap_active and not prev_snap:
            events.append(SimEvent(t, "snap_enter", i))
        elif prev_snap and not snap_active:
            events.append(SimEvent(t, "snap_exit", i))

        if bool(log.select[i]) and not prev_sel:
            events.append(SimEvent(t, "select", i))
        if bool(log.brush[i]) and not prev_brush:
            events.append(SimEvent(t, "brush_start", i))
        elif prev_brush and not bool(log.brush[i]):
            events.append(SimEvent(t, "brush_end", i))
    return events


def touch_count(log: TrialLog) -> int:
    return sum(1 for e in detect_events(log) if e.kind == "touch_enter")
