"""Live parameter-tuning service for the workbench UI.

Thin HTTP/WebSocket transport over the force model and simulator: the
profile endpoint samples the force profiles exactly as the library
computes them, and each session streams simulation frames while its
parameters are adjusted in real time. Force values on the wire are the
library values verbatim (JSON decimal text round-trips float64 exactly).

API
---
GET  /profile?A=&B=&samples=   profile table + advertised slider ranges
GET  /scene                    surface cross-section + scene defaults
POST /session                  create a session; body may carry params
POST /session/{id}/params      swap params (effective next step)
WS   /session/{id}/stream      send {"x","y","z"} goals, receive frames
"""

from __future__ import annotations

import argparse
import uuid
from dataclasses import asdict

import numpy as np
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from . import distfield, forcemodel, simulator, surfacegen

# amplitude and decay rate tune on a linear 1..5 scale in 0.5 steps
SWEEP_RANGE = {"min": 1.0, "max": 5.0, "step": 0.5}
STREAM_CHUNK = 16  # servo substeps per streamed frame: 1 kHz -> 62.5 fps


def default_scene():
    """Small procedural surface used when no mesh is supplied."""
    spec = surfacegen.HeightFieldSpec(
        layers=[
            surfacegen.LayerSpec("perlin", {"frequency": 2.0, "amplitude": 0.15}),
            surfacegen.LayerSpec(
                "gaussian2d",
                {"center": (0.5, 0.5), "sigma": 0.18, "amplitude": 0.25},
            ),
        ],
        seed=7,
        width=48,
        height=48,
        cell_size=1.0 / 47.0,
    )
    mesh = surfacegen.heightfield_to_mesh(surfacegen.gen_heightfield(spec), 1)
    df = distfield.build_distance_field(mesh, resolution=48)
    return mesh, df


def advertised_ranges(mesh) -> dict:
    diag = mesh.aabb_diagonal()
    return {
        "amplitude_A": dict(SWEEP_RANGE),
        "decay_B": dict(SWEEP_RANGE),
        "kappa": {"min": 100.0, "max": 1000.0, "step": 50.0},
        "tau": {"min": 0.0, "max": 5.0, "step": 0.1},
        "sigma": {"min": 0.02 * diag, "max": 0.3 * diag, "step": 0.002 * diag},
        "force_scale": {"min": 0.0, "max": 2.0, "step": 0.1},
    }


class TuneSession:
    """One live simulation: own state and params, shared read-only scene."""

    def __init__(self, mesh, df, params, config):
        self.id = uuid.uuid4().hex[:12]
        self.sim = simulator.Simulator(
            mesh, df, params, simulator.MODE_HAPTIC_SNAP, config
        )
        lo, hi = mesh.aabb()
        start = 0.5 * (lo + hi)
        start[2] = hi[2] + 0.35 * mesh.aabb_diagonal()
        self.state = self.sim.initial_state(start)
        self.dt = 1.0 / self.sim.config.rate

    def set_params(self, params: forcemodel.ForceParams):
        self.sim.params = params.validate()

    def advance(self, goal, substeps: int = STREAM_CHUNK) -> dict:
        for _ in range(substeps):
            self.state = self.sim.step(self.state, self.dt, goal)
        force = self.sim.last_force
        return {
            "t": self.state.t,
            "s": [float(v) for v in self.state.s],
            "p": [float(v) for v in self.state.p],
            "zone": self.state.zone,
            "touching": bool(self.state.touching),
            "f_spring": [float(v) for v in force.f_spring],
            "f_snap": [float(v) for v in force.f_snap],
            "f_total": [float(v) for v in force.total],
        }


def create_app(mesh=None, df=None, config=None) -> FastAPI:
    if mesh is None:
        mesh, df = default_scene()
    elif df is None:
        df = distfield.build_distance_field(mesh)
    base_config = config

    app = FastAPI(title="snapforge tuning workbench")
    sessions: dict[str, TuneSession] = {}

    def scene_params(**overrides) -> forcemodel.ForceParams:
        return forcemodel.ForceParams.defaults_for(mesh, df, **overrides)

    @app.get("/profile")
    def get_profile(A: float = 3.0, B: float = 2.0, samples: int = 101):
        try:
            rows = forcemodel.profile_table(A, B, samples)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "rows": [
                {"x": x, "f_decay": fd, "f_mag": fm} for x, fd, fm in rows
            ],
            "ranges": advertised_ranges(mesh),
        }

    @app.get("/scene")
    def get_scene(samples: int = 161):
        lo, hi = mesh.aabb()
        y_mid = 0.5 * (lo[1] + hi[1])
        xs = np.linspace(lo[0], hi[0], samples)
        tree = distfield.mesh_bvh(mesh)
        zs = []
        top = hi[2] + 1.0
        for x in xs:
            hit = tree.segment_hit((x, y_mid, top), (x, y_mid, lo[2] - 1.0))
            if hit is None:
                zs.append(float(lo[2]))
            else:
                _, t, _, _ = hit
                zs.append(float(top + t * (lo[2] - 1.0 - top)))
        params = scene_params()
        return {
            "xs": [float(x) for x in xs],
            "zs": zs,
            "y": float(y_mid),
            "aabb": {"lo": [float(v) for v in lo], "hi": [float(v) for v in hi]},
            "params": asdict(params),
            "ranges": advertised_ranges(mesh),
        }

    @app.post("/session")
    def create_session(body: dict | None = None):
        overrides = (body or {}).get("params", {})
        try:
            params = scene_params(**overrides)
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        session = TuneSession(mesh, df, params, base_config)
        sessions[session.id] = session
        return {"id": session.id, "params": asdict(session.sim.params)}

    @app.post("/session/{sid}/params")
    def set_params(sid: str, body: dict):
        session = sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail="stale session id")
        merged = asdict(session.sim.params)
        merged.update(body)
        try:
            params = forcemodel.ForceParams(**merged).validate()
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        session.set_params(params)
        return {"ok": True, "params": asdict(params)}

    @app.websocket("/session/{sid}/stream")
    async def stream(ws: WebSocket, sid: str):
        session = sessions.get(sid)
        if session is None:
            await ws.close(code=1008, reason="stale session id")
            return
        await ws.accept()
        try:
            while True:
                msg = await ws.receive_json()
                if not all(k in msg for k in ("x", "y", "z")):
                    await ws.send_json({"error": "malformed goal"})
                    continue
                try:
                    goal = np.array(
                        [float(msg["x"]), float(msg["y"]), float(msg["z"])]
                    )
                except (TypeError, ValueError):
                    await ws.send_json({"error": "malformed goal"})
                    continue
                try:
                    frame = session.advance(goal)
                except simulator.SimulationUnstable as exc:
                    await ws.send_json({"error": str(exc)})
                    break
                await ws.send_json(frame)
        except WebSocketDisconnect:
            pass

    return app


def main(argv=None):
    parser = argparse.ArgumentParser(description="run the tuning workbench server")
    parser.add_argument("--mesh", help="OBJ surface (default: builtin procedural)")
    parser.add_argument("--sdf", help="prebuilt distance-field cache")
    parser.add_argument("--sdf-res", type=int, default=distfield.DEFAULT_RESOLUTION)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8787)
    args = parser.parse_args(argv)

    mesh = df = None
    if args.mesh:
        mesh = surfacegen.load_mesh(args.mesh)
        if args.sdf:
            df = distfield.load_distance_field(args.sdf)
        else:
            df = distfield.build_distance_field(mesh, args.sdf_res)
    app = create_app(mesh, df)

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
