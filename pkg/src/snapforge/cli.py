"""Command-line pipelines: gen, sdf, simulate, brush, eval, report.

Every command writes its artifacts plus a manifest (input hashes, seed,
version) sufficient to reproduce the run bit-identically. Exit codes:
0 ok, 2 bad arguments, 3 missing input, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, brushing, distfield, forcemodel, metrics, pgm, simulator, surfacegen

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_MISSING_INPUT = 3
EXIT_NUMERICAL = 4


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out_dir, command, args, inputs, outputs, seed=None):
    manifest = {
        "command": command,
        "version": __version__,
        "args": {k: v for k, v in vars(args).items() if k != "func"},
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {str(p): _sha256(p) for p in outputs},
    }
    path = Path(out_dir) / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n")
    return path


def _emit(args, payload: dict):
    if getattr(args, "format", "text") == "json":
        print(json.dumps(payload, default=str))
    else:
        for key, val in payload.items():
            print(f"{key}: {val}")


def _require(path) -> Path:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(p)
    return p


# ---------------------------------------------------------------------------
# sub-commands


def cmd_gen(args) -> int:
    spec_path = _require(args.spec)
    config = json.loads(spec_path.read_text())
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []

    hf_spec = surfacegen.HeightFieldSpec.from_json(json.dumps(config["heightfield"]))
    if args.seed is not None:
        hf_spec.seed = args.seed
    hf = surfacegen.gen_heightfield(hf_spec)
    surfacegen.save_heightfield(out_dir / "heightfield.pgm", hf)
    outputs += [out_dir / "heightfield.pgm", out_dir / "heightfield.pgm.meta"]

    upsample = int(config.get("upsample", args.upsample))
    mesh = surfacegen.heightfield_to_mesh(hf, upsample)
    surfacegen.save_mesh(out_dir / "mesh.obj", mesh)
    outputs.append(out_dir / "mesh.obj")

    if "texture" in config:
        tex_cfg = config["texture"]
        if "random" in tex_cfg:
            comps = surfacegen.random_gaussian_mixture(
                tex_cfg["random"].get("n", 3),
                args.seed if args.seed is not None else tex_cfg["random"].get("seed", 0),
            )
        else:
            comps = tex_cfg["components"]
        dims = tuple(tex_cfg.get("dims", (128, 128)))
        tex = surfacegen.gen_scalar_texture(comps, dims)
        surfacegen.save_scalar_texture(out_dir / "texture.pgm", tex)
        outputs += [out_dir / "texture.pgm", out_dir / "texture.pgm.meta"]

    if "band" in config:
        band_spec = brushing.BandSpec.from_json(json.dumps(config["band"]))
        band, medial = brushing.make_band_texture(band_spec)
        pgm.write_mask(out_dir / "band.pgm", band)
        pgm.write_mask(out_dir / "medial.pgm", medial)
        outputs += [out_dir / "band.pgm", out_dir / "medial.pgm"]

    manifest = _write_manifest(
        out_dir, "gen", args, [spec_path], outputs, seed=args.seed or hf_spec.seed
    )
    _emit(args, {"out": str(out_dir), "manifest": str(manifest)})
    return EXIT_OK


def cmd_sdf(args) -> int:
    mesh_path = _require(args.mesh)
    mesh = surfacegen.load_mesh(mesh_path)
    df = distfield.build_distance_field(mesh, args.sdf_res)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    distfield.save_distance_field(out, df)
    manifest = _write_manifest(out.parent, "sdf", args, [mesh_path], [out])
    _emit(
        args,
        {
            "out": str(out),
            "dims": "x".join(str(d) for d in df.dims),
            "spacing": df.spacing,
            "manifest": str(manifest),
        },
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    mesh = surfacegen.load_mesh(_require(args.mesh))
    df = distfield.load_distance_field(_require(args.sdf))
    params = forcemodel.ForceParams.from_json(_require(args.params).read_text())
    script = simulator.TrajectoryScript.from_jsonl(_require(args.script).read_text())
    log = simulator.run_trajectory(mesh, df, params, args.mode, script, task=args.task)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(log.to_jsonl())
    manifest = _write_manifest(
        out.parent, "simulate", args, [args.mesh, args.sdf, args.params, args.script], [out]
    )
    _emit(
        args,
        {
            "out": str(out),
            "frames": len(log),
            "touch_count": simulator.touch_count(log),
            "manifest": str(manifest),
        },
    )
    return EXIT_OK


def cmd_brush(args) -> int:
    log = simulator.TrialLog.from_jsonl(_require(args.log).read_text())
    mesh = surfacegen.load_mesh(_require(args.mesh))
    w, h = (int(x) for x in args.dims.lower().split("x"))
    tex = brushing.record_brush(log, mesh, (w, h))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    brushing.save_brush_texture(out, tex)
    manifest = _write_manifest(out.parent, "brush", args, [args.log, args.mesh], [out])
    _emit(
        args,
        {
            "out": str(out),
            "tagged": int(tex.tags.sum()),
            "skipped_frames": tex.skipped,
            "manifest": str(manifest),
        },
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    inputs = []
    deviation = irregularity = None
    if args.brush:
        brush_mask = pgm.read_mask(_require(args.brush))
        band_mask = pgm.read_mask(_require(args.band))
        medial_mask = pgm.read_mask(_require(args.medial))
        inputs += [args.brush, args.band, args.medial]
        if brush_mask.shape != band_mask.shape or band_mask.shape != medial_mask.shape:
            raise ValueError(
                f"texture dimensions mismatch: brush {brush_mask.shape}, "
                f"band {band_mask.shape}, medial {medial_mask.shape}"
            )
        d_ref = metrics.edt(medial_mask)
        d_brush = metrics.edt(brush_mask)
        deviation = metrics.curve_deviation(d_ref, d_brush, band_mask)
        irregularity = metrics.curve_irregularity(d_brush, band_mask)

    error = None
    if args.measured is not None:
        if args.truth is None:
            raise ValueError("--measured requires --truth")
        error = metrics.localization_error(args.measured, args.truth)

    completion_time = None
    touch = None
    if args.log:
        log = simulator.TrialLog.from_jsonl(_require(args.log).read_text())
        inputs.append(args.log)
        completion_time = float(log.t[-1]) if len(log) else 0.0
        touch = simulator.touch_count(log)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    row = metrics.format_metrics_row(
        args.trial, args.mode, args.task, completion_time, deviation, irregularity,
        error, touch,
    )
    if out.exists():
        out.write_text(out.read_text().rstrip("\n") + "\n" + row + "\n")
    else:
        out.write_text(metrics.METRICS_CSV_HEADER + "\n" + row + "\n")
    manifest = _write_manifest(out.parent, "eval", args, inputs, [out])
    _emit(
        args,
        {
            "out": str(out),
            "deviation": deviation,
            "irregularity": irregularity,
            "error": error,
            "touch_count": touch,
            "manifest": str(manifest),
        },
    )
    return EXIT_OK


def cmd_report(args) -> int:
    text = _require(args.metrics).read_text()
    records = analysis.read_metrics_csv(text)
    report = analysis.summarize(
        records, n_resamples=args.resamples, level=args.level, seed=args.seed
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.csv").write_text(analysis.report_to_csv(report))
    (out_dir / "summary.json").write_text(analysis.report_to_json(report))
    (out_dir / "ci_segments.csv").write_text(analysis.ci_segments_csv(report))
    manifest = _write_manifest(
        out_dir,
        "report",
        args,
        [args.metrics],
        [out_dir / "report.csv", out_dir / "summary.json", out_dir / "ci_segments.csv"],
        seed=args.seed,
    )
    _emit(
        args,
        {
            "out": str(out_dir),
            "comparisons": len(report["comparisons"]),
            "errors": report["errors"],
            "manifest": str(manifest),
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snapforge",
        description="snap-to-surface haptic simulation and evaluation pipelines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("gen", help="generate surface, mesh, and task textures")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--upsample", type=int, default=2)
    add_format(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sdf", help="build the voxel distance field of a mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sdf-res", type=int, default=distfield.DEFAULT_RESOLUTION)
    add_format(p)
    p.set_defaults(func=cmd_sdf)

    p = sub.add_parser("simulate", help="replay a trajectory script")
    p.add_argument("--mesh", required=True)
    p.add_argument("--sdf", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--mode", required=True, choices=simulator.MODES)
    p.add_argument("--script", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--task", default="")
    add_format(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("brush", help="replay brushing frames into a texture")
    p.add_argument("--log", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--dims", default="256x256")
    p.add_argument("--out", required=True)
    add_format(p)
    p.set_defaults(func=cmd_brush)

    p = sub.add_parser("eval", help="score a trial (curve metrics, errors)")
    p.add_argument("--brush")
    p.add_argument("--band")
    p.add_argument("--medial")
    p.add_argument("--log")
    p.add_argument("--measured", type=float)
    p.add_argument("--truth", type=float)
    p.add_argument("--trial", default="0")
    p.add_argument("--mode", required=True, choices=analysis.MODES)
    p.add_argument("--task", required=True)
    p.add_argument("--out", required=True)
    add_format(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="bootstrap comparisons over a metrics CSV")
    p.add_argument("--metrics", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--resamples", type=int, default=analysis.DEFAULT_RESAMPLES)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    add_format(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for bad arguments
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except (simulator.SimulationUnstable, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
