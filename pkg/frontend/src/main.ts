import { TuneApi } from "./api.js";
import { LatestFrame } from "./frameQueue.js";
import { buildPlotModel, renderProfile } from "./profilePlot.js";
import { ParamsState, sliderSpecs, snapToRange } from "./sliders.js";
import { GoalStream } from "./stream.js";
import { CrossSectionView, ZONE_COLORS } from "./view.js";
import type { Frame, ProfileRow, Scene } from "./types.js";

const BASE = (window as unknown as { TUNESERVER?: string }).TUNESERVER ?? "http://127.0.0.1:8787";

const ARROW_SCALE = 0.35; // world units per force unit, display only

async function start(): Promise<void> {
  const api = new TuneApi(BASE);
  const scene: Scene = await api.getScene();
  const session = await api.createSession();
  const params = new ParamsState(session.params);
  const view = new CrossSectionView(scene);
  const frames = new LatestFrame();

  const sceneCanvas = document.getElementById("scene") as HTMLCanvasElement;
  const plotCanvas = document.getElementById("plot") as HTMLCanvasElement;
  const statusEl = document.getElementById("status") as HTMLSpanElement;
  const slidersEl = document.getElementById("sliders") as HTMLDivElement;

  let profileRows: ProfileRow[] = [];
  let lastFrame: Frame | null = null;

  async function refreshProfile(): Promise<void> {
    const p = params.rendered();
    const resp = await api.getProfile(p.amplitude_A, p.decay_B, 101);
    profileRows = resp.rows;
    const ctx = plotCanvas.getContext("2d");
    if (ctx) renderProfile(ctx, buildPlotModel(profileRows), plotCanvas.width, plotCanvas.height);
  }

  function buildSliders(): void {
    slidersEl.innerHTML = "";
    for (const spec of sliderSpecs(scene.ranges, params.rendered())) {
      const row = document.createElement("label");
      row.className = "slider-row";
      const title = document.createElement("span");
      const value = document.createElement("code");
      const input = document.createElement("input");
      input.type = "range";
      input.min = String(spec.min);
      input.max = String(spec.max);
      input.step = String(spec.step);
      input.value = String(spec.value);
      title.textContent = spec.label;
      value.textContent = spec.value.toPrecision(4);
      input.addEventListener("input", async () => {
        const snapped = snapToRange(spec, Number(input.value));
        params.edit(spec.name, snapped);
        const ack = await api.setParams(session.id, { [spec.name]: snapped });
        params.ack(ack.params);
        value.textContent = String(
          (ack.params as unknown as Record<string, number>)[spec.name].toPrecision(4),
        );
        void refreshProfile(); // re-request within the same frame
      });
      row.append(title, input, value);
      slidersEl.append(row);
    }
  }

  const stream = new GoalStream(api.streamUrl(session.id), {
    onFrame: (f) => frames.push(f),
    onStatus: (s) => {
      statusEl.textContent = s;
      statusEl.className = s;
    },
  });
  stream.connect();

  sceneCanvas.addEventListener("mousemove", (ev) => {
    const rect = sceneCanvas.getBoundingClientRect();
    const [x, z] = view.screenToWorld(
      ev.clientX - rect.left,
      ev.clientY - rect.top,
      sceneCanvas.width,
      sceneCanvas.height,
    );
    stream.sendGoal(x, scene.y, z);
  });

  function drawScene(): void {
    const ctx = sceneCanvas.getContext("2d");
    if (!ctx) return;
    const w = sceneCanvas.width;
    const h = sceneCanvas.height;
    const frame = frames.take();
    if (frame) lastFrame = frame;
    const f = lastFrame;

    ctx.fillStyle = f ? ZONE_COLORS[f.zone] : "#ffffff";
    ctx.fillRect(0, 0, w, h);

    const p = params.rendered();
    const polyline = (pts: Array<[number, number]>, color: string, width = 1) => {
      ctx.strokeStyle = color;
      ctx.lineWidth = width;
      ctx.beginPath();
      pts.forEach(([x, z], i) => {
        const [px, py] = view.worldToScreen(x, z, w, h);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.stroke();
    };
    polyline(view.bandPolyline(p.sigma), "#74a9cf");
    polyline(view.bandPolyline(p.buffer_eps), "#2b8cbe");
    if (profileRows.length) {
      polyline(view.msubPolyline(p, profileRows[0]), "#d95f0e");
    }
    polyline(view.bandPolyline(0), "#222222", 2);

    if (f) {
      for (const arrow of view.forceArrows(f, ARROW_SCALE)) {
        const [ax, ay] = view.worldToScreen(arrow.from[0], arrow.from[1], w, h);
        const [bx, by] = view.worldToScreen(arrow.to[0], arrow.to[1], w, h);
        ctx.strokeStyle = arrow.color;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(ax, ay);
        ctx.lineTo(bx, by);
        ctx.stroke();
      }
      const dot = (pos: number[], color: string, r: number) => {
        const [px, py] = view.worldToScreen(pos[0], pos[2], w, h);
        ctx.fillStyle = color;
        ctx.beginPath();
        ctx.arc(px, py, r, 0, 2 * Math.PI);
        ctx.fill();
      };
      dot(f.p, "#2c7fb8", 5); // proxy stays on the surface
      dot(f.s, "#111111", 4); // stylus may penetrate
    }
    requestAnimationFrame(drawScene);
  }

  buildSliders();
  await refreshProfile();
  requestAnimationFrame(drawScene);
}

start().catch((err) => {
  const statusEl = document.getElementById("status");
  if (statusEl) {
    statusEl.textContent = `failed to reach tuneserver: ${err}`;
    statusEl.className = "closed";
  }
});
