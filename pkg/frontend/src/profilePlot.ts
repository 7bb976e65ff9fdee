import type { ProfileRow } from "./types.js";

export interface PlotPoint {
  x: number;
  y: number;
}

export interface ProfilePlotModel {
  empty: boolean;
  decay: PlotPoint[];
  mag: PlotPoint[];
  peak: PlotPoint | null; // the f_decay maximum, taken from the table rows
  yMax: number;
}

// Pure pass-through of the server's profile table: the plotted points ARE
// the rows, and the peak marker sits on the row with the largest f_decay
// (never recomputed locally).
export function buildPlotModel(rows: ProfileRow[]): ProfilePlotModel {
  if (!rows.length) {
    return { empty: true, decay: [], mag: [], peak: null, yMax: 1 };
  }
  const decay = rows.map((r) => ({ x: r.x, y: r.f_decay }));
  const mag = rows.map((r) => ({ x: r.x, y: r.f_mag }));
  let peak = decay[0];
  for (const p of decay) if (p.y > peak.y) peak = p;
  const yMax = Math.max(...decay.map((p) => p.y), ...mag.map((p) => p.y));
  return { empty: false, decay, mag, peak, yMax };
}

// Minimal structural slice of CanvasRenderingContext2D so the renderer is
// testable without a DOM.
export interface Ctx2dLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
}

const MARGIN = 28;

export function toScreen(
  p: PlotPoint,
  yMax: number,
  w: number,
  h: number,
): [number, number] {
  const px = MARGIN + p.x * (w - 2 * MARGIN);
  const py = h - MARGIN - (p.y / yMax) * (h - 2 * MARGIN);
  return [px, py];
}

export function renderProfile(
  ctx: Ctx2dLike,
  model: ProfilePlotModel,
  w: number,
  h: number,
): void {
  ctx.clearRect(0, 0, w, h);
  if (model.empty) {
    ctx.fillStyle = "#777";
    ctx.font = "13px sans-serif";
    ctx.fillText("no profile data", w / 2 - 40, h / 2);
    return;
  }
  const curves: Array<[PlotPoint[], string]> = [
    [model.decay, "#2c7fb8"],
    [model.mag, "#993404"],
  ];
  for (const [pts, color] of curves) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    pts.forEach((p, i) => {
      const [px, py] = toScreen(p, model.yMax, w, h);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
  if (model.peak) {
    const [px, py] = toScreen(model.peak, model.yMax, w, h);
    ctx.fillStyle = "#2c7fb8";
    ctx.beginPath();
    ctx.arc(px, py, 4, 0, 2 * Math.PI);
    ctx.fill();
    ctx.font = "11px sans-serif";
    ctx.fillText(`peak @ x=${model.peak.x.toFixed(3)}`, px + 6, py - 6);
  }
}
