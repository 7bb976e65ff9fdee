import type { ForceParams, Ranges } from "./types.js";

export interface SliderSpec {
  name: keyof ForceParams & string;
  label: string;
  min: number;
  max: number;
  step: number;
  value: number;
}

const SLIDER_ORDER: Array<[keyof ForceParams & string, string]> = [
  ["amplitude_A", "amplitude A"],
  ["decay_B", "decay rate B"],
  ["sigma", "snap distance σ"],
  ["kappa", "spring κ"],
  ["tau", "damping τ"],
  ["force_scale", "force scale"],
];

// Slider specs come straight from the server-advertised ranges; anything
// the server does not advertise gets no slider.
export function sliderSpecs(ranges: Ranges, params: ForceParams): SliderSpec[] {
  const specs: SliderSpec[] = [];
  for (const [name, label] of SLIDER_ORDER) {
    const range = ranges[name];
    if (!range) continue;
    specs.push({
      name,
      label,
      min: range.min,
      max: range.max,
      step: range.step,
      value: snapToRange(range, params[name] as number),
    });
  }
  return specs;
}

// Clamp into the advertised range and snap onto its step grid, so the UI
// can never request a value the server did not offer.
export function snapToRange(
  range: { min: number; max: number; step: number },
  raw: number,
): number {
  const clamped = Math.min(range.max, Math.max(range.min, raw));
  const steps = Math.round((clamped - range.min) / range.step);
  const snapped = range.min + steps * range.step;
  return Math.min(range.max, Math.max(range.min, Number(snapped.toPrecision(12))));
}

// Pending edits vs last-acknowledged server params: the view renders only
// acknowledged values, so what is on screen is what the simulation uses.
export class ParamsState {
  acknowledged: ForceParams;
  private pending: Partial<ForceParams> = {};

  constructor(initial: ForceParams) {
    this.acknowledged = { ...initial };
  }

  edit(name: keyof ForceParams & string, value: number): Partial<ForceParams> {
    (this.pending as Record<string, number>)[name] = value;
    return { ...this.pending };
  }

  ack(params: ForceParams): void {
    this.acknowledged = { ...params };
    this.pending = {};
  }

  rendered(): ForceParams {
    return this.acknowledged;
  }
}
