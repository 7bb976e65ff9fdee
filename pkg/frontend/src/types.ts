// Wire types of the tuning service. The UI never computes forces itself;
// every displayed number originates from one of these payloads.

export interface ProfileRow {
  x: number;
  f_decay: number;
  f_mag: number;
}

export interface SliderRange {
  min: number;
  max: number;
  step: number;
}

export type Ranges = Record<string, SliderRange>;

export interface ProfileResponse {
  rows: ProfileRow[];
  ranges: Ranges;
}

export interface ForceParams {
  kappa: number;
  tau: number;
  amplitude_A: number;
  decay_B: number;
  sigma: number;
  buffer_eps: number;
  force_scale: number;
  profile_kind: string;
}

export interface Scene {
  xs: number[];
  zs: number[];
  y: number;
  aabb: { lo: number[]; hi: number[] };
  params: ForceParams;
  ranges: Ranges;
}

export type Zone = "no_snap" | "snap" | "buffer" | "contact";

export interface Frame {
  t: number;
  s: number[];
  p: number[];
  zone: Zone;
  touching: boolean;
  f_spring: number[];
  f_snap: number[];
  f_total: number[];
}

export interface SessionInfo {
  id: string;
  params: ForceParams;
}
