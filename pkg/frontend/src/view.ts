import type { ForceParams, Frame, ProfileRow, Scene, Zone } from "./types.js";

export const ZONE_COLORS: Record<Zone, string> = {
  no_snap: "#f5f5f5",
  snap: "#dbeefb",
  buffer: "#b8dcf5",
  contact: "#9ccf8f",
};

export interface OverlayToggles {
  snapBand: boolean;
  bufferBand: boolean;
  msub: boolean;
  forceArrows: boolean;
}

export interface Arrow {
  from: [number, number]; // world (x, z)
  to: [number, number];
  magnitude: number;
  color: string;
}

// 2-D cross-section of the scene at the slice y: surface polyline, zone
// shading behind it, stylus/proxy dots, and force arrows scaled from the
// streamed frame vectors. All numbers shown come from server payloads.
export class CrossSectionView {
  readonly xMin: number;
  readonly xMax: number;
  readonly zMin: number;
  readonly zMax: number;

  constructor(readonly scene: Scene) {
    this.xMin = Math.min(...scene.xs);
    this.xMax = Math.max(...scene.xs);
    const zLo = Math.min(...scene.zs);
    const zHi = Math.max(...scene.zs);
    const pad = 0.35 * (this.xMax - this.xMin);
    this.zMin = zLo - 0.3 * pad;
    this.zMax = zHi + pad;
  }

  worldToScreen(x: number, z: number, w: number, h: number): [number, number] {
    const px = ((x - this.xMin) / (this.xMax - this.xMin)) * w;
    const py = h - ((z - this.zMin) / (this.zMax - this.zMin)) * h;
    return [px, py];
  }

  screenToWorld(px: number, py: number, w: number, h: number): [number, number] {
    const x = this.xMin + (px / w) * (this.xMax - this.xMin);
    const z = this.zMin + ((h - py) / h) * (this.zMax - this.zMin);
    return [x, z];
  }

  zoneColor(zone: Zone): string {
    return ZONE_COLORS[zone] ?? ZONE_COLORS.no_snap;
  }

  // Band overlays: the surface polyline lifted by sigma (snap zone edge)
  // and by buffer_eps (direction-switch shell).
  bandPolyline(offset: number): Array<[number, number]> {
    return this.scene.xs.map((x, i) => [x, this.scene.zs[i] + offset]);
  }

  // Rest locus below the surface. Depth uses only server-sent numbers:
  // the profile table's x=0 row balanced against the acknowledged spring
  // constant (kappa * depth = force_scale * f_decay(0)).
  msubPolyline(params: ForceParams, profileRow0: ProfileRow): Array<[number, number]> {
    const depth = (params.force_scale * profileRow0.f_decay) / params.kappa;
    return this.bandPolyline(-depth);
  }

  // Arrows anchored at the stylus; zero-magnitude vectors yield
  // zero-length arrows (e.g. snap outside the snap zone).
  forceArrows(frame: Frame, scale: number): Arrow[] {
    const sx = frame.s[0];
    const sz = frame.s[2];
    const mk = (vec: number[], color: string): Arrow => {
      const magnitude = Math.hypot(vec[0], vec[1], vec[2]);
      return {
        from: [sx, sz],
        to: [sx + scale * vec[0], sz + scale * vec[2]],
        magnitude,
        color,
      };
    };
    return [mk(frame.f_spring, "#444444"), mk(frame.f_snap, "#d95f0e")];
  }
}

// Records the zone shading the view would draw for each incoming frame;
// the shading is a pure function of the streamed zone tag.
export class ZoneTracker {
  history: Zone[] = [];
  transitions: Zone[] = [];

  observe(frame: Frame): string {
    this.history.push(frame.zone);
    if (
      this.transitions.length === 0 ||
      this.transitions[this.transitions.length - 1] !== frame.zone
    ) {
      this.transitions.push(frame.zone);
    }
    return ZONE_COLORS[frame.zone];
  }
}
