import type { Frame } from "./types.js";

// Single-slot latest-wins queue: the render loop always draws the newest
// frame and stale frames are dropped, never buffered.
export class LatestFrame {
  private slot: Frame | null = null;
  dropped = 0;

  push(frame: Frame): void {
    if (this.slot !== null) this.dropped += 1;
    this.slot = frame;
  }

  take(): Frame | null {
    const f = this.slot;
    this.slot = null;
    return f;
  }

  peek(): Frame | null {
    return this.slot;
  }
}
