// Pointer-as-gaze: the mouse stands in for the tracker.  Canvas
// coordinates map to the engine's virtual screen through an affine,
// invertible transform, and sample timestamps come from a strictly
// monotonic session-relative clock.

import type { SampleMessage, TriggerMessage } from "./protocol.js";

export interface PointerGazeAdapter {
  canvasW: number;
  canvasH: number;
  virtualW: number;
  virtualH: number;
  sessionId: string;
}

export function makeAdapter(
  canvasW: number,
  canvasH: number,
  virtualW = 1920,
  virtualH = 1080,
  sessionId = ""
): PointerGazeAdapter {
  if (canvasW <= 0 || canvasH <= 0 || virtualW <= 0 || virtualH <= 0) {
    throw new Error("adapter dimensions must be positive");
  }
  return { canvasW, canvasH, virtualW, virtualH, sessionId };
}

export function toVirtual(
  adapter: PointerGazeAdapter,
  px: number,
  py: number
): { x: number; y: number } {
  return {
    x: (px * adapter.virtualW) / adapter.canvasW,
    y: (py * adapter.virtualH) / adapter.canvasH,
  };
}

export function toCanvas(
  adapter: PointerGazeAdapter,
  vx: number,
  vy: number
): { x: number; y: number } {
  return {
    x: (vx * adapter.canvasW) / adapter.virtualW,
    y: (vy * adapter.canvasH) / adapter.virtualH,
  };
}

/** Session-relative clock delivering strictly increasing whole ms. */
export class SessionClock {
  private last = -1;
  constructor(private readonly now: () => number, private readonly t0: number) {}

  static start(now: () => number = () => performance.now()): SessionClock {
    return new SessionClock(now, now());
  }

  next(): number {
    let t = Math.round(this.now() - this.t0);
    if (t <= this.last) {
      t = this.last + 1;
    }
    this.last = t;
    return t;
  }
}

export function mapPointer(
  adapter: PointerGazeAdapter,
  clock: SessionClock,
  px: number,
  py: number
): SampleMessage {
  const v = toVirtual(adapter, px, py);
  return {
    type: "sample",
    session_id: adapter.sessionId,
    t_ms: clock.next(),
    x: v.x,
    y: v.y,
    valid: true,
  };
}

export function mapTrigger(
  adapter: PointerGazeAdapter,
  clock: SessionClock,
  kind: "press" | "release"
): TriggerMessage {
  return { type: "trigger", session_id: adapter.sessionId, t_ms: clock.next(), kind };
}
