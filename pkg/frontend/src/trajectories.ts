// Client-side mirror of the engine's closed-form shape trajectories, used
// only to DRAW shapes between server events.  Parameters always come from
// the service's session_started payload; positions computed here must
// stay within 1 px of the engine's (same formulas, double precision).

import type { TrajectoryParams } from "./protocol.js";

export function shapePosition(
  traj: TrajectoryParams,
  tMs: number
): { x: number; y: number } {
  const t = tMs / 1000;
  switch (traj.kind) {
    case "circle-orbit": {
      const theta = traj.omega * t + traj.phase;
      return {
        x: traj.cx + traj.amp_x * Math.cos(theta),
        y: traj.cy + traj.amp_y * Math.sin(theta),
      };
    }
    case "linear-bounce": {
      const u = (2 / Math.PI) * Math.asin(Math.sin(traj.omega * t + traj.phase));
      return { x: traj.cx + traj.amp_x * u, y: traj.cy + traj.amp_y * u };
    }
    case "lissajous":
      return {
        x: traj.cx + traj.amp_x * Math.sin(traj.ratio_x * traj.omega * t + traj.phase),
        y: traj.cy + traj.amp_y * Math.sin(traj.ratio_y * traj.omega * t),
      };
  }
}
