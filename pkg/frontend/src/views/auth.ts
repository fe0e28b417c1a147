// Auth Demo: enroll a pursuit password, then verify it.  Shapes are drawn
// from the client-side trajectory mirror using the server's seeded
// parameters; epoch winners and the final outcome come from the service.
//
// Enrollment runs a session with a throwaway password and records the
// server-matched winner of each epoch as the enrolled sequence; verify
// starts a fresh seeded layout with that sequence and must end in Accept.

import { mapPointer, makeAdapter, SessionClock } from "../adapter.js";
import type { PointerGazeAdapter } from "../adapter.js";
import { ServiceConnection } from "../connection.js";
import type { EpochResultEvent, SessionEnded, SessionStarted } from "../protocol.js";
import { shapePosition } from "../trajectories.js";

type Phase = "idle" | "enrolling" | "verifying" | "accepted" | "rejected";

export class AuthDemo {
  private adapter: PointerGazeAdapter | null = null;
  private clock = SessionClock.start();
  private sessionId = "";
  private started: SessionStarted | null = null;
  private phase: Phase = "idle";
  private enrolled: string[] = [];
  private winners: string[] = [];
  private animation = 0;
  private sessionT0 = 0;
  private unsubscribe: (() => void) | null = null;

  constructor(
    private readonly conn: ServiceConnection,
    private readonly canvas: HTMLCanvasElement,
    private readonly status: HTMLElement,
    private readonly enrollButton: HTMLButtonElement,
    private readonly verifyButton: HTMLButtonElement
  ) {}

  mount(): void {
    this.enrollButton.onclick = () => void this.begin("enrolling");
    this.verifyButton.onclick = () => void this.begin("verifying");
    this.verifyButton.disabled = true;
    this.status.textContent = "enroll: pursue one shape per epoch";
    this.unsubscribe = this.conn.onEvent((event) => {
      if (event.type === "epoch_result") {
        this.onEpoch(event);
      } else if (event.type === "session_ended" && event.session_id === this.sessionId) {
        this.onEnded(event);
      }
    });
    this.canvas.onpointermove = (e) => {
      if (!this.adapter || this.phase === "idle" || this.phase === "accepted" || this.phase === "rejected") {
        return; // input disabled outside a live session
      }
      const rect = this.canvas.getBoundingClientRect();
      this.conn.send(
        mapPointer(this.adapter, this.clock, e.clientX - rect.left, e.clientY - rect.top)
      );
    };
    this.drawIdle();
  }

  unmount(): void {
    cancelAnimationFrame(this.animation);
    this.unsubscribe?.();
    this.canvas.onpointermove = null;
    if (this.sessionId && (this.phase === "enrolling" || this.phase === "verifying")) {
      this.conn.send({ type: "end_session", session_id: this.sessionId });
    }
  }

  private async begin(phase: "enrolling" | "verifying"): Promise<void> {
    const seed = Math.floor(Math.random() * 0xffffffff);
    const placeholder = ["s0", "s0", "s0", "s0"];
    const password = phase === "verifying" ? this.enrolled : placeholder;
    const started = await this.conn.request<SessionStarted>(
      { type: "start_session", mode: "auth", seed, password },
      "session_started"
    );
    this.started = started;
    this.sessionId = started.session_id;
    this.phase = phase;
    this.winners = [];
    this.adapter = makeAdapter(
      this.canvas.width,
      this.canvas.height,
      started.screen_w ?? 1920,
      started.screen_h ?? 1080,
      this.sessionId
    );
    this.clock = SessionClock.start();
    this.sessionT0 = performance.now();
    this.status.textContent =
      phase === "enrolling"
        ? "enrolling: follow one shape per epoch with the pointer"
        : "verifying: repeat your enrolled pursuit";
    cancelAnimationFrame(this.animation);
    this.renderLoop();
    // the session closes itself once the nominal duration has elapsed
    const duration = started.nominal_duration_ms ?? 6750;
    window.setTimeout(() => {
      if (this.sessionId === started.session_id) {
        this.conn.send({ type: "end_session", session_id: this.sessionId });
      }
    }, duration + 400);
  }

  private onEpoch(event: EpochResultEvent): void {
    if (event.session_id !== this.sessionId) return;
    this.winners[event.index] = event.winner;
    if (this.phase === "enrolling") {
      this.status.textContent = `epoch ${event.index}: you pursued ${event.winner}`;
    } else {
      this.status.textContent = `epoch ${event.index}: ${event.matched ? "matched" : "mismatch"}`;
    }
  }

  private onEnded(event: SessionEnded): void {
    if (this.phase === "enrolling") {
      this.enrolled = [...this.winners];
      this.phase = "idle";
      this.verifyButton.disabled = this.enrolled.length !== (this.started?.password_length ?? 4);
      this.status.textContent = this.verifyButton.disabled
        ? "enrollment incomplete, try again"
        : `enrolled: ${this.enrolled.join(" ")} — now verify`;
    } else if (this.phase === "verifying") {
      if (event.outcome === "Accept") {
        this.phase = "accepted";
        this.status.textContent = `ACCEPTED in ${event.wall_ms} ms`;
      } else {
        this.phase = "rejected";
        this.status.textContent = `outcome: ${event.outcome}`;
      }
    }
    this.sessionId = "";
    cancelAnimationFrame(this.animation);
    this.drawOutcome();
  }

  private renderLoop(): void {
    const frame = () => {
      this.drawShapes(performance.now() - this.sessionT0);
      this.animation = requestAnimationFrame(frame);
    };
    this.animation = requestAnimationFrame(frame);
  }

  private drawShapes(tMs: number): void {
    const ctx = this.canvas.getContext("2d")!;
    const started = this.started;
    if (!started || !this.adapter) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const epochPitch = (started.epoch_ms ?? 1500) + (started.inter_epoch_ms ?? 250);
    const epoch = Math.min(
      Math.floor(tMs / epochPitch),
      (started.password_length ?? 4) - 1
    );
    ctx.fillStyle = "#9aa";
    ctx.font = "14px system-ui";
    ctx.fillText(`epoch ${epoch}`, 12, 20);
    const palette = ["#ff7a66", "#66d9ff", "#ffd166", "#8aff80", "#d19aff", "#ffa3d1"];
    for (const [i, traj] of (started.trajectories ?? []).entries()) {
      const pos = shapePosition(traj, tMs);
      const sx = (pos.x * this.canvas.width) / (started.screen_w ?? 1920);
      const sy = (pos.y * this.canvas.height) / (started.screen_h ?? 1080);
      ctx.beginPath();
      ctx.arc(sx, sy, 14, 0, 2 * Math.PI);
      ctx.fillStyle = palette[i % palette.length];
      ctx.fill();
      ctx.fillStyle = "#10131a";
      ctx.font = "11px system-ui";
      ctx.fillText(traj.shape_id, sx - 8, sy + 4);
    }
  }

  private drawIdle(): void {
    const ctx = this.canvas.getContext("2d")!;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.fillStyle = "#9aa";
    ctx.font = "16px system-ui";
    ctx.fillText("press Enroll to begin", 20, 40);
  }

  private drawOutcome(): void {
    const ctx = this.canvas.getContext("2d")!;
    if (this.phase === "accepted") {
      ctx.fillStyle = "rgba(40, 160, 80, 0.25)";
      ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
      ctx.fillStyle = "#6fe39a";
      ctx.font = "32px system-ui";
      ctx.fillText("ACCEPTED", this.canvas.width / 2 - 80, this.canvas.height / 2);
    } else if (this.phase === "rejected") {
      ctx.fillStyle = "rgba(180, 60, 60, 0.25)";
      ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
      ctx.fillStyle = "#ff8a8a";
      ctx.font = "32px system-ui";
      ctx.fillText("REJECTED", this.canvas.width / 2 - 80, this.canvas.height / 2);
    }
  }
}
