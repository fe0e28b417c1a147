// Arbiter Playground: targets light up when the service classifies the
// trigger stream into clicks, double clicks, and holds at the gaze point.
// The hit target id arrives inside each pointer_action event; the client
// does no hit-testing of its own.

import { mapPointer, mapTrigger, makeAdapter, SessionClock } from "../adapter.js";
import type { PointerGazeAdapter } from "../adapter.js";
import { ServiceConnection } from "../connection.js";
import type { PointerActionEvent, SessionStarted } from "../protocol.js";

interface Target {
  id: string;
  x: number;
  y: number;
  w: number;
  h: number;
}

const FLASH_COLORS: Record<string, string> = {
  click: "#66d9ff",
  double_click: "#ffd166",
  hold_start: "#8aff80",
  hold_end: "#d19aff",
};

export class ArbiterPlayground {
  private adapter: PointerGazeAdapter | null = null;
  private clock = SessionClock.start();
  private sessionId = "";
  private holding = false;
  private pointer = { x: 0, y: 0 };
  private flashes = new Map<string, { color: string; until: number }>();
  private log: string[] = [];
  private animation = 0;
  private unsubscribe: (() => void) | null = null;

  private readonly targets: Target[] = [
    { id: "alpha", x: 160, y: 160, w: 420, h: 300 },
    { id: "beta", x: 750, y: 160, w: 420, h: 300 },
    { id: "gamma", x: 1340, y: 160, w: 420, h: 300 },
    { id: "delta", x: 455, y: 620, w: 420, h: 300 },
    { id: "epsilon", x: 1045, y: 620, w: 420, h: 300 },
  ];

  constructor(
    private readonly conn: ServiceConnection,
    private readonly canvas: HTMLCanvasElement,
    private readonly logOut: HTMLElement
  ) {}

  async mount(): Promise<void> {
    const started = await this.conn.request<SessionStarted>(
      { type: "start_session", mode: "arbiter", targets: this.targets },
      "session_started"
    );
    this.sessionId = started.session_id;
    this.adapter = makeAdapter(this.canvas.width, this.canvas.height, 1920, 1080, this.sessionId);
    this.clock = SessionClock.start();
    this.logOut.textContent = "move to aim, press to commit; hold for drag";

    this.unsubscribe = this.conn.onEvent((event) => {
      if (event.type === "pointer_action" && event.session_id === this.sessionId) {
        this.onAction(event);
      }
    });
    this.canvas.onpointermove = (e) => {
      if (!this.adapter) return;
      const rect = this.canvas.getBoundingClientRect();
      const px = e.clientX - rect.left;
      const py = e.clientY - rect.top;
      this.pointer = { x: px, y: py };
      this.conn.send(mapPointer(this.adapter, this.clock, px, py));
    };
    this.canvas.onpointerdown = (e) => {
      if (!this.adapter || e.button !== 0 || this.holding) return;
      this.holding = true;
      this.conn.send(mapTrigger(this.adapter, this.clock, "press"));
    };
    this.canvas.onpointerup = () => {
      if (!this.adapter || !this.holding) return;
      this.holding = false;
      this.conn.send(mapTrigger(this.adapter, this.clock, "release"));
      // nudge the engine clock forward so deferred clicks can fire even
      // while the pointer rests: an idle sample half a window later
      window.setTimeout(() => {
        if (this.adapter && this.sessionId) {
          this.conn.send(mapPointer(this.adapter, this.clock, this.pointer.x, this.pointer.y));
        }
      }, 450);
    };
    const frame = () => {
      this.draw();
      this.animation = requestAnimationFrame(frame);
    };
    this.animation = requestAnimationFrame(frame);
  }

  unmount(): void {
    cancelAnimationFrame(this.animation);
    this.unsubscribe?.();
    this.canvas.onpointermove = null;
    this.canvas.onpointerdown = null;
    this.canvas.onpointerup = null;
    if (this.sessionId) {
      this.conn.send({ type: "end_session", session_id: this.sessionId });
    }
  }

  private onAction(event: PointerActionEvent): void {
    if (event.target) {
      this.flashes.set(event.target, {
        color: FLASH_COLORS[event.kind] ?? "#fff",
        until: performance.now() + 550,
      });
    }
    this.log.unshift(
      `${event.kind} @ (${Math.round(event.x)}, ${Math.round(event.y)}) t=${event.t_ms}` +
        (event.target ? ` on ${event.target}` : "")
    );
    this.log = this.log.slice(0, 8);
    this.logOut.textContent = this.log.join("\n");
  }

  private draw(): void {
    const ctx = this.canvas.getContext("2d")!;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const sx = this.canvas.width / 1920;
    const sy = this.canvas.height / 1080;
    const now = performance.now();
    for (const t of this.targets) {
      const flash = this.flashes.get(t.id);
      const lit = flash !== undefined && flash.until > now;
      ctx.fillStyle = lit ? flash.color : "#1d2836";
      ctx.globalAlpha = lit ? 0.85 : 1.0;
      ctx.fillRect(t.x * sx, t.y * sy, t.w * sx, t.h * sy);
      ctx.globalAlpha = 1.0;
      ctx.strokeStyle = "#3b4a5e";
      ctx.strokeRect(t.x * sx, t.y * sy, t.w * sx, t.h * sy);
      ctx.fillStyle = lit ? "#10131a" : "#cfe3f5";
      ctx.font = "15px system-ui";
      ctx.fillText(t.id, (t.x + 16) * sx, (t.y + 28) * sy);
    }
    ctx.beginPath();
    ctx.arc(this.pointer.x, this.pointer.y, 5, 0, 2 * Math.PI);
    ctx.fillStyle = this.holding ? "#ffd166" : "#6fd3ff";
    ctx.fill();
  }
}
