// Gesture Studio: hold the left button to draw a stroke with the pointer;
// release sends it for recognition (or training when a name is armed).
// Scores and matches come solely from gesture_result events.

import { mapPointer, mapTrigger, makeAdapter, SessionClock } from "../adapter.js";
import type { PointerGazeAdapter } from "../adapter.js";
import { ServiceConnection } from "../connection.js";
import type { GestureResultEvent, GestureTrainedEvent, SessionStarted } from "../protocol.js";

export class GestureStudio {
  private adapter: PointerGazeAdapter | null = null;
  private clock = SessionClock.start();
  private sessionId = "";
  private drawing = false;
  private trail: { x: number; y: number }[] = [];
  private unsubscribe: (() => void) | null = null;

  constructor(
    private readonly conn: ServiceConnection,
    private readonly canvas: HTMLCanvasElement,
    private readonly status: HTMLElement,
    private readonly templateList: HTMLElement,
    private readonly nameInput: HTMLInputElement,
    private readonly actionInput: HTMLInputElement,
    private readonly trainButton: HTMLButtonElement
  ) {}

  async mount(): Promise<void> {
    const started = await this.conn.request<SessionStarted>(
      { type: "start_session", mode: "gesture", store: "bundled", source: "raw-samples" },
      "session_started"
    );
    this.sessionId = started.session_id;
    this.adapter = makeAdapter(
      this.canvas.width,
      this.canvas.height,
      1920,
      1080,
      this.sessionId
    );
    this.clock = SessionClock.start();
    this.renderTemplates(started.template_names ?? []);
    this.status.textContent = "hold the left button and draw";

    this.unsubscribe = this.conn.onEvent((event) => {
      if (event.type === "gesture_result") {
        this.showResult(event);
      } else if (event.type === "gesture_trained") {
        this.showTrained(event);
      }
    });

    this.canvas.onpointermove = (e) => {
      if (!this.adapter) return;
      const rect = this.canvas.getBoundingClientRect();
      const px = e.clientX - rect.left;
      const py = e.clientY - rect.top;
      this.conn.send(mapPointer(this.adapter, this.clock, px, py));
      if (this.drawing) {
        this.trail.push({ x: px, y: py });
        this.draw();
      }
    };
    this.canvas.onpointerdown = (e) => {
      if (!this.adapter || e.button !== 0) return;
      this.drawing = true;
      this.trail = [];
      const rect = this.canvas.getBoundingClientRect();
      this.conn.send(
        mapPointer(this.adapter, this.clock, e.clientX - rect.left, e.clientY - rect.top)
      );
      this.conn.send(mapTrigger(this.adapter, this.clock, "press"));
    };
    this.canvas.onpointerup = () => {
      if (!this.adapter || !this.drawing) return;
      this.drawing = false;
      this.conn.send(mapTrigger(this.adapter, this.clock, "release"));
    };
    this.trainButton.onclick = () => {
      const name = this.nameInput.value.trim();
      const action = this.actionInput.value.trim() || `action.${name}`;
      if (!name) {
        this.status.textContent = "name the gesture before arming training";
        return;
      }
      this.conn.send({
        type: "train_gesture",
        session_id: this.sessionId,
        name,
        action_id: action,
      });
      this.status.textContent = `training armed: next stroke becomes "${name}"`;
    };
    this.draw();
  }

  unmount(): void {
    this.unsubscribe?.();
    this.canvas.onpointermove = null;
    this.canvas.onpointerdown = null;
    this.canvas.onpointerup = null;
    if (this.sessionId) {
      this.conn.send({ type: "end_session", session_id: this.sessionId });
    }
  }

  private renderTemplates(names: string[]): void {
    this.templateList.textContent = names.length ? names.join("  ") : "(no templates)";
  }

  private showResult(event: GestureResultEvent): void {
    if (event.error) {
      this.status.textContent = `stroke rejected: ${event.error}`;
    } else if (event.match) {
      const m = event.match;
      this.status.textContent =
        `recognized ${m.name} -> ${m.action_id}  score ${m.score.toFixed(3)} ` +
        `distance ${m.distance.toFixed(4)}`;
    } else {
      this.status.textContent = "no match (below the reject threshold)";
    }
  }

  private showTrained(event: GestureTrainedEvent): void {
    if (event.ok) {
      this.status.textContent = `trained "${event.name}" -> ${event.action_id}`;
      this.conn
        .request<{ type: "store_ok"; session_id: string; templates: { name: string }[] }>(
          { type: "get_store", session_id: this.sessionId },
          "store_ok"
        )
        .then((reply) => this.renderTemplates(reply.templates.map((t) => t.name)))
        .catch(() => undefined);
    } else {
      this.status.textContent = `training failed: ${event.error}`;
    }
  }

  private draw(): void {
    const ctx = this.canvas.getContext("2d")!;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.trail.length < 2) return;
    ctx.strokeStyle = "#6fd3ff";
    ctx.lineWidth = 2.5;
    ctx.beginPath();
    ctx.moveTo(this.trail[0].x, this.trail[0].y);
    for (const p of this.trail.slice(1)) {
      ctx.lineTo(p.x, p.y);
    }
    ctx.stroke();
  }
}
