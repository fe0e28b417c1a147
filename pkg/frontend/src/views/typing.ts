// Typing Demo: the phrase prompt sits above the server-provided keyboard;
// the key under the pointer highlights (visual only) and a click commits
// it server-side.  Transcription state arrives in key_selected events and
// the live WPM / KSPC / RBA readout is derived from those events alone.

import { mapPointer, mapTrigger, makeAdapter, SessionClock } from "../adapter.js";
import type { PointerGazeAdapter } from "../adapter.js";
import { ServiceConnection } from "../connection.js";
import type { KeyGeometry, KeySelectedEvent, SessionEnded, SessionStarted } from "../protocol.js";

export class TypingDemo {
  private adapter: PointerGazeAdapter | null = null;
  private clock = SessionClock.start();
  private sessionId = "";
  private keys: KeyGeometry[] = [];
  private phrase = "";
  private transcribed = "";
  private hoverKey: string | null = null;
  private keystrokes = 0;
  private backspaces = 0;
  private firstMs: number | null = null;
  private lastMs = 0;
  private unsubscribe: (() => void) | null = null;

  constructor(
    private readonly conn: ServiceConnection,
    private readonly canvas: HTMLCanvasElement,
    private readonly prompt: HTMLElement,
    private readonly metricsOut: HTMLElement,
    private readonly phrases: string[]
  ) {}

  async mount(): Promise<void> {
    this.phrase = this.phrases[Math.floor(Math.random() * this.phrases.length)];
    const started = await this.conn.request<SessionStarted>(
      { type: "start_session", mode: "typing", target_phrase: this.phrase },
      "session_started"
    );
    this.sessionId = started.session_id;
    this.keys = started.keys ?? [];
    this.adapter = makeAdapter(this.canvas.width, this.canvas.height, 1920, 1080, this.sessionId);
    this.clock = SessionClock.start();
    this.renderPrompt();
    this.metricsOut.textContent = "type the phrase by pointing and clicking";

    this.unsubscribe = this.conn.onEvent((event) => {
      if (event.type === "key_selected" && event.session_id === this.sessionId) {
        this.onSelected(event);
      } else if (event.type === "session_ended" && event.session_id === this.sessionId) {
        this.onEnded(event);
      }
    });

    this.canvas.onpointermove = (e) => {
      if (!this.adapter) return;
      const rect = this.canvas.getBoundingClientRect();
      const px = e.clientX - rect.left;
      const py = e.clientY - rect.top;
      const sample = mapPointer(this.adapter, this.clock, px, py);
      this.conn.send(sample);
      this.hoverKey = this.keyAt(sample.x, sample.y);
      this.draw();
    };
    this.canvas.onpointerdown = (e) => {
      if (!this.adapter || e.button !== 0) return;
      this.conn.send(mapTrigger(this.adapter, this.clock, "press"));
    };
    this.canvas.onpointerup = () => {
      if (!this.adapter) return;
      this.conn.send(mapTrigger(this.adapter, this.clock, "release"));
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

  /** Visual hover only: actual selection happens in the engine on press. */
  private keyAt(vx: number, vy: number): string | null {
    for (const k of this.keys) {
      if (vx >= k.x && vx <= k.x + k.w && vy >= k.y && vy <= k.y + k.h) {
        return k.key_id;
      }
    }
    return null;
  }

  private onSelected(event: KeySelectedEvent): void {
    this.transcribed = event.transcribed;
    this.keystrokes += 1;
    const key = this.keys.find((k) => k.key_id === event.key_id);
    if (key?.output === "BACKSPACE") {
      this.backspaces += 1;
    }
    if (this.firstMs === null) {
      this.firstMs = event.t_ms;
    }
    this.lastMs = event.t_ms;
    this.renderPrompt();
    this.renderMetrics();
    if (this.transcribed === this.phrase) {
      this.conn.send({ type: "end_session", session_id: this.sessionId });
      this.sessionId = "";
    }
  }

  private onEnded(event: SessionEnded): void {
    const m = event.metrics;
    if (m) {
      this.metricsOut.textContent =
        `final: wpm ${m.wpm.toFixed(2)}  kspc ${m.kspc === null ? "-" : m.kspc.toFixed(3)}  ` +
        `rba ${m.rba.toFixed(3)}  ("${event.transcribed}")`;
    }
    this.sessionId = "";
  }

  private renderPrompt(): void {
    const done = this.transcribed;
    this.prompt.innerHTML = "";
    const target = document.createElement("div");
    target.className = "phrase";
    for (let i = 0; i < this.phrase.length; i++) {
      const span = document.createElement("span");
      span.textContent = this.phrase[i];
      if (i < done.length) {
        span.className = done[i] === this.phrase[i] ? "ok" : "bad";
      }
      target.appendChild(span);
    }
    const typed = document.createElement("div");
    typed.className = "typed";
    typed.textContent = done + "_";
    this.prompt.appendChild(target);
    this.prompt.appendChild(typed);
  }

  private renderMetrics(): void {
    const chars = this.transcribed.length;
    const spanS = this.firstMs === null ? 0 : (this.lastMs - this.firstMs) / 1000;
    const wpm = chars > 1 && spanS > 0 ? ((chars - 1) / spanS) * 12 : 0;
    const kspc = chars > 0 ? this.keystrokes / chars : NaN;
    const rba = this.keystrokes > 0 ? this.backspaces / this.keystrokes : 0;
    this.metricsOut.textContent =
      `live: wpm ${wpm.toFixed(2)}  kspc ${Number.isNaN(kspc) ? "-" : kspc.toFixed(3)}  ` +
      `rba ${rba.toFixed(3)}  keystrokes ${this.keystrokes}`;
  }

  private draw(): void {
    const ctx = this.canvas.getContext("2d")!;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const sx = this.canvas.width / 1920;
    const sy = this.canvas.height / 1080;
    for (const k of this.keys) {
      const x = k.x * sx;
      const y = k.y * sy;
      const w = k.w * sx;
      const h = k.h * sy;
      ctx.fillStyle = k.key_id === this.hoverKey ? "#2e5a7a" : "#1d2836";
      ctx.fillRect(x, y, w, h);
      ctx.strokeStyle = "#3b4a5e";
      ctx.strokeRect(x, y, w, h);
      ctx.fillStyle = "#cfe3f5";
      ctx.font = `${Math.max(11, 16 * sx)}px system-ui`;
      ctx.fillText(k.label, x + w / 2 - 5 * k.label.length * sx, y + h / 2 + 5);
    }
  }
}
