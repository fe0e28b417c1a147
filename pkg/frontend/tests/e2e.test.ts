// Round trips against a live gazekit service: the engine is consumed only
// through its WebSocket surface, exactly as the browser studio does.

import { spawn, type ChildProcess } from "node:child_process";
import net from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionClock, makeAdapter, mapPointer, mapTrigger } from "../src/adapter.js";
import type { TrajectoryParams } from "../src/protocol.js";
import { shapePosition } from "../src/trajectories.js";
import { WsTestClient } from "./wsclient.js";

const PORT = 17640 + Math.floor(Math.random() * 800);
let service: ChildProcess;

function waitForPort(port: number, tries = 80): Promise<void> {
  return new Promise((resolve, reject) => {
    const attempt = (left: number) => {
      const sock = net.createConnection({ port, host: "127.0.0.1" });
      sock.once("connect", () => {
        sock.destroy();
        resolve();
      });
      sock.once("error", () => {
        sock.destroy();
        if (left <= 0) reject(new Error("service never came up"));
        else setTimeout(() => attempt(left - 1), 125);
      });
    };
    attempt(tries);
  });
}

beforeAll(async () => {
  service = spawn("gazekit", ["serve", "--port", String(PORT)], { stdio: "ignore" });
  await waitForPort(PORT);
}, 30_000);

afterAll(() => {
  service.kill();
});

/** Synthetic clock so tests control t_ms without waiting wall time. */
function fakeClock(): { clock: SessionClock; advance: (ms: number) => void } {
  let now = 0;
  return {
    clock: new SessionClock(() => now, 0),
    advance: (ms: number) => {
      now += ms;
    },
  };
}

describe("service round trips", () => {
  it("answers hello with protocol version 1", async () => {
    const ws = await WsTestClient.connect(PORT);
    ws.send({ type: "hello" });
    const reply = await ws.recvType("hello_ok");
    expect(reply.version).toBe(1);
    expect(reply.capabilities).toContain("auth");
    ws.close();
  });

  it("recognizes a bundled gesture drawn with the pointer adapter", async () => {
    const ws = await WsTestClient.connect(PORT);
    ws.send({
      type: "start_session",
      mode: "gesture",
      store: "bundled",
      source: "raw-samples",
    });
    const started = await ws.recvType("session_started");
    const sid = started.session_id as string;

    ws.send({ type: "get_store", session_id: sid });
    const store = await ws.recvType("store_ok");
    const vee = store.templates.find((t: { name: string }) => t.name === "vee");
    expect(vee).toBeDefined();

    // trace the canonical points on a 960x540 canvas: scale to ~200 canvas
    // px and draw slowly and carefully (sigma ~ 0)
    const adapter = makeAdapter(960, 540, 1920, 1080, sid);
    const { clock, advance } = fakeClock();
    const canvasPts = (vee.points as [number, number][]).map(([x, y]) => ({
      x: 480 + x * 200,
      y: 270 + y * 200,
    }));
    ws.send(mapPointer(adapter, clock, canvasPts[0].x, canvasPts[0].y));
    advance(10);
    ws.send(mapTrigger(adapter, clock, "press"));
    for (const p of canvasPts) {
      advance(12);
      ws.send(mapPointer(adapter, clock, p.x, p.y));
    }
    advance(12);
    ws.send(mapTrigger(adapter, clock, "release"));
    const result = await ws.recvType("gesture_result");
    expect(result.error).toBeNull();
    expect(result.match).not.toBeNull();
    expect(result.match.name).toBe("vee");
    expect(result.match.score).toBeGreaterThan(0.95);
    ws.send({ type: "end_session", session_id: sid });
    await ws.recvType("session_ended");
    ws.close();
  });

  it("renders shapes within one pixel of the engine over 100 instants", async () => {
    const ws = await WsTestClient.connect(PORT);
    ws.send({
      type: "start_session",
      mode: "auth",
      seed: 424242,
      password: ["s0", "s1", "s2", "s3"],
    });
    const started = await ws.recvType("session_started");
    const sid = started.session_id as string;
    const trajectories = started.trajectories as TrajectoryParams[];
    expect(trajectories.length).toBe(6);

    let worst = 0;
    for (let i = 0; i < 100; i++) {
      const traj = trajectories[i % trajectories.length];
      const tMs = (i * 7919) % 6750; // spread across the session
      ws.send({ type: "debug_position", session_id: sid, shape_id: traj.shape_id, t_ms: tMs });
      const reply = await ws.recvType("debug_position_ok");
      const local = shapePosition(traj, tMs);
      const err = Math.hypot(local.x - reply.x, local.y - reply.y);
      worst = Math.max(worst, err);
    }
    expect(worst).toBeLessThanOrEqual(1.0);
    ws.send({ type: "end_session", session_id: sid });
    await ws.recvType("session_ended");
    ws.close();
  }, 20_000);

  it("completes an enroll-verify cycle with Accept", async () => {
    const pursue = ["s2", "s0", "s4", "s1"];

    async function runSession(
      seed: number,
      password: string[]
    ): Promise<{ winners: string[]; outcome: string | undefined }> {
      const ws = await WsTestClient.connect(PORT);
      ws.send({ type: "start_session", mode: "auth", seed, password });
      const started = await ws.recvType("session_started");
      const sid = started.session_id as string;
      const trajectories = started.trajectories as TrajectoryParams[];
      const byId = new Map(trajectories.map((t) => [t.shape_id, t]));
      const epochMs = started.epoch_ms as number;
      const pitch = epochMs + (started.inter_epoch_ms as number);

      // pursue each shape by sampling the client-side mirror at ~60 Hz,
      // through the real adapter; a synthetic wall clock pins each sample
      // to its intended session time
      const adapter = makeAdapter(960, 540, 1920, 1080, sid);
      let now = 0;
      const clock = new SessionClock(() => now, 0);
      let t = 0;
      for (let epoch = 0; epoch < pursue.length; epoch++) {
        const traj = byId.get(pursue[epoch])!;
        const end = epoch * pitch + epochMs;
        while (t < end) {
          const pos = shapePosition(traj, t);
          now = t;
          ws.send(mapPointer(adapter, clock, (pos.x * 960) / 1920, (pos.y * 540) / 1080));
          t += 17;
        }
        t = (epoch + 1) * pitch;
      }
      ws.send({ type: "end_session", session_id: sid });
      const winners: string[] = [];
      let outcome: string | undefined;
      for (;;) {
        const msg = (await ws.recv()) as { type: string; [k: string]: unknown };
        if (msg.type === "epoch_result") {
          winners[msg.index as number] = msg.winner as string;
        } else if (msg.type === "session_ended") {
          outcome = msg.outcome as string | undefined;
          break;
        }
      }
      ws.close();
      return { winners, outcome };
    }

    // enroll: throwaway password, the server-matched winners are the secret
    const enroll = await runSession(90001, ["s0", "s0", "s0", "s0"]);
    expect(enroll.winners).toEqual(pursue);

    // verify on a fresh seeded layout with the enrolled sequence
    const verify = await runSession(90002, enroll.winners);
    expect(verify.outcome).toBe("Accept");
  }, 30_000);
});
