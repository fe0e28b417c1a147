// Studio shell: connects to the session service and switches between the
// four views.  Every view streams pointer-as-gaze samples and renders
// service events; none of them makes an interaction decision locally.

import { ServiceConnection, defaultServiceUrl } from "./connection.js";
import { ArbiterPlayground } from "./views/arbiter.js";
import { AuthDemo } from "./views/auth.js";
import { GestureStudio } from "./views/gestures.js";
import { TypingDemo } from "./views/typing.js";

const PHRASES = [
  "the quick brown fox jumps over the lazy dog",
  "hello world",
  "knowledge is power",
  "fortune favors the bold",
  "practice makes perfect",
];

interface Mounted {
  unmount(): void;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const statusBar = el<HTMLElement>("connection");
  let conn: ServiceConnection;
  try {
    conn = await ServiceConnection.connect(defaultServiceUrl());
  } catch (err) {
    statusBar.textContent = `service unreachable — run "gazekit serve" (${String(err)})`;
    return;
  }
  const hello = await conn.request<{ type: "hello_ok"; version: number; capabilities: string[] }>(
    { type: "hello" },
    "hello_ok"
  );
  statusBar.textContent = `connected (protocol v${hello.version}: ${hello.capabilities.join(", ")})`;

  const canvas = el<HTMLCanvasElement>("stage");
  const status = el<HTMLElement>("status");
  const aux = el<HTMLElement>("aux");
  let current: Mounted | null = null;

  const views: Record<string, () => Promise<Mounted> | Mounted> = {
    gestures: async () => {
      aux.innerHTML =
        '<div id="templates" class="mono"></div>' +
        '<div class="row"><input id="gname" placeholder="gesture name">' +
        '<input id="gaction" placeholder="action id">' +
        '<button id="train">train next stroke</button></div>';
      const studio = new GestureStudio(
        conn,
        canvas,
        status,
        el("templates"),
        el<HTMLInputElement>("gname"),
        el<HTMLInputElement>("gaction"),
        el<HTMLButtonElement>("train")
      );
      await studio.mount();
      return studio;
    },
    auth: () => {
      aux.innerHTML =
        '<div class="row"><button id="enroll">enroll</button>' +
        '<button id="verify">verify</button></div>';
      const demo = new AuthDemo(
        conn,
        canvas,
        status,
        el<HTMLButtonElement>("enroll"),
        el<HTMLButtonElement>("verify")
      );
      demo.mount();
      return demo;
    },
    typing: async () => {
      aux.innerHTML = '<div id="prompt"></div>';
      const demo = new TypingDemo(conn, canvas, el("prompt"), status, PHRASES);
      await demo.mount();
      return demo;
    },
    arbiter: async () => {
      aux.innerHTML = "";
      const playground = new ArbiterPlayground(conn, canvas, status);
      await playground.mount();
      return playground;
    },
  };

  async function switchTo(name: string): Promise<void> {
    current?.unmount();
    current = null;
    status.textContent = "";
    current = await views[name]();
    for (const button of document.querySelectorAll<HTMLButtonElement>("nav button")) {
      button.classList.toggle("active", button.dataset.view === name);
    }
  }

  for (const button of document.querySelectorAll<HTMLButtonElement>("nav button")) {
    button.onclick = () => void switchTo(button.dataset.view!);
  }
  await switchTo("gestures");
}

void boot();
