// WebSocket channel to the session service: JSON objects, one per text
// frame.  Events are fanned out in arrival order; request() resolves on
// the next matching reply type, which fits the service's strictly ordered
// per-connection replies.

import type { ServiceEvent } from "./protocol.js";

export type EventHandler = (event: ServiceEvent) => void;

export class ServiceConnection {
  private readonly handlers = new Set<EventHandler>();
  private readonly waiters: {
    match: (e: ServiceEvent) => boolean;
    resolve: (e: ServiceEvent) => void;
    reject: (err: Error) => void;
  }[] = [];

  private constructor(private readonly socket: WebSocket) {}

  static connect(url: string): Promise<ServiceConnection> {
    return new Promise((resolve, reject) => {
      const socket = new WebSocket(url);
      const conn = new ServiceConnection(socket);
      socket.onopen = () => resolve(conn);
      socket.onerror = () => reject(new Error(`cannot reach service at ${url}`));
      socket.onmessage = (msg) => conn.dispatch(JSON.parse(String(msg.data)) as ServiceEvent);
    });
  }

  private dispatch(event: ServiceEvent): void {
    for (let i = 0; i < this.waiters.length; i++) {
      if (this.waiters[i].match(event)) {
        const [waiter] = this.waiters.splice(i, 1);
        waiter.resolve(event);
        break;
      }
    }
    for (const handler of this.handlers) {
      handler(event);
    }
  }

  onEvent(handler: EventHandler): () => void {
    this.handlers.add(handler);
    return () => this.handlers.delete(handler);
  }

  send(message: object): void {
    this.socket.send(JSON.stringify(message));
  }

  request<T extends ServiceEvent>(message: object, replyType: string): Promise<T> {
    return new Promise<T>((resolve, reject) => {
      this.waiters.push({
        match: (e) => e.type === replyType || e.type === "error",
        resolve: (e) => {
          if (e.type === "error") {
            reject(new Error(`${(e as { code: string }).code}: ${(e as { detail: string }).detail}`));
          } else {
            resolve(e as T);
          }
        },
        reject,
      });
      this.send(message);
    });
  }

  close(): void {
    this.socket.close();
  }
}

export function defaultServiceUrl(): string {
  const host = typeof location !== "undefined" ? location.hostname || "127.0.0.1" : "127.0.0.1";
  return `ws://${host}:7317/`;
}
