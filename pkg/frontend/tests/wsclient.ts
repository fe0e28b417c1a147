// Minimal WebSocket client over node:net for driving the service from
// vitest (node 20 ships no stable WebSocket client).  Text frames only,
// client-side masking per RFC 6455.

import { createHash, randomBytes } from "node:crypto";
import net from "node:net";

export class WsTestClient {
  private buffer = Buffer.alloc(0);
  private readonly queue: object[] = [];
  private waiter: ((msg: object) => void) | null = null;

  private constructor(private readonly socket: net.Socket) {}

  static connect(port: number, host = "127.0.0.1"): Promise<WsTestClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ port, host });
      const key = randomBytes(16).toString("base64");
      socket.once("error", reject);
      socket.once("connect", () => {
        socket.write(
          `GET / HTTP/1.1\r\nHost: ${host}:${port}\r\nUpgrade: websocket\r\n` +
            `Connection: Upgrade\r\nSec-WebSocket-Key: ${key}\r\n` +
            `Sec-WebSocket-Version: 13\r\n\r\n`
        );
      });
      let head = Buffer.alloc(0);
      const onHandshake = (chunk: Buffer) => {
        head = Buffer.concat([head, chunk]);
        const end = head.indexOf("\r\n\r\n");
        if (end < 0) return;
        socket.off("data", onHandshake);
        const header = head.subarray(0, end).toString("latin1");
        if (!header.startsWith("HTTP/1.1 101")) {
          reject(new Error(`handshake failed: ${header.split("\r\n")[0]}`));
          return;
        }
        const expect = createHash("sha1")
          .update(key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11")
          .digest("base64");
        if (!header.includes(`Sec-WebSocket-Accept: ${expect}`)) {
          reject(new Error("bad Sec-WebSocket-Accept"));
          return;
        }
        const client = new WsTestClient(socket);
        client.buffer = Buffer.from(head.subarray(end + 4));
        socket.on("data", (data) => client.onData(data));
        client.drain();
        resolve(client);
      };
      socket.on("data", onHandshake);
    });
  }

  send(message: object): void {
    const payload = Buffer.from(JSON.stringify(message), "utf-8");
    const mask = randomBytes(4);
    const masked = Buffer.from(payload.map((b, i) => b ^ mask[i % 4]));
    let header: Buffer;
    if (payload.length < 126) {
      header = Buffer.from([0x81, 0x80 | payload.length]);
    } else if (payload.length < 1 << 16) {
      header = Buffer.alloc(4);
      header[0] = 0x81;
      header[1] = 0x80 | 126;
      header.writeUInt16BE(payload.length, 2);
    } else {
      header = Buffer.alloc(10);
      header[0] = 0x81;
      header[1] = 0x80 | 127;
      header.writeBigUInt64BE(BigInt(payload.length), 2);
    }
    this.socket.write(Buffer.concat([header, mask, masked]));
  }

  recv(timeoutMs = 10_000): Promise<object> {
    if (this.queue.length) {
      return Promise.resolve(this.queue.shift()!);
    }
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => {
        this.waiter = null;
        reject(new Error("timed out waiting for a service event"));
      }, timeoutMs);
      this.waiter = (msg) => {
        clearTimeout(timer);
        this.waiter = null;
        resolve(msg);
      };
    });
  }

  async recvType(type: string, timeoutMs = 10_000): Promise<any> {
    for (;;) {
      const msg = (await this.recv(timeoutMs)) as { type: string };
      if (msg.type === type) return msg;
      if (msg.type === "error") {
        throw new Error(`service error: ${JSON.stringify(msg)}`);
      }
    }
  }

  close(): void {
    this.socket.destroy();
  }

  private onData(chunk: Buffer): void {
    this.buffer = Buffer.concat([this.buffer, chunk]);
    this.drain();
  }

  private drain(): void {
    for (;;) {
      if (this.buffer.length < 2) return;
      let length = this.buffer[1] & 0x7f;
      let offset = 2;
      if (length === 126) {
        if (this.buffer.length < 4) return;
        length = this.buffer.readUInt16BE(2);
        offset = 4;
      } else if (length === 127) {
        if (this.buffer.length < 10) return;
        length = Number(this.buffer.readBigUInt64BE(2));
        offset = 10;
      }
      if (this.buffer.length < offset + length) return;
      const opcode = this.buffer[0] & 0x0f;
      const payload = this.buffer.subarray(offset, offset + length);
      this.buffer = Buffer.from(this.buffer.subarray(offset + length));
      if (opcode !== 0x1) continue; // ignore pings/close in tests
      const msg = JSON.parse(payload.toString("utf-8")) as object;
      if (this.waiter) {
        this.waiter(msg);
      } else {
        this.queue.push(msg);
      }
    }
  }
}
