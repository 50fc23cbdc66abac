// Node-side transport: spawn the engine's stdio service as a child process.
// Tests and the demo use this; a browser build would substitute a WebSocket
// bridge behind the same Transport interface.

import { spawn, type ChildProcessByStdio } from "node:child_process";
import type { Readable, Writable } from "node:stream";
import type { Transport } from "./client.js";

export class StdioTransport implements Transport {
  private readonly child: ChildProcessByStdio<Writable, Readable, null>;
  private lineHandlers: ((line: string) => void)[] = [];
  private closeHandlers: (() => void)[] = [];
  private buffer = "";

  constructor(command: string[] = ["python3", "-m", "alloyblocks.cli", "serve"]) {
    this.child = spawn(command[0], command.slice(1), {
      stdio: ["pipe", "pipe", "inherit"],
    });
    this.child.stdout.setEncoding("utf-8");
    this.child.stdout.on("data", (chunk: string) => {
      this.buffer += chunk;
      let index;
      while ((index = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, index);
        this.buffer = this.buffer.slice(index + 1);
        if (line.trim()) {
          for (const handler of this.lineHandlers) handler(line);
        }
      }
    });
    this.child.on("close", () => {
      for (const handler of this.closeHandlers) handler();
    });
  }

  send(line: string): void {
    this.child.stdin.write(line + "\n");
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandlers.push(handler);
  }

  onClose(handler: () => void): void {
    this.closeHandlers.push(handler);
  }

  close(): void {
    this.child.stdin.end();
    this.child.kill();
  }
}
