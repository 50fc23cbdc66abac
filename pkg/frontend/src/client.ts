// Request/response plumbing over a line-oriented transport. Correlates
// responses by request id and surfaces transport loss to the store.

import type { Hello, Request, Response, WireError } from "./protocol.js";

export interface Transport {
  send(line: string): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export class ServiceError extends Error {
  readonly code: string;
  readonly reasonClass: string;

  constructor(err: WireError) {
    super(err.message);
    this.code = err.code;
    this.reasonClass = err.reason_class ?? "";
  }
}

export class ServiceClient {
  private nextId = 1;
  private pending = new Map<number, {
    resolve: (value: unknown) => void;
    reject: (err: Error) => void;
  }>();
  private helloResolvers: ((hello: Hello) => void)[] = [];
  hello: Hello | null = null;
  connected = true;

  constructor(private readonly transport: Transport) {
    transport.onLine((line) => this.receive(line));
    transport.onClose(() => {
      this.connected = false;
      for (const waiter of this.pending.values()) {
        waiter.reject(new Error("service connection closed"));
      }
      this.pending.clear();
    });
  }

  private receive(line: string) {
    let message: Response | Hello;
    try {
      message = JSON.parse(line);
    } catch {
      return; // not ours to crash over
    }
    if ("protocol" in message) {
      this.hello = message;
      for (const resolve of this.helloResolvers.splice(0)) resolve(message);
      return;
    }
    const response = message as Response;
    if (response.id === null || response.id === undefined) return;
    const waiter = this.pending.get(response.id);
    if (!waiter) return;
    this.pending.delete(response.id);
    if (response.ok) {
      waiter.resolve(response.result);
    } else {
      waiter.reject(new ServiceError(response.error ?? {
        code: "unknown", message: "malformed error response",
      }));
    }
  }

  awaitHello(): Promise<Hello> {
    if (this.hello) return Promise.resolve(this.hello);
    return new Promise((resolve) => this.helloResolvers.push(resolve));
  }

  /** Sends a request; the returned id lets callers drop stale responses. */
  call(method: string, params?: Record<string, unknown>):
      { id: number; result: Promise<unknown> } {
    if (!this.connected) {
      return {
        id: -1,
        result: Promise.reject(new Error("service connection closed")),
      };
    }
    const id = this.nextId++;
    const request: Request = { id, method, params };
    const result = new Promise<unknown>((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
    });
    this.transport.send(JSON.stringify(request));
    return { id, result };
  }

  request(method: string, params?: Record<string, unknown>): Promise<unknown> {
    return this.call(method, params).result;
  }

  close() {
    this.transport.close();
  }
}
