// Store and renderer behavior against a scripted fake transport: stale
// palette responses, single in-flight apply, rejections, disconnection.

import { describe, expect, it } from "vitest";

import { ServiceClient } from "../src/client.js";
import type { Transport } from "../src/client.js";
import { renderWorkbench } from "../src/render.js";
import { ViewState } from "../src/viewstate.js";
import type { PaletteEntry, WireState } from "../src/protocol.js";

class FakeTransport implements Transport {
  sent: { id: number; method: string; params: any }[] = [];
  private lineHandlers: ((line: string) => void)[] = [];
  private closeHandlers: (() => void)[] = [];

  send(line: string) {
    this.sent.push(JSON.parse(line));
  }
  onLine(handler: (line: string) => void) {
    this.lineHandlers.push(handler);
  }
  onClose(handler: () => void) {
    this.closeHandlers.push(handler);
  }
  close() {}

  reply(obj: unknown) {
    for (const handler of this.lineHandlers) handler(JSON.stringify(obj));
  }
  drop() {
    for (const handler of this.closeHandlers) handler();
  }
  lastRequest() {
    return this.sent[this.sent.length - 1];
  }
}

const STATE: WireState = {
  text: "pred p { (?) }",
  sigs: [],
  commands: [],
  preds: [{
    name: "p", root: 0, holes: [0],
    tree: { id: 0, form: "Hole", shape: "squared", text: "(?)",
            hole: { class: "formula", label: "formula" } },
  }],
};

function paletteOf(...keys: [string, "Selectable" | "Grayed"][]): PaletteEntry[] {
  return keys.map(([key, status]) => ({
    key, category: "Relational", label: key, status,
    reason_class: status === "Grayed" ? "KindMismatch" : "",
    reason: status === "Grayed" ? "nope" : "",
  }));
}

function makeView() {
  const transport = new FakeTransport();
  const client = new ServiceClient(transport);
  const view = new ViewState(client);
  return { transport, client, view };
}

describe("stale palette responses", () => {
  it("discards a blocks response superseded by a newer selection", async () => {
    const { transport, view } = makeView();
    view.state = STATE;
    const first = view.selectTarget({ kind: "hole", hole: 0 });
    const firstId = transport.lastRequest().id;
    const second = view.selectTarget({ kind: "hole", hole: 0 });
    const secondId = transport.lastRequest().id;

    // answer the OLD request after the new one is pending
    transport.reply({ id: firstId, ok: true,
                      result: { target: {}, blocks: paletteOf(["op:old", "Selectable"]) } });
    transport.reply({ id: secondId, ok: true,
                      result: { target: {}, blocks: paletteOf(["op:new", "Selectable"]) } });
    await first;
    await second;
    expect(view.palette.map((e) => e.key)).toEqual(["op:new"]);
  });
});

describe("apply discipline", () => {
  it("grayed entries are inert: no request is sent", async () => {
    const { transport, view } = makeView();
    view.state = STATE;
    view.activeTarget = { kind: "hole", hole: 0 };
    view.palette = paletteOf(["set:File", "Grayed"]);
    const before = transport.sent.length;
    expect(await view.chooseBlock("set:File")).toBe(false);
    expect(transport.sent.length).toBe(before);
  });

  it("at most one apply in flight", async () => {
    const { transport, view } = makeView();
    view.state = STATE;
    view.activeTarget = { kind: "hole", hole: 0 };
    view.palette = paletteOf(["quant:all", "Selectable"], ["op:=", "Selectable"]);
    const first = view.chooseBlock("quant:all");
    const second = view.chooseBlock("op:=");
    expect(await second).toBe(false); // refused while the first is pending
    const applyReq = transport.lastRequest();
    expect(applyReq.method).toBe("apply");
    transport.reply({ id: applyReq.id, ok: true, result: {} });
    // the follow-up state refresh
    await Promise.resolve();
    const stateReq = transport.lastRequest();
    expect(stateReq.method).toBe("state");
    transport.reply({ id: stateReq.id, ok: true, result: STATE });
    expect(await first).toBe(true);
  });

  it("engine rejection surfaces the reason class", async () => {
    const { transport, view } = makeView();
    view.state = STATE;
    view.activeTarget = { kind: "hole", hole: 0 };
    view.palette = paletteOf(["op:->", "Selectable"]);  // stale optimism
    const attempt = view.chooseBlock("op:->");
    const req = transport.lastRequest();
    transport.reply({ id: req.id, ok: false,
                      error: { code: "rejected", message: "needs arity 1",
                               reason_class: "ArityMismatch" } });
    expect(await attempt).toBe(false);
    expect(view.lastRejection).toEqual(
      { reasonClass: "ArityMismatch", message: "needs arity 1" });
    const html = renderWorkbench({
      state: view.state, palette: view.palette, activeTarget: view.activeTarget,
      activeCategory: null, connected: view.connected, rejection: view.lastRejection,
    });
    expect(html).toContain('data-reason-class="ArityMismatch"');
  });
});

describe("shortcuts and disconnection", () => {
  it("maps ctrl+z / ctrl+shift+z to undo / redo", () => {
    const { view } = makeView();
    expect(view.shortcut("z", true, false)).toBe("undo");
    expect(view.shortcut("Z", true, true)).toBe("redo");
    expect(view.shortcut("z", false, false)).toBeNull();
    expect(view.shortcut("y", true, false)).toBeNull();
  });

  it("shows the disconnected banner on transport loss", () => {
    const { transport, view } = makeView();
    view.state = STATE;
    transport.drop();
    const html = renderWorkbench({
      state: view.state, palette: [], activeTarget: null,
      activeCategory: null, connected: view.connected, rejection: null,
    });
    expect(html).toContain("disconnected");
  });
});
