// The editor's state store: the rendered tree mirrors the service `state`,
// the palette mirrors the latest `blocks` response for the active target.
// One in-flight apply at a time; superseded blocks responses are discarded
// by request id. All selectability verdicts come from the engine.

import { ServiceClient, ServiceError } from "./client.js";
import type {
  BlocksResult, EditAction, PaletteEntry, Target, WireState,
} from "./protocol.js";

export interface Rejection {
  reasonClass: string;
  message: string;
}

export class ViewState {
  state: WireState | null = null;
  activeTarget: Target | null = null;
  palette: PaletteEntry[] = [];
  lastRejection: Rejection | null = null;
  private latestBlocksRequest = 0;
  private applyInFlight = false;

  constructor(readonly client: ServiceClient) {}

  get connected(): boolean {
    return this.client.connected;
  }

  async load(text: string): Promise<void> {
    await this.client.request("load", { text });
    await this.refresh();
  }

  async refresh(): Promise<void> {
    this.state = (await this.client.request("state")) as WireState;
  }

  /** Click-to-select: choosing a hole or anchor fetches its palette. */
  async selectTarget(target: Target): Promise<void> {
    this.activeTarget = target;
    this.lastRejection = null;
    const params = target.kind === "hole"
      ? { hole: target.hole }
      : { anchor: target.node, side: target.side };
    const { id, result } = this.client.call("blocks", params);
    this.latestBlocksRequest = id;
    const blocks = (await result) as BlocksResult;
    if (id !== this.latestBlocksRequest) {
      return; // superseded by a newer selection
    }
    this.palette = blocks.blocks;
  }

  clearTarget(): void {
    this.activeTarget = null;
    this.palette = [];
  }

  /**
   * Choosing a palette block sends the matching apply. Grayed entries are
   * inert. On engine rejection (a race with another writer, or a stale
   * palette) the reason_class is surfaced for the tooltip.
   */
  async chooseBlock(key: string): Promise<boolean> {
    if (this.activeTarget === null || this.applyInFlight) return false;
    const entry = this.palette.find((e) => e.key === key);
    if (!entry || entry.status !== "Selectable") return false;

    const target = this.activeTarget;
    const action: EditAction = target.kind === "hole"
      ? { action: "insert", hole: target.hole, block: key }
      : { action: "extend", node: target.node, side: target.side, block: key };
    return this.applyAction(action);
  }

  async applyAction(action: EditAction): Promise<boolean> {
    if (this.applyInFlight) return false;
    this.applyInFlight = true;
    try {
      await this.client.request("apply", action as unknown as Record<string, unknown>);
      this.lastRejection = null;
      this.clearTarget();
      await this.refresh();
      return true;
    } catch (err) {
      if (err instanceof ServiceError) {
        this.lastRejection = { reasonClass: err.reasonClass, message: err.message };
        return false;
      }
      throw err;
    } finally {
      this.applyInFlight = false;
    }
  }

  async undo(): Promise<void> {
    await this.client.request("undo");
    this.clearTarget();
    await this.refresh();
  }

  async redo(): Promise<void> {
    await this.client.request("redo");
    this.clearTarget();
    await this.refresh();
  }

  /** Standard shortcut mapping: ctrl/cmd+z undoes, with shift redoes. */
  shortcut(key: string, ctrlOrCmd: boolean, shift: boolean):
      "undo" | "redo" | null {
    if (!ctrlOrCmd || key.toLowerCase() !== "z") return null;
    return shift ? "redo" : "undo";
  }
}
