// Wire types for protocol version 1: newline-delimited JSON requests and
// responses against the engine service. The frontend performs no typing of
// its own; selectability always arrives from the engine.

export const PROTOCOL_VERSION = 1;

export interface Hello {
  protocol: number;
  capabilities: string[];
}

export interface Request {
  id: number;
  method: string;
  params?: Record<string, unknown>;
}

export interface WireError {
  code: string;
  message: string;
  reason_class?: string;
}

export interface Response {
  id: number | null;
  ok: boolean;
  result?: unknown;
  error?: WireError;
}

export type Shape = "rounded" | "squared" | "int";

export interface HoleInfo {
  class: "expr" | "formula" | "int";
  label: string;
}

export interface WireNode {
  id: number;
  form: string;
  shape: Shape;
  text: string;
  op?: string;
  ref?: string;
  pred?: string;
  value?: number;
  var?: string;
  hole?: HoleInfo;
  anchors?: ("left" | "right")[];
  children?: WireNode[];
}

export interface WirePred {
  name: string;
  root: number;
  tree: WireNode;
  holes: number[];
}

export interface WireField {
  name: string;
  columns: string[];
  mult: string;
  mutable: boolean;
}

export interface WireSig {
  name: string;
  mutable: boolean;
  abstract: boolean;
  mult: string | null;
  extends: string | null;
  subsets: string[];
  fields: WireField[];
}

export interface WireState {
  text: string;
  sigs: WireSig[];
  preds: WirePred[];
  commands: string[];
}

export interface PaletteEntry {
  key: string;
  category: string;
  label: string;
  status: "Selectable" | "Grayed";
  reason_class: string;
  reason: string;
}

export interface BlocksResult {
  target: Record<string, unknown>;
  blocks: PaletteEntry[];
}

export type Target =
  | { kind: "hole"; hole: number }
  | { kind: "anchor"; node: number; side: "left" | "right" };

export type EditAction =
  | { action: "insert"; hole: number; block: string }
  | { action: "extend"; node: number; side: "left" | "right"; block: string }
  | { action: "delete"; node: number }
  | { action: "splice"; node: number; keep: number }
  | { action: "replace"; node: number; block: string }
  | { action: "rename"; node: number; name: string }
  | { action: "undo" }
  | { action: "redo" };
