// Pure HTML renderers for the three-panel workbench. Set-valued pieces render
// rounded, boolean pieces squared, integers as a third chip shape; holes are
// labeled brackets; anchors are the circle/square extension points. Grayed
// palette entries are visibly distinct and carry their reason as a tooltip.

import type {
  PaletteEntry, Shape, Target, WireNode, WirePred, WireSig, WireState,
} from "./protocol.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const ANCHOR_ICON: Record<Shape, string> = {
  rounded: "∘", // ∘
  squared: "□", // □
  int: "#",
};

function shapeClass(shape: Shape): string {
  return `block-${shape}`;
}

function isActiveHole(target: Target | null, id: number): boolean {
  return target?.kind === "hole" && target.hole === id;
}

function isActiveAnchor(target: Target | null, id: number,
                        side: "left" | "right"): boolean {
  return target?.kind === "anchor" && target.node === id && target.side === side;
}

function renderAnchor(node: WireNode, side: "left" | "right",
                      active: Target | null): string {
  const cls = isActiveAnchor(active, node.id, side) ? " active" : "";
  return `<button class="anchor ${shapeClass(node.shape)}${cls}"` +
    ` data-anchor="${node.id}" data-side="${side}"` +
    ` title="extend ${side} of ${escapeHtml(node.text)}">` +
    `${ANCHOR_ICON[node.shape]}</button>`;
}

export function renderNode(node: WireNode, active: Target | null = null): string {
  if (node.hole) {
    const cls = isActiveHole(active, node.id) ? " active" : "";
    return `<button class="hole ${shapeClass(node.shape)}${cls}"` +
      ` data-hole="${node.id}">[${escapeHtml(node.hole.label)}]</button>`;
  }
  const kids = node.children ?? [];
  let inner: string;
  switch (node.form) {
    case "SetLeaf":
      inner = escapeHtml(node.ref ?? "");
      break;
    case "IntLit":
      inner = String(node.value ?? "");
      break;
    case "PredCall":
      inner = escapeHtml(node.pred ?? "");
      break;
    case "Quant":
      inner = `${escapeHtml(node.op ?? "")} <span class="binder">` +
        `${escapeHtml(node.var ?? "")}</span> : ` +
        `${renderNode(kids[0], active)} | ${renderNode(kids[1], active)}`;
      break;
    case "Prime":
      inner = `${renderNode(kids[0], active)}'`;
      break;
    case "Card":
      inner = `#${renderNode(kids[0], active)}`;
      break;
    case "Not":
      inner = `!${renderNode(kids[0], active)}`;
      break;
    case "UnRel":
      inner = `${escapeHtml(node.op ?? "")}${renderNode(kids[0], active)}`;
      break;
    case "MultFormula":
    case "TempUn":
      inner = `${escapeHtml(node.op ?? "")} ${renderNode(kids[0], active)}`;
      break;
    default: {
      // binary forms
      const op = escapeHtml(node.op ?? "");
      inner = `${renderNode(kids[0], active)} ${op} ${renderNode(kids[1], active)}`;
    }
  }
  const left = node.anchors?.includes("left") ? renderAnchor(node, "left", active) : "";
  const right = node.anchors?.includes("right") ? renderAnchor(node, "right", active) : "";
  return `<span class="node ${shapeClass(node.shape)}" data-node="${node.id}">` +
    `${left}<span class="piece">${inner}</span>${right}</span>`;
}

export function renderPred(pred: WirePred, active: Target | null = null): string {
  return `<div class="pred" data-pred="${escapeHtml(pred.name)}">` +
    `<span class="pred-name">pred ${escapeHtml(pred.name)}</span> ` +
    `${renderNode(pred.tree, active)}</div>`;
}

function renderSig(sig: WireSig): string {
  const mods = [sig.mutable ? "var" : "", sig.abstract ? "abstract" : "",
                sig.mult ?? ""].filter(Boolean).join(" ");
  const rel = sig.extends ? ` extends ${sig.extends}`
    : sig.subsets.length ? ` in ${sig.subsets.join(" + ")}` : "";
  const fields = sig.fields.map((f) => `${f.name} : ${f.mult} ${f.columns.join(" -> ")}`);
  return `<li class="sig">${escapeHtml([mods, "sig", sig.name].filter(Boolean).join(" "))}` +
    `${escapeHtml(rel)}${fields.length ? " { " + escapeHtml(fields.join(", ")) + " }" : ""}</li>`;
}

/** Category list for the Formula Type panel, in engine palette order. */
export function paletteCategories(palette: PaletteEntry[]): string[] {
  const seen: string[] = [];
  for (const entry of palette) {
    if (!seen.includes(entry.category)) seen.push(entry.category);
  }
  return seen;
}

export function renderCategoryPanel(palette: PaletteEntry[],
                                    activeCategory: string | null): string {
  const rows = paletteCategories(palette).map((cat) => {
    const cls = cat === activeCategory ? " active" : "";
    return `<button class="category${cls}" data-category="${escapeHtml(cat)}">` +
      `${escapeHtml(cat)}</button>`;
  });
  return `<section class="panel panel-formula-type"><h2>Formula Type</h2>` +
    `${rows.join("")}</section>`;
}

export function renderBlocksPanel(palette: PaletteEntry[],
                                  activeCategory: string | null = null): string {
  const shown = activeCategory === null
    ? palette
    : palette.filter((e) => e.category === activeCategory);
  const rows = shown.map((entry) => {
    if (entry.status === "Grayed") {
      return `<button class="palette-block grayed" disabled` +
        ` data-block="${escapeHtml(entry.key)}"` +
        ` data-reason-class="${escapeHtml(entry.reason_class)}"` +
        ` title="${escapeHtml(entry.reason_class)}: ${escapeHtml(entry.reason)}">` +
        `${escapeHtml(entry.label)}</button>`;
    }
    return `<button class="palette-block selectable"` +
      ` data-block="${escapeHtml(entry.key)}">${escapeHtml(entry.label)}</button>`;
  });
  return `<section class="panel panel-blocks"><h2>Blocks</h2>` +
    `${rows.join("")}</section>`;
}

export function renderModelPanel(state: WireState,
                                 active: Target | null): string {
  const sigs = state.sigs.map(renderSig).join("");
  const preds = state.preds.map((p) => renderPred(p, active)).join("");
  return `<section class="panel panel-model"><h2>Model</h2>` +
    `<ul class="sigs">${sigs}</ul><div class="preds">${preds}</div></section>`;
}

export interface WorkbenchView {
  state: WireState | null;
  palette: PaletteEntry[];
  activeTarget: Target | null;
  activeCategory: string | null;
  connected: boolean;
  rejection: { reasonClass: string; message: string } | null;
}

export function renderWorkbench(view: WorkbenchView): string {
  if (!view.connected) {
    return `<div class="banner disconnected">disconnected from the engine</div>`;
  }
  if (!view.state) {
    return `<div class="banner">no model loaded</div>`;
  }
  const notice = view.rejection
    ? `<div class="banner rejection" data-reason-class="` +
      `${escapeHtml(view.rejection.reasonClass)}">` +
      `${escapeHtml(view.rejection.reasonClass)}: ` +
      `${escapeHtml(view.rejection.message)}</div>`
    : "";
  return `<main class="workbench">${notice}` +
    renderCategoryPanel(view.palette, view.activeCategory) +
    renderBlocksPanel(view.palette, view.activeCategory) +
    renderModelPanel(view.state, view.activeTarget) +
    `</main>`;
}
