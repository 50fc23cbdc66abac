// Scripted walkthrough: builds inv5 and inv10 through the live engine and
// writes an HTML snapshot of the workbench after each editor-visible step.

import { mkdirSync, writeFileSync } from "node:fs";
import { ServiceClient } from "./client.js";
import { renderWorkbench } from "./render.js";
import { StdioTransport } from "./spawn.js";
import { ViewState } from "./viewstate.js";

const MODEL = `var sig File { var link : lone File }
var sig Trash in File {}
var sig Protected in File {}

pred inv5 {}

pred inv10 {}
`;

const STYLE = `<style>
  body { font-family: sans-serif; }
  .workbench { display: flex; gap: 1rem; }
  .panel { border: 1px solid #999; padding: .5rem; min-width: 12rem; }
  .block-rounded { border-radius: 0.8em; }
  .block-squared { border-radius: 0; }
  .block-int { border-radius: 0.2em; border-style: dashed; }
  .node > .piece { padding: 0 .15em; }
  .node { border: 1px solid #678; margin: 0 .1em; display: inline-block; }
  .hole { background: #ffd; border: 1px dashed #966; }
  .anchor { font-size: .8em; padding: 0; border: none; background: none; }
  .palette-block { display: block; margin: .15em 0; }
  .palette-block.grayed { color: #aaa; background: #eee; }
  .banner.rejection { background: #fdd; }
  .active { outline: 2px solid #36c; }
</style>`;

function snap(name: string, view: ViewState, category: string | null) {
  const html = STYLE + renderWorkbench({
    state: view.state,
    palette: view.palette,
    activeTarget: view.activeTarget,
    activeCategory: category,
    connected: view.connected,
    rejection: view.lastRejection,
  });
  writeFileSync(`out/${name}.html`, html);
  console.log(`wrote out/${name}.html`);
}

async function main() {
  mkdirSync("out", { recursive: true });
  const client = new ServiceClient(new StdioTransport());
  await client.awaitHello();
  const view = new ViewState(client);
  await view.load(MODEL);

  const inv5 = () => view.state!.preds[0];
  const inv10 = () => view.state!.preds[1];

  // inv5 step (a): quantifier template with labeled brackets
  await view.selectTarget({ kind: "hole", hole: inv5().root });
  await view.chooseBlock("quant:all");
  await view.selectTarget({ kind: "hole", hole: inv5().holes[0] });
  snap("inv5-step-a", view, "BasicSet");

  // inv5 step (b): File in the domain, extension points visible
  await view.chooseBlock("set:File");
  await view.selectTarget({ kind: "hole", hole: inv5().holes[0] });
  snap("inv5-step-b", view, "Relational");

  // build x !in [rhs]
  await view.chooseBlock("op:!in");
  await view.selectTarget({ kind: "hole", hole: inv5().holes[0] });
  await view.chooseBlock("set:x");
  // inv5 step (c): at the rhs hole, link and -> are grayed
  await view.selectTarget({ kind: "hole", hole: inv5().holes[0] });
  snap("inv5-step-c", view, "BasicSet");

  await view.chooseBlock("set:Protected");
  // inv5 step (d): squared anchor on the comparison, => selectable
  const cmp = inv5().tree.children![1];
  await view.selectTarget({ kind: "anchor", node: cmp.id, side: "right" });
  snap("inv5-step-d", view, "Propositional");
  await view.chooseBlock("op:=>");
  for (const key of ["op:in", "set:x", "set:Trash"]) {
    await view.selectTarget({ kind: "hole", hole: inv5().holes[0] });
    await view.chooseBlock(key);
  }

  // inv10 step (a): basic sets grayed under always
  await view.selectTarget({ kind: "hole", hole: inv10().root });
  await view.chooseBlock("op:always");
  await view.selectTarget({ kind: "hole", hole: inv10().holes[0] });
  snap("inv10-step-a", view, "BasicSet");

  // inv10 step (b): set-based operators grayed, comparisons selectable
  snap("inv10-step-b", view, "Relational");

  // finish inv10
  await view.chooseBlock("op:=");
  for (const key of ["set:Protected", "set:Protected"]) {
    await view.selectTarget({ kind: "hole", hole: inv10().holes[0] });
    await view.chooseBlock(key);
  }
  const rhs = inv10().tree.children![0].children![1];
  await view.selectTarget({ kind: "anchor", node: rhs.id, side: "right" });
  await view.chooseBlock("op:'");

  const printed = (await client.request("print")) as { text: string };
  console.log(printed.text);
  client.close();
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
