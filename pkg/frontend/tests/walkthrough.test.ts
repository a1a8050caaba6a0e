// @vitest-environment happy-dom
// @vitest-environment-options {"url": "http://127.0.0.1:8377/"}
/** UI walk-through against a live service instance (the corpus project):
 * expand the main module, run a module-wide analysis, inspect a function,
 * and open the import graph — asserting the rendered DOM at every step. */

import { ChildProcess, spawn } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Controller } from "../src/state.js";
import { mount } from "../src/ui.js";

const PORT = 8377;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = dirname(dirname(dirname(fileURLToPath(import.meta.url))));

let service: ChildProcess;

async function waitForService(timeoutMs = 20000) {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/modules`);
      if (response.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`service did not come up: ${lastError}`);
}

beforeAll(async () => {
  service = spawn(
    "python3",
    [
      "-m", "flatbrowse", "serve",
      "--path", join(REPO_ROOT, "corpus"),
      "--main", "Example",
      "--port", String(PORT),
    ],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await waitForService();
}, 30000);

afterAll(() => {
  service?.kill();
});

describe("browser walk-through on the live corpus service", () => {
  it("explores the corpus end to end", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const controller = new Controller(new ApiClient(BASE, (url, init) => fetch(url, init)));
    mount(root, controller);

    // project loads: module tree shows the main module, flat code appears
    await controller.init();
    const treeLabel = root.querySelector('[data-module="Example"]');
    expect(treeLabel?.textContent).toContain("Example [full]");
    expect(root.querySelector("#code-pane")!.textContent).toContain("module Example imports (Prelude)");

    // expanding Example reveals its import
    expect(root.querySelector('[data-module="Prelude"]')).toBeTruthy(); // main starts expanded
    controller.toggleModule("Example");
    expect(root.querySelector('[data-module="Prelude"]')).toBeNull();
    controller.toggleModule("Example");
    expect(root.querySelector('[data-module="Prelude"]')!.textContent).toContain("Prelude");

    // module-wide pattern completeness: prefix tags appear, last flagged
    await controller.runModuleWideAnalysis("Pattern completeness");
    const items = [...root.querySelectorAll(".function-item")];
    expect(items).toHaveLength(4);
    const tagged = new Map(
      items.map((item) => [
        item.querySelector(".fn-name")!.textContent,
        item.querySelector(".tag")?.textContent ?? "",
      ]),
    );
    expect(tagged.get("Example.last")).toBe("!PC");
    expect(tagged.get("Example.conc")).toBe("PC");

    // select coin (through its rendered list entry), run Overlapping rules
    const coinItem = [...root.querySelectorAll(".function-item")].find(
      (item) => item.querySelector(".fn-name")!.textContent === "Example.coin",
    ) as HTMLElement;
    coinItem.click();
    await new Promise((resolve) => setTimeout(resolve, 50));
    expect(controller.state.selectedFunction).toBe("Example.coin");
    await controller.runFunctionAnalysis("Overlapping rules");
    expect(root.querySelector("#result-pane .result-text")!.textContent).toBe("Overlapping");

    // focus on code highlights coin's declaration lines
    controller.setFocusOnCode(true);
    const focused = [...root.querySelectorAll(".code-line.focus")].map((n) => n.textContent ?? "");
    expect(focused.some((line) => line.startsWith("coin"))).toBe(true);

    // tools: import graph renders a two-node layout
    await controller.openImportGraph();
    const overlay = root.querySelector("#graph-overlay");
    expect(overlay).toBeTruthy();
    expect(overlay!.querySelectorAll("g.node")).toHaveLength(2);
    const labels = [...overlay!.querySelectorAll("g.node text")].map((n) => n.textContent);
    expect(labels).toContain("Example");
    expect(labels).toContain("Prelude");
    expect(overlay!.querySelectorAll("path.edge")).toHaveLength(1);

    // a failing request never loses state
    await controller.runFunctionAnalysis("No such analysis");
    expect(controller.state.notices.some((n) => n.includes("UNKNOWN_ANALYSIS"))).toBe(true);
    expect(controller.state.selectedFunction).toBe("Example.coin");
  }, 30000);

  it("serves source and signature views", async () => {
    const controller = new Controller(new ApiClient(BASE, (url, init) => fetch(url, init)));
    await controller.init();
    await controller.setModuleView("source");
    expect(controller.state.codeText).toContain("conc Nil ys = ys");
    await controller.setModuleView("signatures");
    expect(controller.state.codeText).toContain("conc :: List a -> List a -> List a");
  }, 30000);
});
