/** DOM rendering: the three-pane browser (module tree, function list, code
 * pane with the result pane below), the menus, and the graph overlay. */

import { ModuleInfo, ViewName } from "./api.js";
import { layeredLayout, renderSvg } from "./layout.js";
import { Controller, UiState } from "./state.js";

const VIEWS: ViewName[] = ["flat", "source", "interface", "signatures"];

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) node.append(child);
  return node;
}

function moduleTree(doc: Document, state: UiState, controller: Controller): HTMLElement {
  const byName = new Map(state.modules.map((m) => [m.name, m]));
  const container = el(doc, "div", { id: "module-tree", class: "pane" });
  container.append(el(doc, "h2", {}, ["Modules"]));

  const renderNode = (info: ModuleInfo | undefined, name: string, seen: Set<string>): HTMLElement => {
    const item = el(doc, "div", { class: "tree-node" });
    const row = el(doc, "div", { class: "tree-row" });
    const expandable = (info?.imports.length ?? 0) > 0 && !seen.has(name);
    const toggle = el(doc, "span", { class: "tree-toggle" }, [
      expandable ? (state.expandedModules.has(name) ? "▾" : "▸") : "·",
    ]);
    if (expandable) toggle.addEventListener("click", () => controller.toggleModule(name));
    const label = el(
      doc,
      "span",
      {
        class: "tree-label" + (state.selectedModule === name ? " selected" : ""),
        "data-module": name,
      },
      [name + (info ? ` [${info.loadLevel}]` : "")],
    );
    label.addEventListener("click", () => void controller.selectModule(name));
    row.append(toggle, label);
    item.append(row);
    if (expandable && state.expandedModules.has(name)) {
      const children = el(doc, "div", { class: "tree-children" });
      for (const imported of info?.imports ?? []) {
        children.append(renderNode(byName.get(imported), imported, new Set([...seen, name])));
      }
      item.append(children);
    }
    return item;
  };

  if (state.main) container.append(renderNode(byName.get(state.main), state.main, new Set()));
  return container;
}

function functionListPane(doc: Document, state: UiState, controller: Controller): HTMLElement {
  const container = el(doc, "div", { id: "function-list", class: "pane" });
  const heading = state.activeModuleWideAnalysis
    ? `Functions — ${state.activeModuleWideAnalysis}`
    : "Functions";
  container.append(el(doc, "h2", {}, [heading]));

  const selector = el(doc, "select", { id: "select-functions" });
  for (const [value, label] of [
    ["all", "all of module"],
    ["exported", "exported only"],
    ["reachable", "reachable from selected"],
  ] as const) {
    const option = el(doc, "option", { value }, [label]);
    if (state.functionSelectMode === value) option.setAttribute("selected", "selected");
    selector.append(option);
  }
  selector.addEventListener("change", () =>
    void controller.loadFunctionList(selector.value as "all" | "exported" | "reachable"),
  );
  container.append(selector);

  const list = el(doc, "ul", { class: "function-items" });
  for (const entry of state.functionList) {
    const item = el(doc, "li", {
      class: "function-item" + (state.selectedFunction === entry.name ? " selected" : ""),
      "data-function": entry.name,
    });
    if (entry.tag) item.append(el(doc, "span", { class: "tag" }, [entry.tag]));
    item.append(el(doc, "span", { class: "fn-name" }, [entry.name]));
    item.addEventListener("click", () => void controller.selectFunction(entry.name));
    list.append(item);
  }
  container.append(list);
  return container;
}

function codePane(doc: Document, state: UiState): HTMLElement {
  const container = el(doc, "div", { id: "code-pane", class: "pane" });
  const pre = el(doc, "pre", { class: "code" });
  const focusName = state.focusOnCode && state.selectedFunction
    ? state.selectedFunction.slice(state.selectedFunction.lastIndexOf(".") + 1)
    : null;
  for (const line of state.codeText.split("\n")) {
    const focused =
      focusName !== null &&
      (line.startsWith(focusName + " ") || line.startsWith("private " + focusName + " "));
    const span = el(doc, "span", { class: focused ? "code-line focus" : "code-line" }, [line + "\n"]);
    pre.append(span);
  }
  container.append(pre);
  if (focusName) {
    const target = pre.querySelector(".focus");
    if (target && "scrollIntoView" in target) {
      try {
        (target as HTMLElement).scrollIntoView();
      } catch {
        // scrolling is cosmetic; some DOM implementations lack it
      }
    }
  }
  return container;
}

function resultPane(doc: Document, state: UiState): HTMLElement {
  const container = el(doc, "div", { id: "result-pane", class: "pane" });
  container.append(el(doc, "h2", {}, [state.resultLabel ?? "Results"]));
  container.append(el(doc, "pre", { class: "result-text" }, [state.resultText ?? ""]));
  return container;
}

function toolbar(doc: Document, state: UiState, controller: Controller): HTMLElement {
  const bar = el(doc, "div", { id: "toolbar" });

  const viewSelect = el(doc, "select", { id: "module-view" });
  for (const view of VIEWS) {
    const option = el(doc, "option", { value: view }, [view]);
    if (state.selectedModuleView === view) option.setAttribute("selected", "selected");
    viewSelect.append(option);
  }
  viewSelect.addEventListener("change", () => void controller.setModuleView(viewSelect.value as ViewName));
  bar.append(el(doc, "label", {}, ["View: "]), viewSelect);

  const analysisSelect = el(doc, "select", { id: "select-analysis" });
  analysisSelect.append(el(doc, "option", { value: "" }, ["Select analysis…"]));
  for (const info of state.analyses?.functionAnalyses ?? []) {
    analysisSelect.append(el(doc, "option", { value: info.name }, [`${info.name} (${info.kind})`]));
  }
  analysisSelect.addEventListener("change", () => {
    if (analysisSelect.value) void controller.runFunctionAnalysis(analysisSelect.value);
  });
  bar.append(analysisSelect);

  const moduleWideSelect = el(doc, "select", { id: "analyze-module" });
  moduleWideSelect.append(el(doc, "option", { value: "" }, ["Analyze selected module…"]));
  for (const info of state.analyses?.functionAnalyses ?? []) {
    if (info.moduleWide) moduleWideSelect.append(el(doc, "option", { value: info.name }, [info.name]));
  }
  moduleWideSelect.addEventListener("change", () => {
    if (moduleWideSelect.value) void controller.runModuleWideAnalysis(moduleWideSelect.value);
  });
  bar.append(moduleWideSelect);

  const tools = el(doc, "select", { id: "tools-menu" });
  tools.append(el(doc, "option", { value: "" }, ["Tools…"]));
  tools.append(el(doc, "option", { value: "import-graph" }, ["Import graph"]));
  tools.append(el(doc, "option", { value: "imports-usage" }, ["Import usage"]));
  tools.append(el(doc, "option", { value: "call-graph" }, ["Call graph (selected function)"]));
  tools.append(el(doc, "option", { value: "local-call-graph" }, ["Local call graph"]));
  tools.addEventListener("change", () => {
    const value = tools.value;
    tools.value = "";
    if (value === "import-graph") void controller.openImportGraph();
    else if (value === "imports-usage") void controller.openImportsUsage();
    else if (value === "call-graph") void controller.openCallGraph("global");
    else if (value === "local-call-graph") void controller.openCallGraph("local");
  });
  bar.append(tools);

  const focus = el(doc, "input", { type: "checkbox", id: "focus-on-code" });
  if (state.focusOnCode) focus.setAttribute("checked", "checked");
  focus.addEventListener("change", () => controller.setFocusOnCode((focus as HTMLInputElement).checked));
  const focusLabel = el(doc, "label", { for: "focus-on-code" }, ["focus on code"]);
  bar.append(focus, focusLabel);

  return bar;
}

function notices(doc: Document, state: UiState, controller: Controller): HTMLElement {
  const container = el(doc, "div", { id: "notices" });
  state.notices.forEach((text, index) => {
    const notice = el(doc, "div", { class: "notice" }, [text]);
    const close = el(doc, "button", { class: "notice-close" }, ["×"]);
    close.addEventListener("click", () => controller.dismissNotice(index));
    notice.append(close);
    container.append(notice);
  });
  return container;
}

function graphOverlay(doc: Document, state: UiState, controller: Controller): HTMLElement | null {
  if (!state.graph) return null;
  const overlay = el(doc, "div", { id: "graph-overlay" });
  const box = el(doc, "div", { class: "graph-box" });
  const close = el(doc, "button", { id: "graph-close" }, ["close"]);
  close.addEventListener("click", () => controller.closeGraph());
  box.append(el(doc, "h2", {}, [state.graph.title]), close);
  box.append(renderSvg(doc, layeredLayout(state.graph)));
  overlay.append(box);
  return overlay;
}

export function render(root: HTMLElement, controller: Controller) {
  const doc = root.ownerDocument;
  const state = controller.state;
  root.textContent = "";
  root.append(toolbar(doc, state, controller));
  root.append(notices(doc, state, controller));

  const main = el(doc, "div", { id: "layout" });
  const left = el(doc, "div", { id: "left-column" });
  left.append(moduleTree(doc, state, controller));
  left.append(functionListPane(doc, state, controller));
  const right = el(doc, "div", { id: "right-column" });
  right.append(codePane(doc, state));
  right.append(resultPane(doc, state));
  main.append(left, right);
  root.append(main);

  const overlay = graphOverlay(doc, state, controller);
  if (overlay) root.append(overlay);
}

export function mount(root: HTMLElement, controller: Controller) {
  controller.onChange(() => render(root, controller));
  render(root, controller);
}
