/** UI state and the controller driving it. Each pane tracks its own request
 * token so a stale response can never overwrite a newer one (latest wins),
 * and a failed request surfaces as a notice without losing any state. */

import {
  AnalysesDoc,
  ApiClient,
  ApiError,
  ModuleInfo,
  ResultDoc,
  TableDoc,
  ViewName,
} from "./api.js";
import { DotGraph, parseDot } from "./dot.js";

export interface FunctionEntry {
  name: string; // qualified "Module.name"
  tag: string; // module-wide analysis prefix, "" when inactive
}

export type FunctionSelectMode = "all" | "exported" | "reachable";

export interface UiState {
  main: string | null;
  modules: ModuleInfo[];
  analyses: AnalysesDoc | null;
  expandedModules: Set<string>;
  selectedModule: string | null;
  selectedFunction: string | null;
  selectedModuleView: ViewName;
  selectedFunctionAnalysis: string | null;
  activeModuleWideAnalysis: string | null;
  functionSelectMode: FunctionSelectMode;
  focusOnCode: boolean;
  codeText: string;
  functionList: FunctionEntry[];
  resultText: string | null;
  resultLabel: string | null;
  graph: DotGraph | null;
  notices: string[];
}

export function initialState(): UiState {
  return {
    main: null,
    modules: [],
    analyses: null,
    expandedModules: new Set(),
    selectedModule: null,
    selectedFunction: null,
    selectedModuleView: "flat",
    selectedFunctionAnalysis: null,
    activeModuleWideAnalysis: null,
    functionSelectMode: "all",
    focusOnCode: false,
    codeText: "",
    functionList: [],
    resultText: null,
    resultLabel: null,
    graph: null,
    notices: [],
  };
}

export class Controller {
  state: UiState = initialState();
  private listeners: (() => void)[] = [];
  private codeToken = 0;
  private listToken = 0;
  private resultToken = 0;

  constructor(private api: ApiClient) {}

  onChange(listener: () => void) {
    this.listeners.push(listener);
  }

  private emit() {
    for (const listener of this.listeners) listener();
  }

  private notice(err: unknown) {
    const text =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.state.notices = [...this.state.notices, text];
    this.emit();
  }

  dismissNotice(index: number) {
    this.state.notices = this.state.notices.filter((_, i) => i !== index);
    this.emit();
  }

  async init() {
    try {
      const [modules, analyses] = await Promise.all([this.api.modules(), this.api.analyses()]);
      this.state.main = modules.main;
      this.state.modules = modules.modules;
      this.state.analyses = analyses;
      this.state.expandedModules = new Set([modules.main]);
      this.emit();
      await this.selectModule(modules.main);
    } catch (err) {
      this.notice(err);
    }
  }

  toggleModule(name: string) {
    const expanded = new Set(this.state.expandedModules);
    if (expanded.has(name)) expanded.delete(name);
    else expanded.add(name);
    this.state.expandedModules = expanded;
    this.emit();
  }

  async selectModule(name: string) {
    if (this.state.selectedFunction && !this.state.selectedFunction.startsWith(name + ".")) {
      this.state.selectedFunction = null;
    }
    this.state.selectedModule = name;
    this.state.activeModuleWideAnalysis = null;
    this.emit();
    await Promise.all([this.loadCode(), this.loadFunctionList("all")]);
  }

  async setModuleView(view: ViewName) {
    this.state.selectedModuleView = view;
    this.emit();
    await this.loadCode();
  }

  private async loadCode() {
    const module = this.state.selectedModule;
    if (!module) return;
    const token = ++this.codeToken;
    try {
      const doc = await this.api.moduleView(module, this.state.selectedModuleView);
      if (token !== this.codeToken) return;
      this.state.codeText = doc.message;
      this.emit();
    } catch (err) {
      this.notice(err);
    }
  }

  async loadFunctionList(mode: FunctionSelectMode) {
    const module = this.state.selectedModule;
    if (!module) return;
    const token = ++this.listToken;
    this.state.functionSelectMode = mode;
    try {
      let entries: FunctionEntry[];
      if (mode === "reachable") {
        const selected = this.state.selectedFunction;
        if (!selected) return;
        const doc = await this.api.functionAnalysis(selected, "Depends on");
        const message = doc.kind === "text" ? doc.message : "";
        entries = message === "(none)" || !message
          ? []
          : message.split(", ").map((name) => ({ name, tag: "" }));
      } else {
        const doc = await this.api.functions(module, mode);
        entries = doc.functions.map((f) => ({ name: f.name, tag: "" }));
      }
      if (token !== this.listToken) return;
      this.state.functionList = entries;
      this.state.activeModuleWideAnalysis = null;
      this.emit();
    } catch (err) {
      this.notice(err);
    }
  }

  async selectFunction(qname: string) {
    const module = qname.slice(0, qname.lastIndexOf("."));
    if (module !== this.state.selectedModule) {
      await this.selectModule(module);
    }
    this.state.selectedFunction = qname;
    this.emit();
  }

  setFocusOnCode(value: boolean) {
    this.state.focusOnCode = value;
    this.emit();
  }

  async runFunctionAnalysis(name: string) {
    const target = this.state.selectedFunction;
    if (!target) {
      this.notice(new Error("select a function first"));
      return;
    }
    this.state.selectedFunctionAnalysis = name;
    const token = ++this.resultToken;
    try {
      const doc = await this.api.functionAnalysis(target, name);
      if (token !== this.resultToken) return;
      this.applyResult(`${name} — ${target}`, doc);
    } catch (err) {
      this.notice(err);
    }
  }

  async runModuleWideAnalysis(name: string) {
    const module = this.state.selectedModule;
    if (!module) return;
    const token = ++this.resultToken;
    try {
      const doc = await this.api.moduleAnalysis(module, name);
      if (token !== this.resultToken) return;
      if (doc.kind === "table") {
        const table = doc as TableDoc;
        this.state.activeModuleWideAnalysis = name;
        this.state.functionList = table.entries.map((entry) => ({
          name: entry.function,
          tag: entry.tag,
        }));
        this.state.resultLabel = `${name} — ${module}`;
        this.state.resultText = table.entries
          .map((entry) => `${entry.tag ? entry.tag + " " : ""}${entry.function}: ${entry.message ?? "(graph)"}`)
          .join("\n");
        this.state.graph = null;
        this.emit();
      } else {
        this.applyResult(`${name} — ${module}`, doc as ResultDoc);
      }
    } catch (err) {
      this.notice(err);
    }
  }

  private applyResult(label: string, doc: ResultDoc) {
    this.state.resultLabel = label;
    if (doc.kind === "graph") {
      this.state.graph = parseDot(doc.dot);
      this.state.resultText = `graph: ${doc.graph.title}`;
    } else {
      this.state.resultText = doc.message;
      this.state.graph = null;
    }
    if (doc.warnings?.length) {
      this.state.notices = [...this.state.notices, ...doc.warnings.map((w) => `warning: ${w}`)];
    }
    this.emit();
  }

  async openImportGraph() {
    try {
      const dot = await this.api.importGraphDot();
      this.state.graph = parseDot(dot);
      this.state.resultLabel = "Import graph";
      this.emit();
    } catch (err) {
      this.notice(err);
    }
  }

  async openCallGraph(scope: "global" | "local") {
    const target = this.state.selectedFunction;
    if (!target) {
      this.notice(new Error("select a function first"));
      return;
    }
    try {
      const dot = await this.api.callGraphDot(target, scope);
      this.state.graph = parseDot(dot);
      this.state.resultLabel = `Call graph — ${target}`;
      this.emit();
    } catch (err) {
      this.notice(err);
    }
  }

  async openImportsUsage() {
    const module = this.state.selectedModule;
    if (!module) return;
    try {
      const doc = (await this.api.importsUsage(module)) as {
        imports: { module: string; used: string[]; superfluous: boolean }[];
      };
      this.state.resultLabel = `Import usage — ${module}`;
      this.state.resultText =
        doc.imports
          .map((entry) =>
            entry.superfluous
              ? `${entry.module}: superfluous (no references)`
              : `${entry.module}: ${entry.used.join(", ")}`,
          )
          .join("\n") || "(no imports)";
      this.state.graph = null;
      this.emit();
    } catch (err) {
      this.notice(err);
    }
  }

  closeGraph() {
    this.state.graph = null;
    this.emit();
  }
}
