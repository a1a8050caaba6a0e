/** Typed client for the analysis service; issues only documented endpoints. */

export interface DiagnosticDoc {
  code: string;
  subject: string;
  message: string;
}

export interface ModuleInfo {
  name: string;
  loadLevel: string;
  imports: string[];
  diagnostics: DiagnosticDoc[];
}

export interface ModulesDoc {
  main: string;
  modules: ModuleInfo[];
}

export interface AnalysisInfo {
  name: string;
  kind: string;
  moduleWide: boolean;
}

export interface AnalysesDoc {
  functionAnalyses: AnalysisInfo[];
  moduleAnalyses: { name: string }[];
}

export interface FunctionInfo {
  name: string;
  arity: number;
  visibility: string;
}

export interface FunctionsDoc {
  module: string;
  select: string;
  functions: FunctionInfo[];
}

export interface GraphNodeDoc {
  id: string;
  label: string;
  kind: string;
}

export interface GraphDoc {
  title: string;
  nodes: GraphNodeDoc[];
  edges: { from: string; to: string }[];
}

export interface TextResultDoc {
  kind: "text";
  message: string;
  warnings?: string[];
}

export interface GraphResultDoc {
  kind: "graph";
  graph: GraphDoc;
  dot: string;
  warnings?: string[];
}

export type ResultDoc = TextResultDoc | GraphResultDoc;

export interface TableEntryDoc {
  function: string;
  tag: string;
  kind: string;
  message?: string;
  graph?: GraphDoc;
  dot?: string;
}

export interface TableDoc {
  kind: "table";
  analysis: string;
  module: string;
  entries: TableEntryDoc[];
  warnings?: string[];
}

export type ViewName = "flat" | "source" | "interface" | "signatures";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiError("NETWORK", String(err), 0);
    }
    const text = await response.text();
    let body: unknown = null;
    try {
      body = text ? JSON.parse(text) : null;
    } catch {
      body = text;
    }
    if (!response.ok) {
      const doc = body as { error?: { code?: string; message?: string } } | null;
      const code = doc?.error?.code ?? "HTTP_" + response.status;
      const message = doc?.error?.message ?? response.statusText;
      throw new ApiError(code, message, response.status);
    }
    return body;
  }

  modules(): Promise<ModulesDoc> {
    return this.request("/api/modules") as Promise<ModulesDoc>;
  }

  analyses(): Promise<AnalysesDoc> {
    return this.request("/api/analyses") as Promise<AnalysesDoc>;
  }

  moduleView(module: string, view: ViewName): Promise<TextResultDoc> {
    const m = encodeURIComponent(module);
    return this.request(`/api/modules/${m}?view=${view}`) as Promise<TextResultDoc>;
  }

  functions(module: string, select: "all" | "exported"): Promise<FunctionsDoc> {
    const m = encodeURIComponent(module);
    return this.request(`/api/modules/${m}/functions?select=${select}`) as Promise<FunctionsDoc>;
  }

  functionAnalysis(qname: string, analysis: string): Promise<ResultDoc> {
    const q = encodeURIComponent(qname);
    const a = encodeURIComponent(analysis);
    return this.request(`/api/functions/${q}/analyses/${a}`) as Promise<ResultDoc>;
  }

  moduleAnalysis(module: string, analysis: string): Promise<ResultDoc | TableDoc> {
    const m = encodeURIComponent(module);
    const a = encodeURIComponent(analysis);
    return this.request(`/api/modules/${m}/analyses/${a}`) as Promise<ResultDoc | TableDoc>;
  }

  importGraphDot(): Promise<string> {
    return this.requestText("/api/graphs/imports?format=dot");
  }

  callGraphDot(qname: string, scope: "global" | "local"): Promise<string> {
    const q = encodeURIComponent(qname);
    return this.requestText(`/api/graphs/calls/${q}?scope=${scope}&format=dot`);
  }

  importsUsage(module: string): Promise<unknown> {
    const m = encodeURIComponent(module);
    return this.request(`/api/modules/${m}/imports-usage`);
  }

  openProject(searchPaths: string[], mainModule: string, externalsFile?: string): Promise<ModulesDoc> {
    return this.request("/api/project", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ searchPaths, mainModule, ...(externalsFile ? { externalsFile } : {}) }),
    }) as Promise<ModulesDoc>;
  }

  private async requestText(path: string): Promise<string> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path);
    } catch (err) {
      throw new ApiError("NETWORK", String(err), 0);
    }
    const text = await response.text();
    if (!response.ok) {
      let code = "HTTP_" + response.status;
      let message = response.statusText;
      try {
        const doc = JSON.parse(text) as { error?: { code?: string; message?: string } };
        code = doc.error?.code ?? code;
        message = doc.error?.message ?? message;
      } catch {
        // not a JSON error body; keep the HTTP status
      }
      throw new ApiError(code, message, response.status);
    }
    return text;
  }
}
