/** In-memory stand-in for the analysis service, answering the documented
 * endpoints for a tiny two-module project. Used by the state tests. */

import { FetchLike } from "../src/api.js";

const MODULES = {
  main: "Example",
  modules: [
    { name: "Example", loadLevel: "full", imports: ["Prelude"], diagnostics: [] },
    { name: "Prelude", loadLevel: "interface", imports: [], diagnostics: [] },
  ],
};

const ANALYSES = {
  functionAnalyses: [
    { name: "Overlapping rules", kind: "local", moduleWide: true },
    { name: "Pattern completeness", kind: "local-data", moduleWide: true },
    { name: "Depends on", kind: "global", moduleWide: false },
  ],
  moduleAnalyses: [{ name: "Interface" }, { name: "Import graph" }],
};

const FUNCTIONS = ["Example.conc", "Example.last", "Example.unknown", "Example.coin"];

const OVERLAP: Record<string, string> = {
  "Example.conc": "Not Overlapping",
  "Example.last": "Not Overlapping",
  "Example.unknown": "Not Overlapping",
  "Example.coin": "Overlapping",
};

const PC_TAGS: Record<string, string> = {
  "Example.conc": "PC",
  "Example.last": "!PC",
  "Example.unknown": "PC",
  "Example.coin": "PC",
};

const IMPORTS_DOT = 'digraph "imports" {\n  "Example";\n  "Prelude";\n  "Example" -> "Prelude";\n}\n';

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function error(code: string, message: string, status: number): Response {
  return json({ error: { code, message } }, status);
}

export interface FakeService {
  fetchFn: FetchLike;
  requests: string[];
}

export function fakeService(): FakeService {
  const requests: string[] = [];

  const fetchFn: FetchLike = async (url: string) => {
    requests.push(url);
    const [path, query = ""] = url.split("?");
    const params = new URLSearchParams(query);

    if (path === "/api/modules") return json(MODULES);
    if (path === "/api/analyses") return json(ANALYSES);

    let match = path.match(/^\/api\/modules\/([^/]+)\/functions$/);
    if (match) {
      if (match[1] !== "Example") return error("MODULE_NOT_FOUND", match[1], 404);
      return json({
        module: "Example",
        select: params.get("select") ?? "all",
        functions: FUNCTIONS.map((name) => ({ name, arity: 0, visibility: "public" })),
      });
    }
    match = path.match(/^\/api\/modules\/([^/]+)\/imports-usage$/);
    if (match) {
      return json({
        module: match[1],
        imports: [{ module: "Prelude", used: ["Prelude.constrEq"], superfluous: false }],
      });
    }
    match = path.match(/^\/api\/modules\/([^/]+)\/analyses\/([^/]+)$/);
    if (match) {
      const analysis = decodeURIComponent(match[2]);
      if (analysis === "Pattern completeness") {
        return json({
          kind: "table",
          analysis,
          module: match[1],
          entries: FUNCTIONS.map((name) => ({
            function: name,
            tag: PC_TAGS[name],
            kind: "text",
            message: PC_TAGS[name] === "PC" ? "Complete" : "Incomplete",
          })),
        });
      }
      if (analysis === "Interface") return json({ kind: "text", message: "module Example…" });
      return error("UNKNOWN_ANALYSIS", analysis, 404);
    }
    match = path.match(/^\/api\/modules\/([^/]+)$/);
    if (match) {
      if (match[1] !== "Example" && match[1] !== "Prelude") {
        return error("MODULE_NOT_FOUND", match[1], 404);
      }
      return json({
        kind: "text",
        message: `# ${params.get("view") ?? "flat"} view of ${match[1]}\nconc xs ys = xs\ncoin = coin`,
      });
    }
    match = path.match(/^\/api\/functions\/([^/]+)\/analyses\/([^/]+)$/);
    if (match) {
      const target = decodeURIComponent(match[1]);
      const analysis = decodeURIComponent(match[2]);
      if (!FUNCTIONS.includes(target)) return error("UNKNOWN_FUNCTION", target, 404);
      if (analysis === "Overlapping rules") return json({ kind: "text", message: OVERLAP[target] });
      if (analysis === "Depends on") {
        return json({ kind: "text", message: "Example.conc, Prelude.constrEq" });
      }
      return error("UNKNOWN_ANALYSIS", analysis, 404);
    }
    if (path === "/api/graphs/imports") {
      return new Response(IMPORTS_DOT, { status: 200, headers: { "content-type": "text/vnd.graphviz" } });
    }
    match = path.match(/^\/api\/graphs\/calls\/([^/]+)$/);
    if (match) {
      const target = decodeURIComponent(match[1]);
      return new Response(`digraph "calls ${target}" { "${target}"; }`, { status: 200 });
    }
    if (path === "/api/project") return json(MODULES);
    return error("BAD_REQUEST", `unexpected request ${url}`, 400);
  };

  return { fetchFn, requests };
}
