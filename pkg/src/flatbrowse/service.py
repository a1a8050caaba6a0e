"""HTTP service exposing the store, analyses, graphs and views.

One project per process; POST /api/project replaces it atomically. Requests
are handled under a single lock (single-writer discipline over the
store/cache pair), and a crashing analysis maps to a 500 without affecting
later requests.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, Response
from fastapi.staticfiles import StaticFiles

from .analyses import ExternalFacts
from .catalog import VIEW_ANALYSES, default_registry
from .errors import (
    ANALYSIS_PANIC,
    ApiError,
    BAD_REQUEST,
    MODULE_NOT_FOUND,
    UNKNOWN_ANALYSIS,
    UNKNOWN_FUNCTION,
)
from .framework import AnalysisSession
from .graphs import call_graph, graph_doc, import_graph, to_dot
from .payloads import (
    analyses_doc,
    canonical_json,
    error_doc,
    functions_doc,
    imports_usage_doc,
    module_run_doc,
    modules_doc,
    parse_qname,
    result_doc,
)
from .store import all_functions, ensure_full, ensure_full_closure, open_project

_STATUS = {
    MODULE_NOT_FOUND: 404,
    UNKNOWN_FUNCTION: 404,
    UNKNOWN_ANALYSIS: 404,
    ANALYSIS_PANIC: 500,
}

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>flatbrowse</title></head>
<body><h1>flatbrowse service</h1>
<p>No browser UI is installed. The API lives under <code>/api</code>:
<code>/api/modules</code>, <code>/api/analyses</code>, ...</p>
</body></html>
"""


def _json(doc, status: int = 200) -> Response:
    return Response(canonical_json(doc), status_code=status, media_type="application/json")


def _dot_response(text: str) -> Response:
    return Response(text, media_type="text/vnd.graphviz; charset=utf-8")


@dataclass(frozen=True)
class ProjectConfig:
    search_paths: tuple[str, ...]
    main_module: str
    externals_file: str | None = None

    def __post_init__(self):
        if not self.search_paths:
            raise ApiError(BAD_REQUEST, "at least one search path is required")
        if not self.main_module:
            raise ApiError(BAD_REQUEST, "a main module is required")


def open_session(config: ProjectConfig) -> AnalysisSession:
    store = open_project(config.search_paths, config.main_module)
    if config.externals_file:
        facts = ExternalFacts.load(config.externals_file)
    else:
        facts = ExternalFacts.find(config.search_paths)
    return AnalysisSession(store, default_registry(facts))


def build_session(search_paths: Sequence[str], main_module: str, externals: str | None = None) -> AnalysisSession:
    return open_session(ProjectConfig(tuple(str(p) for p in search_paths), main_module, externals))


def create_app(session: AnalysisSession, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="flatbrowse", docs_url=None, redoc_url=None)
    app.state.session = session
    app.state.lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, err: ApiError):
        return _json(error_doc(err), _STATUS.get(err.code, 400))

    @app.get("/api/analyses")
    def get_analyses():
        with app.state.lock:
            return _json(analyses_doc(app.state.session.registry))

    @app.get("/api/modules")
    def get_modules():
        with app.state.lock:
            return _json(modules_doc(app.state.session.store))

    @app.get("/api/modules/{module}/functions")
    def get_functions(module: str, select: str = "all"):
        if select not in ("all", "exported"):
            raise ApiError(BAD_REQUEST, f"select must be 'all' or 'exported', got {select!r}")
        with app.state.lock:
            session = app.state.session
            session.store = ensure_full(session.store, module)
            return _json(functions_doc(session.store.program(module), select))

    @app.get("/api/modules/{module}/imports-usage")
    def get_imports_usage(module: str):
        with app.state.lock:
            session = app.state.session
            session.store = ensure_full(session.store, module)
            return _json(imports_usage_doc(session.store.program(module)))

    @app.get("/api/modules/{module}/analyses/{name}")
    def run_module_level(module: str, name: str):
        with app.state.lock:
            session = app.state.session
            if name in session.registry.function_analyses:
                entries = session.run_on_module(name, module)
                warnings = session.module_warnings([module])
                return _json(module_run_doc(name, module, entries, warnings))
            result = session.run_module_analysis(name, module)
            warnings = session.module_warnings([module])
            return _json(result_doc(result, warnings))

    @app.get("/api/modules/{module}")
    def get_module_view(module: str, view: str = "flat"):
        if view not in VIEW_ANALYSES:
            raise ApiError(BAD_REQUEST, f"view must be one of {sorted(VIEW_ANALYSES)}, got {view!r}")
        with app.state.lock:
            session = app.state.session
            result = session.run_module_analysis(VIEW_ANALYSES[view], module)
            warnings = session.module_warnings([module])
            return _json(result_doc(result, warnings))

    @app.get("/api/functions/{qname}/analyses/{name}")
    def run_function_analysis(qname: str, name: str):
        target = parse_qname(qname)
        with app.state.lock:
            session = app.state.session
            result = session.run_on_function(name, target)
            warnings = session.module_warnings([target.module])
            return _json(result_doc(result, warnings))

    @app.get("/api/graphs/imports")
    def get_import_graph(format: str = "dot"):
        _check_format(format)
        with app.state.lock:
            graph = import_graph(app.state.session.store)
        if format == "dot":
            return _dot_response(to_dot(graph))
        return _json(graph_doc(graph))

    @app.get("/api/graphs/calls/{qname}")
    def get_call_graph(qname: str, scope: str = "global", format: str = "dot"):
        _check_format(format)
        if scope not in ("global", "local"):
            raise ApiError(BAD_REQUEST, f"scope must be 'global' or 'local', got {scope!r}")
        target = parse_qname(qname)
        with app.state.lock:
            session = app.state.session
            session.store = ensure_full_closure(session.store)
            module = target.module if scope == "local" else None
            graph = call_graph(all_functions(session.store), target, module=module)
        if format == "dot":
            return _dot_response(to_dot(graph))
        return _json(graph_doc(graph))

    @app.post("/api/project")
    def post_project(payload: dict):
        paths = payload.get("searchPaths")
        main = payload.get("mainModule")
        if not isinstance(paths, list) or not isinstance(main, str):
            raise ApiError(BAD_REQUEST, "body must carry searchPaths (non-empty list) and mainModule")
        config = ProjectConfig(tuple(str(p) for p in paths), main, payload.get("externalsFile"))
        fresh = open_session(config)
        with app.state.lock:
            app.state.session = fresh
            return _json(modules_doc(fresh.store))

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index():
            return _FALLBACK_PAGE

    return app


def _check_format(format: str):
    if format not in ("dot", "json"):
        raise ApiError(BAD_REQUEST, f"format must be 'dot' or 'json', got {format!r}")


def serve(search_paths: Sequence[str], main_module: str, externals: str | None = None,
          host: str = "127.0.0.1", port: int = 8321, ui_dir: str | None = None):
    """Open the project and run the service; startup failures surface as the
    opening error on stderr with a nonzero exit."""
    import sys

    import uvicorn

    try:
        session = build_session(search_paths, main_module, externals)
    except ApiError as err:
        print(canonical_json(error_doc(err)), file=sys.stderr, end="")
        raise SystemExit(1)
    uvicorn.run(create_app(session, ui_dir), host=host, port=port, log_level="warning")
