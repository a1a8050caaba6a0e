"""Canonical JSON documents shared by the CLI and the HTTP service, so both
emit byte-identical payloads for the same inputs."""

from __future__ import annotations

import json
from typing import Sequence

from .errors import ApiError, BAD_REQUEST
from .framework import (
    AnalysisResult,
    GraphResult,
    ModuleRunEntry,
    Registry,
    TextResult,
    kind_of,
)
from .graphs import graph_doc, to_dot
from .ir import Prog, QName, Visibility
from .store import ProgramStore


def canonical_json(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def parse_qname(text: str) -> QName:
    if "." not in text:
        raise ApiError(BAD_REQUEST, f"qualified name expected (Module.name), got {text!r}")
    module, name = text.rsplit(".", 1)
    if not module or not name:
        raise ApiError(BAD_REQUEST, f"qualified name expected (Module.name), got {text!r}")
    return QName(module, name)


def result_doc(result: AnalysisResult, warnings: Sequence[str] = ()) -> dict:
    if isinstance(result, TextResult):
        doc = {"kind": "text", "message": result.message}
    else:
        assert isinstance(result, GraphResult)
        doc = {"kind": "graph", "graph": graph_doc(result.graph), "dot": to_dot(result.graph)}
    if warnings:
        doc["warnings"] = list(warnings)
    return doc


def result_text(result: AnalysisResult) -> str:
    """Human rendering of a result: the message, or DOT text for graphs."""
    if isinstance(result, TextResult):
        return result.message
    assert isinstance(result, GraphResult)
    return to_dot(result.graph)


def module_run_doc(
    analysis: str, module: str, entries: Sequence[ModuleRunEntry], warnings: Sequence[str] = ()
) -> dict:
    doc = {
        "kind": "table",
        "analysis": analysis,
        "module": module,
        "entries": [
            {"function": str(e.function), "tag": e.tag, **result_doc(e.result)} for e in entries
        ],
    }
    if warnings:
        doc["warnings"] = list(warnings)
    return doc


def modules_doc(store: ProgramStore) -> dict:
    return {
        "main": store.main_module,
        "modules": [
            {
                "name": name,
                "loadLevel": loaded.level.value,
                "imports": list(loaded.prog.imports),
                "diagnostics": [
                    {"code": d.code, "subject": str(d.subject), "message": d.message}
                    for d in loaded.diagnostics
                ],
            }
            for name, loaded in sorted(store.modules.items())
        ],
    }


def functions_doc(prog: Prog, select: str) -> dict:
    functions = [
        f
        for f in prog.functions
        if select == "all" or f.visibility is Visibility.PUBLIC
    ]
    return {
        "module": prog.name,
        "select": select,
        "functions": [
            {"name": str(f.name), "arity": f.arity, "visibility": f.visibility.value}
            for f in functions
        ],
    }


def imports_usage_doc(prog: Prog) -> dict:
    from .analyses import import_usage

    return {
        "module": prog.name,
        "imports": [
            {
                "module": u.module,
                "used": sorted(str(q) for q in u.used),
                "superfluous": u.superfluous,
            }
            for u in import_usage(prog)
        ],
    }


def analyses_doc(registry: Registry) -> dict:
    return {
        "functionAnalyses": [
            {"name": name, "kind": kind_of(analysis), "moduleWide": name in registry.taggers}
            for name, analysis in registry.function_analyses.items()
        ],
        "moduleAnalyses": [{"name": name} for name in registry.module_analyses],
    }


def error_doc(err: ApiError) -> dict:
    return {"error": err.doc()}
