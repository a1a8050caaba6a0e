"""Command-line interface (the `fb` tool)."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analyses import ExternalFacts
from .catalog import VIEW_ANALYSES, default_registry
from .errors import ApiError
from .framework import AnalysisSession
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
    result_text,
)
from .store import all_functions, ensure_full, ensure_full_closure, open_project


def _add_project_args(parser: argparse.ArgumentParser):
    parser.add_argument("--path", action="append", required=True, metavar="DIR",
                        help="module search path (repeatable)")
    parser.add_argument("--main", required=True, metavar="MOD", help="main module")
    parser.add_argument("--externals", metavar="FILE", help="external facts file")


def _add_format_arg(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fb", description="Browse and analyze flat programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modules", help="list the loaded modules")
    _add_project_args(p)
    _add_format_arg(p)

    p = sub.add_parser("show", help="print a module view")
    _add_project_args(p)
    p.add_argument("--module", required=True)
    p.add_argument("--view", choices=tuple(VIEW_ANALYSES), required=True)
    _add_format_arg(p)

    p = sub.add_parser("functions", help="list functions of a module")
    _add_project_args(p)
    p.add_argument("--module", required=True)
    p.add_argument("--select", choices=("all", "exported"), default="all")
    _add_format_arg(p)

    p = sub.add_parser("analyze", help="run a function analysis")
    _add_project_args(p)
    p.add_argument("--function", required=True, metavar="QNAME")
    p.add_argument("--analysis", required=True, metavar="NAME")
    _add_format_arg(p)

    p = sub.add_parser("analyze-module", help="run an analysis over a whole module")
    _add_project_args(p)
    p.add_argument("--module", required=True)
    p.add_argument("--analysis", required=True, metavar="NAME")
    _add_format_arg(p)

    p = sub.add_parser("graph", help="emit the import graph or a call graph")
    p.add_argument("kind", choices=("imports", "calls"))
    p.add_argument("qname", nargs="?", metavar="QNAME")
    p.add_argument("--local", action="store_true", help="restrict call edges to the function's module")
    _add_project_args(p)
    p.add_argument("--dot", metavar="FILE", help="write DOT text to FILE ('-' for stdout)")
    p.add_argument("--json", dest="json_out", metavar="FILE", help="write the structured graph ('-' for stdout)")

    p = sub.add_parser("imports-usage", help="report which imports a module actually uses")
    _add_project_args(p)
    p.add_argument("--module", required=True)
    _add_format_arg(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_project_args(p)
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui", metavar="DIR", help="directory with the browser UI to serve at /")

    return parser


def build_session(args) -> AnalysisSession:
    store = open_project(args.path, args.main)
    if args.externals:
        facts = ExternalFacts.load(args.externals)
    else:
        facts = ExternalFacts.find(args.path)
    return AnalysisSession(store, default_registry(facts))


def _emit(doc, args, text: str):
    if args.format == "json":
        sys.stdout.write(canonical_json(doc))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _warn(warnings):
    for line in warnings:
        print(f"warning: {line}", file=sys.stderr)


def _modules_text(doc) -> str:
    lines = [f"main module: {doc['main']}"]
    for mod in doc["modules"]:
        imports = ", ".join(mod["imports"]) if mod["imports"] else "(none)"
        lines.append(f"{mod['name']} [{mod['loadLevel']}] imports: {imports}")
        for diag in mod["diagnostics"]:
            lines.append(f"  ! {diag['code']} {diag['subject']}: {diag['message']}")
    return "\n".join(lines)


def run(args) -> int:
    command = args.command

    if command == "serve":
        from .service import serve

        serve(args.path, args.main, externals=args.externals, host=args.host,
              port=args.port, ui_dir=args.ui)
        return 0

    session = build_session(args)

    if command == "modules":
        doc = modules_doc(session.store)
        _emit(doc, args, _modules_text(doc))
        return 0

    if command == "show":
        result = session.run_module_analysis(VIEW_ANALYSES[args.view], args.module)
        warnings = session.module_warnings([args.module])
        _emit(result_doc(result, warnings), args, result_text(result))
        if args.format == "text":
            _warn(warnings)
        return 0

    if command == "functions":
        session.store = ensure_full(session.store, args.module)
        doc = functions_doc(session.store.program(args.module), args.select)
        text = "\n".join(f["name"] for f in doc["functions"]) or "(no functions)"
        _emit(doc, args, text)
        return 0

    if command == "analyze":
        target = parse_qname(args.function)
        result = session.run_on_function(args.analysis, target)
        warnings = session.module_warnings([target.module])
        _emit(result_doc(result, warnings), args, result_text(result))
        if args.format == "text":
            _warn(warnings)
        return 0

    if command == "analyze-module":
        if args.analysis in session.registry.function_analyses:
            entries = session.run_on_module(args.analysis, args.module)
            warnings = session.module_warnings([args.module])
            doc = module_run_doc(args.analysis, args.module, entries, warnings)
            width = max((len(e.tag) for e in entries), default=0)
            text = "\n".join(
                f"{e.tag.ljust(width)}  {e.function}: {result_text(e.result).rstrip()}"
                for e in entries
            ) or "(no functions)"
            _emit(doc, args, text)
        else:
            result = session.run_module_analysis(args.analysis, args.module)
            warnings = session.module_warnings([args.module])
            _emit(result_doc(result, warnings), args, result_text(result))
        return 0

    if command == "imports-usage":
        session.store = ensure_full(session.store, args.module)
        doc = imports_usage_doc(session.store.program(args.module))
        lines = []
        for entry in doc["imports"]:
            if entry["superfluous"]:
                lines.append(f"{entry['module']}: superfluous (no references)")
            else:
                lines.append(f"{entry['module']}: {', '.join(entry['used'])}")
        _emit(doc, args, "\n".join(lines) or "(no imports)")
        return 0

    if command == "graph":
        return _run_graph(args, session)

    raise AssertionError(command)


def _run_graph(args, session: AnalysisSession) -> int:
    from .graphs import call_graph, graph_doc, import_graph, to_dot

    if not args.dot and not args.json_out:
        print("error: at least one of --dot/--json is required", file=sys.stderr)
        return 2
    if args.kind == "imports":
        graph = import_graph(session.store)
    else:
        if not args.qname:
            print("error: 'fb graph calls' needs a function name", file=sys.stderr)
            return 2
        target = parse_qname(args.qname)
        session.store = ensure_full_closure(session.store)
        funcs = all_functions(session.store)
        module = target.module if args.local else None
        graph = call_graph(funcs, target, module=module)

    def write(dest: str, payload: str):
        if dest == "-":
            sys.stdout.write(payload)
        else:
            Path(dest).write_text(payload, encoding="utf-8")

    if args.dot:
        write(args.dot, to_dot(graph))
    if args.json_out:
        write(args.json_out, canonical_json(graph_doc(graph)))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ApiError as err:
        fmt = getattr(args, "format", "text")
        if fmt == "json":
            sys.stderr.write(canonical_json(error_doc(err)))
        else:
            print(f"error [{err.code}]: {err.message}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
