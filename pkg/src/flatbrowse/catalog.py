"""Default registry contents: the analysis catalog and the module views.

Adding an analysis means adding one entry here. Boolean analyses render as
an affirmative/negative message pair; the module-wide subset additionally
carries a short prefix tag (`TAG` for the affirmative result, `!TAG`
otherwise) shown in front of function names.
"""

from __future__ import annotations

from functools import partial
from typing import Callable, Sequence

from . import analyses as ana
from .analyses import ExternalFacts
from .framework import (
    AnalysisResult,
    FunctionAnalysis,
    GlobalAnalysis,
    GlobalDataAnalysis,
    LocalAnalysis,
    LocalDataAnalysis,
    GraphResult,
    Registry,
    TextResult,
    with_text_renderer,
)
from .graphs import call_graph, import_graph
from .ir import FuncDecl, Prog, QName
from .views import flat_view, interface_view, signature_report, source_view

# view name (CLI/service spelling) -> module analysis display name
VIEW_ANALYSES = {
    "flat": "Flat view",
    "source": "Source view",
    "interface": "Interface",
    "signatures": "Signatures",
}


def show_overlap(value: bool) -> str:
    return "Overlapping" if value else "Not Overlapping"


def show_names(names) -> str:
    return ", ".join(sorted(str(q) for q in names)) if names else "(none)"


def show_completeness(report: ana.CompletenessReport) -> str:
    if report.complete:
        return "Complete"
    parts = []
    for type_name, missing in report.witnesses:
        if missing:
            parts.append(f"{type_name} missing {', '.join(str(m) for m in missing)}")
        else:
            parts.append(str(type_name))
    return "Incomplete" + (f" ({'; '.join(parts)})" if parts else "")


def _tag(tag: str, positive: str) -> Callable[[AnalysisResult], str]:
    def tagger(result: AnalysisResult) -> str:
        message = result.message if isinstance(result, TextResult) else ""
        return tag if message.startswith(positive) else f"!{tag}"

    return tagger


def _decorated_global(
    pairs_of: Callable[[Sequence[FuncDecl]], list[tuple[QName, bool]]],
    positive: str,
    negative: str,
) -> GlobalAnalysis:
    """Boolean global analysis rendered as text; functions whose reachable
    set leaves the loaded closure get their (conservative) verdict marked."""

    def run(funcs: Sequence[FuncDecl]):
        unresolved = ana.unresolved_callees(funcs)
        out = []
        for name, value in pairs_of(funcs):
            message = positive if value else negative
            missing = unresolved.get(name, frozenset())
            if missing:
                message += " (unresolved callees: " + ", ".join(sorted(str(m) for m in missing)) + ")"
            out.append((name, TextResult(message)))
        return out

    return GlobalAnalysis(run)


def default_registry(facts: ExternalFacts | None = None) -> Registry:
    facts = facts or ExternalFacts()

    function_analyses: dict[str, FunctionAnalysis] = {}
    taggers = {}

    function_analyses["Calls directly"] = with_text_renderer(
        LocalAnalysis(ana.direct_calls), show_names
    )
    function_analyses["Depends on"] = with_text_renderer(
        GlobalAnalysis(lambda fs: [(f.name, ana.depends_on(fs, f.name)) for f in fs]),
        show_names,
    )
    function_analyses["Called by"] = with_text_renderer(
        GlobalAnalysis(lambda fs: [(f.name, ana.called_by(fs, f.name.module, f.name)) for f in fs]),
        show_names,
    )
    function_analyses["Dependency graph"] = GlobalAnalysis(
        lambda fs: [(f.name, GraphResult(call_graph(fs, f.name))) for f in fs]
    )
    function_analyses["Local dependency graph"] = GlobalAnalysis(
        lambda fs: [(f.name, GraphResult(call_graph(fs, f.name, module=f.name.module))) for f in fs]
    )

    function_analyses["Overlapping rules"] = with_text_renderer(
        LocalAnalysis(partial(ana.is_overlapping, facts=facts)), show_overlap
    )
    taggers["Overlapping rules"] = _tag("OVL", "Overlapping")

    function_analyses["Right-linear rules"] = with_text_renderer(
        LocalAnalysis(ana.is_right_linear),
        lambda value: "Right-linear" if value else "Not Right-linear",
    )
    taggers["Right-linear rules"] = _tag("RL", "Right-linear")

    function_analyses["Right-linearity"] = _decorated_global(
        lambda fs: [(f.name, ana.right_linear_global(fs, f.name)) for f in fs],
        "Right-linear",
        "Not Right-linear",
    )

    function_analyses["Pattern completeness"] = with_text_renderer(
        LocalDataAnalysis(lambda tds, f: ana.pattern_completeness(tds, f, facts)),
        show_completeness,
    )
    taggers["Pattern completeness"] = _tag("PC", "Complete")

    def totally_defined_run(tds, fs):
        unresolved = ana.unresolved_callees(fs)
        out = []
        for name, value in ana.totally_defined(tds, fs, facts):
            message = "Totally defined" if value else "Partially defined"
            missing = unresolved.get(name, frozenset())
            if missing:
                message += " (unresolved callees: " + ", ".join(sorted(str(m) for m in missing)) + ")"
            out.append((name, TextResult(message)))
        return out

    function_analyses["Totally defined"] = GlobalDataAnalysis(totally_defined_run)
    taggers["Totally defined"] = _tag("TOT", "Totally defined")

    function_analyses["Solution complete"] = _decorated_global(
        lambda fs: [(f.name, ana.solution_complete(fs, f.name, facts)) for f in fs],
        "Solution complete",
        "Possibly suspends",
    )
    taggers["Solution complete"] = _tag("SC", "Solution complete")

    function_analyses["Nondeterministic"] = _decorated_global(
        lambda fs: ana.nondeterministic(fs, facts), "Nondeterministic", "Deterministic"
    )
    taggers["Nondeterministic"] = _tag("ND", "Nondeterministic")

    function_analyses["Set-valued"] = _decorated_global(
        lambda fs: ana.set_valued(fs, facts), "Set-valued", "Not Set-valued"
    )
    taggers["Set-valued"] = _tag("SET", "Set-valued")

    function_analyses["Purity"] = _decorated_global(
        lambda fs: ana.purity(fs, facts), "Pure", "Impure"
    )
    taggers["Purity"] = _tag("PUR", "Pure")

    module_analyses = {
        "Flat view": lambda prog, store: TextResult(flat_view(prog)),
        "Source view": lambda prog, store: TextResult(source_view(prog)),
        "Interface": lambda prog, store: TextResult(interface_view(prog)),
        "Signatures": lambda prog, store: TextResult(signature_report(prog) or "(no functions)"),
        "Import graph": lambda prog, store: GraphResult(import_graph(store)),
        "Import usage": lambda prog, store: TextResult(_show_import_usage(prog)),
    }

    return Registry(function_analyses, taggers, module_analyses)


def _show_import_usage(prog: Prog) -> str:
    usages = ana.import_usage(prog)
    if not usages:
        return "(no imports)"
    lines = []
    for usage in usages:
        if usage.superfluous:
            lines.append(f"{usage.module}: superfluous (no references)")
        else:
            lines.append(f"{usage.module}: {', '.join(sorted(str(q) for q in usage.used))}")
    return "\n".join(lines)
