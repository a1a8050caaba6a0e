"""Generic analysis interface: four analysis kinds, a named registry,
result rendering, and demand-driven cached evaluation.

Local kinds see one function declaration per invocation (local-data kinds
additionally see all loaded type declarations); global kinds see every
function of the loaded closure and answer for all of them at once, which the
cache then serves. A crashing analysis is reported as ANALYSIS_PANIC and
never takes the host down or poisons other analyses' cache entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence, Union

from .errors import ANALYSIS_PANIC, ApiError, UNKNOWN_ANALYSIS, UNKNOWN_FUNCTION
from .graphs import Graph
from .ir import FuncDecl, Prog, QName, TypeDecl
from .store import (
    ProgramStore,
    all_functions,
    all_types,
    ensure_full,
    ensure_full_closure,
    function_index,
)

# --- analysis kinds ---


@dataclass(frozen=True)
class LocalAnalysis:
    run: Callable[[FuncDecl], Any]


@dataclass(frozen=True)
class LocalDataAnalysis:
    run: Callable[[Sequence[TypeDecl], FuncDecl], Any]


@dataclass(frozen=True)
class GlobalAnalysis:
    run: Callable[[Sequence[FuncDecl]], list[tuple[QName, Any]]]


@dataclass(frozen=True)
class GlobalDataAnalysis:
    run: Callable[[Sequence[TypeDecl], Sequence[FuncDecl]], list[tuple[QName, Any]]]


FunctionAnalysis = Union[LocalAnalysis, LocalDataAnalysis, GlobalAnalysis, GlobalDataAnalysis]

_KIND_NAMES = {
    LocalAnalysis: "local",
    LocalDataAnalysis: "local-data",
    GlobalAnalysis: "global",
    GlobalDataAnalysis: "global-data",
}


def kind_of(analysis: FunctionAnalysis) -> str:
    return _KIND_NAMES[type(analysis)]


# --- results ---


@dataclass(frozen=True)
class TextResult:
    message: str


@dataclass(frozen=True)
class GraphResult:
    graph: Graph
    suggested_format: str = "dot"


AnalysisResult = Union[TextResult, GraphResult]


def with_text_renderer(analysis: FunctionAnalysis, show: Callable[[Any], str]) -> FunctionAnalysis:
    """Wrap an analysis with arbitrary result type into one producing text
    results, preserving its kind."""
    if isinstance(analysis, LocalAnalysis):
        return LocalAnalysis(lambda f: TextResult(show(analysis.run(f))))
    if isinstance(analysis, LocalDataAnalysis):
        return LocalDataAnalysis(lambda tds, f: TextResult(show(analysis.run(tds, f))))
    if isinstance(analysis, GlobalAnalysis):
        return GlobalAnalysis(lambda fs: [(q, TextResult(show(r))) for q, r in analysis.run(fs)])
    if isinstance(analysis, GlobalDataAnalysis):
        return GlobalDataAnalysis(
            lambda tds, fs: [(q, TextResult(show(r))) for q, r in analysis.run(tds, fs)]
        )
    raise TypeError(f"not an analysis: {analysis!r}")


# --- registry ---

ModuleAnalysis = Callable[[Prog, ProgramStore], AnalysisResult]
Tagger = Callable[[AnalysisResult], str]


@dataclass(frozen=True)
class Registry:
    """Available analyses by display name. `taggers` marks the subset meant
    for whole-module runs and maps each result to a short prefix tag."""

    function_analyses: Mapping[str, FunctionAnalysis]
    taggers: Mapping[str, Tagger] = field(default_factory=dict)
    module_analyses: Mapping[str, ModuleAnalysis] = field(default_factory=dict)

    def __post_init__(self):
        stray = set(self.taggers) - set(self.function_analyses)
        if stray:
            raise ValueError(f"taggers without a registered analysis: {sorted(stray)}")

    def tag_for(self, analysis_name: str, result: AnalysisResult) -> str:
        tagger = self.taggers.get(analysis_name)
        return tagger(result) if tagger else ""


# --- cache ---


class AnalysisCache:
    """Results per (store version, analysis name); entries of superseded
    store versions are evicted. `evaluations` counts underlying analysis runs
    and exists for instrumentation."""

    def __init__(self):
        self.entries: dict[tuple[int, str], dict[QName, AnalysisResult]] = {}
        self.evaluations: dict[tuple[int, str], int] = {}

    def keep_only(self, version: int):
        for key in [k for k in self.entries if k[0] != version]:
            del self.entries[key]
        for key in [k for k in self.evaluations if k[0] != version]:
            del self.evaluations[key]

    def lookup(self, key: tuple[int, str], target: QName) -> AnalysisResult | None:
        return self.entries.get(key, {}).get(target)

    def record(self, key: tuple[int, str], results: Mapping[QName, AnalysisResult]):
        self.entries.setdefault(key, {}).update(results)
        self.evaluations[key] = self.evaluations.get(key, 0) + 1

    def evaluation_count(self, version: int, analysis_name: str) -> int:
        return self.evaluations.get((version, analysis_name), 0)


@dataclass(frozen=True)
class ModuleRunEntry:
    function: QName
    result: AnalysisResult
    tag: str


class AnalysisSession:
    """A store/cache/registry triple. The store is upgraded in place as
    analyses demand module bodies; callers that share a session across
    threads must serialize access (single writer)."""

    def __init__(self, store: ProgramStore, registry: Registry, cache: AnalysisCache | None = None):
        self.store = store
        self.registry = registry
        self.cache = cache or AnalysisCache()

    def _analysis(self, name: str) -> FunctionAnalysis:
        try:
            return self.registry.function_analyses[name]
        except KeyError:
            raise ApiError(UNKNOWN_ANALYSIS, f"no function analysis named {name!r}") from None

    def run_on_function(self, analysis_name: str, target: QName) -> AnalysisResult:
        """Evaluate one analysis for one function, loading only what the
        analysis kind demands and answering from the cache when possible."""
        analysis = self._analysis(analysis_name)
        if isinstance(analysis, (GlobalAnalysis, GlobalDataAnalysis)):
            self.store = ensure_full_closure(self.store)
        else:
            self.store = ensure_full(self.store, target.module)
        self.cache.keep_only(self.store.version)
        key = (self.store.version, analysis_name)
        cached = self.cache.lookup(key, target)
        if cached is not None:
            return cached

        index = function_index(self.store)
        if isinstance(analysis, (LocalAnalysis, LocalDataAnalysis)):
            func = index.get(target)
            if func is None:
                raise ApiError(UNKNOWN_FUNCTION, f"function {target} is not part of the loaded program")
            try:
                if isinstance(analysis, LocalAnalysis):
                    result = analysis.run(func)
                else:
                    result = analysis.run(all_types(self.store), func)
            except Exception as err:
                raise _panic(analysis_name, err) from None
            self.cache.record(key, {target: result})
            return result

        funcs = all_functions(self.store)
        try:
            if isinstance(analysis, GlobalAnalysis):
                pairs = analysis.run(funcs)
            else:
                pairs = analysis.run(all_types(self.store), funcs)
        except Exception as err:
            raise _panic(analysis_name, err) from None
        results = dict(pairs)
        if set(results) != {f.name for f in funcs}:
            raise _panic(analysis_name, ValueError("global analysis must answer exactly once per function"))
        self.cache.record(key, results)
        if target not in results:
            raise ApiError(UNKNOWN_FUNCTION, f"function {target} is not part of the loaded program")
        return results[target]

    def run_on_module(self, analysis_name: str, module_name: str) -> list[ModuleRunEntry]:
        """Evaluate one function analysis for every function of a module, in
        declaration order, with the registered prefix tag attached."""
        self._analysis(analysis_name)
        self.store = ensure_full(self.store, module_name)
        prog = self.store.program(module_name)
        entries = []
        for func in prog.functions:
            result = self.run_on_function(analysis_name, func.name)
            entries.append(ModuleRunEntry(func.name, result, self.registry.tag_for(analysis_name, result)))
        return entries

    def run_module_analysis(self, analysis_name: str, module_name: str) -> AnalysisResult:
        try:
            analysis = self.registry.module_analyses[analysis_name]
        except KeyError:
            raise ApiError(UNKNOWN_ANALYSIS, f"no module analysis named {analysis_name!r}") from None
        self.store = ensure_full(self.store, module_name)
        prog = self.store.program(module_name)
        try:
            return analysis(prog, self.store)
        except Exception as err:
            raise _panic(analysis_name, err) from None

    def module_warnings(self, module_names: Sequence[str]) -> list[str]:
        """Diagnostics of the named modules, as warning strings for results
        computed over ill-formed code."""
        out = []
        for name in module_names:
            loaded = self.store.modules.get(name)
            for diagnostic in loaded.diagnostics if loaded else ():
                out.append(str(diagnostic))
        return out


def _panic(analysis_name: str, err: Exception) -> ApiError:
    return ApiError(
        ANALYSIS_PANIC,
        f"analysis {analysis_name!r} failed: {err}",
        detail={"analysis": analysis_name, "error": repr(err)},
    )
