"""Framework behavior: rendering, caching, demand, crash isolation."""

import pytest

from flatbrowse.analyses import ExternalFacts, depends_on, is_overlapping
from flatbrowse.catalog import default_registry, show_overlap
from flatbrowse.errors import ApiError
from flatbrowse.framework import (
    AnalysisSession,
    GlobalAnalysis,
    GraphResult,
    LocalAnalysis,
    LocalDataAnalysis,
    Registry,
    TextResult,
    with_text_renderer,
)
from flatbrowse.store import LoadLevel, open_project

from conftest import CORPUS, qn


def fresh_session(registry=None):
    import flatbrowse as fb

    store = fb.open_project([CORPUS], "Example")
    facts = ExternalFacts.find([CORPUS])
    return AnalysisSession(store, registry or default_registry(facts))


# --- with_text_renderer ---


def test_with_text_renderer_local(corpus_session):
    facts = ExternalFacts.find([CORPUS])
    analysis = with_text_renderer(
        LocalAnalysis(lambda f: is_overlapping(f, facts)), show_overlap
    )
    store = corpus_session.store
    coin = next(f for f in store.program("Example").functions if f.name.name == "coin")
    conc = next(f for f in store.program("Example").functions if f.name.name == "conc")
    assert analysis.run(coin) == TextResult("Overlapping")
    assert analysis.run(conc) == TextResult("Not Overlapping")


def test_with_text_renderer_identity_on_strings():
    analysis = with_text_renderer(LocalAnalysis(lambda f: "hello"), lambda s: s)
    assert analysis.run(None) == TextResult("hello")


def test_with_text_renderer_global(full_corpus):
    from flatbrowse.store import all_functions

    analysis = with_text_renderer(
        GlobalAnalysis(lambda fs: [(f.name, depends_on(fs, f.name)) for f in fs]),
        lambda names: ", ".join(sorted(str(q) for q in names)) or "(none)",
    )
    results = dict(analysis.run(all_functions(full_corpus)))
    assert results[qn("Example.last")] == TextResult("Example.conc, Prelude.constrEq")
    assert results[qn("Example.conc")] == TextResult("Example.conc")


# --- demand-driven loading ---


def test_local_analysis_loads_only_target_module():
    session = fresh_session()
    session.run_on_function("Overlapping rules", qn("Example.coin"))
    assert session.store.modules["Example"].level is LoadLevel.FULL
    assert session.store.modules["Prelude"].level is LoadLevel.INTERFACE


def test_local_data_analysis_keeps_interfaces():
    session = fresh_session()
    result = session.run_on_function("Pattern completeness", qn("Example.last"))
    assert result.message.startswith("Incomplete")
    assert session.store.modules["Prelude"].level is LoadLevel.INTERFACE


def test_global_analysis_loads_closure():
    session = fresh_session()
    session.run_on_function("Set-valued", qn("Example.unknown"))
    assert all(m.level is LoadLevel.FULL for m in session.store.modules.values())


# --- caching ---


def test_global_cached_second_run_evaluates_nothing():
    session = fresh_session()
    first = session.run_on_function("Depends on", qn("Example.last"))
    version = session.store.version
    count = session.cache.evaluation_count(version, "Depends on")
    assert count == 1
    second = session.run_on_function("Depends on", qn("Example.last"))
    assert second == first
    assert session.cache.evaluation_count(version, "Depends on") == 1
    # another function of the closure is served from the same evaluation
    session.run_on_function("Depends on", qn("Example.conc"))
    assert session.cache.evaluation_count(version, "Depends on") == 1


def test_cache_results_match_uncached_evaluation():
    cached = fresh_session()
    names = [
        "Calls directly",
        "Depends on",
        "Called by",
        "Overlapping rules",
        "Right-linear rules",
        "Right-linearity",
        "Pattern completeness",
        "Totally defined",
        "Solution complete",
        "Nondeterministic",
        "Set-valued",
        "Purity",
        "Dependency graph",
        "Local dependency graph",
    ]
    from flatbrowse.store import all_functions, ensure_full_closure

    probe = fresh_session()
    probe.store = ensure_full_closure(probe.store)
    targets = [f.name for f in all_functions(probe.store)]
    for name in names:
        for target in targets:
            twice = cached.run_on_function(name, target)
            fresh = fresh_session().run_on_function(name, target)
            assert twice == fresh, (name, target)


def test_cache_evicts_superseded_versions():
    session = fresh_session()
    session.run_on_function("Overlapping rules", qn("Example.coin"))
    v_before = session.store.version
    session.run_on_function("Set-valued", qn("Example.coin"))  # upgrades Prelude
    assert session.store.version > v_before
    assert all(key[0] == session.store.version for key in session.cache.entries)


# --- kind fidelity ---


def test_local_analysis_sees_one_function_per_invocation():
    calls = []

    def spy(func):
        calls.append(func)
        return TextResult("ok")

    registry = Registry({"Spy": LocalAnalysis(spy)})
    session = fresh_session(registry)
    session.run_on_module("Spy", "Example")
    assert len(calls) == 4
    from flatbrowse.ir import FuncDecl

    assert all(isinstance(c, FuncDecl) for c in calls)


def test_local_data_analysis_receives_loaded_types():
    seen = []

    def spy(types, func):
        seen.append(tuple(t.name for t in types))
        return TextResult("ok")

    registry = Registry({"Spy": LocalDataAnalysis(spy)})
    session = fresh_session(registry)
    session.run_on_function("Spy", qn("Example.conc"))
    assert qn("Example.List") in seen[0]
    assert qn("Prelude.Bool") in seen[0]


# --- module-wide runs ---


def test_run_on_module_order_and_tags():
    session = fresh_session()
    entries = session.run_on_module("Overlapping rules", "Example")
    assert [str(e.function) for e in entries] == [
        "Example.conc",
        "Example.last",
        "Example.unknown",
        "Example.coin",
    ]
    assert [e.tag for e in entries] == ["!OVL", "!OVL", "!OVL", "OVL"]
    pc = session.run_on_module("Pattern completeness", "Example")
    assert [e.tag for e in pc] == ["PC", "!PC", "PC", "PC"]
    assert all(len(e.tag) <= 4 for e in entries + pc)


def test_run_on_module_untagged_analysis():
    session = fresh_session()
    entries = session.run_on_module("Calls directly", "Example")
    assert all(e.tag == "" for e in entries)


def test_run_on_module_global_single_evaluation():
    session = fresh_session()
    session.run_on_module("Nondeterministic", "Example")
    assert session.cache.evaluation_count(session.store.version, "Nondeterministic") == 1


def test_run_on_unknown_module():
    session = fresh_session()
    with pytest.raises(ApiError) as err:
        session.run_on_module("Overlapping rules", "Ghost")
    assert err.value.code == "MODULE_NOT_FOUND"


# --- module analyses ---


def test_module_analysis_interface(corpus_session, example_prog):
    from flatbrowse.views import interface_view

    result = corpus_session.run_module_analysis("Interface", "Example")
    assert result == TextResult(interface_view(example_prog))


def test_module_analysis_import_graph(corpus_session):
    result = corpus_session.run_module_analysis("Import graph", "Example")
    assert isinstance(result, GraphResult)
    assert [n.id for n in result.graph.nodes] == ["Example", "Prelude"]


def test_module_analysis_signatures(corpus_session):
    result = corpus_session.run_module_analysis("Signatures", "Example")
    assert len(result.message.splitlines()) == 4


def test_unknown_names():
    session = fresh_session()
    with pytest.raises(ApiError) as err:
        session.run_on_function("No such", qn("Example.coin"))
    assert err.value.code == "UNKNOWN_ANALYSIS"
    with pytest.raises(ApiError) as err:
        session.run_on_function("Overlapping rules", qn("Example.ghost"))
    assert err.value.code == "UNKNOWN_FUNCTION"
    with pytest.raises(ApiError) as err:
        session.run_module_analysis("No such", "Example")
    assert err.value.code == "UNKNOWN_ANALYSIS"


# --- crash isolation ---


def crashing_registry():
    facts = ExternalFacts.find([CORPUS])
    registry = default_registry(facts)

    def boom(func):
        raise RuntimeError("deliberate failure")

    analyses = dict(registry.function_analyses)
    analyses["Always fails"] = LocalAnalysis(boom)
    return Registry(analyses, dict(registry.taggers), dict(registry.module_analyses))


def test_crashing_analysis_reports_panic_and_spares_others():
    session = fresh_session(crashing_registry())
    before = session.run_on_function("Overlapping rules", qn("Example.coin"))
    with pytest.raises(ApiError) as err:
        session.run_on_function("Always fails", qn("Example.coin"))
    assert err.value.code == "ANALYSIS_PANIC"
    assert "Always fails" in err.value.message
    # the cache for other analyses is intact and the session keeps working
    version = session.store.version
    assert session.cache.evaluation_count(version, "Overlapping rules") == 1
    assert session.run_on_function("Overlapping rules", qn("Example.coin")) == before
    assert session.cache.evaluation_count(version, "Overlapping rules") == 1
    assert session.run_on_function("Set-valued", qn("Example.coin")).message == "Set-valued"


def test_run_on_module_empty_module(tmp_path):
    (tmp_path / "Empty.fl").write_text("module Empty imports ()\n")
    import flatbrowse as fb

    session = AnalysisSession(
        fb.open_project([tmp_path], "Empty"), default_registry(ExternalFacts())
    )
    assert session.run_on_module("Overlapping rules", "Empty") == []
