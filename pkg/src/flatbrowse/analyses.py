"""The analysis catalog: per-function properties over the flat IR.

Local properties inspect a single rule; global ones quantify over the
reflexive set of functions reachable through the call graph. Externals
contribute declared facts; a callee missing from the loaded closure is
treated as the worst case so every global verdict stays conservative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .ir import (
    Case,
    CaseMode,
    Comb,
    CombKind,
    Defined,
    Expr,
    External,
    Free,
    FuncDecl,
    FuncType,
    Or,
    Prog,
    QName,
    TCons,
    TypeDecl,
    TypeExpr,
    Var,
    collect_calls,
    walk,
)

# --- declared properties of externals ---


@dataclass(frozen=True)
class Facts:
    suspends: bool = True
    impure: bool = True
    totally_defined: bool = False
    overlapping: bool = False
    introduces_free_vars: bool = False


# assumed for callees that are missing from the loaded closure
WORST_FACTS = Facts(
    suspends=True,
    impure=True,
    totally_defined=False,
    overlapping=True,
    introduces_free_vars=True,
)

_FACT_KEYS = {
    "suspends": "suspends",
    "impure": "impure",
    "totallyDefined": "totally_defined",
    "overlapping": "overlapping",
    "introducesFreeVars": "introduces_free_vars",
}


@dataclass(frozen=True)
class ExternalFacts:
    """Facts per external name, with conservative defaults for unlisted ones."""

    defaults: Facts = Facts()
    known: Mapping[QName, Facts] = field(default_factory=dict)

    def lookup(self, name: QName) -> Facts:
        return self.known.get(name, self.defaults)

    @staticmethod
    def load(path: str | Path) -> "ExternalFacts":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        defaults = _merge_facts(Facts(), doc.get("defaults", {}))
        known = {}
        for name, record in doc.get("facts", {}).items():
            module, local = name.rsplit(".", 1)
            known[QName(module, local)] = _merge_facts(defaults, record)
        return ExternalFacts(defaults, known)

    @staticmethod
    def find(search_paths: Iterable[str | Path]) -> "ExternalFacts":
        """Facts from the first `externals.json` on the search paths, or
        defaults-only when absent."""
        for base in search_paths:
            candidate = Path(base) / "externals.json"
            if candidate.is_file():
                return ExternalFacts.load(candidate)
        return ExternalFacts()


def _merge_facts(base: Facts, record: dict) -> Facts:
    values = {
        attr: bool(record.get(key, getattr(base, attr)))
        for key, attr in _FACT_KEYS.items()
    }
    return Facts(**values)


# --- call graph reachability ---


def direct_calls(func: FuncDecl) -> frozenset[QName]:
    """Functions called directly in the defining rule; empty for externals."""
    if isinstance(func.rule, Defined):
        return collect_calls(func.rule.body)
    return frozenset()


def reach_map(funcs: Sequence[FuncDecl]) -> dict[QName, frozenset[QName]]:
    """Reflexive reachable set per function. Dangling callee names appear in
    the sets (and as leaf keys) even though no declaration backs them."""
    edges = {f.name: direct_calls(f) for f in funcs}
    out: dict[QName, frozenset[QName]] = {}
    for root in edges:
        seen = {root}
        frontier = [root]
        while frontier:
            current = frontier.pop()
            for callee in edges.get(current, frozenset()):
                if callee not in seen:
                    seen.add(callee)
                    frontier.append(callee)
        out[root] = frozenset(seen)
    return out


def depends_on(funcs: Sequence[FuncDecl], target: QName) -> frozenset[QName]:
    """Non-reflexive transitive closure of the direct-call relation: the
    target appears in its own result only when it is reachable from itself."""
    edges = {f.name: direct_calls(f) for f in funcs}
    seen: set[QName] = set()
    frontier = list(edges.get(target, frozenset()))
    seen.update(frontier)
    while frontier:
        current = frontier.pop()
        for callee in edges.get(current, frozenset()):
            if callee not in seen:
                seen.add(callee)
                frontier.append(callee)
    return frozenset(seen)


def called_by(funcs: Sequence[FuncDecl], module: str, target: QName) -> frozenset[QName]:
    """Functions of `module` whose rules call `target` directly."""
    return frozenset(
        f.name for f in funcs if f.name.module == module and target in direct_calls(f)
    )


def unresolved_callees(funcs: Sequence[FuncDecl]) -> dict[QName, frozenset[QName]]:
    """Per function: reachable callee names that have no declaration."""
    declared = {f.name for f in funcs}
    return {
        name: frozenset(q for q in reached if q not in declared)
        for name, reached in reach_map(funcs).items()
    }


# --- local properties ---


def is_overlapping(func: FuncDecl, facts: ExternalFacts) -> bool:
    """A disjunction anywhere in the body makes the rule overlapping."""
    if isinstance(func.rule, External):
        return facts.lookup(func.name).overlapping
    assert isinstance(func.rule, Defined)
    return any(isinstance(node, Or) for node in walk(func.rule.body))


def has_free_binder(func: FuncDecl, facts: ExternalFacts) -> bool:
    if isinstance(func.rule, External):
        return facts.lookup(func.name).introduces_free_vars
    assert isinstance(func.rule, Defined)
    return any(isinstance(node, Free) for node in walk(func.rule.body))


def may_suspend(func: FuncDecl, facts: ExternalFacts) -> bool:
    """A rigid case anywhere in the body may suspend on a free scrutinee."""
    if isinstance(func.rule, External):
        return facts.lookup(func.name).suspends
    assert isinstance(func.rule, Defined)
    return any(
        isinstance(node, Case) and node.mode is CaseMode.RIGID
        for node in walk(func.rule.body)
    )


def is_impure(func: FuncDecl, facts: ExternalFacts) -> bool:
    if isinstance(func.rule, External):
        return facts.lookup(func.name).impure
    return False


class _NotLinear(Exception):
    pass


def _occurrence_counts(e: Expr) -> dict[str, int]:
    """Occurrence counts per free variable of `e`. Branches of a case and
    arms of a disjunction are runtime alternatives, so their counts combine
    with max; every other combination adds. Raises as soon as any variable
    reaches two occurrences on one executable path."""
    if isinstance(e, Var):
        return {e.name: 1}
    if isinstance(e, Comb):
        out: dict[str, int] = {}
        for arg in e.args:
            for name, count in _occurrence_counts(arg).items():
                out[name] = out.get(name, 0) + count
                if out[name] > 1:
                    raise _NotLinear
        return out
    if isinstance(e, Or):
        left = _occurrence_counts(e.left)
        right = _occurrence_counts(e.right)
        return {name: max(left.get(name, 0), right.get(name, 0)) for name in {*left, *right}}
    if isinstance(e, Free):
        counts = _occurrence_counts(e.body)
        for var in e.vars:
            counts.pop(var, None)
        return counts
    if isinstance(e, Case):
        merged: dict[str, int] = {}
        for branch in e.branches:
            counts = _occurrence_counts(branch.body)
            for var in branch.pattern.vars:
                counts.pop(var, None)
            for name, count in counts.items():
                merged[name] = max(merged.get(name, 0), count)
        for name, count in _occurrence_counts(e.scrutinee).items():
            merged[name] = merged.get(name, 0) + count
            if merged[name] > 1:
                raise _NotLinear
        return merged
    raise TypeError(f"not an expression: {e!r}")


def is_right_linear(func: FuncDecl, facts: ExternalFacts | None = None) -> bool:
    """Each variable occurs at most once in the right-hand side, counted per
    executable alternative. Externals count as right-linear."""
    if isinstance(func.rule, External):
        return True
    assert isinstance(func.rule, Defined)
    try:
        _occurrence_counts(func.rule.body)
    except _NotLinear:
        return False
    return True


# --- pattern completeness ---


@dataclass(frozen=True)
class CompletenessReport:
    """Whether matching is exhaustive; `witnesses` lists, per incomplete case
    with a resolvable scrutinee type, the type and its missing constructors.
    Opaque externals and empty cases can be incomplete without a witness."""

    complete: bool
    witnesses: tuple[tuple[QName, tuple[QName, ...]], ...] = ()


class UnknownConstructor(Exception):
    def __init__(self, name: QName):
        super().__init__(f"constructor {name} not covered by the loaded type declarations")
        self.name = name


def _case_completeness(
    e: Expr, cons_owner: Mapping[QName, TypeDecl]
) -> CompletenessReport:
    if isinstance(e, (Var, Comb)):
        # arguments of an application are the callees' concern
        return CompletenessReport(True)
    if isinstance(e, Free):
        return _case_completeness(e.body, cons_owner)
    if isinstance(e, Or):
        left = _case_completeness(e.left, cons_owner)
        right = _case_completeness(e.right, cons_owner)
        if left.complete or right.complete:
            return CompletenessReport(True)
        return CompletenessReport(False, left.witnesses + right.witnesses)
    if isinstance(e, Case):
        witnesses: list[tuple[QName, tuple[QName, ...]]] = []
        complete = True
        if not e.branches:
            complete = False
        else:
            owner = None
            for branch in e.branches:
                decl = cons_owner.get(branch.pattern.constructor)
                if decl is None:
                    raise UnknownConstructor(branch.pattern.constructor)
                owner = owner or decl
            covered = {b.pattern.constructor for b in e.branches}
            missing = tuple(c.name for c in owner.constructors if c.name not in covered)
            foreign = covered - {c.name for c in owner.constructors}
            if missing or foreign:
                complete = False
                witnesses.append((owner.name, missing))
        sub = [_case_completeness(e.scrutinee, cons_owner)]
        sub.extend(_case_completeness(b.body, cons_owner) for b in e.branches)
        for report in sub:
            complete = complete and report.complete
            witnesses.extend(report.witnesses)
        return CompletenessReport(complete, tuple(witnesses))
    raise TypeError(f"not an expression: {e!r}")


def pattern_completeness(
    types: Sequence[TypeDecl], func: FuncDecl, facts: ExternalFacts
) -> CompletenessReport:
    """Exhaustiveness of the rule's pattern matching: every case covers all
    constructors of its scrutinee's type. Raises UnknownConstructor when a
    branch constructor is not among `types`."""
    if isinstance(func.rule, External):
        return CompletenessReport(facts.lookup(func.name).totally_defined)
    assert isinstance(func.rule, Defined)
    cons_owner = {c.name: decl for decl in types for c in decl.constructors}
    return _case_completeness(func.rule.body, cons_owner)


# --- global properties ---


def _flag_map(funcs, facts, local) -> dict[QName, bool]:
    return {f.name: local(f, facts) for f in funcs}


def _exists_in_reach(reached, flags, worst: bool) -> bool:
    return any(flags.get(name, worst) for name in reached)


def _forall_in_reach(reached, flags, worst: bool) -> bool:
    return all(flags.get(name, not worst) for name in reached)


def nondeterministic(funcs: Sequence[FuncDecl], facts: ExternalFacts) -> list[tuple[QName, bool]]:
    """True when some reachable function is defined by overlapping rules."""
    overlap = _flag_map(funcs, facts, is_overlapping)
    reach = reach_map(funcs)
    return [
        (f.name, _exists_in_reach(reach[f.name], overlap, WORST_FACTS.overlapping))
        for f in funcs
    ]


def set_valued(funcs: Sequence[FuncDecl], facts: ExternalFacts) -> list[tuple[QName, bool]]:
    """True when some reachable function overlaps or introduces extra
    variables (a free binder, or a declared external fact)."""
    flags = {
        f.name: is_overlapping(f, facts) or has_free_binder(f, facts) for f in funcs
    }
    reach = reach_map(funcs)
    return [(f.name, _exists_in_reach(reach[f.name], flags, True)) for f in funcs]


def solution_complete(funcs: Sequence[FuncDecl], target: QName, facts: ExternalFacts) -> bool:
    """True when no reachable function can suspend: no rigid case anywhere,
    and no reachable external with a suspends fact."""
    flags = _flag_map(funcs, facts, may_suspend)
    reached = reach_map(funcs).get(target)
    if reached is None:
        raise KeyError(target)
    return not _exists_in_reach(reached, flags, WORST_FACTS.suspends)


def totally_defined(
    types: Sequence[TypeDecl], funcs: Sequence[FuncDecl], facts: ExternalFacts
) -> list[tuple[QName, bool]]:
    """True when every reachable function is pattern complete."""
    complete = {
        f.name: pattern_completeness(types, f, facts).complete for f in funcs
    }
    reach = reach_map(funcs)
    return [(f.name, _forall_in_reach(reach[f.name], complete, True)) for f in funcs]


def purity(funcs: Sequence[FuncDecl], facts: ExternalFacts) -> list[tuple[QName, bool]]:
    """True (pure) when no reachable function is an impure external."""
    impure = _flag_map(funcs, facts, is_impure)
    reach = reach_map(funcs)
    return [
        (f.name, not _exists_in_reach(reach[f.name], impure, WORST_FACTS.impure))
        for f in funcs
    ]


def right_linear_global(funcs: Sequence[FuncDecl], target: QName) -> bool:
    """True when the target and everything it depends on are right-linear."""
    flags = {f.name: is_right_linear(f) for f in funcs}
    reached = reach_map(funcs).get(target)
    if reached is None:
        raise KeyError(target)
    return _forall_in_reach(reached, flags, True)


# --- import usage ---


@dataclass(frozen=True)
class ImportUsage:
    module: str
    used: frozenset[QName]
    superfluous: bool


def _names_in_type(t: TypeExpr):
    if isinstance(t, TCons):
        yield t.name
        for arg in t.args:
            yield from _names_in_type(arg)
    elif isinstance(t, FuncType):
        yield from _names_in_type(t.domain)
        yield from _names_in_type(t.range)


def referenced_names(prog: Prog) -> frozenset[QName]:
    """Every qualified name occurring in signatures, constructor argument
    types, rule bodies and case patterns of the module."""
    out: set[QName] = set()
    for decl in prog.types:
        for cons in decl.constructors:
            for t in cons.arg_types:
                out.update(_names_in_type(t))
    for func in prog.functions:
        out.update(_names_in_type(func.type_sig))
        if isinstance(func.rule, Defined):
            for node in walk(func.rule.body):
                if isinstance(node, Comb):
                    out.add(node.name)
                elif isinstance(node, Case):
                    out.update(b.pattern.constructor for b in node.branches)
    return frozenset(out)


def import_usage(prog: Prog) -> list[ImportUsage]:
    """Per declared import: the names of that module actually referenced;
    an import with no references is superfluous."""
    used = referenced_names(prog)
    out = []
    for imported in prog.imports:
        names = frozenset(q for q in used if q.module == imported)
        out.append(ImportUsage(imported, names, not names))
    return out
