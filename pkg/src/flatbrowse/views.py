"""Module-level textual views: flat text, source-like equations, interface
listing, and the signature report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

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
    Or,
    Pattern,
    Prog,
    QName,
    Var,
    to_interface,
)
from .printer import (
    JUXT,
    TOP,
    emit_text,
    format_expr,
    format_function,
    format_pattern,
    format_type,
)

# the designated equality primitive recognized by the guard idiom
EQUALITY_EXTERNAL = QName("Prelude", "constrEq")
EQUALITY_SYMBOL = "=:="


def flat_view(prog: Prog) -> str:
    return emit_text(prog)


def interface_view(prog: Prog) -> str:
    return emit_text(to_interface(prog))


def signature_report(prog: Prog) -> str:
    """One `name :: type` line per function, in declaration order."""
    lines = [f"{f.name.name} :: {format_type(f.type_sig, prog.name)}" for f in prog.functions]
    return "\n".join(lines) + "\n" if lines else ""


@dataclass(frozen=True)
class SurfaceRule:
    """One pattern-based equation: per argument position either the original
    variable name or the pattern it was refined to, an optional equality
    guard, and the right-hand side."""

    lhs: tuple[Union[Pattern, str], ...]
    guard: Expr | None
    rhs: Expr


def _is_guard_case(e: Expr) -> bool:
    return (
        isinstance(e, Case)
        and e.mode is CaseMode.RIGID
        and len(e.branches) == 1
        and not e.branches[0].pattern.vars
        and e.branches[0].pattern.constructor.name == "True"
        and isinstance(e.scrutinee, Comb)
        and e.scrutinee.kind is CombKind.FUNC
        and e.scrutinee.name == EQUALITY_EXTERNAL
        and len(e.scrutinee.args) == 2
    )


class _NotTreeShaped(Exception):
    pass


def _expand(e: Expr, args: tuple[str, ...], bound: dict[str, Pattern]) -> list[tuple[dict, Expr]]:
    if isinstance(e, Or):
        return _expand(e.left, args, bound) + _expand(e.right, args, bound)
    if isinstance(e, Case) and e.mode is CaseMode.FLEX:
        scrutinee = e.scrutinee
        if not (isinstance(scrutinee, Var) and scrutinee.name in args and scrutinee.name not in bound):
            raise _NotTreeShaped
        leaves = []
        for branch in e.branches:
            refined = dict(bound)
            refined[scrutinee.name] = branch.pattern
            leaves.extend(_expand(branch.body, args, refined))
        return leaves
    return [(bound, e)]


def surface_rules(func: FuncDecl) -> list[SurfaceRule]:
    """Pattern-based equations for a definitional-tree-shaped body: nested
    flexible cases over distinct argument variables, with disjunctions
    splitting into separate equations. Returns a single equation covering the
    whole body when no expansion applies, and [] when the body is not
    tree-shaped (a flexible case over anything but a fresh argument)."""
    if not isinstance(func.rule, Defined):
        return []
    rule = func.rule
    try:
        leaves = _expand(rule.body, rule.args, {})
    except _NotTreeShaped:
        return []
    out = []
    for bound, leaf in leaves:
        lhs = tuple(bound.get(arg, arg) for arg in rule.args)
        if _is_guard_case(leaf):
            assert isinstance(leaf, Case)
            out.append(SurfaceRule(lhs, leaf.scrutinee, leaf.branches[0].body))
        else:
            out.append(SurfaceRule(lhs, None, leaf))
    return out


def _rule_line(func: FuncDecl, rule: SurfaceRule, module: str) -> str:
    parts = [func.name.name]
    bound: set[str] = set()
    for entry in rule.lhs:
        if isinstance(entry, Pattern):
            parts.append(format_pattern(entry, module, parens=bool(entry.vars)))
            bound.update(entry.vars)
        else:
            parts.append(entry)
            bound.add(entry)
    body = ""
    if rule.guard is not None:
        assert isinstance(rule.guard, Comb)
        left, right = rule.guard.args
        body += (
            f" | {format_expr(left, module, frozenset(bound), JUXT)}"
            f" {EQUALITY_SYMBOL} {format_expr(right, module, frozenset(bound), JUXT)}"
        )
    body += f" = {format_expr(rule.rhs, module, frozenset(bound), TOP)}"
    return " ".join(parts) + body


def source_view(prog: Prog) -> str:
    """Source-like view: definitional-tree bodies print as one equation per
    leaf; everything else keeps its flat form."""
    blocks = [f"module {prog.name} imports ({', '.join(prog.imports)})"]
    from .printer import format_data_decl, format_operator

    blocks.extend(format_data_decl(d, prog.name) for d in prog.types)
    for func in prog.functions:
        rules = surface_rules(func)
        sig = f"{func.name.name} :: {format_type(func.type_sig, prog.name)}"
        if not rules:
            blocks.append(format_function(func, prog.name))
        else:
            blocks.append("\n".join([sig] + [_rule_line(func, r, prog.name) for r in rules]))
    blocks.extend(format_operator(op) for op in prog.operators)
    return "\n\n".join(blocks) + "\n"
