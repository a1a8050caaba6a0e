"""Deterministic text rendering of modules.

The output re-parses to a structurally equal module: names from the current
module print unqualified (unless shadowed by a bound variable), imported
names print qualified, and type variables print as a, b, c, ... in order of
first occurrence. Case branches go on their own lines, indented two spaces
per nesting level; everything else stays on the declaration's line.
"""

from __future__ import annotations

from typing import Iterable

from .ir import (
    Case,
    CaseMode,
    Comb,
    CombKind,
    Defined,
    Expr,
    External,
    Fixity,
    Free,
    FuncDecl,
    FuncType,
    OpDecl,
    Or,
    Pattern,
    Prog,
    QName,
    TCons,
    TVar,
    TypeDecl,
    TypeExpr,
    Var,
    Visibility,
)

# precedence contexts: TOP inside braces/at top level, JUXT where application
# is still unambiguous (scrutinees, branch bodies, or-legs), ATOM for
# application arguments
TOP = 0
JUXT = 1
ATOM = 2

_FIXITY_KW = {Fixity.LEFT: "infixl", Fixity.RIGHT: "infixr", Fixity.NONE: "infix"}


def type_var_name(index: int) -> str:
    return chr(ord("a") + index) if index < 26 else f"t{index}"


def _tvar_order(t: TypeExpr, seen: list[int]):
    if isinstance(t, TVar):
        if t.index not in seen:
            seen.append(t.index)
    elif isinstance(t, TCons):
        for a in t.args:
            _tvar_order(a, seen)
    elif isinstance(t, FuncType):
        _tvar_order(t.domain, seen)
        _tvar_order(t.range, seen)


def signature_tvar_names(sig: TypeExpr) -> dict[int, str]:
    """Canonical display names, assigned by first occurrence."""
    seen: list[int] = []
    _tvar_order(sig, seen)
    return {idx: type_var_name(pos) for pos, idx in enumerate(seen)}


def format_qname(q: QName, module: str, shadowed: frozenset[str] = frozenset()) -> str:
    if q.module == module and q.name not in shadowed:
        return q.name
    return str(q)


def format_type(t: TypeExpr, module: str, names: dict[int, str] | None = None, ctx: int = TOP) -> str:
    if names is None:
        names = signature_tvar_names(t)
    if isinstance(t, TVar):
        return names.get(t.index, f"u{t.index}")
    if isinstance(t, TCons):
        head = format_qname(t.name, module)
        if not t.args:
            return head
        body = head + " " + " ".join(format_type(a, module, names, ATOM) for a in t.args)
        return f"({body})" if ctx == ATOM else body
    if isinstance(t, FuncType):
        body = f"{format_type(t.domain, module, names, JUXT)} -> {format_type(t.range, module, names, TOP)}"
        return f"({body})" if ctx != TOP else body
    raise TypeError(f"not a type: {t!r}")


def format_pattern(p: Pattern, module: str, parens: bool = False) -> str:
    head = format_qname(p.constructor, module)
    if not p.vars:
        return head
    body = head + " " + " ".join(p.vars)
    return f"({body})" if parens else body


def format_expr(e: Expr, module: str, bound: frozenset[str] = frozenset(), ctx: int = TOP, depth: int = 0) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Comb):
        shadow = bound if e.kind is CombKind.FUNC else frozenset()
        head = format_qname(e.name, module, shadow)
        if not e.args:
            return head
        body = head + " " + " ".join(format_expr(a, module, bound, ATOM, depth) for a in e.args)
        return f"({body})" if ctx == ATOM else body
    if isinstance(e, Or):
        left = format_expr(e.left, module, bound, TOP, depth)
        right = format_expr(e.right, module, bound, TOP, depth)
        return f"({left} or {right})"
    if isinstance(e, Free):
        inner = bound | frozenset(e.vars)
        body = f"free {', '.join(e.vars)} in {format_expr(e.body, module, inner, JUXT, depth)}"
        return f"({body})" if ctx == ATOM else body
    if isinstance(e, Case):
        keyword = "case" if e.mode is CaseMode.RIGID else "fcase"
        scrutinee = format_expr(e.scrutinee, module, bound, JUXT, depth)
        indent = "  " * (depth + 1)
        lines = []
        for i, branch in enumerate(e.branches):
            inner = bound | frozenset(branch.pattern.vars)
            pat = format_pattern(branch.pattern, module)
            body = format_expr(branch.body, module, inner, JUXT, depth + 1)
            sep = " ;" if i + 1 < len(e.branches) else ""
            lines.append(f"{indent}{pat} -> {body}{sep}")
        text = f"{keyword} {scrutinee} of {{\n" + "\n".join(lines) + f"\n{'  ' * depth}}}"
        return f"({text})" if ctx == ATOM else text
    raise TypeError(f"not an expression: {e!r}")


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def format_data_decl(decl: TypeDecl, module: str) -> str:
    names = {idx: type_var_name(pos) for pos, idx in enumerate(decl.type_vars)}
    head = "data " + decl.name.name
    if decl.type_vars:
        head += " " + " ".join(names[i] for i in decl.type_vars)
    if decl.visibility is Visibility.PRIVATE:
        head = "private " + head
    if not decl.constructors:
        return head  # abstract type: constructors hidden
    cons_parts = []
    for c in decl.constructors:
        part = c.name.name
        if c.arg_types:
            part += " " + " ".join(format_type(t, module, names, ATOM) for t in c.arg_types)
        if c.visibility is Visibility.PRIVATE:
            part = "private " + part
        cons_parts.append(part)
    return head + " = " + " | ".join(cons_parts)


def format_function(func: FuncDecl, module: str) -> str:
    prefix = "private " if func.visibility is Visibility.PRIVATE else ""
    lines = [f"{prefix}{func.name.name} :: {format_type(func.type_sig, module)}"]
    if isinstance(func.rule, External):
        lines.append(f'{func.name.name} external "{_escape(func.rule.entry)}"')
    else:
        rule = func.rule
        assert isinstance(rule, Defined)
        lhs = func.name.name + ("".join(" " + a for a in rule.args))
        body = format_expr(rule.body, module, frozenset(rule.args), TOP, 0)
        lines.append(f"{lhs} = {body}")
    return "\n".join(lines)


def format_operator(op: OpDecl) -> str:
    return f"{_FIXITY_KW[op.fixity]} {op.precedence} {op.name.name}"


def emit_text(prog: Prog) -> str:
    """Canonical text of a module; parsing it back yields an equal module."""
    blocks = [f"module {prog.name} imports ({', '.join(prog.imports)})"]
    blocks.extend(format_data_decl(d, prog.name) for d in prog.types)
    blocks.extend(format_function(f, prog.name) for f in prog.functions)
    blocks.extend(format_operator(op) for op in prog.operators)
    return "\n\n".join(blocks) + "\n"
