"""Well-formedness checking over a parsed module.

Violations come back as diagnostics rather than exceptions so a browser can
show every problem at once. The diagnostic order is deterministic: module
header first, then type declarations, functions, and operators, each in
declaration order, with expression problems in pre-order traversal order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .ir import (
    Case,
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
    TVar,
    TypeDecl,
    TypeExpr,
    Var,
    arrow_depth,
)

DUP_IMPORT = "DUP_IMPORT"
SELF_IMPORT = "SELF_IMPORT"
WRONG_MODULE = "WRONG_MODULE"
DUP_TYPE = "DUP_TYPE"
DUP_CONS = "DUP_CONS"
CONS_ARITY = "CONS_ARITY"
UNBOUND_TVAR = "UNBOUND_TVAR"
TCONS_ARITY = "TCONS_ARITY"
DUP_FUNC = "DUP_FUNC"
DUP_ARG = "DUP_ARG"
ARITY_MISMATCH = "ARITY_MISMATCH"
SIG_ARITY = "SIG_ARITY"
UNBOUND_VAR = "UNBOUND_VAR"
DUP_PATTERN_VAR = "DUP_PATTERN_VAR"
DUP_BRANCH_CONS = "DUP_BRANCH_CONS"
MIXED_CASE_TYPES = "MIXED_CASE_TYPES"
BAD_CONS_ARITY = "BAD_CONS_ARITY"
UNKNOWN_CONSTRUCTOR = "UNKNOWN_CONSTRUCTOR"
EMPTY_FREE = "EMPTY_FREE"
DUP_FREE_VAR = "DUP_FREE_VAR"
BAD_PRECEDENCE = "BAD_PRECEDENCE"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    subject: QName
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.subject}: {self.message}"


def _dups(items) -> list:
    seen = set()
    out = []
    for item in items:
        if item in seen:
            out.append(item)
        seen.add(item)
    return out


class _Checker:
    def __init__(self, prog: Prog, cons_index: Mapping[QName, TypeDecl]):
        self.prog = prog
        self.cons_index = cons_index
        self.out: list[Diagnostic] = []
        # declared argument counts of type constructors, for consistency checks
        self.type_arity: dict[QName, int] = {}
        for decl in prog.types:
            self.type_arity[decl.name] = len(decl.type_vars)
        for decl in {td.name: td for td in cons_index.values()}.values():
            self.type_arity.setdefault(decl.name, len(decl.type_vars))

    def emit(self, code: str, subject: QName, message: str):
        self.out.append(Diagnostic(code, subject, message))

    def run(self) -> list[Diagnostic]:
        prog = self.prog
        for name in _dups(prog.imports):
            self.emit(DUP_IMPORT, QName(prog.name, name), f"module {name} imported twice")
        if prog.name in prog.imports:
            self.emit(SELF_IMPORT, QName(prog.name, prog.name), "module imports itself")

        for name in _dups(t.name for t in prog.types):
            self.emit(DUP_TYPE, name, "type declared twice")
        all_cons = [c.name for t in prog.types for c in t.constructors]
        for name in _dups(all_cons):
            self.emit(DUP_CONS, name, "constructor declared twice")
        for decl in prog.types:
            self.check_type_decl(decl)

        for name in _dups(f.name for f in prog.functions):
            self.emit(DUP_FUNC, name, "function declared twice")
        for func in prog.functions:
            self.check_function(func)

        for op in prog.operators:
            if op.name.module != prog.name:
                self.emit(WRONG_MODULE, op.name, f"operator declared in module {prog.name}")
            if not 0 <= op.precedence <= 9:
                self.emit(BAD_PRECEDENCE, op.name, f"precedence {op.precedence} outside 0..9")
        return self.out

    def check_type_decl(self, decl: TypeDecl):
        if decl.name.module != self.prog.name:
            self.emit(WRONG_MODULE, decl.name, f"type declared in module {self.prog.name}")
        declared = set(decl.type_vars)
        for cons in decl.constructors:
            if cons.arity != len(cons.arg_types):
                self.emit(CONS_ARITY, cons.name, f"arity {cons.arity} but {len(cons.arg_types)} argument types")
            for arg in cons.arg_types:
                self.check_type_expr(arg, cons.name, declared)

    def check_type_expr(self, t: TypeExpr, subject: QName, tvars: set[int] | None):
        if isinstance(t, TVar):
            if tvars is not None and t.index not in tvars:
                self.emit(UNBOUND_TVAR, subject, f"type variable {t.index} not declared")
        elif isinstance(t, TCons):
            declared = self.type_arity.get(t.name)
            if declared is None:
                # argument count must at least be used consistently
                self.type_arity[t.name] = len(t.args)
            elif declared != len(t.args):
                self.emit(TCONS_ARITY, subject, f"{t.name} applied to {len(t.args)} arguments, expects {declared}")
            for arg in t.args:
                self.check_type_expr(arg, subject, tvars)
        elif isinstance(t, FuncType):
            self.check_type_expr(t.domain, subject, tvars)
            self.check_type_expr(t.range, subject, tvars)

    def check_function(self, func: FuncDecl):
        if func.name.module != self.prog.name:
            self.emit(WRONG_MODULE, func.name, f"function declared in module {self.prog.name}")
        self.check_type_expr(func.type_sig, func.name, None)
        if arrow_depth(func.type_sig) < func.arity:
            self.emit(SIG_ARITY, func.name, f"signature has fewer than {func.arity} arrows")
        if isinstance(func.rule, External):
            return
        rule = func.rule
        assert isinstance(rule, Defined)
        for arg in _dups(rule.args):
            self.emit(DUP_ARG, func.name, f"argument {arg} repeated")
        if len(rule.args) != func.arity:
            self.emit(ARITY_MISMATCH, func.name, f"arity {func.arity} but {len(rule.args)} arguments")
        self.check_expr(rule.body, func.name, frozenset(rule.args))

    def check_expr(self, e: Expr, subject: QName, bound: frozenset[str]):
        if isinstance(e, Var):
            if e.name not in bound:
                self.emit(UNBOUND_VAR, subject, f"variable {e.name} is not bound")
        elif isinstance(e, Comb):
            if e.kind is CombKind.CONS:
                decl = self.cons_index.get(e.name)
                if decl is None:
                    self.emit(UNKNOWN_CONSTRUCTOR, subject, f"constructor {e.name} not declared")
                else:
                    cons = next(c for c in decl.constructors if c.name == e.name)
                    if len(e.args) > cons.arity:
                        self.emit(BAD_CONS_ARITY, subject, f"{e.name} applied to {len(e.args)} arguments, arity {cons.arity}")
            for arg in e.args:
                self.check_expr(arg, subject, bound)
        elif isinstance(e, Case):
            self.check_expr(e.scrutinee, subject, bound)
            owners: list[QName] = []
            for name in _dups(b.pattern.constructor for b in e.branches):
                self.emit(DUP_BRANCH_CONS, subject, f"branch constructor {name} repeated")
            for branch in e.branches:
                pat = branch.pattern
                for var in _dups(pat.vars):
                    self.emit(DUP_PATTERN_VAR, subject, f"pattern variable {var} repeated")
                decl = self.cons_index.get(pat.constructor)
                if decl is None:
                    self.emit(UNKNOWN_CONSTRUCTOR, subject, f"constructor {pat.constructor} not declared")
                else:
                    owners.append(decl.name)
                    cons = next(c for c in decl.constructors if c.name == pat.constructor)
                    if len(pat.vars) != cons.arity:
                        self.emit(BAD_CONS_ARITY, subject, f"pattern {pat.constructor} has {len(pat.vars)} variables, arity {cons.arity}")
                self.check_expr(branch.body, subject, bound | frozenset(pat.vars))
            if len(set(owners)) > 1:
                listed = ", ".join(str(o) for o in sorted(set(owners)))
                self.emit(MIXED_CASE_TYPES, subject, f"branch constructors from different types: {listed}")
        elif isinstance(e, Or):
            self.check_expr(e.left, subject, bound)
            self.check_expr(e.right, subject, bound)
        elif isinstance(e, Free):
            if not e.vars:
                self.emit(EMPTY_FREE, subject, "free binder without variables")
            for var in _dups(e.vars):
                self.emit(DUP_FREE_VAR, subject, f"free variable {var} repeated")
            self.check_expr(e.body, subject, bound | frozenset(e.vars))


def well_formed(prog: Prog, cons_index: Mapping[QName, TypeDecl]) -> list[Diagnostic]:
    """All well-formedness violations of `prog`. `cons_index` must cover the
    constructors of the program and its import closure; an empty list means
    the module satisfies every structural invariant."""
    return _Checker(prog, cons_index).run()
