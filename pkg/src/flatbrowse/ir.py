"""Abstract syntax of the flat functional-logic intermediate language.

A module is a set of functions with exactly one rule each; pattern matching
and choice are explicit in the expression tree (rigid/flexible case, or,
free). All values are frozen dataclasses: immutable, hashable, and safe to
share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Mapping, Union


@dataclass(frozen=True, order=True)
class QName:
    """Qualified name: a (module, local name) pair, ordered lexicographically."""

    module: str
    name: str

    def __str__(self) -> str:
        return f"{self.module}.{self.name}"


class Visibility(Enum):
    PUBLIC = "public"
    PRIVATE = "private"


class CombKind(Enum):
    CONS = "cons"
    FUNC = "func"


class CaseMode(Enum):
    RIGID = "rigid"
    FLEX = "flex"


class Fixity(Enum):
    LEFT = "left"
    RIGHT = "right"
    NONE = "none"


# --- types ---


class TypeExpr:
    """Base class for type expressions."""


@dataclass(frozen=True)
class TVar(TypeExpr):
    """Type variable, identified by a non-negative index."""

    index: int


@dataclass(frozen=True)
class TCons(TypeExpr):
    """Applied type constructor."""

    name: QName
    args: tuple[TypeExpr, ...] = ()


@dataclass(frozen=True)
class FuncType(TypeExpr):
    """Function type; curried, right-associative."""

    domain: TypeExpr
    range: TypeExpr


def arrow_depth(sig: TypeExpr) -> int:
    """Number of top-level arrows in a (curried) type."""
    depth = 0
    while isinstance(sig, FuncType):
        depth += 1
        sig = sig.range
    return depth


# --- expressions ---


class Expr:
    """Base class for expressions."""


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Comb(Expr):
    """Constructor or function application (possibly partial)."""

    kind: CombKind
    name: QName
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Pattern:
    """Flat constructor pattern: constructor applied to distinct variables."""

    constructor: QName
    vars: tuple[str, ...] = ()


@dataclass(frozen=True)
class Branch:
    pattern: Pattern
    body: Expr


@dataclass(frozen=True)
class Case(Expr):
    """Case dispatch. Rigid cases suspend on a free scrutinee variable,
    flexible ones bind it nondeterministically."""

    mode: CaseMode
    scrutinee: Expr
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class Or(Expr):
    """Nondeterministic choice between two expressions."""

    left: Expr
    right: Expr


@dataclass(frozen=True)
class Free(Expr):
    """Introduces fresh logic variables scoped over the body."""

    vars: tuple[str, ...]
    body: Expr


# --- declarations ---


class Rule:
    """Base class for function rules."""


@dataclass(frozen=True)
class Defined(Rule):
    args: tuple[str, ...]
    body: Expr


@dataclass(frozen=True)
class External(Rule):
    """Primitive implemented outside the language; `entry` names it."""

    entry: str


@dataclass(frozen=True)
class ConsDecl:
    name: QName
    arity: int
    visibility: Visibility
    arg_types: tuple[TypeExpr, ...] = ()


@dataclass(frozen=True)
class TypeDecl:
    name: QName
    visibility: Visibility
    type_vars: tuple[int, ...]
    constructors: tuple[ConsDecl, ...]


@dataclass(frozen=True)
class FuncDecl:
    name: QName
    arity: int
    visibility: Visibility
    type_sig: TypeExpr
    rule: Rule


@dataclass(frozen=True)
class OpDecl:
    name: QName
    fixity: Fixity
    precedence: int


@dataclass(frozen=True)
class Prog:
    """A module: name, imports, and its type/function/operator declarations."""

    name: str
    imports: tuple[str, ...]
    types: tuple[TypeDecl, ...] = ()
    functions: tuple[FuncDecl, ...] = ()
    operators: tuple[OpDecl, ...] = ()


# --- traversal helpers ---


def walk(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal over all subexpressions, `expr` included."""
    yield expr
    if isinstance(expr, Comb):
        for arg in expr.args:
            yield from walk(arg)
    elif isinstance(expr, Case):
        yield from walk(expr.scrutinee)
        for branch in expr.branches:
            yield from walk(branch.body)
    elif isinstance(expr, Or):
        yield from walk(expr.left)
        yield from walk(expr.right)
    elif isinstance(expr, Free):
        yield from walk(expr.body)


def free_vars_of(expr: Expr) -> frozenset[str]:
    """Variables with at least one occurrence not bound inside `expr`."""
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    if isinstance(expr, Comb):
        out: set[str] = set()
        for arg in expr.args:
            out |= free_vars_of(arg)
        return frozenset(out)
    if isinstance(expr, Case):
        out = set(free_vars_of(expr.scrutinee))
        for branch in expr.branches:
            out |= free_vars_of(branch.body) - set(branch.pattern.vars)
        return frozenset(out)
    if isinstance(expr, Or):
        return free_vars_of(expr.left) | free_vars_of(expr.right)
    if isinstance(expr, Free):
        return free_vars_of(expr.body) - frozenset(expr.vars)
    raise TypeError(f"not an expression: {expr!r}")


def collect_calls(expr: Expr) -> frozenset[QName]:
    """Names of all function applications in `expr`, saturated or partial.
    Constructor applications are not calls."""
    return frozenset(
        node.name
        for node in walk(expr)
        if isinstance(node, Comb) and node.kind is CombKind.FUNC
    )


def to_interface(prog: Prog) -> Prog:
    """Public face of a module: public types (abstract when any constructor
    is private), public functions with their rule replaced by an external
    stub, operators of public names. Idempotent."""
    types = []
    for decl in prog.types:
        if decl.visibility is not Visibility.PUBLIC:
            continue
        if any(c.visibility is not Visibility.PUBLIC for c in decl.constructors):
            types.append(replace(decl, constructors=()))
        else:
            types.append(decl)
    functions = tuple(
        replace(f, rule=External("interface"))
        for f in prog.functions
        if f.visibility is Visibility.PUBLIC
    )
    public_names = {f.name.name for f in functions}
    for decl in types:
        public_names.add(decl.name.name)
        public_names.update(c.name.name for c in decl.constructors)
    operators = tuple(op for op in prog.operators if op.name.name in public_names)
    return replace(prog, types=tuple(types), functions=functions, operators=operators)
