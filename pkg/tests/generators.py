"""Seeded random program generators used across the test suite.

`gen_program` produces structurally rich, well-formed single-module programs
(canonical type-variable indices, so text round-trips hold). `gen_call_recipe`
produces programs from an explicit recipe of per-function properties and call
edges; the recipe doubles as ground truth for the reachability oracle.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field

from flatbrowse.analyses import ExternalFacts, Facts
from flatbrowse.ir import (
    Branch,
    Case,
    CaseMode,
    Comb,
    CombKind,
    ConsDecl,
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

# --- general well-formed programs (for round-trip and store tests) ---

_FOREIGN_TYPES = {QName("Ext", "U"): 0, QName("Ext", "Pair"): 2}


class _Gen:
    def __init__(self, rng: random.Random, module: str):
        self.rng = rng
        self.module = module
        self.counter = 0
        self.types: list[TypeDecl] = []
        self.func_names: list[QName] = []

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def gen_types(self):
        for i in range(self.rng.randint(1, 3)):
            name = QName(self.module, f"T{i}")
            n_vars = self.rng.randint(0, 2)
            constructors = []
            for j in range(self.rng.randint(1, 3)):
                arity = self.rng.randint(0, 2)
                args = tuple(self.gen_type_atom(n_vars) for _ in range(arity))
                vis = Visibility.PRIVATE if self.rng.random() < 0.2 else Visibility.PUBLIC
                constructors.append(ConsDecl(QName(self.module, f"C{i}x{j}"), arity, vis, args))
            vis = Visibility.PRIVATE if self.rng.random() < 0.15 else Visibility.PUBLIC
            self.types.append(TypeDecl(name, vis, tuple(range(n_vars)), tuple(constructors)))

    def gen_type_atom(self, n_vars: int) -> TypeExpr:
        roll = self.rng.random()
        if n_vars and roll < 0.5:
            return TVar(self.rng.randrange(n_vars))
        if self.types and roll < 0.8:
            decl = self.rng.choice(self.types)
            args = tuple(TVar(self.rng.randrange(n_vars)) if n_vars else TCons(QName("Ext", "U"))
                         for _ in range(len(decl.type_vars)))
            return TCons(decl.name, args)
        name = self.rng.choice(list(_FOREIGN_TYPES))
        args = tuple(TCons(QName("Ext", "U")) for _ in range(_FOREIGN_TYPES[name]))
        return TCons(name, args)

    def gen_signature(self, arity: int) -> TypeExpr:
        pool = self.rng.randint(0, 2)
        result: TypeExpr = self.gen_type_atom(pool)
        for _ in range(arity + self.rng.randint(0, 1)):
            result = FuncType(self.gen_type_atom(pool), result)
        return canonicalize_type_vars(result)

    def gen_expr(self, scope: tuple[str, ...], depth: int) -> Expr:
        rng = self.rng
        choices = ["comb_cons", "comb_func"]
        if scope:
            choices += ["var", "var"]
        if depth > 0:
            choices += ["case", "or", "free", "comb_cons", "comb_func"]
        kind = rng.choice(choices)
        if kind == "var":
            return Var(rng.choice(scope))
        if kind == "comb_cons":
            decl = rng.choice(self.types)
            cons = rng.choice(decl.constructors)
            n_args = rng.randint(0, cons.arity) if depth > 0 else 0
            return Comb(CombKind.CONS, cons.name,
                        tuple(self.gen_expr(scope, depth - 1) for _ in range(n_args)))
        if kind == "comb_func":
            if self.func_names and rng.random() < 0.8:
                name = rng.choice(self.func_names)
            else:
                name = QName("Ext", rng.choice(["g0", "g1"]))
            n_args = rng.randint(0, 2) if depth > 0 else 0
            return Comb(CombKind.FUNC, name,
                        tuple(self.gen_expr(scope, depth - 1) for _ in range(n_args)))
        if kind == "or":
            return Or(self.gen_expr(scope, depth - 1), self.gen_expr(scope, depth - 1))
        if kind == "free":
            vars = tuple(self.fresh("v") for _ in range(rng.randint(1, 2)))
            return Free(vars, self.gen_expr(scope + vars, depth - 1))
        decl = rng.choice(self.types)
        mode = rng.choice((CaseMode.RIGID, CaseMode.FLEX))
        scrutinee = self.gen_expr(scope, depth - 1)
        cons_pool = list(decl.constructors)
        rng.shuffle(cons_pool)
        count = rng.randint(1, len(cons_pool))
        branches = []
        for cons in cons_pool[:count]:
            pvars = tuple(self.fresh("p") for _ in range(cons.arity))
            branches.append(Branch(Pattern(cons.name, pvars),
                                   self.gen_expr(scope + pvars, depth - 1)))
        return Case(mode, scrutinee, tuple(branches))

    def gen_functions(self):
        count = self.rng.randint(1, 8)
        self.func_names = [QName(self.module, f"f{i}") for i in range(count)]
        functions = []
        for name in self.func_names:
            arity = self.rng.randint(0, 3)
            vis = Visibility.PRIVATE if self.rng.random() < 0.2 else Visibility.PUBLIC
            sig = self.gen_signature(arity)
            if self.rng.random() < 0.15:
                entry = "".join(self.rng.choice('=:<>+prim"\\') for _ in range(4))
                sig = canonicalize_type_vars(_exact_arrows(arity, sig))
                functions.append(FuncDecl(name, arity, vis, sig, External(entry)))
            else:
                args = tuple(f"x{k}" for k in range(arity))
                body = self.gen_expr(args, self.rng.randint(0, 4))
                functions.append(FuncDecl(name, arity, vis, sig, Defined(args, body)))
        return functions

    def gen_operators(self, functions) -> list[OpDecl]:
        out = []
        for _ in range(self.rng.randint(0, 2)):
            if functions and self.rng.random() < 0.5:
                local = self.rng.choice(functions).name.name
            else:
                local = "".join(self.rng.choice("+<>*&") for _ in range(2))
            fixity = self.rng.choice(list(Fixity))
            out.append(OpDecl(QName(self.module, local), fixity, self.rng.randint(0, 9)))
        return out


def _exact_arrows(arity: int, sig: TypeExpr) -> TypeExpr:
    """Rebuild a signature so it has exactly `arity` arrows (externals derive
    their arity from the signature in the text format)."""
    domains = []
    body = sig
    while isinstance(body, FuncType):
        domains.append(body.domain)
        body = body.range
    while len(domains) < arity:
        domains.append(TCons(QName("Ext", "U")))
    result = body
    for domain in reversed(domains[:arity]):
        result = FuncType(domain, result)
    return result


def canonicalize_type_vars(t: TypeExpr) -> TypeExpr:
    """Renumber type variables by first occurrence so the text format
    round-trips indices exactly."""
    mapping: dict[int, int] = {}

    def go(t: TypeExpr) -> TypeExpr:
        if isinstance(t, TVar):
            if t.index not in mapping:
                mapping[t.index] = len(mapping)
            return TVar(mapping[t.index])
        if isinstance(t, TCons):
            return TCons(t.name, tuple(go(a) for a in t.args))
        if isinstance(t, FuncType):
            domain = go(t.domain)
            return FuncType(domain, go(t.range))
        raise TypeError(t)

    return go(t)


def gen_program(rng: random.Random, module: str = "M") -> Prog:
    gen = _Gen(rng, module)
    gen.gen_types()
    functions = gen.gen_functions()
    operators = gen.gen_operators(functions)
    return Prog(module, ("Ext",), tuple(gen.types), tuple(functions), tuple(operators))


# --- call-graph recipes with known ground truth ---


@dataclass
class NodeRecipe:
    """Intended properties of one function; the oracle trusts these flags
    while the implementation must rediscover them from the built body."""

    name: QName
    external: bool = False
    calls: list[QName] = field(default_factory=list)
    overlapping: bool = False
    free_binder: bool = False
    rigid_case: bool = False
    incomplete_case: bool = False
    right_linear: bool = True
    impure: bool = False
    suspends: bool = False  # externals only
    totally_defined: bool = True  # externals only


@dataclass
class CallRecipe:
    module: str
    nodes: list[NodeRecipe]
    dangling: list[QName]
    prog: Prog
    facts: ExternalFacts


_BOOL_TYPE = TypeDecl(
    QName("M", "B"),
    Visibility.PUBLIC,
    (),
    (
        ConsDecl(QName("M", "BT"), 0, Visibility.PUBLIC),
        ConsDecl(QName("M", "BF"), 0, Visibility.PUBLIC),
    ),
)

_PAIR_TYPE = TypeDecl(
    QName("M", "P"),
    Visibility.PUBLIC,
    (),
    (
        ConsDecl(
            QName("M", "MkP"),
            2,
            Visibility.PUBLIC,
            (TCons(QName("M", "B")), TCons(QName("M", "B"))),
        ),
    ),
)


def _chain(calls: list[QName], leaf: Expr) -> Expr:
    expr = leaf
    for callee in reversed(calls):
        expr = Comb(CombKind.FUNC, callee, (expr,))
    return expr


def _build_body(recipe: NodeRecipe) -> Expr:
    """Realize the recipe flags in one body: an optional case at the spine
    (over the module-local Boolean type), an optional disjunction whose arms
    share the case's completeness, an optional free wrapper, and the call
    chain inside. The right-linearity flag controls a doubled variable."""
    nullary = Comb(CombKind.CONS, QName("M", "BT"))
    chain = _chain(recipe.calls, nullary)
    if not recipe.right_linear:
        chain = Comb(CombKind.CONS, QName("M", "MkP"), (Var("x"), _chain(recipe.calls, Var("x"))))

    def core() -> Expr:
        if recipe.rigid_case or recipe.incomplete_case:
            mode = CaseMode.RIGID if recipe.rigid_case else CaseMode.FLEX
            branches = [Branch(Pattern(QName("M", "BT"), ()), chain)]
            if not recipe.incomplete_case:
                branches.append(Branch(Pattern(QName("M", "BF"), ()), nullary))
            return Case(mode, Var("x"), tuple(branches))
        return chain

    body = core()
    if recipe.overlapping:
        alt = core() if recipe.incomplete_case else nullary
        body = Or(body, alt)
    if recipe.free_binder:
        body = Free(("fv",), body)
    return body


def gen_call_recipe(rng: random.Random, max_functions: int = 12) -> CallRecipe:
    module = "M"
    count = rng.randint(1, max_functions)
    names = [QName(module, f"f{i}") for i in range(count)]
    dangling = [QName("Missing", f"m{i}") for i in range(rng.randint(0, 2))]
    nodes = []
    facts_known: dict[QName, Facts] = {}
    for name in names:
        if rng.random() < 0.2:
            node = NodeRecipe(
                name,
                external=True,
                overlapping=rng.random() < 0.3,
                free_binder=rng.random() < 0.3,
                suspends=rng.random() < 0.4,
                impure=rng.random() < 0.4,
                totally_defined=rng.random() < 0.5,
            )
            facts_known[name] = Facts(
                suspends=node.suspends,
                impure=node.impure,
                totally_defined=node.totally_defined,
                overlapping=node.overlapping,
                introduces_free_vars=node.free_binder,
            )
        else:
            callees: list[QName] = []
            for candidate in names:
                if rng.random() < 0.25:
                    callees.append(candidate)
            for candidate in dangling:
                if rng.random() < 0.15:
                    callees.append(candidate)
            node = NodeRecipe(
                name,
                calls=callees,
                overlapping=rng.random() < 0.25,
                free_binder=rng.random() < 0.25,
                rigid_case=rng.random() < 0.25,
                incomplete_case=rng.random() < 0.25,
                right_linear=rng.random() < 0.8,
            )
        nodes.append(node)

    sig = FuncType(TCons(QName(module, "B")), TCons(QName(module, "B")))
    functions = []
    for node in nodes:
        if node.external:
            functions.append(FuncDecl(node.name, 1, Visibility.PUBLIC, sig, External("prim")))
        else:
            functions.append(
                FuncDecl(node.name, 1, Visibility.PUBLIC, sig, Defined(("x",), _build_body(node)))
            )
    prog = Prog(module, (), (_BOOL_TYPE, _PAIR_TYPE), tuple(functions), ())
    return CallRecipe(module, nodes, dangling, prog, ExternalFacts(known=facts_known))
