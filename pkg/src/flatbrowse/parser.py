"""Parser for the textual module format.

Declarations are line-oriented: a declaration ends at the first newline
that is not enclosed in parentheses or braces (the published grammar is
otherwise whitespace-insensitive). `#` starts a comment to end of line.

Name resolution: lowercase identifiers are variables when bound in scope,
otherwise function references qualified to the current module. Uppercase
identifiers are constructor/type references; unqualified ones resolve to
this module's declarations first, then to the public declarations of the
imports (via an `ImportEnv`), and fall back to the current module so that
well-formedness checking can report them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .ir import (
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
    arrow_depth,
)

KEYWORDS = frozenset(
    "module imports data case fcase of free in or external private "
    "infixl infixr infix".split()
)

# '#' is excluded: it always starts a comment
_SYMBOL_CHARS = frozenset("!$%&*+/<=>?@\\^|~:-")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 0


class ParseError(Exception):
    """Raised for any malformed input; parsing never aborts otherwise."""

    def __init__(
        self,
        message: str,
        span: SourceSpan = SourceSpan(1, 1),
        expected: tuple[str, ...] = (),
        path: str | None = None,
    ):
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = expected
        self.path = path

    def __str__(self) -> str:
        where = f"{self.span.line}:{self.span.column}"
        hint = f" (expected {', '.join(self.expected)})" if self.expected else ""
        at = f" at {self.path}" if self.path else ""
        return f"{where}: {self.message}{hint}{at}"


@dataclass(frozen=True)
class Token:
    kind: str  # ident number string sym lparen rparen lbrace rbrace semi comma newline eof
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, len(self.text))


_DELIMS = {"(": "lparen", ")": "rparen", "{": "lbrace", "}": "rbrace", ";": "semi", ",": "comma"}


def _lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    depth = 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            if depth == 0 and tokens and tokens[-1].kind != "newline":
                tokens.append(Token("newline", "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch in _DELIMS:
            if ch in "({":
                depth += 1
            elif ch in ")}":
                depth = max(0, depth - 1)
            tokens.append(Token(_DELIMS[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    esc = text[j + 1]
                    out.append({"n": "\n", "t": "\t"}.get(esc, esc))
                    j += 2
                elif text[j] == "\n":
                    break
                else:
                    out.append(text[j])
                    j += 1
            if j >= n or text[j] != '"':
                raise ParseError("unterminated string literal", SourceSpan(line, col))
            tokens.append(Token("string", "".join(out), line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            # dotted continuation for qualified / hierarchical names
            while j < n and text[j] == "." and j + 1 < n and text[j + 1].isalpha():
                j += 1
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
            tokens.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _SYMBOL_CHARS:
            j = i
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            tokens.append(Token("sym", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", SourceSpan(line, col, 1))
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass(frozen=True)
class ImportEnv:
    """Public type and constructor names exported by the imports, used to
    qualify unqualified uppercase identifiers. First binding wins."""

    types: Mapping[str, str] = field(default_factory=dict)
    constructors: Mapping[str, str] = field(default_factory=dict)

    @staticmethod
    def from_programs(progs: Iterable[Prog]) -> "ImportEnv":
        types: dict[str, str] = {}
        cons: dict[str, str] = {}
        for prog in progs:
            for decl in prog.types:
                if decl.visibility is not Visibility.PUBLIC:
                    continue
                types.setdefault(decl.name.name, prog.name)
                for c in decl.constructors:
                    if c.visibility is Visibility.PUBLIC:
                        cons.setdefault(c.name.name, prog.name)
        return ImportEnv(types, cons)


def _is_upper(name: str) -> bool:
    return name[:1].isupper()


def parse_header(text: str) -> tuple[str, tuple[str, ...]]:
    """Module name and import list, without parsing the declarations."""
    return _Parser(_lex(text), ImportEnv()).header()


def parse_module(text: str, env: ImportEnv | None = None) -> Prog:
    """Parse a module. Raises ParseError on malformed input; semantic
    problems (duplicate arguments, unknown constructors, ...) are left to
    well-formedness checking."""
    try:
        return _Parser(_lex(text), env or ImportEnv()).module()
    except RecursionError:
        raise ParseError("nesting too deep") from None


class _Parser:
    def __init__(self, tokens: list[Token], env: ImportEnv):
        self.tokens = tokens
        self.pos = 0
        self.env = env
        self.module_name = ""
        self.local_types: set[str] = set()
        self.local_cons: set[str] = set()

    # token basics

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None, expected: tuple[str, ...] = ()):
        tok = tok or self.peek()
        raise ParseError(message, tok.span, expected)

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {what}, found {tok.text!r}" if tok.text else f"expected {what}", expected=(what,))
        return self.next()

    def expect_sym(self, sym: str) -> Token:
        tok = self.peek()
        if tok.kind != "sym" or tok.text != sym:
            self.fail(f"expected {sym!r}", expected=(sym,))
        return self.next()

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            self.fail(f"expected keyword {word!r}", expected=(word,))
        return self.next()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def skip_newlines(self):
        while self.peek().kind == "newline":
            self.next()

    def end_decl(self):
        tok = self.peek()
        if tok.kind == "newline":
            self.next()
        elif tok.kind != "eof":
            self.fail(f"unexpected {tok.text!r} after declaration")

    def plain_name(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS or "." in tok.text:
            self.fail(f"expected {what}", expected=(what,))
        return self.next()

    # header and declarations

    def header(self) -> tuple[str, tuple[str, ...]]:
        self.skip_newlines()
        self.expect_keyword("module")
        name = self.expect("ident", "module name").text
        self.expect_keyword("imports")
        self.expect("lparen", "'('")
        imports: list[str] = []
        if self.peek().kind == "ident":
            imports.append(self.next().text)
            while self.peek().kind == "comma":
                self.next()
                imports.append(self.expect("ident", "module name").text)
        self.expect("rparen", "')'")
        return name, tuple(imports)

    def module(self) -> Prog:
        name, imports = self.header()
        self.module_name = name
        self.end_decl()
        self._prescan_data()

        types: list[TypeDecl] = []
        operators: list[OpDecl] = []
        sigs: dict[str, tuple[TypeExpr, Visibility, Token]] = {}
        rules: list[tuple[str, Visibility, object, Token]] = []

        while True:
            self.skip_newlines()
            if self.peek().kind == "eof":
                break
            vis = Visibility.PUBLIC
            if self.at_keyword("private"):
                self.next()
                vis = Visibility.PRIVATE
            tok = self.peek()
            if self.at_keyword("data"):
                types.append(self.data_decl(vis))
            elif tok.kind == "ident" and tok.text in ("infixl", "infixr", "infix"):
                operators.append(self.op_decl())
            elif tok.kind == "ident" and tok.text not in KEYWORDS and not _is_upper(tok.text) and "." not in tok.text:
                self.sig_or_rule(vis, sigs, rules)
            else:
                self.fail("expected a declaration")
            self.end_decl()

        functions: list[FuncDecl] = []
        used_sigs: set[str] = set()
        for fname, vis, rule, tok in rules:
            if fname not in sigs:
                raise ParseError(f"missing type signature for {fname!r}", tok.span)
            sig, sig_vis, _ = sigs[fname]
            used_sigs.add(fname)
            if isinstance(rule, Defined):
                arity = len(rule.args)
            else:
                arity = arrow_depth(sig)
            visibility = Visibility.PRIVATE if Visibility.PRIVATE in (vis, sig_vis) else Visibility.PUBLIC
            functions.append(FuncDecl(QName(name, fname), arity, visibility, sig, rule))
        for fname, (_, _, tok) in sigs.items():
            if fname not in used_sigs:
                raise ParseError(f"signature without rule for {fname!r}", tok.span)

        return Prog(name, imports, tuple(types), tuple(functions), tuple(operators))

    def _prescan_data(self):
        """Collect locally declared type and constructor names so bodies and
        signatures appearing before a data declaration still resolve."""
        at_start = True
        i = self.pos
        toks = self.tokens
        while i < len(toks):
            tok = toks[i]
            if tok.kind == "newline":
                at_start = True
                i += 1
                continue
            if tok.kind == "ident" and tok.text == "private" and at_start:
                i += 1
                continue
            if tok.kind == "ident" and tok.text == "data" and at_start:
                i += 1
                if i < len(toks) and toks[i].kind == "ident":
                    self.local_types.add(toks[i].text)
                    i += 1
                after_sep = False
                while i < len(toks) and toks[i].kind != "newline":
                    t = toks[i]
                    if t.kind == "sym" and t.text in ("=", "|"):
                        after_sep = True
                    elif after_sep and t.kind == "ident" and t.text == "private":
                        pass  # stay armed for the constructor name
                    elif after_sep and t.kind == "ident" and _is_upper(t.text) and "." not in t.text:
                        self.local_cons.add(t.text)
                        after_sep = False
                    else:
                        after_sep = False
                    i += 1
                continue
            at_start = False
            i += 1

    def data_decl(self, vis: Visibility) -> TypeDecl:
        self.expect_keyword("data")
        name_tok = self.plain_name("type name")
        if not _is_upper(name_tok.text):
            self.fail("type names start with an uppercase letter", name_tok)
        tvars: dict[str, int] = {}
        while self.peek().kind == "ident" and self.peek().text not in KEYWORDS and not _is_upper(self.peek().text):
            var = self.next().text
            if var not in tvars:
                tvars[var] = len(tvars)
        head_count = len(tvars)
        qname = QName(self.module_name, name_tok.text)
        constructors = []
        # no "=" part: an abstract type (interface files hide constructors)
        if self.peek().kind == "sym" and self.peek().text == "=":
            self.next()
            constructors.append(self.cons_decl(tvars))
            while self.peek().kind == "sym" and self.peek().text == "|":
                self.next()
                constructors.append(self.cons_decl(tvars))
        return TypeDecl(qname, vis, tuple(range(head_count)), tuple(constructors))

    def cons_decl(self, tvars: dict[str, int]) -> ConsDecl:
        vis = Visibility.PUBLIC
        if self.at_keyword("private"):
            self.next()
            vis = Visibility.PRIVATE
        tok = self.plain_name("constructor name")
        if not _is_upper(tok.text):
            self.fail("constructor names start with an uppercase letter", tok)
        args: list[TypeExpr] = []
        while self._at_atype():
            args.append(self.atype(tvars))
        return ConsDecl(QName(self.module_name, tok.text), len(args), vis, tuple(args))

    def op_decl(self) -> OpDecl:
        fixity = {"infixl": Fixity.LEFT, "infixr": Fixity.RIGHT, "infix": Fixity.NONE}[self.next().text]
        num = self.expect("number", "precedence digit")
        if len(num.text) != 1:
            self.fail("precedence is a single digit 0-9", num)
        tok = self.peek()
        if tok.kind == "sym":
            opname = self.next().text
        elif tok.kind == "ident" and tok.text not in KEYWORDS and "." not in tok.text:
            opname = self.next().text
        else:
            self.fail("expected operator name")
        return OpDecl(QName(self.module_name, opname), fixity, int(num.text))

    def sig_or_rule(self, vis, sigs, rules):
        name_tok = self.next()
        fname = name_tok.text
        if self.peek().kind == "sym" and self.peek().text == "::":
            self.next()
            sig = self.type_expr({})
            if fname in sigs:
                raise ParseError(f"duplicate signature for {fname!r}", name_tok.span)
            sigs[fname] = (sig, vis, name_tok)
            return
        args: list[str] = []
        while self.peek().kind == "ident" and self.peek().text not in KEYWORDS and not _is_upper(self.peek().text) and "." not in self.peek().text:
            args.append(self.next().text)
        if self.at_keyword("external"):
            self.next()
            entry = self.expect("string", "external entry name").text
            if args:
                self.fail("external rules take no arguments", name_tok)
            rules.append((fname, vis, External(entry), name_tok))
            return
        self.expect_sym("=")
        body = self.expr(frozenset(args))
        rules.append((fname, vis, Defined(tuple(args), body), name_tok))

    # types

    def _at_atype(self) -> bool:
        tok = self.peek()
        return tok.kind == "lparen" or (tok.kind == "ident" and tok.text not in KEYWORDS)

    def type_expr(self, tvars: dict[str, int]) -> TypeExpr:
        left = self.btype(tvars)
        if self.peek().kind == "sym" and self.peek().text == "->":
            self.next()
            return FuncType(left, self.type_expr(tvars))
        return left

    def btype(self, tvars: dict[str, int]) -> TypeExpr:
        tok = self.peek()
        if tok.kind == "ident" and tok.text not in KEYWORDS and _is_upper(tok.text.rsplit(".", 1)[-1]):
            self.next()
            name = self._type_name(tok)
            args: list[TypeExpr] = []
            while self._at_atype():
                args.append(self.atype(tvars))
            return TCons(name, tuple(args))
        return self.atype(tvars)

    def atype(self, tvars: dict[str, int]) -> TypeExpr:
        tok = self.peek()
        if tok.kind == "lparen":
            self.next()
            inner = self.type_expr(tvars)
            self.expect("rparen", "')'")
            return inner
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.fail("expected a type")
        self.next()
        local = tok.text.rsplit(".", 1)[-1]
        if _is_upper(local):
            return TCons(self._type_name(tok), ())
        if "." in tok.text:
            self.fail("type variables cannot be qualified", tok)
        if tok.text not in tvars:
            tvars[tok.text] = len(tvars)
        return TVar(tvars[tok.text])

    def _type_name(self, tok: Token) -> QName:
        if "." in tok.text:
            mod, local = tok.text.rsplit(".", 1)
            return QName(mod, local)
        if tok.text in self.local_types:
            return QName(self.module_name, tok.text)
        if tok.text in self.env.types:
            return QName(self.env.types[tok.text], tok.text)
        return QName(self.module_name, tok.text)

    def _cons_name(self, tok: Token) -> QName:
        if "." in tok.text:
            mod, local = tok.text.rsplit(".", 1)
            return QName(mod, local)
        if tok.text in self.local_cons:
            return QName(self.module_name, tok.text)
        if tok.text in self.env.constructors:
            return QName(self.env.constructors[tok.text], tok.text)
        return QName(self.module_name, tok.text)

    # expressions

    def expr(self, bound: frozenset[str]) -> Expr:
        if self.at_keyword("case") or self.at_keyword("fcase"):
            mode = CaseMode.RIGID if self.next().text == "case" else CaseMode.FLEX
            scrutinee = self.expr(bound)
            self.expect_keyword("of")
            self.expect("lbrace", "'{'")
            branches = [self.branch(bound)]
            while self.peek().kind == "semi":
                self.next()
                branches.append(self.branch(bound))
            self.expect("rbrace", "'}'")
            return Case(mode, scrutinee, tuple(branches))
        if self.at_keyword("free"):
            self.next()
            vars = [self.plain_name("variable").text]
            while self.peek().kind == "comma":
                self.next()
                vars.append(self.plain_name("variable").text)
            self.expect_keyword("in")
            body = self.expr(bound | frozenset(vars))
            return Free(tuple(vars), body)
        if self.peek().kind == "lparen":
            head_tok = self.next()
            inner = self.expr(bound)
            if self.at_keyword("or"):
                self.next()
                right = self.expr(bound)
                self.expect("rparen", "')'")
                inner = Or(inner, right)
            else:
                self.expect("rparen", "')'")
            if self._at_atom():
                self.fail("application head must be a name", head_tok)
            return inner
        return self.application(bound)

    def _at_atom(self) -> bool:
        tok = self.peek()
        return tok.kind == "lparen" or (tok.kind == "ident" and tok.text not in KEYWORDS)

    def application(self, bound: frozenset[str]) -> Expr:
        tok = self.peek()
        if not (tok.kind == "ident" and tok.text not in KEYWORDS):
            self.fail("expected an expression")
        self.next()
        args: list[Expr] = []
        while self._at_atom():
            args.append(self.atom(bound))
        head = self._name_atom(tok, bound)
        if isinstance(head, Var):
            if args:
                self.fail("a variable cannot be applied to arguments", tok)
            return head
        assert isinstance(head, Comb)
        return Comb(head.kind, head.name, tuple(args))

    def atom(self, bound: frozenset[str]) -> Expr:
        tok = self.peek()
        if tok.kind == "lparen":
            self.next()
            inner = self.expr(bound)
            if self.at_keyword("or"):
                self.next()
                right = self.expr(bound)
                self.expect("rparen", "')'")
                return Or(inner, right)
            self.expect("rparen", "')'")
            return inner
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.next()
            return self._name_atom(tok, bound)
        self.fail("expected an expression")

    def _name_atom(self, tok: Token, bound: frozenset[str]) -> Expr:
        text = tok.text
        if "." in text:
            mod, local = text.rsplit(".", 1)
            kind = CombKind.CONS if _is_upper(local) else CombKind.FUNC
            return Comb(kind, QName(mod, local))
        if _is_upper(text):
            return Comb(CombKind.CONS, self._cons_name(tok))
        if text in bound:
            return Var(text)
        return Comb(CombKind.FUNC, QName(self.module_name, text))

    def branch(self, bound: frozenset[str]) -> Branch:
        tok = self.peek()
        if not (tok.kind == "ident" and tok.text not in KEYWORDS and _is_upper(tok.text.rsplit(".", 1)[-1])):
            self.fail("expected a constructor pattern")
        self.next()
        cons = self._cons_name(tok)
        vars: list[str] = []
        while self.peek().kind == "ident" and self.peek().text not in KEYWORDS and not _is_upper(self.peek().text) and "." not in self.peek().text:
            vars.append(self.next().text)
        self.expect_sym("->")
        body = self.expr(bound | frozenset(vars))
        return Branch(Pattern(cons, tuple(vars)), body)
