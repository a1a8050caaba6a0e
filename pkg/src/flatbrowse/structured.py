"""Canonical JSON serialization of modules.

`to_structured` emits a fixed field order with two-space indentation, so
equal modules always serialize to identical bytes. `from_structured` decodes
strictly and reports the path of the first schema violation; semantic
invariants are still the well-formedness checker's job.
"""

from __future__ import annotations

import json
from typing import Any

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
    Rule,
    TCons,
    TVar,
    TypeDecl,
    TypeExpr,
    Var,
    Visibility,
)
from .parser import ParseError, SourceSpan

# --- encoding ---


def _qname_doc(q: QName) -> dict:
    return {"mod": q.module, "name": q.name}


def _type_doc(t: TypeExpr) -> dict:
    if isinstance(t, TVar):
        return {"tvar": t.index}
    if isinstance(t, TCons):
        return {"tcons": {"name": _qname_doc(t.name), "args": [_type_doc(a) for a in t.args]}}
    if isinstance(t, FuncType):
        return {"func": {"from": _type_doc(t.domain), "to": _type_doc(t.range)}}
    raise TypeError(f"not a type: {t!r}")


def _expr_doc(e: Expr) -> dict:
    if isinstance(e, Var):
        return {"var": e.name}
    if isinstance(e, Comb):
        return {
            "comb": {
                "kind": e.kind.value,
                "name": _qname_doc(e.name),
                "args": [_expr_doc(a) for a in e.args],
            }
        }
    if isinstance(e, Case):
        return {
            "case": {
                "mode": e.mode.value,
                "scrutinee": _expr_doc(e.scrutinee),
                "branches": [
                    {
                        "pattern": {"name": _qname_doc(b.pattern.constructor), "vars": list(b.pattern.vars)},
                        "body": _expr_doc(b.body),
                    }
                    for b in e.branches
                ],
            }
        }
    if isinstance(e, Or):
        return {"or": {"left": _expr_doc(e.left), "right": _expr_doc(e.right)}}
    if isinstance(e, Free):
        return {"free": {"vars": list(e.vars), "body": _expr_doc(e.body)}}
    raise TypeError(f"not an expression: {e!r}")


def _rule_doc(rule: Rule) -> dict:
    if isinstance(rule, Defined):
        return {"args": list(rule.args), "body": _expr_doc(rule.body)}
    assert isinstance(rule, External)
    return {"external": rule.entry}


def program_doc(prog: Prog) -> dict:
    """The module as a JSON-ready document with fixed field order."""
    return {
        "module": prog.name,
        "imports": list(prog.imports),
        "types": [
            {
                "name": _qname_doc(t.name),
                "visibility": t.visibility.value,
                "typeVars": list(t.type_vars),
                "constructors": [
                    {
                        "name": _qname_doc(c.name),
                        "arity": c.arity,
                        "visibility": c.visibility.value,
                        "argTypes": [_type_doc(a) for a in c.arg_types],
                    }
                    for c in t.constructors
                ],
            }
            for t in prog.types
        ],
        "functions": [
            {
                "name": _qname_doc(f.name),
                "arity": f.arity,
                "visibility": f.visibility.value,
                "type": _type_doc(f.type_sig),
                "rule": _rule_doc(f.rule),
            }
            for f in prog.functions
        ],
        "operators": [
            {"name": _qname_doc(op.name), "fixity": op.fixity.value, "precedence": op.precedence}
            for op in prog.operators
        ],
    }


def to_structured(prog: Prog) -> bytes:
    return (json.dumps(program_doc(prog), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# --- decoding ---


def _schema_error(path: str, message: str) -> ParseError:
    return ParseError(message, SourceSpan(1, 1), path=path)


def _need(v: Any, path: str, keys: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(v, dict):
        raise _schema_error(path, f"expected an object with keys {list(keys)}")
    for key in keys:
        if key not in v:
            raise _schema_error(path, f"missing key {key!r}")
    extra = set(v) - set(keys) - set(optional)
    if extra:
        raise _schema_error(path, f"unknown key {sorted(extra)[0]!r}")
    return v


def _str_at(v: Any, path: str) -> str:
    if not isinstance(v, str):
        raise _schema_error(path, "expected a string")
    return v


def _int_at(v: Any, path: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise _schema_error(path, "expected an integer")
    return v


def _list_at(v: Any, path: str) -> list:
    if not isinstance(v, list):
        raise _schema_error(path, "expected a list")
    return v


def _enum_at(v: Any, path: str, enum_cls):
    text = _str_at(v, path)
    for member in enum_cls:
        if member.value == text:
            return member
    raise _schema_error(path, f"expected one of {[m.value for m in enum_cls]}")


def _qname_at(v: Any, path: str) -> QName:
    obj = _need(v, path, ("mod", "name"))
    return QName(_str_at(obj["mod"], path + ".mod"), _str_at(obj["name"], path + ".name"))


def _type_at(v: Any, path: str) -> TypeExpr:
    if not isinstance(v, dict) or len(v) != 1:
        raise _schema_error(path, "expected a type tagged tvar, tcons or func")
    tag = next(iter(v))
    if tag == "tvar":
        return TVar(_int_at(v["tvar"], path + ".tvar"))
    if tag == "tcons":
        obj = _need(v["tcons"], path + ".tcons", ("name", "args"))
        args = _list_at(obj["args"], path + ".tcons.args")
        return TCons(
            _qname_at(obj["name"], path + ".tcons.name"),
            tuple(_type_at(a, f"{path}.tcons.args[{i}]") for i, a in enumerate(args)),
        )
    if tag == "func":
        obj = _need(v["func"], path + ".func", ("from", "to"))
        return FuncType(_type_at(obj["from"], path + ".func.from"), _type_at(obj["to"], path + ".func.to"))
    raise _schema_error(path, f"unknown type tag {tag!r}")


def _expr_at(v: Any, path: str) -> Expr:
    if not isinstance(v, dict) or len(v) != 1:
        raise _schema_error(path, "expected an expression tagged var, comb, case, or, free")
    tag = next(iter(v))
    if tag == "var":
        return Var(_str_at(v["var"], path + ".var"))
    if tag == "comb":
        obj = _need(v["comb"], path + ".comb", ("kind", "name", "args"))
        args = _list_at(obj["args"], path + ".comb.args")
        return Comb(
            _enum_at(obj["kind"], path + ".comb.kind", CombKind),
            _qname_at(obj["name"], path + ".comb.name"),
            tuple(_expr_at(a, f"{path}.comb.args[{i}]") for i, a in enumerate(args)),
        )
    if tag == "case":
        obj = _need(v["case"], path + ".case", ("mode", "scrutinee", "branches"))
        branches = []
        for i, b in enumerate(_list_at(obj["branches"], path + ".case.branches")):
            bpath = f"{path}.case.branches[{i}]"
            bobj = _need(b, bpath, ("pattern", "body"))
            pobj = _need(bobj["pattern"], bpath + ".pattern", ("name", "vars"))
            vars = tuple(
                _str_at(x, f"{bpath}.pattern.vars[{j}]")
                for j, x in enumerate(_list_at(pobj["vars"], bpath + ".pattern.vars"))
            )
            pattern = Pattern(_qname_at(pobj["name"], bpath + ".pattern.name"), vars)
            branches.append(Branch(pattern, _expr_at(bobj["body"], bpath + ".body")))
        return Case(
            _enum_at(obj["mode"], path + ".case.mode", CaseMode),
            _expr_at(obj["scrutinee"], path + ".case.scrutinee"),
            tuple(branches),
        )
    if tag == "or":
        obj = _need(v["or"], path + ".or", ("left", "right"))
        return Or(_expr_at(obj["left"], path + ".or.left"), _expr_at(obj["right"], path + ".or.right"))
    if tag == "free":
        obj = _need(v["free"], path + ".free", ("vars", "body"))
        vars = tuple(
            _str_at(x, f"{path}.free.vars[{i}]")
            for i, x in enumerate(_list_at(obj["vars"], path + ".free.vars"))
        )
        return Free(vars, _expr_at(obj["body"], path + ".free.body"))
    raise _schema_error(path, f"unknown expression tag {tag!r}")


def _rule_at(v: Any, path: str) -> Rule:
    if isinstance(v, dict) and "external" in v:
        obj = _need(v, path, ("external",))
        return External(_str_at(obj["external"], path + ".external"))
    obj = _need(v, path, ("args", "body"))
    args = tuple(
        _str_at(x, f"{path}.args[{i}]") for i, x in enumerate(_list_at(obj["args"], path + ".args"))
    )
    return Defined(args, _expr_at(obj["body"], path + ".body"))


def from_structured(data: bytes | str | dict) -> Prog:
    """Decode a structured module document. Raises ParseError carrying the
    path of the first schema violation."""
    if isinstance(data, (bytes, str)):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as err:
            raise _schema_error("$", f"invalid JSON: {err.msg} (line {err.lineno})") from None
    else:
        doc = data
    top = _need(doc, "$", ("module", "imports", "types", "functions", "operators"))
    name = _str_at(top["module"], "module")
    imports = tuple(
        _str_at(x, f"imports[{i}]") for i, x in enumerate(_list_at(top["imports"], "imports"))
    )
    types = []
    for i, t in enumerate(_list_at(top["types"], "types")):
        tpath = f"types[{i}]"
        tobj = _need(t, tpath, ("name", "visibility", "typeVars", "constructors"))
        type_vars = tuple(
            _int_at(x, f"{tpath}.typeVars[{j}]")
            for j, x in enumerate(_list_at(tobj["typeVars"], tpath + ".typeVars"))
        )
        constructors = []
        for j, c in enumerate(_list_at(tobj["constructors"], tpath + ".constructors")):
            cpath = f"{tpath}.constructors[{j}]"
            cobj = _need(c, cpath, ("name", "arity", "visibility", "argTypes"))
            arg_types = tuple(
                _type_at(a, f"{cpath}.argTypes[{k}]")
                for k, a in enumerate(_list_at(cobj["argTypes"], cpath + ".argTypes"))
            )
            constructors.append(
                ConsDecl(
                    _qname_at(cobj["name"], cpath + ".name"),
                    _int_at(cobj["arity"], cpath + ".arity"),
                    _enum_at(cobj["visibility"], cpath + ".visibility", Visibility),
                    arg_types,
                )
            )
        types.append(
            TypeDecl(
                _qname_at(tobj["name"], tpath + ".name"),
                _enum_at(tobj["visibility"], tpath + ".visibility", Visibility),
                type_vars,
                tuple(constructors),
            )
        )
    functions = []
    for i, f in enumerate(_list_at(top["functions"], "functions")):
        fpath = f"functions[{i}]"
        fobj = _need(f, fpath, ("name", "arity", "visibility", "type", "rule"))
        functions.append(
            FuncDecl(
                _qname_at(fobj["name"], fpath + ".name"),
                _int_at(fobj["arity"], fpath + ".arity"),
                _enum_at(fobj["visibility"], fpath + ".visibility", Visibility),
                _type_at(fobj["type"], fpath + ".type"),
                _rule_at(fobj["rule"], fpath + ".rule"),
            )
        )
    operators = []
    for i, op in enumerate(_list_at(top["operators"], "operators")):
        opath = f"operators[{i}]"
        oobj = _need(op, opath, ("name", "fixity", "precedence"))
        operators.append(
            OpDecl(
                _qname_at(oobj["name"], opath + ".name"),
                _enum_at(oobj["fixity"], opath + ".fixity", Fixity),
                _int_at(oobj["precedence"], opath + ".precedence"),
            )
        )
    return Prog(name, imports, tuple(types), tuple(functions), tuple(operators))
