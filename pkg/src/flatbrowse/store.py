"""Locating, loading and caching the modules of an application.

Opening a project reads the main module in full and the transitive import
closure at interface depth; bodies of other modules are only read when an
analysis demands them. Store values are immutable: every load operation
returns a new store, and `version` increases exactly when module contents
change. Diagnostics never block loading.

File resolution per module, per search path in order (first hit wins and
pins the module): `<name>.fl.json`, `<name>.fl`, `<name>.fint.json` when a
full program is required; interface loads prefer `<name>.fint.json` and
fall back to reading a full file and shrinking it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    ApiError,
    FULL_SOURCE_MISSING,
    IMPORT_CYCLE,
    MODULE_NOT_FOUND,
    PARSE_FAILED,
)
from .ir import FuncDecl, Prog, QName, TypeDecl, to_interface
from .parser import ImportEnv, ParseError, parse_header, parse_module
from .structured import from_structured
from .wellformed import Diagnostic, well_formed


class LoadLevel(Enum):
    INTERFACE = "interface"
    FULL = "full"


@dataclass(frozen=True)
class LoadedModule:
    prog: Prog
    level: LoadLevel
    origin: Path
    diagnostics: tuple[Diagnostic, ...] = ()


@dataclass(frozen=True)
class ProgramStore:
    search_paths: tuple[Path, ...]
    modules: Mapping[str, LoadedModule]
    main_module: str
    version: int = 0

    def module(self, name: str) -> LoadedModule:
        try:
            return self.modules[name]
        except KeyError:
            raise ApiError(MODULE_NOT_FOUND, f"module {name!r} is not part of the project") from None

    def program(self, name: str) -> Prog:
        return self.module(name).prog


_FULL_CANDIDATES = (".fl.json", ".fl", ".fint.json")
_INTERFACE_CANDIDATES = (".fint.json", ".fl.json", ".fl")


def _locate(search_paths: Iterable[Path], name: str, full: bool) -> tuple[Path, str]:
    order = _FULL_CANDIDATES if full else _INTERFACE_CANDIDATES
    tried = []
    for base in search_paths:
        for ext in order:
            candidate = Path(base) / f"{name}{ext}"
            tried.append(str(candidate))
            if candidate.is_file():
                if full and ext == ".fint.json":
                    raise ApiError(
                        FULL_SOURCE_MISSING,
                        f"only an interface file exists for module {name!r}",
                        detail={"interface": str(candidate)},
                    )
                return candidate, ext
    raise ApiError(MODULE_NOT_FOUND, f"no file found for module {name!r}", detail={"pathsTried": tried})


class _Loader:
    def __init__(self, search_paths: tuple[Path, ...]):
        self.search_paths = search_paths
        self.modules: dict[str, LoadedModule] = {}

    def load(self, name: str, full: bool, stack: tuple[str, ...]):
        if name in stack:
            cycle = list(stack[stack.index(name):]) + [name]
            raise ApiError(IMPORT_CYCLE, "import cycle: " + " -> ".join(cycle), detail={"cycle": cycle})
        present = self.modules.get(name)
        if present is not None and (present.level is LoadLevel.FULL or not full):
            return
        path, ext = _locate(self.search_paths, name, full)
        prog, level = self.read(name, path, ext, full, stack)
        self.modules[name] = LoadedModule(prog, level, path)
        for imported in prog.imports:
            self.load(imported, False, stack + (name,))

    def read(self, name: str, path: Path, ext: str, full: bool, stack: tuple[str, ...]) -> tuple[Prog, LoadLevel]:
        try:
            if ext.endswith(".json"):
                prog = from_structured(path.read_bytes())
                level = LoadLevel.INTERFACE if ext == ".fint.json" else LoadLevel.FULL
            else:
                text = path.read_text(encoding="utf-8")
                _, imports = parse_header(text)
                for imported in imports:
                    self.load(imported, False, stack + (name,))
                env = ImportEnv.from_programs(
                    self.modules[i].prog for i in imports if i in self.modules
                )
                prog = parse_module(text, env)
                level = LoadLevel.FULL
        except ParseError as err:
            raise ApiError(
                PARSE_FAILED,
                f"module {name!r}: {err}",
                detail={"module": name, "file": str(path)},
            ) from None
        if prog.name != name:
            raise ApiError(
                PARSE_FAILED,
                f"file {path} declares module {prog.name!r}, expected {name!r}",
                detail={"module": name, "file": str(path)},
            )
        if level is LoadLevel.FULL and not full:
            # only the interface is wanted for now; keep the shrunken view
            return to_interface(prog), LoadLevel.INTERFACE
        return prog, level


def _with_diagnostics(modules: dict[str, LoadedModule]) -> dict[str, LoadedModule]:
    index = _constructor_index(modules)
    return {
        name: replace(loaded, diagnostics=tuple(well_formed(loaded.prog, index)))
        for name, loaded in modules.items()
    }


def _constructor_index(modules: Mapping[str, LoadedModule]) -> dict[QName, TypeDecl]:
    out: dict[QName, TypeDecl] = {}
    for loaded in modules.values():
        for decl in loaded.prog.types:
            for cons in decl.constructors:
                out[cons.name] = decl
    return dict(sorted(out.items()))


def open_project(search_paths: Iterable[str | Path], main_module: str) -> ProgramStore:
    """Load `main_module` in full plus its import closure at interface depth."""
    paths = tuple(Path(p) for p in search_paths)
    loader = _Loader(paths)
    loader.load(main_module, True, ())
    return ProgramStore(paths, _with_diagnostics(loader.modules), main_module, version=0)


def ensure_full(store: ProgramStore, name: str) -> ProgramStore:
    """Upgrade one module to full depth. Idempotent; the version is bumped
    only when an upgrade actually happened."""
    loaded = store.module(name)
    if loaded.level is LoadLevel.FULL:
        return store
    loader = _Loader(store.search_paths)
    loader.modules = dict(store.modules)
    del loader.modules[name]
    loader.load(name, True, ())
    return replace(
        store,
        modules=_with_diagnostics(loader.modules),
        version=store.version + 1,
    )


def ensure_full_closure(store: ProgramStore) -> ProgramStore:
    """Upgrade every module of the store to full depth."""
    for name in sorted(store.modules):
        try:
            store = ensure_full(store, name)
        except ApiError as err:
            if err.code == FULL_SOURCE_MISSING:
                importers = sorted(
                    other for other, loaded in store.modules.items() if name in loaded.prog.imports
                )
                detail = dict(err.detail or {})
                detail["requiredBy"] = importers
                raise ApiError(err.code, err.message, detail) from None
            raise
    return store


def function_index(store: ProgramStore) -> dict[QName, FuncDecl]:
    """All loaded functions, keyed and ordered by qualified name."""
    out: dict[QName, FuncDecl] = {}
    for loaded in store.modules.values():
        for func in loaded.prog.functions:
            out[func.name] = func
    return dict(sorted(out.items()))


def constructor_index(store: ProgramStore) -> dict[QName, TypeDecl]:
    """Constructor name -> owning type declaration, over all loaded modules."""
    return _constructor_index(store.modules)


def all_types(store: ProgramStore) -> list[TypeDecl]:
    """Every loaded type declaration, in module name order."""
    return [decl for name in sorted(store.modules) for decl in store.modules[name].prog.types]


def all_functions(store: ProgramStore) -> list[FuncDecl]:
    """Every loaded function, in qualified-name order."""
    return list(function_index(store).values())
