"""flatbrowse: an analysis environment for flat functional-logic programs."""

from .analyses import CompletenessReport, ExternalFacts, Facts
from .catalog import default_registry
from .errors import ApiError
from .framework import (
    AnalysisCache,
    AnalysisResult,
    AnalysisSession,
    FunctionAnalysis,
    GlobalAnalysis,
    GlobalDataAnalysis,
    GraphResult,
    LocalAnalysis,
    LocalDataAnalysis,
    Registry,
    TextResult,
    with_text_renderer,
)
from .graphs import Graph, call_graph, import_graph, to_dot
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
    collect_calls,
    free_vars_of,
    to_interface,
)
from .parser import ImportEnv, ParseError, parse_module
from .printer import emit_text
from .store import (
    LoadLevel,
    ProgramStore,
    ensure_full,
    ensure_full_closure,
    function_index,
    constructor_index,
    open_project,
)
from .structured import from_structured, to_structured
from .views import SurfaceRule, flat_view, interface_view, signature_report, source_view, surface_rules
from .wellformed import Diagnostic, well_formed

__version__ = "0.1.0"
