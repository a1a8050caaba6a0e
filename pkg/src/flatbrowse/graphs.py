"""Call graphs and module import graphs, with deterministic DOT output."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ApiError, UNKNOWN_FUNCTION
from .ir import FuncDecl, QName

FUNCTION = "function"
MODULE = "module"


@dataclass(frozen=True)
class GraphNode:
    id: str
    label: str
    kind: str


@dataclass(frozen=True)
class Graph:
    """Canonical directed graph: nodes and edges sorted lexicographically,
    no duplicates, every edge endpoint declared."""

    title: str
    nodes: tuple[GraphNode, ...]
    edges: tuple[tuple[str, str], ...]


def build_graph(title: str, nodes: Sequence[GraphNode], edges: Sequence[tuple[str, str]]) -> Graph:
    unique = {n.id: n for n in nodes}
    sorted_nodes = tuple(unique[i] for i in sorted(unique))
    sorted_edges = tuple(sorted(set(edges)))
    for src, dst in sorted_edges:
        if src not in unique or dst not in unique:
            raise ValueError(f"edge {src} -> {dst} references an undeclared node")
    return Graph(title, sorted_nodes, sorted_edges)


def call_graph(funcs: Sequence[FuncDecl], root: QName, module: str | None = None) -> Graph:
    """Reachable call graph from `root`. With `module` set, only edges whose
    source function belongs to that module are followed, so functions from
    other modules show up as leaves."""
    from .analyses import direct_calls

    edges_of = {f.name: sorted(direct_calls(f)) for f in funcs}
    if root not in edges_of:
        raise ApiError(UNKNOWN_FUNCTION, f"function {root} is not part of the loaded program")
    seen = {root}
    frontier = [root]
    edges: list[tuple[str, str]] = []
    while frontier:
        current = frontier.pop()
        if module is not None and current.module != module:
            continue
        for callee in edges_of.get(current, ()):
            edges.append((str(current), str(callee)))
            if callee not in seen:
                seen.add(callee)
                frontier.append(callee)
    title = f"calls {root}" if module is None else f"calls {root} in {module}"
    nodes = [GraphNode(str(q), str(q), FUNCTION) for q in seen]
    return build_graph(title, nodes, edges)


def import_graph(store) -> Graph:
    """One node per loaded module, one edge per declared import."""
    nodes = [GraphNode(name, name, MODULE) for name in store.modules]
    edges = [
        (name, imported)
        for name, loaded in store.modules.items()
        for imported in loaded.prog.imports
    ]
    return build_graph("imports", nodes, edges)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: Graph) -> str:
    """Byte-deterministic DOT text: nodes before edges, both sorted."""
    lines = [f"digraph {_quote(graph.title)} {{"]
    lines.extend(f"  {_quote(node.id)};" for node in graph.nodes)
    lines.extend(f"  {_quote(src)} -> {_quote(dst)};" for src, dst in graph.edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_doc(graph: Graph) -> dict:
    """Structured form of a graph."""
    return {
        "title": graph.title,
        "nodes": [{"id": n.id, "label": n.label, "kind": n.kind} for n in graph.nodes],
        "edges": [{"from": src, "to": dst} for src, dst in graph.edges],
    }
