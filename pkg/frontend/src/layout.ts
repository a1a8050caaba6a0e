/** Client-side layered layout for the small graphs the service emits, plus
 * SVG rendering. Ranks come from longest paths (back edges ignored), rows
 * are centered, and edges draw as lines with arrowheads; self-loops as arcs. */

import { DotGraph } from "./dot.js";

export interface PlacedNode {
  id: string;
  x: number; // center
  y: number; // center
  width: number;
  height: number;
}

export interface PlacedEdge {
  from: string;
  to: string;
  selfLoop: boolean;
}

export interface Layout {
  title: string;
  width: number;
  height: number;
  nodes: PlacedNode[];
  edges: PlacedEdge[];
}

const NODE_HEIGHT = 28;
const H_GAP = 36;
const V_GAP = 64;
const PADDING = 24;

function nodeWidth(label: string): number {
  return Math.max(60, label.length * 7.5 + 20);
}

function computeRanks(graph: DotGraph): Map<string, number> {
  const adjacency = new Map<string, string[]>();
  for (const node of graph.nodes) adjacency.set(node, []);
  const hasIncoming = new Set<string>();
  for (const [from, to] of graph.edges) {
    if (from !== to) {
      adjacency.get(from)?.push(to);
      hasIncoming.add(to);
    }
  }
  const ranks = new Map<string, number>();
  const stack = new Set<string>();

  const visit = (node: string, depth: number) => {
    if (stack.has(node)) return; // back edge: keep the cycle on one rank
    if ((ranks.get(node) ?? -1) >= depth) return;
    ranks.set(node, depth);
    stack.add(node);
    for (const next of adjacency.get(node) ?? []) visit(next, depth + 1);
    stack.delete(node);
  };

  const roots = graph.nodes.filter((n) => !hasIncoming.has(n));
  for (const root of roots.length ? roots : graph.nodes.slice(0, 1)) visit(root, 0);
  for (const node of graph.nodes) if (!ranks.has(node)) visit(node, 0);
  return ranks;
}

export function layeredLayout(graph: DotGraph): Layout {
  const ranks = computeRanks(graph);
  const rows = new Map<number, string[]>();
  for (const node of graph.nodes) {
    const rank = ranks.get(node) ?? 0;
    if (!rows.has(rank)) rows.set(rank, []);
    rows.get(rank)!.push(node);
  }
  const rowWidths = new Map<number, number>();
  for (const [rank, members] of rows) {
    const total =
      members.reduce((acc, id) => acc + nodeWidth(id), 0) + H_GAP * Math.max(0, members.length - 1);
    rowWidths.set(rank, total);
  }
  const width = Math.max(...rowWidths.values(), 0) + 2 * PADDING;
  const nodes: PlacedNode[] = [];
  const sortedRanks = [...rows.keys()].sort((a, b) => a - b);
  for (const rank of sortedRanks) {
    const members = rows.get(rank)!;
    let x = (width - rowWidths.get(rank)!) / 2;
    for (const id of members) {
      const w = nodeWidth(id);
      nodes.push({
        id,
        x: x + w / 2,
        y: PADDING + NODE_HEIGHT / 2 + rank * (NODE_HEIGHT + V_GAP),
        width: w,
        height: NODE_HEIGHT,
      });
      x += w + H_GAP;
    }
  }
  const height =
    PADDING * 2 + (sortedRanks.length ? (sortedRanks.length - 1) * (NODE_HEIGHT + V_GAP) + NODE_HEIGHT : 0);
  const edges: PlacedEdge[] = graph.edges.map(([from, to]) => ({
    from,
    to,
    selfLoop: from === to,
  }));
  return { title: graph.title, width, height, nodes, edges };
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderSvg(doc: Document, layout: Layout): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("width", String(layout.width));
  svg.setAttribute("height", String(layout.height));
  svg.setAttribute("data-title", layout.title);

  const defs = doc.createElementNS(SVG_NS, "defs");
  const marker = doc.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("viewBox", "0 0 10 10");
  marker.setAttribute("refX", "9");
  marker.setAttribute("refY", "5");
  marker.setAttribute("markerWidth", "7");
  marker.setAttribute("markerHeight", "7");
  marker.setAttribute("orient", "auto-start-reverse");
  const tip = doc.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M 0 0 L 10 5 L 0 10 z");
  tip.setAttribute("fill", "#555");
  marker.appendChild(tip);
  defs.appendChild(marker);
  svg.appendChild(defs);

  const byId = new Map(layout.nodes.map((n) => [n.id, n]));
  for (const edge of layout.edges) {
    const from = byId.get(edge.from);
    const to = byId.get(edge.to);
    if (!from || !to) continue;
    const path = doc.createElementNS(SVG_NS, "path");
    path.setAttribute("class", "edge");
    if (edge.selfLoop) {
      const x = from.x + from.width / 2;
      const y = from.y;
      path.setAttribute(
        "d",
        `M ${x} ${y - 6} C ${x + 34} ${y - 22}, ${x + 34} ${y + 22}, ${x} ${y + 6}`,
      );
    } else {
      const downward = to.y >= from.y;
      const y1 = downward ? from.y + from.height / 2 : from.y - from.height / 2;
      const y2 = downward ? to.y - to.height / 2 : to.y + to.height / 2;
      path.setAttribute("d", `M ${from.x} ${y1} L ${to.x} ${y2}`);
    }
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", "#555");
    path.setAttribute("marker-end", "url(#arrow)");
    svg.appendChild(path);
  }

  for (const node of layout.nodes) {
    const group = doc.createElementNS(SVG_NS, "g");
    group.setAttribute("class", "node");
    group.setAttribute("data-id", node.id);
    const rect = doc.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(node.x - node.width / 2));
    rect.setAttribute("y", String(node.y - node.height / 2));
    rect.setAttribute("width", String(node.width));
    rect.setAttribute("height", String(node.height));
    rect.setAttribute("rx", "6");
    rect.setAttribute("fill", "#eef3fb");
    rect.setAttribute("stroke", "#4a6da7");
    const text = doc.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(node.x));
    text.setAttribute("y", String(node.y + 4));
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("font-size", "12");
    text.textContent = node.id;
    group.appendChild(rect);
    group.appendChild(text);
    svg.appendChild(group);
  }
  return svg;
}
