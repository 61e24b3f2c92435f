"""Spatio-semantic walk graphs: construction, DOT/JSON/SVG serialisation."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

from .errors import GraphSchemaError, MissingCoordinate
from .lexicon import DEFAULT_LABELS, CiuSequence
from .spatial import IMAGE_HEIGHT, IMAGE_WIDTH, CoordinateTable, Quadrant, distance, quadrant_of


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    length: float

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class SpatioSemanticGraph:
    """A walk over CIU nodes: edges keep sequence order and multiplicity."""

    sequence: tuple[int, ...]
    nodes: dict[int, tuple[float, float]]
    edges: tuple[Edge, ...]
    transcript_id: str = ""
    width: float = IMAGE_WIDTH
    height: float = IMAGE_HEIGHT
    center: tuple[float, float] = (IMAGE_WIDTH / 2, IMAGE_HEIGHT / 2)

    def edge_counts(self) -> Counter:
        """Simple-graph view: (source, target) -> traversal count."""
        return Counter((e.source, e.target) for e in self.edges)

    def total_length(self) -> float:
        return sum(e.length for e in self.edges)


@dataclass(frozen=True)
class QuadrantGraph:
    sequence: tuple[Quadrant, ...] = ()
    edges: tuple[tuple[Quadrant, Quadrant], ...] = field(default=())


def _ids(seq) -> tuple[int, ...]:
    if isinstance(seq, CiuSequence):
        return tuple(seq.ids)
    return tuple(int(c) for c in seq)


def build_graph(seq: CiuSequence | list[int], table: CoordinateTable) -> SpatioSemanticGraph:
    ids = _ids(seq)
    for cid in ids:
        if cid not in table.coords:
            raise MissingCoordinate(cid)
    edges = tuple(Edge(a, b, distance(table.coords[a], table.coords[b])) for a, b in zip(ids, ids[1:]))
    return SpatioSemanticGraph(
        sequence=ids,
        nodes={cid: table.coords[cid] for cid in sorted(set(ids))},
        edges=edges,
        transcript_id=seq.transcript_id if isinstance(seq, CiuSequence) else "",
        width=table.width,
        height=table.height,
        center=tuple(table.center),
    )


def build_quadrant_graph(seq: CiuSequence | list[int], table: CoordinateTable) -> QuadrantGraph:
    quads = tuple(quadrant_of(table[cid], table) for cid in _ids(seq))
    return QuadrantGraph(quads, tuple(zip(quads, quads[1:])))


def _short(cid: int) -> str:
    return DEFAULT_LABELS.get(cid, (str(cid), str(cid)))[1]


def _long(cid: int) -> str:
    return DEFAULT_LABELS.get(cid, (str(cid), str(cid)))[0]


def _num(v: float) -> str:
    return f"{v:g}"


def to_dot(g: SpatioSemanticGraph, name: str = "ciugraph") -> str:
    """DOT text with pinned positions; render with ``neato -n`` or ``fdp``."""
    lines = [f"digraph {name} {{"]
    if g.nodes:
        lines.append('  graph [splines=true, overlap=true];')
        lines.append('  node [shape=circle, fontsize=10];')
    for cid, (x, y) in sorted(g.nodes.items()):
        lines.append(
            f'  n{cid} [label="{_short(cid)}", tooltip="{_long(cid)}", pos="{_num(x)},{_num(-y)}!"];'
        )
    for order, e in enumerate(g.edges, start=1):
        lines.append(f'  n{e.source} -> n{e.target} [label="{order}", len="{e.length:.6g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(g: SpatioSemanticGraph) -> str:
    doc = {
        "transcript_id": g.transcript_id,
        "width": g.width,
        "height": g.height,
        "center": list(g.center),
        "nodes": [{"id": cid, "x": x, "y": y} for cid, (x, y) in sorted(g.nodes.items())],
        "edges": [{"from": e.source, "to": e.target, "len": e.length} for e in g.edges],
        "sequence": list(g.sequence),
    }
    return json.dumps(doc, indent=1)


def from_json(text: str | bytes) -> SpatioSemanticGraph:
    try:
        doc = json.loads(text)
        nodes = {int(n["id"]): (float(n["x"]), float(n["y"])) for n in doc["nodes"]}
        edges = tuple(Edge(int(e["from"]), int(e["to"]), float(e["len"])) for e in doc["edges"])
        sequence = tuple(int(c) for c in doc["sequence"])
        center = tuple(float(c) for c in doc.get("center", (IMAGE_WIDTH / 2, IMAGE_HEIGHT / 2)))
        graph = SpatioSemanticGraph(
            sequence=sequence,
            nodes=nodes,
            edges=edges,
            transcript_id=str(doc.get("transcript_id", "")),
            width=float(doc.get("width", IMAGE_WIDTH)),
            height=float(doc.get("height", IMAGE_HEIGHT)),
            center=center,
        )
    except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError, ValueError) as exc:
        raise GraphSchemaError(f"not a graph document: {exc}") from exc
    if len(graph.edges) != max(len(sequence) - 1, 0) or set(sequence) != set(nodes):
        raise GraphSchemaError("graph edges/nodes are inconsistent with its sequence")
    if any((e.source, e.target) != pair for e, pair in zip(graph.edges, zip(sequence, sequence[1:]))):
        raise GraphSchemaError("graph edges do not follow the sequence")
    return graph


@dataclass
class SvgOptions:
    node_radius: float = 11.0
    show_quadrants: bool = True
    background: str | None = None
    curvature: float = 18.0


def _edge_path(x1, y1, x2, y2, bend, r):
    dx, dy = x2 - x1, y2 - y1
    d = math.hypot(dx, dy) or 1.0
    ux, uy = dx / d, dy / d
    # start/end on the node rims
    sx, sy = x1 + ux * r, y1 + uy * r
    ex, ey = x2 - ux * r, y2 - uy * r
    mx, my = (sx + ex) / 2 - uy * bend, (sy + ey) / 2 + ux * bend
    return f"M{sx:.1f},{sy:.1f} Q{mx:.1f},{my:.1f} {ex:.1f},{ey:.1f}", (mx, my)


def _loop_path(x, y, k, r):
    size = r * (1.6 + 0.5 * k)
    return (
        f"M{x - r * 0.5:.1f},{y - r * 0.85:.1f} "
        f"C{x - size:.1f},{y - r - 2 * size:.1f} {x + size:.1f},{y - r - 2 * size:.1f} "
        f"{x + r * 0.5:.1f},{y - r * 0.85:.1f}"
    ), (x, y - r - 1.5 * size)


def render_svg(g: SpatioSemanticGraph, options: SvgOptions | None = None) -> str:
    """SVG drawing of the walk over the picture frame.

    Nodes are ``<g class="node">`` groups and every traversal is one
    ``<g class="edge">`` group, numbered in sequence order.
    """
    opt = options or SvgOptions()
    w, h = g.width, g.height
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
        f'version="1.1" width="{_num(w)}" height="{_num(h)}" viewBox="0 0 {_num(w)} {_num(h)}">',
        "<defs>",
        '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto">'
        '<path d="M0,0 L10,5 L0,10 z" fill="#444"/></marker>',
        "</defs>",
    ]
    if opt.background:
        out.append(
            f'<image class="background" x="0" y="0" width="{_num(w)}" height="{_num(h)}" '
            f'xlink:href={quoteattr(opt.background)} opacity="0.5"/>'
        )
    out.append(f'<rect class="frame" x="0" y="0" width="{_num(w)}" height="{_num(h)}" fill="none" stroke="#000"/>')
    if opt.show_quadrants:
        cx, cy = g.center
        out.append(
            f'<g class="quadrants" stroke="#999" stroke-dasharray="4,3">'
            f'<line x1="{_num(cx)}" y1="0" x2="{_num(cx)}" y2="{_num(h)}"/>'
            f'<line x1="0" y1="{_num(cy)}" x2="{_num(w)}" y2="{_num(cy)}"/></g>'
        )
    seen: Counter = Counter()
    out.append('<g class="edges" fill="none" stroke="#444" stroke-width="1.2">')
    for order, e in enumerate(g.edges, start=1):
        x1, y1 = g.nodes[e.source]
        x2, y2 = g.nodes[e.target]
        k = seen[(e.source, e.target)]
        seen[(e.source, e.target)] += 1
        if e.is_loop:
            d, (lx, ly) = _loop_path(x1, y1, k, opt.node_radius)
        else:
            # alternate sides for repeated and opposite traversals
            bend = opt.curvature * (k + 1) * (1 if e.source < e.target else -1) * (1 if k % 2 == 0 else -1)
            d, (lx, ly) = _edge_path(x1, y1, x2, y2, bend, opt.node_radius)
        out.append(
            f'<g class="edge" data-order="{order}"><title>{order}: {escape(_long(e.source))} -&gt; '
            f'{escape(_long(e.target))}</title><path d="{d}" marker-end="url(#arrow)"/>'
            f'<text x="{lx:.1f}" y="{ly:.1f}" font-size="8" fill="#b00" stroke="none">{order}</text></g>'
        )
    out.append("</g>")
    out.append('<g class="nodes">')
    for cid, (x, y) in sorted(g.nodes.items()):
        out.append(
            f'<g class="node" data-ciu="{cid}"><title>{escape(_long(cid))}</title>'
            f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{opt.node_radius:g}" fill="#fdd" stroke="#c00"/>'
            f'<text x="{_num(x)}" y="{_num(y + 3)}" font-size="7" text-anchor="middle">{escape(_short(cid))}</text></g>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
