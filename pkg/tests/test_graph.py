import xml.etree.ElementTree as ET

import pydot
import pytest
from hypothesis import given, strategies as st

from ciugraph.errors import GraphSchemaError, MissingCoordinate
from ciugraph.features import compute_features
from ciugraph.graph import SvgOptions, build_graph, build_quadrant_graph, from_json, render_svg, to_dot, to_json
from ciugraph.spatial import CoordinateTable, Quadrant, load_coordinates_file

from conftest import GOLDEN_SEQUENCE

SVG = "{http://www.w3.org/2000/svg}"
TABLE = load_coordinates_file()


def small_table():
    return CoordinateTable({1: (0.0, 0.0), 2: (3.0, 4.0), 3: (500.0, 280.0)})


def svg_counts(svg):
    root = ET.fromstring(svg)
    groups = root.iter(f"{SVG}g")
    classes = [g.get("class") for g in groups]
    return classes.count("node"), classes.count("edge")


def test_build_examples():
    t = small_table()
    g = build_graph([1], t)
    assert (len(g.nodes), len(g.edges)) == (1, 0)
    g = build_graph([1, 2, 1], t)
    assert len(g.nodes) == 2 and [e.length for e in g.edges] == [5.0, 5.0]
    with pytest.raises(MissingCoordinate):
        build_graph([1, 9], t)


def test_quadrant_graph():
    t = small_table()
    q = build_quadrant_graph([1, 1, 3], t)
    assert q.sequence == (Quadrant.TL, Quadrant.TL, Quadrant.BR)
    assert q.edges == ((Quadrant.TL, Quadrant.TL), (Quadrant.TL, Quadrant.BR))
    assert build_quadrant_graph([], t).edges == ()
    assert build_quadrant_graph([2], t).edges == ()


def test_golden_graph_counts():
    g = build_graph(GOLDEN_SEQUENCE, TABLE)
    assert len(g.edges) == 20
    # the published 21-item sequence names 16 distinct CIUs
    assert len(g.nodes) == 16


def test_dot_parses():
    for seq in ([], [1, 2], [1, 1, 2], GOLDEN_SEQUENCE):
        dot = to_dot(build_graph(seq, TABLE))
        (parsed,) = pydot.graph_from_dot_data(dot)
        assert len(parsed.get_edges()) == max(len(seq) - 1, 0)
        assert {n.get_name() for n in parsed.get_nodes()} >= {f"n{c}" for c in seq}
    loop = to_dot(build_graph([4, 4], TABLE))
    assert "n4 -> n4" in loop


def test_dot_positions_pinned():
    dot = to_dot(build_graph([1], TABLE))
    x, y = TABLE[1]
    assert f'pos="{x:g},{-y:g}!"' in dot


def test_svg_wellformed():
    assert svg_counts(render_svg(build_graph([], TABLE))) == (0, 0)
    svg = render_svg(build_graph(GOLDEN_SEQUENCE, TABLE), SvgOptions(background="cookie theft.png"))
    root = ET.fromstring(svg)
    assert root.get("viewBox") == "0 0 546 290"
    assert svg_counts(svg) == (16, 20)
    assert any(el.tag == f"{SVG}image" for el in root.iter())


@given(st.lists(st.integers(1, 23), max_size=30))
def test_svg_any_graph(seq):
    g = build_graph(seq, TABLE)
    assert svg_counts(render_svg(g)) == (len(set(seq)), max(len(seq) - 1, 0))


@given(st.lists(st.integers(1, 23), max_size=30))
def test_graph_invariants(seq):
    g = build_graph(seq, TABLE)
    q = build_quadrant_graph(seq, TABLE)
    assert len(g.edges) == max(len(seq) - 1, 0) == len(q.edges)
    assert set(g.nodes) == set(seq)
    for e, (qa, qb) in zip(g.edges, q.edges):
        if e.is_loop:
            assert e.length == 0 and qa == qb
    fv = compute_features(g, q)
    if seq:
        assert fv.total_path == pytest.approx(g.total_length(), rel=1e-12, abs=1e-12)
    assert from_json(to_json(g)) == g


def test_json_errors():
    with pytest.raises(GraphSchemaError):
        from_json("{")
    with pytest.raises(GraphSchemaError):
        from_json('{"nodes": [], "edges": [{"from": 1, "to": 2, "len": 1}], "sequence": []}')
    empty = build_graph([], TABLE)
    assert from_json(to_json(empty)) == empty
