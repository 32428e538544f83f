import json

import networkx as nx
import pytest
from pydantic import BaseModel

from removal_lab.errors import FormatError
from removal_lab.formats import (
    SCHEMA,
    Graph6,
    dumps_line,
    from_edge_record,
    from_graph6,
    graph_fingerprint,
    loads_report,
    read_graph,
    read_report,
    report_lines,
    to_graph6,
    write_graph,
    write_report,
)
from removal_lab.graph import Graph, cycle_graph, gnp_random_graph, m_graph


def test_graph6_matches_networkx():
    g = cycle_graph(5)
    assert to_graph6(g) == nx.to_graph6_bytes(nx.cycle_graph(5), header=False).decode().strip()
    assert from_graph6(to_graph6(g)) == g


def test_graph6_header_is_accepted():
    assert from_graph6(">>graph6<<" + to_graph6(m_graph())) == m_graph()


def test_bad_graph6_raises_format_error():
    with pytest.raises(FormatError):
        from_graph6("not graph6 at all ~~~~")


def test_edge_record_validation():
    assert from_edge_record({"n": 3, "edges": [[0, 1]]}).edge_count == 1
    with pytest.raises(FormatError):
        from_edge_record({"n": 2, "edges": [[0, 5]]})
    with pytest.raises(FormatError):
        from_edge_record({"edges": []})


def test_write_graph_picks_format_from_suffix(tmp_path):
    g = gnp_random_graph(9, 0.5, seed=2)
    as_json = write_graph(g, tmp_path / "g.json")
    as_g6 = write_graph(g, tmp_path / "g.g6")
    assert json.loads(as_json.read_text())["n"] == 9
    assert read_graph(as_json) == read_graph(as_g6) == g


def test_read_graph_rejects_two_graphs(tmp_path):
    path = tmp_path / "two.g6"
    path.write_text(to_graph6(cycle_graph(4)) + "\n" + to_graph6(cycle_graph(5)) + "\n")
    with pytest.raises(FormatError):
        read_graph(path)


def test_fingerprint_depends_on_labelled_graph():
    a = Graph.from_edges(3, [(0, 1)])
    b = Graph.from_edges(3, [(1, 2)])
    assert graph_fingerprint(a) == graph_fingerprint(Graph.from_edges(3, [(1, 0)]))
    assert graph_fingerprint(a) != graph_fingerprint(b)
    assert len(graph_fingerprint(a)) == 64


def test_report_roundtrip(tmp_path):
    lines = report_lines("count", {"seed": 4}, [{"copies": "12"}, {"copies": "0"}])
    assert json.loads(lines[0]) == {"schema": SCHEMA, "kind": "count", "seed": 4}
    text = write_report(lines, tmp_path / "r.jsonl")
    header, records = read_report(tmp_path / "r.jsonl")
    assert text.endswith("\n")
    assert header["seed"] == 4
    assert records == [{"copies": "12"}, {"copies": "0"}]


def test_report_without_schema_is_rejected():
    with pytest.raises(FormatError):
        loads_report('{"kind": "count"}\n')
    with pytest.raises(FormatError):
        loads_report(dumps_line({"schema": SCHEMA}) + "\n{broken\n")


class _Holder(BaseModel):
    graph: Graph6


def test_graph6_field_accepts_text_records_and_graphs():
    g = cycle_graph(6)
    for value in (g, to_graph6(g), {"n": 6, "edges": list(g.edges())}):
        assert _Holder(graph=value).graph == g
    assert _Holder(graph=g).model_dump(mode="json") == {"graph": to_graph6(g)}
