"""
File formats: graph6 and edge-record graph files, and JSON Lines reports.
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Annotated, Any, Iterable

import networkx as nx
from pydantic import BaseModel, PlainSerializer, PlainValidator, ValidationError

from removal_lab.errors import FormatError, ParameterError
from removal_lab.graph import Graph

logger = logging.getLogger(__name__)

SCHEMA = "removal-lab/1"


class EdgeRecord(BaseModel):
    n: int
    edges: list[tuple[int, int]]


def to_networkx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    out.add_edges_from(g.edges())
    return out


def from_networkx(graph: nx.Graph) -> Graph:
    """Vertices are relabelled 0..n-1 in the graph's node order."""
    index = {v: i for i, v in enumerate(graph.nodes())}
    return Graph.from_edges(len(index), ((index[u], index[v]) for u, v in graph.edges()))


def to_graph6(g: Graph) -> str:
    return nx.to_graph6_bytes(to_networkx(g), header=False).decode("ascii").strip()


def from_graph6(text: str) -> Graph:
    line = text.strip()
    if line.startswith(">>graph6<<"):
        line = line[len(">>graph6<<"):]
    try:
        parsed = nx.from_graph6_bytes(line.encode("ascii"))
    except (nx.NetworkXError, ValueError, UnicodeEncodeError) as e:
        raise FormatError(f"not a graph6 string: {line[:40]!r} ({e})")
    return from_networkx(parsed)


def to_edge_record(g: Graph) -> EdgeRecord:
    return EdgeRecord(n=g.n, edges=list(g.edges()))


def from_edge_record(data: Any) -> Graph:
    try:
        record = EdgeRecord.model_validate(data)
    except ValidationError as e:
        raise FormatError(f"bad edge record: {e.errors()[0]['msg']}")
    try:
        return Graph.from_edges(record.n, record.edges)
    except ParameterError as e:
        raise FormatError(f"bad edge record: {e}")


def graph_fingerprint(g: Graph) -> str:
    """sha256 of the graph6 encoding."""
    return hashlib.sha256(to_graph6(g).encode("ascii")).hexdigest()


def dumps_graph(g: Graph, fmt: str = "graph6") -> str:
    if fmt == "graph6":
        return to_graph6(g) + "\n"
    if fmt == "edges":
        return to_edge_record(g).model_dump_json() + "\n"
    raise ParameterError(f"unknown graph format {fmt!r}", suggestion="use graph6 or edges")


def loads_graph(text: str) -> Graph:
    body = text.strip()
    if body.startswith("{"):
        try:
            return from_edge_record(json.loads(body))
        except json.JSONDecodeError as e:
            raise FormatError(f"bad edge record JSON: {e}")
    lines = [ln for ln in body.splitlines() if ln.strip() and not ln.startswith("#")]
    if len(lines) != 1:
        raise FormatError(f"a graph file holds exactly one graph6 line, found {len(lines)}")
    return from_graph6(lines[0])


def read_graph(path: str | Path) -> Graph:
    """Read a .g6 or .json graph file. Missing files raise FileNotFoundError."""
    text = Path(path).read_text(encoding="ascii", errors="replace")
    return loads_graph(text)


def write_graph(g: Graph, path: str | Path, fmt: str | None = None) -> Path:
    path = Path(path)
    if fmt is None:
        fmt = "edges" if path.suffix == ".json" else "graph6"
    path.write_text(dumps_graph(g, fmt), encoding="ascii")
    logger.info("wrote %r to %s", g, path)
    return path


# --- JSON Lines reports ---

def to_record(item: BaseModel | dict) -> dict:
    if isinstance(item, BaseModel):
        return item.model_dump(mode="json")
    return item


def dumps_line(item: BaseModel | dict) -> str:
    return json.dumps(to_record(item), sort_keys=True, separators=(",", ":"))


def report_lines(kind: str, header: dict, records: Iterable[BaseModel | dict]) -> list[str]:
    """Header line first (schema, kind and header fields), one record per following line."""
    lines = [dumps_line({"schema": SCHEMA, "kind": kind, **header})]
    lines.extend(dumps_line(r) for r in records)
    return lines


def write_report(lines: list[str], path: str | Path | None = None) -> str:
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def loads_report(text: str) -> tuple[dict, list[dict]]:
    rows = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as e:
            raise FormatError(f"line {number} is not JSON: {e}")
    if not rows or not isinstance(rows[0], dict) or rows[0].get("schema") != SCHEMA:
        raise FormatError(f"missing {SCHEMA!r} schema header")
    return rows[0], rows[1:]


def read_report(path: str | Path) -> tuple[dict, list[dict]]:
    return loads_report(Path(path).read_text(encoding="utf-8"))


def _as_graph(value: Any) -> Graph:
    if isinstance(value, Graph):
        return value
    if isinstance(value, str):
        return from_graph6(value)
    if isinstance(value, dict):
        return from_edge_record(value)
    raise FormatError(f"cannot read a graph from {type(value).__name__}")


# Graph-valued model fields: accept a Graph, graph6 text or an edge record; dump as graph6.
Graph6 = Annotated[Graph, PlainValidator(_as_graph), PlainSerializer(to_graph6, return_type=str)]
