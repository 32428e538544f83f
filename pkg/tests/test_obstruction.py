from itertools import combinations, product

import networkx as nx
import pytest

from removal_lab.config import Budgets
from removal_lab.errors import ConditionError, ScaleError
from removal_lab.graph import complete_graph, empty_graph, named_graph
from removal_lab.obstruction import (
    blowup_quality_witness,
    completion_count,
    iter_completions,
    search_bipartite_obstruction,
    verify_bipartite_obstruction,
)
from removal_lab.recognize import BipartitePattern, GraphFamily

P3_FREE = GraphFamily.of(named_graph("P3"))
CROSS_2X2 = [(i, j) for i in range(2) for j in range(2)]


def _is_cluster(graph: nx.Graph) -> bool:
    return all(
        graph.subgraph(c).number_of_edges() == len(c) * (len(c) - 1) // 2
        for c in nx.connected_components(graph)
    )


def _has_cluster_completion(cross) -> bool:
    # S = {0, 1}, T = {2, 3}; the two free pairs are (0, 1) and (2, 3)
    for s_edge, t_edge in product((False, True), repeat=2):
        graph = nx.empty_graph(4)
        graph.add_edges_from((i, 2 + j) for i, j in cross)
        if s_edge:
            graph.add_edge(0, 1)
        if t_edge:
            graph.add_edge(2, 3)
        if _is_cluster(graph):
            return True
    return False


def test_completions_fix_the_cross_edges():
    pattern = BipartitePattern(s_size=2, t_size=3, cross_edges=((0, 2), (1, 0)))
    completions = list(iter_completions(pattern))
    assert len(completions) == completion_count(pattern) == 2 ** 4
    for g in completions:
        assert [(i, j) for i in range(2) for j in range(3) if g.has_edge(i, 2 + j)] == [(0, 2), (1, 0)]
    assert len(set(completions)) == 16


def test_trivial_obstructions():
    edge = BipartitePattern(s_size=1, t_size=1, cross_edges=((0, 0),))
    assert verify_bipartite_obstruction(edge, GraphFamily.of(complete_graph(1)))
    assert verify_bipartite_obstruction(edge, GraphFamily.of(complete_graph(2)))
    assert not verify_bipartite_obstruction(edge, GraphFamily.of(complete_graph(3)))


def test_p3_obstructions_match_cluster_graph_oracle():
    found = 0
    for size in range(len(CROSS_2X2) + 1):
        for cross in combinations(CROSS_2X2, size):
            pattern = BipartitePattern(s_size=2, t_size=2, cross_edges=cross)
            verdict = verify_bipartite_obstruction(pattern, P3_FREE)
            assert verdict == (not _has_cluster_completion(cross))
            found += verdict
    assert found == 4


def test_completion_cap():
    pattern = BipartitePattern(s_size=3, t_size=3)
    with pytest.raises(ScaleError):
        verify_bipartite_obstruction(pattern, P3_FREE, Budgets(completion_cap=16))


def test_search_finds_p3_obstruction():
    pattern = search_bipartite_obstruction(P3_FREE, 2, attempts=200, seed=0)
    assert pattern is not None
    assert len(pattern.cross_edges) == 3
    assert verify_bipartite_obstruction(pattern, P3_FREE)
    again = search_bipartite_obstruction(P3_FREE, 2, attempts=200, seed=0)
    assert again == pattern


def test_search_with_single_vertex_member():
    pattern = search_bipartite_obstruction(GraphFamily.of(complete_graph(1)), 1, attempts=1, seed=4)
    assert pattern is not None and pattern.s_size == 1


def test_search_requires_all_three_classes():
    with pytest.raises(ConditionError):
        search_bipartite_obstruction(GraphFamily.of(complete_graph(3)), 2, attempts=5, seed=0)


def test_blowup_witness_for_triangle_free_edge():
    witness = blowup_quality_witness(GraphFamily.of(complete_graph(3)), complete_graph(2), 3)
    assert witness.g == (0, 0)
    assert witness.verified_up_to == 3
    assert witness.kind == "bounded witness"


def test_blowup_witness_for_edgeless_graphs():
    no_edges = GraphFamily.of(complete_graph(2))
    assert blowup_quality_witness(no_edges, complete_graph(1), 2).g == (0,)
    every_pair = GraphFamily.of(complete_graph(2), empty_graph(2))
    assert blowup_quality_witness(every_pair, complete_graph(1), 2) is None


def test_blowup_witness_preconditions():
    with pytest.raises(ConditionError):
        blowup_quality_witness(GraphFamily.of(complete_graph(3)), complete_graph(4), 2)
    with pytest.raises(ScaleError):
        blowup_quality_witness(GraphFamily.of(complete_graph(3)), complete_graph(2), 30)
