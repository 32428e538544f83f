import pytest
from networkx.algorithms.isomorphism import GraphMatcher

from removal_lab.config import Budgets
from removal_lab.count import (
    CopyRecord,
    Packing,
    automorphism_count,
    count_copies,
    count_embeddings,
    count_induced_bipartite_copies,
    find_copy,
    find_induced_bipartite_copy,
    find_induced_copy,
    greedy_pair_disjoint_packing,
    is_copy,
    iter_copies,
    packing_problems,
    tuple_collection,
    tuples_agree_at_most_once,
)
from removal_lab.errors import ParameterError, ScaleError
from removal_lab.formats import to_networkx
from removal_lab.graph import (
    Graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    empty_graph,
    gnp_random_graph,
    named_graph,
    path_graph,
)
from removal_lab.recognize import BipartitePattern, GraphFamily


def _networkx_embeddings(g: Graph, h: Graph, induced: bool) -> int:
    matcher = GraphMatcher(to_networkx(g), to_networkx(h))
    found = matcher.subgraph_isomorphisms_iter() if induced else matcher.subgraph_monomorphisms_iter()
    return sum(1 for _ in found)


@pytest.mark.parametrize("pattern", ["P3", "C4", "paw", "K3", "co-C4"])
def test_embeddings_agree_with_networkx(pattern):
    h = named_graph(pattern)
    for seed in range(4):
        g = gnp_random_graph(9, 0.5, seed=seed)
        assert count_embeddings(g, h, "induced") == _networkx_embeddings(g, h, induced=True)
        assert count_embeddings(g, h, "subgraph") == _networkx_embeddings(g, h, induced=False)


def test_copy_counts_of_known_graphs():
    assert automorphism_count(cycle_graph(5)) == 10
    assert count_copies(complete_graph(5), complete_graph(3), "induced") == 10
    assert count_copies(complete_graph(4), cycle_graph(4), "subgraph") == 3
    assert count_copies(complete_graph(4), cycle_graph(4), "induced") == 0
    assert count_copies(cycle_graph(5), path_graph(3), "induced") == 5
    assert count_copies(empty_graph(2), complete_graph(3), "subgraph") == 0


def test_pattern_cap_and_node_budget():
    with pytest.raises(ScaleError):
        count_copies(complete_graph(10), complete_graph(9), "subgraph")
    with pytest.raises(ScaleError):
        count_copies(complete_graph(12), complete_graph(6), "subgraph", Budgets(backtracking_nodes=100))
    with pytest.raises(ParameterError):
        count_copies(complete_graph(3), complete_graph(2), "minor")


def test_find_copy_is_lexicographically_first():
    g = disjoint_union(path_graph(2), complete_graph(3))
    assert find_copy(g, complete_graph(3), "induced") == CopyRecord(vertices=(2, 3, 4), induced=True)
    assert find_copy(g, complete_graph(3), "induced", within=(0, 1, 2, 3)) is None
    assert list(iter_copies(g, complete_graph(2), "subgraph", within=(0, 1))) == [(0, 1), (1, 0)]


def test_find_induced_copy_reports_member():
    family = GraphFamily.of(complete_graph(4), cycle_graph(5))
    found = find_induced_copy(cycle_graph(5), family)
    assert found.member == 1
    assert is_copy(cycle_graph(5), cycle_graph(5), found.vertices, "induced")
    assert find_induced_copy(path_graph(6), family) is None


def test_is_copy():
    g = complete_graph(4)
    assert is_copy(g, cycle_graph(4), (0, 1, 2, 3), "subgraph")
    assert not is_copy(g, cycle_graph(4), (0, 1, 2, 3), "induced")
    assert not is_copy(g, cycle_graph(4), (0, 1, 1, 3), "subgraph")
    assert not is_copy(g, cycle_graph(4), (0, 1, 2, 9), "subgraph")


def test_induced_bipartite_copies_ignore_inside_edges():
    # one S vertex adjacent to both T vertices: a cherry, with the T side free
    pattern = BipartitePattern(s_size=1, t_size=2, cross_edges=((0, 0), (0, 1)))
    assert count_induced_bipartite_copies(complete_graph(3), pattern) == 6
    assert count_induced_bipartite_copies(path_graph(3), pattern) == 2
    anti = BipartitePattern(s_size=1, t_size=1)
    assert find_induced_bipartite_copy(complete_graph(4), anti) is None
    assert find_induced_bipartite_copy(path_graph(3), anti) == (0, 2)


def test_greedy_packing_of_disjoint_triangles():
    g = disjoint_union(complete_graph(3), complete_graph(3))
    packing = greedy_pair_disjoint_packing(g, complete_graph(3), "induced")
    assert len(packing) == 2
    assert packing_problems(g, complete_graph(3), packing, "induced") == []


def test_greedy_packing_is_pair_disjoint_in_dense_graphs():
    g = gnp_random_graph(14, 0.6, seed=11)
    h = complete_graph(3)
    packing = greedy_pair_disjoint_packing(g, h, "subgraph")
    assert len(packing) > 0
    assert packing_problems(g, h, packing, "subgraph") == []


def test_packing_problems_flags_overlaps_and_bad_copies():
    g = complete_graph(4)
    h = complete_graph(3)
    overlapping = Packing(copies=[
        CopyRecord(vertices=(0, 1, 2), induced=True),
        CopyRecord(vertices=(0, 1, 3), induced=True),
    ])
    assert len(packing_problems(g, h, overlapping, "induced")) == 1
    bogus = Packing(copies=[CopyRecord(vertices=(0, 1, 2), induced=True)])
    assert packing_problems(empty_graph(4), h, bogus, "induced")
    edge_disjoint = Packing(copies=overlapping.copies, disjointness="edge-disjoint")
    assert len(packing_problems(g, h, edge_disjoint, "induced")) == 1


@pytest.mark.parametrize("m,h", [(5, 3), (7, 4), (11, 3), (4, 1)])
def test_tuple_collection(m, h):
    tuples = tuple_collection(m, h)
    assert tuples_agree_at_most_once(tuples)
    assert len(tuples) >= m * m // (h * h)
    assert all(len(t) == h and all(0 <= x < m for x in t) for t in tuples)


def test_tuples_agree_check():
    assert not tuples_agree_at_most_once([(0, 1, 2), (0, 1, 3)])
    assert tuples_agree_at_most_once([(0, 1, 2), (0, 2, 1)])
    with pytest.raises(ParameterError):
        tuple_collection(0, 3)
