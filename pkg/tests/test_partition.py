from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from removal_lab.config import Budgets
from removal_lab.errors import ParameterError, ScaleError
from removal_lab.graph import (
    BlowupSpec,
    Equipartition,
    Graph,
    blowup,
    blowup_parts,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    density_between,
    empty_graph,
    equipartition,
    gnp_random_graph,
)
from removal_lab.partition import (
    BlockPartition,
    afn_dichotomy_probe,
    check_block_partition,
    check_equipartition,
    check_lemma6_output,
    claim2_threshold,
    find_homogeneous_partition,
    find_uniform_family,
    inherits_homogeneity,
    pattern_name,
)


def _c5_blowup(s: int = 4) -> tuple[Graph, Equipartition]:
    spec = BlowupSpec.uniform(cycle_graph(5), s)
    g = blowup(spec)
    return g, Equipartition(n=g.n, parts=blowup_parts(spec))


# --- Exact checkers ---

def test_trivial_partition_of_complete_graph_counts_the_diagonal():
    whole = BlockPartition(n=10, rows=(tuple(range(10)),), cols=(tuple(range(10)),))
    report = check_block_partition(complete_graph(10), whole, "1/5")
    assert report.verdicts[0].density == Fraction(9, 10)
    assert report.passed
    small = BlockPartition(n=4, rows=(tuple(range(4)),), cols=(tuple(range(4)),))
    report = check_block_partition(complete_graph(4), small, "1/5")
    assert not report.passed
    assert report.non_homogeneous_weight == 1


def test_block_partition_must_cover():
    with pytest.raises(ParameterError):
        BlockPartition(n=3, rows=((0, 1),), cols=((0, 1, 2),))
    with pytest.raises(ParameterError):
        BlockPartition(n=3, rows=((0, 1), (1, 2)), cols=((0, 1, 2),))


def test_equipartition_of_blowup_parts_is_homogeneous():
    g, q = _c5_blowup()
    report = check_equipartition(g, q, "1/10")
    assert report.passed
    assert report.non_homogeneous_weight == 0
    assert len(report.verdicts) == 10


def test_random_equipartition_of_random_graph_fails():
    g = gnp_random_graph(40, 0.5, seed=4)
    report = check_equipartition(g, equipartition(g, 4, seed=0), "1/10")
    assert report.failing_pairs == 6
    assert report.non_homogeneous_weight == Fraction(6 * 100, 1600)
    assert not report.passed


def test_single_part_equipartition_warns(caplog):
    g = complete_graph(5)
    report = check_equipartition(g, equipartition(g, 1, seed=0), "1/10")
    assert report.passed and report.verdicts == []
    assert "vacuous" in caplog.text


# --- Refinement heuristic ---

def test_find_partition_of_complete_bipartite_graph():
    found = find_homogeneous_partition(complete_bipartite_graph(5, 5), "1/10")
    assert found is not None
    partition, report = found
    assert report.passed
    assert len(partition.rows) == len(partition.cols) == 2
    assert check_block_partition(complete_bipartite_graph(5, 5), partition, "1/10").passed


def test_find_partition_accepts_dense_graph_at_once():
    partition, report = find_homogeneous_partition(complete_graph(10), "1/5")
    assert len(partition.rows) == 1 and report.passed


def test_random_graph_has_no_small_homogeneous_partition():
    g = gnp_random_graph(64, 0.5, seed=0)
    assert find_homogeneous_partition(g, "1/20", max_parts=20) is None


def test_find_partition_validates_delta():
    with pytest.raises(ParameterError):
        find_homogeneous_partition(complete_graph(4), "1/2")


# --- Pattern probe ---

def test_pattern_name():
    assert pattern_name(0b0110, 2) == "01/10"
    assert pattern_name(0, 1) == "0"
    assert pattern_name(0b111000000, 3) == "000/000/111"


def test_probe_takes_partition_branch_when_one_exists():
    probe = afn_dichotomy_probe(complete_bipartite_graph(5, 5), 2, "1/10", trials=10, seed=0)
    assert probe.branch == "partition"
    assert probe.partition is not None


def test_probe_pattern_frequencies():
    g = gnp_random_graph(30, 0.5, seed=2)
    probe = afn_dichotomy_probe(g, 2, "1/10", trials=2000, seed=5, try_partition=False)
    assert probe.branch == "patterns"
    assert len(probe.frequencies) == 16
    assert sum(probe.frequencies.values()) == pytest.approx(1.0)
    assert probe.min_frequency == probe.frequencies[probe.min_pattern]
    again = afn_dichotomy_probe(g, 2, "1/10", trials=2000, seed=5, try_partition=False)
    assert again.frequencies == probe.frequencies


def test_probe_limits():
    g = gnp_random_graph(10, 0.5, seed=0)
    with pytest.raises(ScaleError):
        afn_dichotomy_probe(g, 4, "1/10", trials=10, seed=0)
    with pytest.raises(ParameterError):
        afn_dichotomy_probe(g, 2, "1/10", trials=0, seed=0)


# --- Lemma checkers ---

def test_claim2_threshold():
    assert claim2_threshold("1/4", "1/16") == pytest.approx(0.5)


def test_homogeneity_is_inherited_by_large_subsets():
    n = 10
    edges = [(i, n + j) for i in range(n) for j in range(n) if (i, j) != (0, 0)]
    g = Graph.from_edges(2 * n, edges)
    x, y = list(range(n)), list(range(n, 2 * n))
    rng = np.random.default_rng(0)
    for _ in range(50):
        x_sub = sorted(rng.choice(x, size=6, replace=False).tolist())
        y_sub = sorted(rng.choice(y, size=6, replace=False).tolist())
        assert inherits_homogeneity(g, x, y, x_sub, y_sub, "1/4", "1/50")
    with pytest.raises(ParameterError):
        inherits_homogeneity(g, x, y, [0, n], y, "1/4", "1/50")


def test_lemma6_checker_on_blowup():
    g, q = _c5_blowup()
    u = [part[:2] for part in q.parts]
    report = check_lemma6_output(g, q, u, "1/10", "1/20")
    assert report.passed
    assert report.exceptional_pairs == 0
    assert report.allowed_exceptions == Fraction(25, 10)
    strict = check_lemma6_output(g, q, u, "1/10", "1/20", min_size=3)
    assert not strict.passed
    assert strict.undersized_parts == [0, 1, 2, 3, 4]
    with pytest.raises(ParameterError):
        check_lemma6_output(g, q, [q.parts[1]] * 5, "1/10", "1/20")


# --- Uniform families ---

@pytest.mark.parametrize("g,branch", [(complete_graph(20), "dense"), (empty_graph(20), "sparse")])
def test_uniform_family_of_homogeneous_graphs(g, branch):
    family = find_uniform_family(g, 2, "1/4")
    assert family.branch == branch
    assert len(family.sets) == 2
    assert not set(family.sets[0]) & set(family.sets[1])


def test_uniform_family_of_random_graph():
    g = gnp_random_graph(64, 0.5, seed=9)
    family = find_uniform_family(g, 3, "1/4")
    assert family is not None
    assert len(family.sets) == 3
    alpha = Fraction(1, 4)
    for x, y in combinations(family.sets, 2):
        d = density_between(g, x, y)
        assert d >= 1 - alpha if family.branch == "dense" else d <= alpha


def test_uniform_family_needs_enough_vertices():
    assert find_uniform_family(empty_graph(10), 2, "1/4") is None
    with pytest.raises(ParameterError):
        find_uniform_family(empty_graph(20), -1, "1/4")


def test_uniform_family_below_two_sets_is_trivial():
    g = gnp_random_graph(12, 0.5, seed=2)
    single = find_uniform_family(g, 1, "1/4")
    assert single.sets == [tuple(range(12))]
    assert single.branch == "dense"
    assert find_uniform_family(g, 0, "1/4").sets == []


def test_uniform_family_takes_budgets_before_seed():
    g = gnp_random_graph(64, 0.5, seed=9)
    assert find_uniform_family(g, 3, "1/4", Budgets(), 0) == find_uniform_family(g, 3, "1/4")
