"""
Homomorphism search, cores, the core order over a family and the
transversal witness for maps onto the maximal core.
"""
import logging
from itertools import combinations
from typing import Sequence

from pydantic import BaseModel

from removal_lab.config import DEFAULT_BUDGETS, Budgets
from removal_lab.errors import ConsistencyError, ParameterError, ScaleError
from removal_lab.formats import Graph6, to_graph6
from removal_lab.graph import Graph, VertexSet, canonical_form, induced_subgraph, members_of
from removal_lab.recognize import GraphFamily

logger = logging.getLogger(__name__)


class HomMap(BaseModel):
    """assignment[v] is the target vertex of source vertex v."""
    assignment: tuple[int, ...]

    def __call__(self, v: int) -> int:
        return self.assignment[v]


class CoreResult(BaseModel):
    core: Graph6
    embedding: VertexSet
    retraction: HomMap


def is_homomorphism(source: Graph, target: Graph, assignment: Sequence[int]) -> bool:
    if len(assignment) != source.n or any(not 0 <= a < target.n for a in assignment):
        return False
    return all(target.has_edge(assignment[u], assignment[v]) for u, v in source.edges())


def _search_order(source: Graph) -> list[int]:
    """Most already-ordered neighbours first, then higher degree, then lower index."""
    order: list[int] = []
    placed = 0
    remaining = set(range(source.n))
    while remaining:
        v = min(remaining, key=lambda u: (-(source.rows[u] & placed).bit_count(), -source.degree(u), u))
        order.append(v)
        placed |= 1 << v
        remaining.remove(v)
    return order


def _search(source: Graph, target: Graph, allowed: int, node_limit: int) -> tuple[int, ...] | None:
    order = _search_order(source)
    f = [-1] * source.n
    has_edge_mask = sum(1 << a for a in range(target.n) if target.rows[a])
    nodes = 0

    def extend(i: int) -> bool:
        nonlocal nodes
        if i == len(order):
            return True
        v = order[i]
        cand = allowed if not source.rows[v] else allowed & has_edge_mask
        for u in members_of(source.rows[v]):
            if f[u] >= 0:
                cand &= target.rows[f[u]]
        while cand:
            low = cand & -cand
            cand ^= low
            nodes += 1
            if nodes > node_limit:
                raise ScaleError(f"homomorphism search exceeded {node_limit} nodes")
            f[v] = low.bit_length() - 1
            if extend(i + 1):
                return True
        f[v] = -1
        return False

    return tuple(f) if extend(0) else None


def find_homomorphism(source: Graph, target: Graph, budgets: Budgets = DEFAULT_BUDGETS) -> HomMap | None:
    """
    A homomorphism source -> target, or None when exhaustive backtracking finds none.

    Raises:
        ScaleError: If either graph is over its vertex cap or the node budget runs out.
    """
    if source.n > budgets.hom_source_vertices or target.n > budgets.hom_target_vertices:
        raise ScaleError(
            f"homomorphism search is capped at {budgets.hom_source_vertices} -> "
            f"{budgets.hom_target_vertices} vertices, got {source.n} -> {target.n}"
        )
    found = _search(source, target, target.full_mask, budgets.backtracking_nodes)
    return None if found is None else HomMap(assignment=found)


def core_by_subsets(g: Graph, budgets: Budgets = DEFAULT_BUDGETS) -> VertexSet:
    """Smallest vertex set (lexicographically first) whose induced subgraph receives a homomorphism from g."""
    for size in range(1, g.n + 1):
        for xs in combinations(range(g.n), size):
            if _search(g, g, sum(1 << v for v in xs), budgets.backtracking_nodes) is not None:
                return xs
    return ()


def core(g: Graph, budgets: Budgets = DEFAULT_BUDGETS) -> CoreResult:
    """
    Core of g by iterated retraction.

    While some vertex can be avoided by a homomorphism from the current induced
    subgraph to itself, drop it and compose. The returned retraction is the
    identity on the embedding.

    Raises:
        ScaleError: If g has more than the core vertex cap.
        ConsistencyError: If the subset oracle disagrees on the core size.
    """
    if g.n > budgets.core_vertices:
        raise ScaleError(f"core computation is capped at {budgets.core_vertices} vertices, got {g.n}")
    current = g.full_mask
    f = list(range(g.n))
    shrinking = True
    while shrinking:
        shrinking = False
        for v in members_of(current):
            keep = current ^ (1 << v)
            # maps G[current] into G[keep]; G[current] holds the image of f, so this composes
            found = _search_restricted(g, current, keep, budgets.backtracking_nodes)
            if found is not None:
                f = [found[x] for x in f]
                current = keep
                shrinking = True
                break
    embedding = members_of(current)
    # f restricted to the embedding is an automorphism; undo it so f fixes the core
    inverse = {f[x]: x for x in embedding}
    if len(inverse) != len(embedding):
        raise ConsistencyError(f"retraction of {g!r} is not bijective on its image")
    f = [inverse[y] for y in f]
    position = {v: i for i, v in enumerate(embedding)}
    result = CoreResult(
        core=induced_subgraph(g, embedding) if embedding else Graph(0),
        embedding=embedding,
        retraction=HomMap(assignment=tuple(position[y] for y in f)),
    )
    if not is_homomorphism(g, result.core, result.retraction.assignment):
        raise ConsistencyError("core retraction is not a homomorphism")
    if g.n <= budgets.core_cross_check_vertices and len(core_by_subsets(g, budgets)) != len(embedding):
        raise ConsistencyError(f"iterated retraction and subset search disagree on the core of {g!r}")
    logger.debug("core of %r has %d vertices", g, len(embedding))
    return result


def _search_restricted(g: Graph, domain: int, allowed: int, node_limit: int) -> dict[int, int] | None:
    """Homomorphism G[domain] -> G[allowed] in host indices."""
    xs = members_of(domain)
    sub = induced_subgraph(g, xs)
    found = _search(sub, g, allowed, node_limit)
    if found is None:
        return None
    return {x: found[i] for i, x in enumerate(xs)}


# --- The core order ---

class CorePoset(BaseModel):
    """Isomorphism classes of member cores ordered by homomorphisms.

    ``relation`` holds (i, j) when class j maps homomorphically to class i.
    """
    classes: list[Graph6]
    member_class: list[int]
    relation: list[tuple[int, int]]
    maximal: list[int]
    chosen: int

    @property
    def kf(self) -> Graph:
        return self.classes[self.chosen]


def core_poset(family: GraphFamily, budgets: Budgets = DEFAULT_BUDGETS) -> CorePoset:
    """Cores of all members, the homomorphism order between them and a maximal class K(F).

    Among maximal classes the one with the least canonical graph6 encoding is chosen.
    """
    classes: list[Graph] = []
    codes: list[str] = []
    member_class = []
    for g in family.members:
        c = canonical_form(core(g, budgets).core)
        code = to_graph6(c)
        if code not in codes:
            classes.append(c)
            codes.append(code)
        member_class.append(codes.index(code))
    q = len(classes)
    maps = [[find_homomorphism(classes[j], classes[i], budgets) is not None for j in range(q)] for i in range(q)]
    relation = [(i, j) for i in range(q) for j in range(q) if maps[i][j]]
    for i, j in combinations(range(q), 2):
        if maps[i][j] and maps[j][i]:
            raise ConsistencyError(f"distinct core classes {codes[i]} and {codes[j]} are homomorphically equivalent")
    # maximal: no other class maps into it
    maximal = [i for i in range(q) if not any(maps[i][j] for j in range(q) if j != i)]
    chosen = min(maximal, key=lambda i: codes[i])
    logger.info("K(F) chosen among %d maximal core classes: %s", len(maximal), codes[chosen])
    return CorePoset(classes=classes, member_class=member_class, relation=relation, maximal=maximal, chosen=chosen)


def proposition14_witness(
    f_graph: Graph, k: Graph, f: HomMap, budgets: Budgets = DEFAULT_BUDGETS
) -> VertexSet:
    """
    A set X of f_graph on which f is an isomorphism onto k.

    The core embedding is tried first, then one vertex from each fibre of f.

    Raises:
        ParameterError: If f is not a homomorphism f_graph -> k.
        ConsistencyError: If no such X exists, i.e. k is not maximal for f_graph.
    """
    if not is_homomorphism(f_graph, k, f.assignment):
        raise ParameterError("the supplied map is not a homomorphism onto K")
    if f_graph.n <= budgets.core_vertices:
        embedding = core(f_graph, budgets).embedding
        if _is_isomorphism_onto(f_graph, k, f, embedding):
            return embedding
    fibres = [[v for v in range(f_graph.n) if f(v) == a] for a in range(k.n)]
    chosen: list[int] = []
    nodes = 0

    def extend(a: int) -> bool:
        nonlocal nodes
        if a == k.n:
            return True
        for v in fibres[a]:
            nodes += 1
            if nodes > budgets.backtracking_nodes:
                raise ScaleError("transversal search exceeded the node budget")
            if all(f_graph.has_edge(v, chosen[b]) == k.has_edge(a, b) for b in range(a)):
                chosen.append(v)
                if extend(a + 1):
                    return True
                chosen.pop()
        return False

    if all(fibres) and extend(0):
        return tuple(sorted(chosen))
    raise ConsistencyError("no fibre transversal of f induces a copy of K; K is not maximal for this graph")


def _is_isomorphism_onto(g: Graph, k: Graph, f: HomMap, xs: VertexSet) -> bool:
    if len(xs) != k.n or {f(v) for v in xs} != set(range(k.n)):
        return False
    return all(g.has_edge(u, v) == k.has_edge(f(u), f(v)) for u, v in combinations(xs, 2))
