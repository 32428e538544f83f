"""
Exact copy counting by lexicographic backtracking over bitmask candidate sets,
plus the packings, tuple collections and layered-cycle counts built on it.
"""
import logging
from itertools import combinations
from typing import TYPE_CHECKING, Iterator, Literal, Sequence

from pydantic import BaseModel

from removal_lab.config import DEFAULT_BUDGETS, Budgets
from removal_lab.errors import ParameterError, ScaleError
from removal_lab.graph import Graph, VertexSet, mask_of
from removal_lab.recognize import BipartitePattern, GraphFamily

if TYPE_CHECKING:
    from removal_lab.construct import LayeredCliqueGraph

logger = logging.getLogger(__name__)

Mode = Literal["induced", "subgraph"]


class CopyRecord(BaseModel):
    """vertices[i] is the host vertex playing pattern vertex i."""
    vertices: tuple[int, ...]
    induced: bool
    member: int = 0


class Packing(BaseModel):
    copies: list[CopyRecord]
    disjointness: Literal["pair-disjoint", "edge-disjoint"] = "pair-disjoint"

    def __len__(self) -> int:
        return len(self.copies)


class _NodeBudget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise ScaleError(
                f"backtracking exceeded {self.limit} nodes",
            )


def _pattern_constraints(h: Graph, mode: Mode) -> tuple[list[int], list[int]]:
    """For pattern vertex i: earlier pattern vertices it must / must not be adjacent to."""
    adj, non = [], []
    for i in range(h.n):
        earlier = (1 << i) - 1
        adj.append(h.rows[i] & earlier)
        non.append(~h.rows[i] & earlier if mode == "induced" else 0)
    return adj, non


def _bipartite_constraints(pattern: BipartitePattern) -> tuple[list[int], list[int]]:
    """S vertices come first (unconstrained), then T vertices constrained against S only."""
    s, t = pattern.s_size, pattern.t_size
    adj, non = [0] * s, [0] * s
    s_mask = (1 << s) - 1
    for j in range(t):
        wanted = mask_of(i for i in range(s) if pattern.has_cross(i, j))
        adj.append(wanted)
        non.append(s_mask & ~wanted)
    return adj, non


def _candidates(g: Graph, phi: list[int], adj: int, non: int, free: int) -> int:
    cand = free
    for j, v in enumerate(phi):
        bit = 1 << j
        if adj & bit:
            cand &= g.rows[v]
        elif non & bit:
            cand &= ~g.rows[v]
    return cand


def _embeddings(
    g: Graph,
    adj: Sequence[int],
    non: Sequence[int],
    within: int,
    budget: _NodeBudget,
    avoid: list[int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Injective maps satisfying the constraints, in lexicographic order of the image tuple.

    ``avoid[v]`` is read live: hosts u with bit u set in avoid[v] are never paired with v.
    """
    size = len(adj)
    phi: list[int] = []

    def extend(free: int) -> Iterator[tuple[int, ...]]:
        i = len(phi)
        if i == size:
            yield tuple(phi)
            return
        cand = _candidates(g, phi, adj[i], non[i], free)
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            if avoid is not None and any(avoid[u] >> v & 1 for u in phi):
                continue
            budget.spend()
            phi.append(v)
            yield from extend(free ^ low)
            phi.pop()

    if size == 0:
        yield ()
        return
    yield from extend(within)


def _count_embeddings(g: Graph, adj: Sequence[int], non: Sequence[int], within: int, budget: _NodeBudget) -> int:
    size = len(adj)
    if size == 0:
        return 1
    phi: list[int] = []

    def extend(free: int) -> int:
        i = len(phi)
        cand = _candidates(g, phi, adj[i], non[i], free)
        if i == size - 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            budget.spend()
            phi.append(low.bit_length() - 1)
            total += extend(free ^ low)
            phi.pop()
        return total

    return extend(within)


def _check_pattern(h: Graph, budgets: Budgets) -> None:
    if h.n > budgets.pattern_vertices:
        raise ScaleError(f"patterns are capped at {budgets.pattern_vertices} vertices, got {h.n}")


def _check_mode(mode: str) -> None:
    if mode not in ("induced", "subgraph"):
        raise ParameterError(f"mode must be 'induced' or 'subgraph', got {mode!r}")


def count_embeddings(g: Graph, h: Graph, mode: Mode, budgets: Budgets = DEFAULT_BUDGETS) -> int:
    """Number of adjacency-respecting injections V(H) -> V(G)."""
    _check_mode(mode)
    _check_pattern(h, budgets)
    if h.n > g.n:
        return 0
    adj, non = _pattern_constraints(h, mode)
    return _count_embeddings(g, adj, non, g.full_mask, _NodeBudget(budgets.backtracking_nodes))


def automorphism_count(h: Graph, budgets: Budgets = DEFAULT_BUDGETS) -> int:
    return count_embeddings(h, h, "induced", budgets)


def count_copies(g: Graph, h: Graph, mode: Mode, budgets: Budgets = DEFAULT_BUDGETS) -> int:
    """
    Number of unlabeled copies of H in G.

    Args:
        mode: "induced" for induced copies, "subgraph" for not necessarily induced ones.

    Returns:
        Labeled embeddings divided by |Aut(H)|.

    Raises:
        ScaleError: If H is over the pattern cap or the node budget runs out.
    """
    labeled = count_embeddings(g, h, mode, budgets)
    return labeled // automorphism_count(h, budgets) if labeled else 0


def iter_copies(
    g: Graph, h: Graph, mode: Mode, within: VertexSet | None = None, budgets: Budgets = DEFAULT_BUDGETS
) -> Iterator[tuple[int, ...]]:
    """Embeddings of H in lexicographic order, optionally restricted to G[within]."""
    _check_mode(mode)
    _check_pattern(h, budgets)
    mask = g.full_mask if within is None else mask_of(within)
    if h.n > mask.bit_count():
        return iter(())
    adj, non = _pattern_constraints(h, mode)
    return _embeddings(g, adj, non, mask, _NodeBudget(budgets.backtracking_nodes))


def find_copy(
    g: Graph, h: Graph, mode: Mode, within: VertexSet | None = None, budgets: Budgets = DEFAULT_BUDGETS
) -> CopyRecord | None:
    for phi in iter_copies(g, h, mode, within, budgets):
        return CopyRecord(vertices=phi, induced=mode == "induced")
    return None


def find_induced_copy(
    g: Graph, family: GraphFamily, within: VertexSet | None = None, budgets: Budgets = DEFAULT_BUDGETS
) -> CopyRecord | None:
    """First induced copy of a family member, members tried in order."""
    for index, h in enumerate(family.members):
        found = find_copy(g, h, "induced", within, budgets)
        if found is not None:
            return found.model_copy(update={"member": index})
    return None


def is_copy(g: Graph, h: Graph, vertices: Sequence[int], mode: Mode) -> bool:
    if len(vertices) != h.n or len(set(vertices)) != h.n:
        return False
    if any(not 0 <= v < g.n for v in vertices):
        return False
    for i, j in combinations(range(h.n), 2):
        host = g.has_edge(vertices[i], vertices[j])
        if h.has_edge(i, j) and not host:
            return False
        if mode == "induced" and host and not h.has_edge(i, j):
            return False
    return True


# --- Induced bipartite copies ---

def _check_sides(pattern: BipartitePattern, budgets: Budgets) -> None:
    if max(pattern.s_size, pattern.t_size) > budgets.pattern_vertices:
        raise ScaleError(f"pattern sides are capped at {budgets.pattern_vertices} vertices")


def count_induced_bipartite_copies(
    g: Graph, pattern: BipartitePattern, budgets: Budgets = DEFAULT_BUDGETS
) -> int:
    """Labeled injections constraining only the cross pairs; adjacency inside either side is free."""
    _check_sides(pattern, budgets)
    if pattern.s_size + pattern.t_size > g.n:
        return 0
    adj, non = _bipartite_constraints(pattern)
    return _count_embeddings(g, adj, non, g.full_mask, _NodeBudget(budgets.backtracking_nodes))


def find_induced_bipartite_copy(
    g: Graph, pattern: BipartitePattern, within: VertexSet | None = None, budgets: Budgets = DEFAULT_BUDGETS
) -> tuple[int, ...] | None:
    _check_sides(pattern, budgets)
    mask = g.full_mask if within is None else mask_of(within)
    if pattern.s_size + pattern.t_size > mask.bit_count():
        return None
    adj, non = _bipartite_constraints(pattern)
    for phi in _embeddings(g, adj, non, mask, _NodeBudget(budgets.backtracking_nodes)):
        return phi
    return None


# --- Packings ---

def greedy_pair_disjoint_packing(
    g: Graph, h: Graph, mode: Mode, budgets: Budgets = DEFAULT_BUDGETS
) -> Packing:
    """
    Maximal pair-disjoint collection of copies, lexicographically least copy first.

    Every vertex pair lies in at most one copy, so the size lower-bounds the
    number of edits needed to destroy all copies.
    """
    _check_mode(mode)
    _check_pattern(h, budgets)
    copies: list[CopyRecord] = []
    if h.n > g.n:
        return Packing(copies=copies)
    adj, non = _pattern_constraints(h, mode)
    used = [0] * g.n
    for phi in _embeddings(g, adj, non, g.full_mask, _NodeBudget(budgets.backtracking_nodes), avoid=used):
        mask = mask_of(phi)
        # prefixes built before the last acceptance are not re-checked by the search
        if any(used[v] & mask for v in phi):
            continue
        copies.append(CopyRecord(vertices=phi, induced=mode == "induced"))
        for v in phi:
            used[v] |= mask ^ (1 << v)
    logger.debug("greedy packing of %d copies of %r in %r", len(copies), h, g)
    return Packing(copies=copies)


def packing_problems(g: Graph, h: Graph, packing: Packing, mode: Mode) -> list[str]:
    """Every reason the packing fails to certify; empty when it is valid."""
    problems = []
    used = [0] * g.n
    edges_used: set[tuple[int, int]] = set()
    for index, record in enumerate(packing.copies):
        if not is_copy(g, h, record.vertices, mode):
            problems.append(f"copy {index} {record.vertices} is not a valid {mode} copy")
            continue
        if packing.disjointness == "pair-disjoint":
            mask = mask_of(record.vertices)
            if any(used[v] & mask for v in record.vertices):
                problems.append(f"copy {index} {record.vertices} shares a vertex pair with an earlier copy")
            for v in record.vertices:
                used[v] |= mask ^ (1 << v)
        else:
            image = {
                tuple(sorted((record.vertices[i], record.vertices[j]))) for i, j in h.edges()
            }
            if image & edges_used:
                problems.append(f"copy {index} {record.vertices} shares an edge with an earlier copy")
            edges_used |= image
    return problems


# --- Tuple collections ---

def tuple_collection(m: int, h: int) -> list[tuple[int, ...]]:
    """
    Greedy h-tuples over 0..m-1, any two agreeing in at most one coordinate.

    Tuples are added in lexicographic order whenever compatible with those kept
    so far, which yields at least m^2 / h^2 tuples.
    """
    if m < 1 or h < 1:
        raise ParameterError(f"m and h must be positive, got m={m}, h={h}")
    if h == 1:
        return [(x,) for x in range(m)]
    # seen[(a, b)] holds the value pairs already used on coordinates a < b
    seen: dict[tuple[int, int], set[tuple[int, int]]] = {pair: set() for pair in combinations(range(h), 2)}
    kept: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def extend() -> bool:
        i = len(prefix)
        if i == h:
            return True
        for x in range(m):
            if any((prefix[a], x) in seen[(a, i)] for a in range(i)):
                continue
            prefix.append(x)
            if extend():
                return True
            prefix.pop()
        return False

    # at most one tuple per value pair on the first two coordinates
    for x0 in range(m):
        for x1 in range(m):
            if (x0, x1) in seen[(0, 1)]:
                continue
            prefix[:] = [x0, x1]
            if extend():
                t = tuple(prefix)
                kept.append(t)
                for a, b in combinations(range(h), 2):
                    seen[(a, b)].add((t[a], t[b]))
    return kept


def tuples_agree_at_most_once(tuples: Sequence[Sequence[int]]) -> bool:
    for s, t in combinations(tuples, 2):
        if sum(a == b for a, b in zip(s, t)) > 1:
            return False
    return True


# --- Layered cycles ---

def _check_indices(r: "LayeredCliqueGraph", indices: Sequence[int]) -> tuple[int, ...]:
    idx = tuple(indices)
    if not 3 <= len(idx) <= r.h:
        raise ParameterError(f"need between 3 and {r.h} layer indices, got {len(idx)}")
    if any(b <= a for a, b in zip(idx, idx[1:])) or idx[0] < 1 or idx[-1] > r.h:
        raise ParameterError(f"layer indices must increase strictly within 1..{r.h}, got {idx}")
    return idx


def count_layered_cycles(r: "LayeredCliqueGraph", indices: Sequence[int]) -> int:
    """
    Cycles v_1 v_2 ... v_t v_1 with v_j in layer indices[j] (1-based layers).

    Walk counts are carried layer to layer from every start vertex and closed
    back to it at the end.
    """
    idx = _check_indices(r, indices)
    g = r.graph
    layer_masks = [mask_of(r.layer(i)) for i in idx]
    total = 0
    for start in r.layer(idx[0]):
        walks = {start: 1}
        for mask in layer_masks[1:]:
            following: dict[int, int] = {}
            for v, ways in walks.items():
                nxt = g.rows[v] & mask
                while nxt:
                    low = nxt & -nxt
                    nxt ^= low
                    u = low.bit_length() - 1
                    following[u] = following.get(u, 0) + ways
            walks = following
            if not walks:
                break
        total += sum(ways for v, ways in walks.items() if g.has_edge(v, start))
    return total


def iter_layered_cycles(r: "LayeredCliqueGraph", indices: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Every layered cycle counted by count_layered_cycles, as a vertex tuple."""
    idx = _check_indices(r, indices)
    g = r.graph
    layer_masks = [mask_of(r.layer(i)) for i in idx]
    path: list[int] = []

    def extend() -> Iterator[tuple[int, ...]]:
        i = len(path)
        if i == len(idx):
            if g.has_edge(path[-1], path[0]):
                yield tuple(path)
            return
        nxt = g.rows[path[-1]] & layer_masks[i]
        while nxt:
            low = nxt & -nxt
            nxt ^= low
            path.append(low.bit_length() - 1)
            yield from extend()
            path.pop()

    for start in r.layer(idx[0]):
        path.append(start)
        yield from extend()
        path.pop()
