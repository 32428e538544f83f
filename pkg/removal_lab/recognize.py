"""
Structural recognizers: bipartite, co-bipartite and split graphs, the family
conditions built from them, Ramsey extraction and VC dimension.
"""
import logging
from collections import deque
from itertools import combinations
from typing import Iterable, Sequence

from pydantic import BaseModel, model_validator

from removal_lab.config import DEFAULT_BUDGETS, Budgets
from removal_lab.errors import ConsistencyError, InsufficientVerticesError, ParameterError, ScaleError
from removal_lab.formats import Graph6
from removal_lab.graph import Graph, VertexSet, complement, mask_of, vertex_set

logger = logging.getLogger(__name__)


class MemberFlags(BaseModel):
    is_bipartite: bool
    is_cobipartite: bool
    is_split: bool


class GraphFamily(BaseModel):
    """A finite family of forbidden graphs with per-member class flags."""
    members: tuple[Graph6, ...]
    flags: tuple[MemberFlags, ...] = ()
    name: str | None = None

    @model_validator(mode="after")
    def _classify(self):
        if not self.members:
            raise ParameterError("a graph family needs at least one member")
        computed = tuple(
            MemberFlags(
                is_bipartite=is_bipartite(g) is not None,
                is_cobipartite=is_cobipartite(g) is not None,
                is_split=is_split(g) is not None,
            )
            for g in self.members
        )
        if self.flags and self.flags != computed:
            raise ParameterError("supplied member flags disagree with the recognizers")
        self.flags = computed
        return self

    @classmethod
    def of(cls, *graphs: Graph, name: str | None = None) -> "GraphFamily":
        return cls(members=tuple(graphs), name=name)

    @property
    def max_order(self) -> int:
        return max(g.n for g in self.members)

    def __len__(self) -> int:
        return len(self.members)


class BipartitePattern(BaseModel):
    """Cross edges between sides S = 0..s_size-1 and T = 0..t_size-1.

    Adjacency inside S or inside T is not part of the pattern.
    """
    s_size: int
    t_size: int
    cross_edges: tuple[tuple[int, int], ...] = ()

    @model_validator(mode="after")
    def _normalize(self):
        if self.s_size < 1 or self.t_size < 1:
            raise ParameterError("both sides of a bipartite pattern need a vertex")
        for i, j in self.cross_edges:
            if not (0 <= i < self.s_size and 0 <= j < self.t_size):
                raise ParameterError(f"cross edge ({i}, {j}) is outside the sides")
        self.cross_edges = tuple(sorted(set(self.cross_edges)))
        return self

    def cross_rows(self) -> tuple[int, ...]:
        """For every S vertex, the mask of its T neighbours."""
        rows = [0] * self.s_size
        for i, j in self.cross_edges:
            rows[i] |= 1 << j
        return tuple(rows)

    def has_cross(self, i: int, j: int) -> bool:
        return (i, j) in self.cross_edges


# --- Two-colourings ---

def is_bipartite(g: Graph) -> tuple[VertexSet, VertexSet] | None:
    """Breadth-first 2-colouring; the side holding each component's least vertex comes first."""
    color = [-1] * g.n
    for root in range(g.n):
        if color[root] != -1:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in g.neighbors(v):
                if color[u] == -1:
                    color[u] = 1 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    return None
    return (
        tuple(v for v in range(g.n) if color[v] == 0),
        tuple(v for v in range(g.n) if color[v] == 1),
    )


def is_cobipartite(g: Graph) -> tuple[VertexSet, VertexSet] | None:
    """Partition into two cliques, read off a 2-colouring of the complement."""
    return is_bipartite(complement(g))


def is_clique(g: Graph, xs: Iterable[int]) -> bool:
    xs = tuple(xs)
    mask = mask_of(xs)
    return all((g.rows[v] | 1 << v) & mask == mask for v in xs)


def is_independent(g: Graph, xs: Iterable[int]) -> bool:
    xs = tuple(xs)
    mask = mask_of(xs)
    return all(g.rows[v] & mask == 0 for v in xs)


def is_split(g: Graph) -> tuple[VertexSet, VertexSet] | None:
    """Split recognition from the sorted degree sequence.

    With d_1 >= ... >= d_n and m = max{i : d_i >= i - 1}, G is split iff
    sum_{i<=m} d_i = m(m-1) + sum_{i>m} d_i. The m highest-degree vertices then
    form the clique side.

    Returns:
        (clique, independent set) or None.
    """
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    degrees = [g.degree(v) for v in order]
    m = 0
    for i, d in enumerate(degrees, start=1):
        if d >= i - 1:
            m = i
    if sum(degrees[:m]) != m * (m - 1) + sum(degrees[m:]):
        return None
    clique, independent = vertex_set(order[:m]), vertex_set(order[m:])
    if not (is_clique(g, clique) and is_independent(g, independent)):
        raise ConsistencyError(f"degree test accepted {g!r} but the witness does not verify")
    return clique, independent


class FamilyConditions(BaseModel):
    has_bipartite: bool
    has_cobipartite: bool
    has_split: bool
    thm1_sufficient: bool
    thm2_necessary: bool


def check_family_conditions(family: GraphFamily) -> FamilyConditions:
    """Which of the bipartite / co-bipartite / split classes the family meets."""
    if not family.members:
        raise ParameterError("a graph family needs at least one member")
    has_b = any(f.is_bipartite for f in family.flags)
    has_c = any(f.is_cobipartite for f in family.flags)
    has_s = any(f.is_split for f in family.flags)
    return FamilyConditions(
        has_bipartite=has_b,
        has_cobipartite=has_c,
        has_split=has_s,
        thm1_sufficient=has_b and has_c and has_s,
        thm2_necessary=has_b and has_c,
    )


# --- Ramsey extraction ---

def ramsey_homogeneous_set(g: Graph, k: int) -> VertexSet:
    """
    Clique or independent set of size >= k in a graph on at least 4^k vertices.

    Pivot on the least remaining vertex and keep the larger of its neighbourhood
    and non-neighbourhood; pivots kept with their neighbourhood are pairwise
    adjacent, the others pairwise non-adjacent.

    Raises:
        InsufficientVerticesError: If n < 4^k.
    """
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    if g.n < 4 ** k:
        raise InsufficientVerticesError(f"need at least 4^{k} = {4 ** k} vertices, got {g.n}")
    remaining = g.full_mask
    dense, sparse = [], []
    while remaining:
        v = (remaining & -remaining).bit_length() - 1
        rest = remaining ^ (1 << v)
        if not rest:
            # the last pivot fits either side
            (dense if len(dense) >= len(sparse) else sparse).append(v)
            break
        inside = rest & g.rows[v]
        outside = rest & ~g.rows[v]
        if inside.bit_count() >= outside.bit_count():
            dense.append(v)
            remaining = inside
        else:
            sparse.append(v)
            remaining = outside
    best = vertex_set(dense if len(dense) >= len(sparse) else sparse)
    if len(best) < k or not (is_clique(g, best) or is_independent(g, best)):
        raise ConsistencyError(f"pivot extraction returned a non-homogeneous set {best}")
    return best


# --- VC dimension ---

def _shattered(g: Graph, rows: Sequence[int]) -> bool:
    mask = mask_of(rows)
    # column j restricted to the chosen rows is row j restricted to them, by symmetry
    patterns = {g.rows[j] & mask for j in range(g.n)}
    return len(patterns) == 1 << len(rows)


def vc_dimension(g: Graph, budgets: Budgets = DEFAULT_BUDGETS) -> int:
    """Largest d such that some d rows of the adjacency matrix are shattered by its columns."""
    if g.n > budgets.vc_vertices:
        raise ScaleError(
            f"exhaustive VC dimension is capped at {budgets.vc_vertices} vertices, got {g.n}"
        )
    level = [()]
    d = 0
    while level and (1 << (d + 1)) <= g.n:
        known = set(level)
        following = []
        for base in level:
            start = base[-1] + 1 if base else 0
            for v in range(start, g.n):
                candidate = base + (v,)
                if d and not all(sub in known for sub in combinations(candidate, d)):
                    continue
                if _shattered(g, candidate):
                    following.append(candidate)
        if not following:
            break
        level = following
        d += 1
    logger.debug("VC dimension of %r is %d", g, d)
    return d


def shattered_rows(g: Graph, d: int) -> VertexSet | None:
    """Lexicographically least d-set of rows shattered by the columns, if any."""
    for rows in combinations(range(g.n), d):
        if _shattered(g, rows):
            return rows
    return None
