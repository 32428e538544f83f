"""
Dense graphs over vertices 0..n-1, stored as one bitmask row per vertex.

Every value here is immutable after construction and every operation is pure.
Densities are exact ``Fraction``s.
"""
import math
from fractions import Fraction
from typing import Annotated, Any, Iterable, Iterator, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, PlainSerializer, PlainValidator, model_validator

from removal_lab.errors import DegenerateSetError, InvalidPairError, ParameterError


def as_rational(value: Any) -> Fraction:
    """Convert ints, decimal strings, "p/q" strings and floats to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParameterError(f"expected a rational number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # 0.1 means 1/10 here, not the binary float nearest to it
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParameterError(f"cannot read {value!r} as a rational number")
    raise ParameterError(f"expected a rational number, got {type(value).__name__}")


def as_count(value: Any) -> int:
    if isinstance(value, bool):
        raise ParameterError(f"expected a count, got {value!r}")
    try:
        count = int(value)
    except (TypeError, ValueError):
        raise ParameterError(f"expected a count, got {value!r}")
    if count < 0:
        raise ParameterError(f"counts are non-negative, got {count}")
    return count


Rational = Annotated[Fraction, PlainValidator(as_rational), PlainSerializer(str, return_type=str)]

# Arbitrary-precision counts travel as decimal strings.
Count = Annotated[int, PlainValidator(as_count), PlainSerializer(str, return_type=str)]

VertexSet = tuple[int, ...]


def vertex_set(members: Iterable[int], n: int | None = None) -> VertexSet:
    """Sorted duplicate-free tuple; checks membership in 0..n-1 when n is given."""
    vs = tuple(sorted({int(v) for v in members}))
    if n is not None and vs and (vs[0] < 0 or vs[-1] >= n):
        raise ParameterError(f"vertex set {vs} is not inside 0..{n - 1}")
    return vs


def mask_of(members: Iterable[int]) -> int:
    mask = 0
    for v in members:
        mask |= 1 << v
    return mask


def members_of(mask: int) -> VertexSet:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


class Graph:
    """Undirected simple graph with bit-packed adjacency rows."""

    __slots__ = ("n", "rows", "_hash")

    def __init__(self, n: int, rows: Sequence[int] | None = None):
        if n < 0:
            raise ParameterError(f"vertex count must be non-negative, got {n}")
        rows = tuple(rows) if rows is not None else (0,) * n
        if len(rows) != n:
            raise ParameterError(f"expected {n} adjacency rows, got {len(rows)}")
        full = (1 << n) - 1
        for v, row in enumerate(rows):
            if row < 0 or row & ~full:
                raise ParameterError(f"row {v} points outside 0..{n - 1}")
            if row >> v & 1:
                raise ParameterError(f"vertex {v} has a loop")
            for u in members_of(row):
                if not rows[u] >> v & 1:
                    raise ParameterError(f"adjacency is not symmetric at ({u}, {v})")
        self._set(n, rows)

    def _set(self, n: int, rows: tuple[int, ...]) -> None:
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_hash", hash((n, rows)))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @classmethod
    def _trusted(cls, n: int, rows: Sequence[int]) -> "Graph":
        g = object.__new__(cls)
        g._set(n, tuple(rows))
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        rows = [0] * n
        for edge in edges:
            u, v = int(edge[0]), int(edge[1])
            if u == v:
                raise ParameterError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) is outside 0..{n - 1}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls._trusted(n, rows)

    @classmethod
    def from_adjacency_matrix(cls, matrix) -> "Graph":
        a = np.asarray(matrix, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError("adjacency matrix must be square")
        if a.diagonal().any() or (a != a.T).any():
            raise ParameterError("adjacency matrix must be symmetric with an empty diagonal")
        us, vs = np.nonzero(np.triu(a, 1))
        return cls.from_edges(a.shape[0], zip(us.tolist(), vs.tolist()))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbor_mask(self, v: int) -> int:
        return self.rows[v]

    def neighbors(self, v: int) -> VertexSet:
        return members_of(self.rows[v])

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.rows]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges (u, v) with u < v in lexicographic order."""
        for u, row in enumerate(self.rows):
            for v in members_of(row >> (u + 1) << (u + 1)):
                yield u, v

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges():
            a[u, v] = a[v, u] = True
        return a

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


# --- Named graphs ---

def empty_graph(n: int) -> Graph:
    return Graph._trusted(n, (0,) * n)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph._trusted(n, [full ^ (1 << v) for v in range(n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ParameterError(f"a cycle needs at least 3 vertices, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def disjoint_union(*graphs: Graph) -> Graph:
    rows, offset = [], 0
    for g in graphs:
        rows.extend(row << offset for row in g.rows)
        offset += g.n
    return Graph._trusted(offset, rows)


def gnp_random_graph(n: int, p: float, seed) -> Graph:
    """Erdős–Rényi G(n, p) drawn from a seeded numpy generator."""
    if not 0 <= p <= 1:
        raise ParameterError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, 1)
    us, vs = np.nonzero(upper)
    return Graph.from_edges(n, zip(us.tolist(), vs.tolist()))


def m_graph() -> Graph:
    """Complement of three disjoint edges plus an isolated vertex (7 vertices)."""
    return complement(Graph.from_edges(7, [(0, 1), (2, 3), (4, 5)]))


NAMED_GRAPHS = {
    "K1": lambda: complete_graph(1),
    "K2": lambda: complete_graph(2),
    "K3": lambda: complete_graph(3),
    "K4": lambda: complete_graph(4),
    "P3": lambda: path_graph(3),
    "P4": lambda: path_graph(4),
    "K13": lambda: complete_bipartite_graph(1, 3),
    "C4": lambda: cycle_graph(4),
    "co-C4": lambda: complement(cycle_graph(4)),
    "C5": lambda: cycle_graph(5),
    "C6": lambda: cycle_graph(6),
    "C8": lambda: cycle_graph(8),
    "paw": lambda: Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]),
    "M": m_graph,
}


def named_graph(name: str) -> Graph:
    try:
        return NAMED_GRAPHS[name]()
    except KeyError:
        raise ParameterError(f"unknown graph name {name!r}; known: {', '.join(NAMED_GRAPHS)}")


# --- Densities and homogeneity ---

def _edges_inside(g: Graph, xs: VertexSet) -> int:
    mask = mask_of(xs)
    return sum((g.rows[v] & mask).bit_count() for v in xs) // 2


def _edges_across(g: Graph, xs: VertexSet, ys: VertexSet) -> int:
    mask = mask_of(ys)
    return sum((g.rows[v] & mask).bit_count() for v in xs)


def density_within(g: Graph, x: Iterable[int]) -> Fraction:
    """d(X) = e(X) / C(|X|, 2)."""
    xs = vertex_set(x, g.n)
    if len(xs) < 2:
        raise DegenerateSetError(f"density needs at least 2 vertices, got {len(xs)}")
    return Fraction(_edges_inside(g, xs), math.comb(len(xs), 2))


def _check_pair(g: Graph, x: Iterable[int], y: Iterable[int]) -> tuple[VertexSet, VertexSet]:
    xs, ys = vertex_set(x, g.n), vertex_set(y, g.n)
    if not xs or not ys:
        raise InvalidPairError("both sides of a pair must be non-empty")
    if mask_of(xs) & mask_of(ys):
        raise InvalidPairError("the two sides of a pair must be disjoint")
    return xs, ys


def density_between(g: Graph, x: Iterable[int], y: Iterable[int]) -> Fraction:
    """d(X, Y) = e(X, Y) / (|X||Y|) for disjoint non-empty X, Y."""
    xs, ys = _check_pair(g, x, y)
    return Fraction(_edges_across(g, xs, ys), len(xs) * len(ys))


class HomogeneityVerdict(BaseModel):
    density: Rational
    dominant_value: int
    is_delta_homogeneous: bool
    delta: Rational


def check_delta(delta: Any) -> Fraction:
    d = as_rational(delta)
    if not 0 < d < Fraction(1, 2):
        raise ParameterError(f"delta must lie in (0, 1/2), got {d}")
    return d


def verdict_for_density(density: Fraction, delta: Fraction) -> HomogeneityVerdict:
    return HomogeneityVerdict(
        density=density,
        dominant_value=1 if density >= Fraction(1, 2) else 0,
        is_delta_homogeneous=density >= 1 - delta or density <= delta,
        delta=delta,
    )


def homogeneity(g: Graph, x: Iterable[int], y: Iterable[int], delta: Any) -> HomogeneityVerdict:
    d = check_delta(delta)
    return verdict_for_density(density_between(g, x, y), d)


# --- Structural transforms ---

def complement(g: Graph) -> Graph:
    full = g.full_mask
    return Graph._trusted(g.n, [full ^ row ^ (1 << v) for v, row in enumerate(g.rows)])


def permute(g: Graph, order: Sequence[int]) -> Graph:
    """Graph whose vertex i is vertex order[i] of g; order may be a subset."""
    position = {v: i for i, v in enumerate(order)}
    mask = mask_of(order)
    rows = []
    for v in order:
        row = 0
        for u in members_of(g.rows[v] & mask):
            row |= 1 << position[u]
        rows.append(row)
    return Graph._trusted(len(order), rows)


def induced_subgraph(g: Graph, x: Iterable[int]) -> Graph:
    """G[X] reindexed in increasing vertex order."""
    xs = vertex_set(x, g.n)
    if not xs:
        raise DegenerateSetError("induced subgraph needs a non-empty vertex set")
    return permute(g, xs)


class BlowupSpec(BaseModel):
    """Blowup of ``base``: part i has ``sizes[i]`` vertices, is a clique iff g[i] == 1.

    ``g = None`` is the plain blowup (every part independent).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    base: Graph
    g: tuple[int, ...] | None = None
    sizes: tuple[int, ...]

    @model_validator(mode="after")
    def _shape(self):
        if len(self.sizes) != self.base.n:
            raise ParameterError(f"need {self.base.n} part sizes, got {len(self.sizes)}")
        if any(s < 1 for s in self.sizes):
            raise ParameterError("every blowup part needs at least one vertex")
        if self.g is not None:
            if len(self.g) != self.base.n or any(v not in (0, 1) for v in self.g):
                raise ParameterError("g must assign 0 or 1 to every base vertex")
        return self

    @classmethod
    def uniform(cls, base: Graph, s: int, g: Sequence[int] | None = None) -> "BlowupSpec":
        return cls(base=base, g=None if g is None else tuple(g), sizes=(s,) * base.n)


def blowup_parts(spec: BlowupSpec) -> tuple[VertexSet, ...]:
    """Part i occupies a contiguous index range; ranges follow base-vertex order."""
    parts, start = [], 0
    for size in spec.sizes:
        parts.append(tuple(range(start, start + size)))
        start += size
    return tuple(parts)


def blowup(spec: BlowupSpec) -> Graph:
    parts = blowup_parts(spec)
    part_masks = [mask_of(p) for p in parts]
    rows = []
    for i, part in enumerate(parts):
        across = 0
        for j in spec.base.neighbors(i):
            across |= part_masks[j]
        clique = spec.g is not None and spec.g[i] == 1
        for v in part:
            rows.append(across | (part_masks[i] ^ (1 << v) if clique else 0))
    return Graph._trusted(sum(spec.sizes), rows)


class Equipartition(BaseModel):
    n: int
    parts: tuple[VertexSet, ...]

    @model_validator(mode="after")
    def _cover(self):
        seen = 0
        for part in self.parts:
            if not part:
                raise ParameterError("equipartition parts must be non-empty")
            mask = mask_of(part)
            if seen & mask:
                raise ParameterError("equipartition parts must be pairwise disjoint")
            seen |= mask
        if seen != (1 << self.n) - 1:
            raise ParameterError(f"equipartition parts must cover 0..{self.n - 1}")
        sizes = [len(p) for p in self.parts]
        if max(sizes) - min(sizes) > 1:
            raise ParameterError("equipartition part sizes must differ by at most one")
        return self

    @property
    def q(self) -> int:
        return len(self.parts)


def equipartition(g: Graph, q: int, seed) -> Equipartition:
    """Seeded random equipartition; the first n mod q parts get the extra vertex."""
    if not 1 <= q <= g.n:
        raise ParameterError(f"part count must lie in 1..{g.n}, got {q}")
    order = np.random.default_rng(seed).permutation(g.n).tolist()
    base, extra = divmod(g.n, q)
    parts, start = [], 0
    for i in range(q):
        size = base + (1 if i < extra else 0)
        parts.append(vertex_set(order[start:start + size]))
        start += size
    return Equipartition(n=g.n, parts=tuple(parts))


# --- Canonical forms ---

def _refined_colors(g: Graph) -> list[int]:
    """Stable colour refinement started from degrees; colours are isomorphism invariant."""
    colors = g.degrees()
    while True:
        signatures = [
            (colors[v], tuple(sorted(colors[u] for u in g.neighbors(v)))) for v in range(g.n)
        ]
        ranking = {sig: i for i, sig in enumerate(sorted(set(signatures)))}
        refined = [ranking[sig] for sig in signatures]
        if len(set(refined)) == len(set(colors)):
            return refined
        colors = refined


def _twin_masks(g: Graph) -> list[int]:
    """For each v, the mask of smaller twins u (same neighbourhood apart from each other)."""
    out = []
    for v in range(g.n):
        smaller = 0
        for u in range(v):
            if g.rows[u] & ~(1 << v) == g.rows[v] & ~(1 << u):
                smaller |= 1 << u
        out.append(smaller)
    return out


def canonical_order(g: Graph) -> list[int]:
    """Vertex order minimising the row-by-row lower-triangle adjacency key."""
    colors = _refined_colors(g)
    cell_of_position = sorted(colors)
    twins = _twin_masks(g)
    best_key: list[int] | None = None
    best_order: list[int] = []
    order: list[int] = []
    key: list[int] = []

    def extend(placed: int) -> None:
        nonlocal best_key, best_order
        j = len(order)
        if j == g.n:
            if best_key is None or key < best_key:
                best_key, best_order = list(key), list(order)
            return
        for v in range(g.n):
            if placed >> v & 1 or colors[v] != cell_of_position[j]:
                continue
            if twins[v] & ~placed:
                continue
            row = 0
            for u in order:
                row = (row << 1) | (g.rows[v] >> u & 1)
            if best_key is not None and (key + [row]) > best_key[: j + 1]:
                continue
            order.append(v)
            key.append(row)
            extend(placed | 1 << v)
            order.pop()
            key.pop()

    extend(0)
    return best_order


def canonical_form(g: Graph) -> Graph:
    return permute(g, canonical_order(g))


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count != h.edge_count or sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_form(g) == canonical_form(h)
