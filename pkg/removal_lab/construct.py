"""
Generators: convex-free integer sets, layered clique graphs and the hard
instances built from them. Every generator re-verifies its own certificates.
"""
import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Literal, Sequence

import numpy as np
from pydantic import BaseModel

from removal_lab.certificates import (
    Certificate,
    HomomorphismCertificate,
    LayeredCertificate,
    OddGirthCertificate,
    PackingCertificate,
    RegistryClique,
    StructureCertificate,
    check_certificate,
    layered_problems,
    structural_c8_checker,
)
from removal_lab.config import DEFAULT_BUDGETS, Budgets
from removal_lab.count import CopyRecord, Packing, count_layered_cycles, find_copy, iter_copies, iter_layered_cycles, tuple_collection
from removal_lab.errors import ConditionError, ConsistencyError, InfeasibleDeltaError, ParameterError
from removal_lab.formats import Graph6
from removal_lab.graph import (
    BlowupSpec,
    Count,
    Graph,
    Rational,
    VertexSet,
    as_rational,
    blowup,
    cycle_graph,
    is_isomorphic,
    m_graph,
    mask_of,
    permute,
)
from removal_lab.homomorphism import HomMap, core
from removal_lab.recognize import is_bipartite

logger = logging.getLogger(__name__)

__all__ = [
    "BehrendSet",
    "ConvexCheck",
    "HardInstance",
    "LayeredCliqueGraph",
    "Theorem5Family",
    "behrend_set",
    "core_copies_transversal",
    "layered_cycles_in_cliques",
    "odd_cycle_blowup_instance",
    "rs_graph",
    "structural_c8_checker",
    "theorem13_instance",
    "theorem4_instance",
    "theorem5_family",
    "verify_convex_free",
]


# --- Convex-free sets ---

class ConvexViolation(BaseModel):
    """coefficients . values == sum(coefficients) * target, with values not all equal."""
    coefficients: tuple[int, ...]
    values: tuple[int, ...]
    target: int


class ConvexCheck(BaseModel):
    mode: Literal["exhaustive", "sampled"]
    checked: Count
    violations: list[ConvexViolation]

    @property
    def passed(self) -> bool:
        return not self.violations


class BehrendSet(BaseModel):
    m: int
    k: int
    members: tuple[int, ...]
    base: int
    digits: int
    digit_cap: int
    shell: int
    check: ConvexCheck

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.members), self.m)


def _coefficient_tuples(k: int) -> list[tuple[int, ...]]:
    """All (a_1..a_l) with 2 <= l <= k, a_i >= 1 and sum <= k, shortest first."""
    out: list[tuple[int, ...]] = []

    def extend(prefix: list[int], length: int, room: int) -> None:
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        left = length - len(prefix) - 1
        for a in range(1, room - left + 1):
            prefix.append(a)
            extend(prefix, length, room - a)
            prefix.pop()

    for length in range(2, k + 1):
        extend([], length, k)
    return out


def _solution(coefficients: Sequence[int], values: Sequence[int], lookup: set[int]) -> int | None:
    if all(v == values[0] for v in values):
        return None
    total = sum(a * s for a, s in zip(coefficients, values))
    weight = sum(coefficients)
    if total % weight == 0 and total // weight in lookup:
        return total // weight
    return None


def verify_convex_free(
    s: Sequence[int],
    k: int,
    budget: int | None = None,
    samples: int | None = None,
    seed: int = 0,
    max_violations: int = 20,
) -> ConvexCheck:
    """
    Look for nontrivial solutions of a_1 s_1 + ... + a_l s_l = (a_1 + ... + a_l) s_{l+1}
    with 2 <= l <= k and a_1 + ... + a_l <= k.

    Enumerates exhaustively while the work fits ``budget``; otherwise checks
    ``samples`` random coefficient/value draws and reports mode "sampled".
    """
    budget = DEFAULT_BUDGETS.convex_enumeration if budget is None else budget
    samples = DEFAULT_BUDGETS.convex_samples if samples is None else samples
    members = sorted(set(s))
    lookup = set(members)
    coefficient_tuples = _coefficient_tuples(k)
    work = sum(len(members) ** len(c) for c in coefficient_tuples)
    violations: list[ConvexViolation] = []
    if work <= budget:
        for coefficients in coefficient_tuples:
            for values in _value_tuples(members, len(coefficients)):
                target = _solution(coefficients, values, lookup)
                if target is not None:
                    violations.append(ConvexViolation(coefficients=coefficients, values=values, target=target))
                    if len(violations) >= max_violations:
                        return ConvexCheck(mode="exhaustive", checked=work, violations=violations)
        return ConvexCheck(mode="exhaustive", checked=work, violations=violations)
    logger.warning("convex check of %d members needs %d steps; sampling %d instead", len(members), work, samples)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        coefficients = coefficient_tuples[int(rng.integers(len(coefficient_tuples)))]
        values = tuple(int(v) for v in rng.choice(members, size=len(coefficients)))
        target = _solution(coefficients, values, lookup)
        if target is not None:
            violations.append(ConvexViolation(coefficients=coefficients, values=values, target=target))
            if len(violations) >= max_violations:
                break
    return ConvexCheck(mode="sampled", checked=samples, violations=violations)


def _value_tuples(members: Sequence[int], length: int) -> Iterator[tuple[int, ...]]:
    if length == 0:
        yield ()
        return
    for head in members:
        for tail in _value_tuples(members, length - 1):
            yield (head,) + tail


def _digit_parameters(m: int, k: int) -> tuple[int, int, int]:
    d = max(1, math.floor(math.sqrt(math.log2(m)) + 0.5))
    b = max(2, math.ceil(m ** (1 / d)))
    while b ** d < m:
        b += 1
    while b > 2 and (b - 1) ** d >= m:
        b -= 1
    return d, b, (b - 1) // k + 1


def _digits(x: int, base: int, count: int) -> list[int] | None:
    out = []
    for _ in range(count):
        x, r = divmod(x, base)
        out.append(r)
    return out if x == 0 else None


def _shell_members(m: int, k: int) -> tuple[int, int, int, int, tuple[int, ...]]:
    d, b, q = _digit_parameters(m, k)
    if q < 2:
        larger = m + 1
        while _digit_parameters(larger, k)[2] < 2:
            larger += 1
        raise ParameterError(
            f"base {b} with {d} digits leaves digit cap {q} < 2 for k = {k}",
            suggestion=f"use m >= {larger}",
        )
    shells: dict[int, list[int]] = {}
    for x in range(1, m + 1):
        digits = _digits(x, b, d)
        if digits is None or any(t >= q for t in digits):
            continue
        shells.setdefault(sum(t * t for t in digits), []).append(x)
    shell = max(shells, key=lambda r: (len(shells[r]), -r))
    return d, b, q, shell, tuple(shells[shell])


def behrend_set(m: int, k: int, budgets: Budgets = DEFAULT_BUDGETS, seed: int = 0) -> BehrendSet:
    """
    Subset of 1..m with only trivial solutions to every convex equation with
    coefficient sum at most k.

    Integers whose base-b digits all lie below q = (b-1)//k + 1 add without
    carries under such weights, so keeping one sphere of digit vectors rules out
    nontrivial solutions. The fullest sphere is kept.

    Raises:
        ParameterError: If m < 2, k < 2, or the digit cap for this m is below 2.
    """
    if m < 2 or k < 2:
        raise ParameterError(f"need m >= 2 and k >= 2, got m={m}, k={k}")
    d, b, q, shell, members = _shell_members(m, k)
    check = verify_convex_free(members, k, budgets.convex_enumeration, budgets.convex_samples, seed)
    if not check.passed:
        raise ConsistencyError(f"digit-shell set for m={m}, k={k} has a nontrivial solution")
    logger.info("behrend m=%d k=%d: d=%d b=%d q=%d shell=%d |S|=%d (%s)", m, k, d, b, q, shell, len(members), check.mode)
    return BehrendSet(m=m, k=k, members=members, base=b, digits=d, digit_cap=q, shell=shell, check=check)


# --- Layered clique graphs ---

class LayeredCliqueGraph(BaseModel):
    """Layers V_1..V_h with |V_j| = j*m, and the edge-disjoint h-cliques A(x, s)."""
    h: int
    m: int
    delta: Rational
    behrend: BehrendSet
    graph: Graph6
    cliques: list[RegistryClique]
    cycle_sequences_checked: int = 0
    max_layered_cycles: Count = 0

    @property
    def r(self) -> int:
        return math.comb(self.h + 1, 2) * self.m

    def offset(self, j: int) -> int:
        return self.m * (j - 1) * j // 2

    def layer(self, j: int) -> VertexSet:
        """Vertices of V_j (1-based); value x of V_j is vertex offset(j) + x - 1."""
        return tuple(range(self.offset(j), self.offset(j) + j * self.m))

    def layer_of(self, v: int) -> int:
        j = 1
        while v >= self.offset(j + 1):
            j += 1
        return j

    def certificate(self) -> LayeredCertificate:
        return LayeredCertificate(
            h=self.h,
            m=self.m,
            behrend=self.behrend.members,
            layers=[(self.offset(j), j * self.m) for j in range(1, self.h + 1)],
            cliques=self.cliques,
            minimum_cliques=math.ceil(self.delta * self.r ** 2),
        )


def _layered_graph(h: int, m: int, members: Sequence[int]) -> tuple[Graph, list[RegistryClique]]:
    r = math.comb(h + 1, 2) * m
    rows = [0] * r
    cliques = []
    for x in range(1, m + 1):
        for s in members:
            # x + j*s sits in layer j+1
            vs = tuple(m * j * (j + 1) // 2 + x + j * s - 1 for j in range(h))
            cliques.append(RegistryClique(x=x, s=s, vertices=vs))
            mask = mask_of(vs)
            for v in vs:
                rows[v] |= mask ^ (1 << v)
    return Graph._trusted(r, rows), cliques


def _dense_enough(h: int, m: int, size: int, delta: Fraction) -> bool:
    return m * size >= delta * (math.comb(h + 1, 2) * m) ** 2


def _feasible(h: int, m: int, delta: Fraction) -> bool:
    try:
        members = _shell_members(m, h - 1)[4]
    except ParameterError:
        return False
    return _dense_enough(h, m, len(members), delta)


def _choose_m(h: int, delta: Fraction, max_m: int) -> int:
    """Scan m upward (unit steps to 64, then doubling) and refine the last gap by bisection."""
    last_bad, m = 1, 2
    while not _feasible(h, m, delta):
        last_bad = m
        m = m + 1 if m < 64 else m * 2
        if m > max_m:
            raise InfeasibleDeltaError(f"no m <= {max_m} gives {math.comb(h + 1, 2)}-scaled clique density {delta}")
    lo, hi = last_bad, m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _feasible(h, mid, delta):
            hi = mid
        else:
            lo = mid
    return hi


def rs_graph(h: int, delta, m_hint: int | None = None, budgets: Budgets = DEFAULT_BUDGETS) -> LayeredCliqueGraph:
    """
    Layered graph whose edges are the union of at least delta*|V|^2 pairwise
    edge-disjoint h-cliques, one vertex per layer.

    Args:
        h: Number of layers (>= 3).
        delta: Required clique density, 0 < delta < 1.
        m_hint: Use this scale instead of searching for one.

    Raises:
        InfeasibleDeltaError: If no scale up to the configured maximum reaches delta.
        ConsistencyError: If the built graph fails its own layer and clique checks.
    """
    if h < 3:
        raise ParameterError(f"need at least 3 layers, got {h}")
    delta = as_rational(delta)
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    m = m_hint if m_hint is not None else _choose_m(h, delta, budgets.rs_max_m)
    s = behrend_set(m, h - 1, budgets)
    if not _dense_enough(h, m, len(s.members), delta):
        raise InfeasibleDeltaError(f"m={m} gives {m * len(s.members)} cliques, below delta*r^2 for delta={delta}")
    graph, cliques = _layered_graph(h, m, s.members)
    result = LayeredCliqueGraph(h=h, m=m, delta=delta, behrend=s, graph=graph, cliques=cliques)
    problems = layered_problems(graph, result.certificate())
    if problems:
        raise ConsistencyError("layered graph failed its checks: " + "; ".join(problems[:3]))
    sequences = _cycle_sequences(h, result.r, budgets)
    worst = 0
    for indices in sequences:
        worst = max(worst, count_layered_cycles(result, indices))
    if worst > result.r ** 2:
        raise ConsistencyError(f"found {worst} layered cycles, more than |V|^2 = {result.r ** 2}")
    logger.info("rs graph h=%d m=%d |S|=%d r=%d cliques=%d", h, m, len(s.members), result.r, len(cliques))
    return result.model_copy(update={"cycle_sequences_checked": len(sequences), "max_layered_cycles": worst})


def _cycle_sequences(h: int, r: int, budgets: Budgets) -> list[tuple[int, ...]]:
    every = [c for t in range(3, h + 1) for c in combinations(range(1, h + 1), t)]
    if r * len(every) <= budgets.backtracking_nodes:
        return every
    logger.warning("checking layered cycles over index triples only (r=%d)", r)
    return list(combinations(range(1, h + 1), 3))


def layered_cycles_in_cliques(r: LayeredCliqueGraph, indices: Sequence[int]) -> bool:
    """Whether every layered cycle over ``indices`` lies inside one registry clique."""
    owners: dict[int, set[int]] = {}
    for index, clique in enumerate(r.cliques):
        for v in clique.vertices:
            owners.setdefault(v, set()).add(index)
    for cycle in iter_layered_cycles(r, indices):
        if not set.intersection(*(owners.get(v, set()) for v in cycle)):
            return False
    return True


# --- Hard instances ---

class HardInstance(BaseModel):
    kind: Literal["thm4", "thm13", "oddcycle"]
    graph: Graph6
    epsilon: Rational
    n: int
    requested_n: int
    forbidden: list[Graph6]
    certificates: list[Certificate]
    r: int | None = None
    rs_m: int | None = None
    c8_upper_bound: Count | None = None
    k_copy_bound: Rational | None = None
    checks: dict[str, bool] = {}

    def certificate(self, kind: str) -> Certificate | None:
        return next((c for c in self.certificates if c.kind == kind), None)


def _scaled_delta(delta: Fraction) -> Fraction:
    if delta >= 1:
        raise InfeasibleDeltaError(f"clique density {delta} is not below 1; use a smaller epsilon")
    return delta


def _blocks(b: int, v: int) -> range:
    return range(v * b, (v + 1) * b)


def _transversal_packing(cliques: Sequence[RegistryClique], b: int, h: int) -> Packing:
    tuples = tuple_collection(b, h)
    copies = [
        CopyRecord(vertices=tuple(clique.vertices[i] * b + t[i] for i in range(h)), induced=True)
        for clique in cliques
        for t in tuples
    ]
    return Packing(copies=copies)


def _ensure(g: Graph, certificates: Sequence[Certificate]) -> None:
    for cert in certificates:
        line = check_certificate(g, cert)
        if not line.passed:
            raise ConsistencyError(f"{cert.kind} certificate failed: {line.detail}")


def _block_count(n: int, r: int) -> int:
    b = n // r
    if b < 1:
        raise ParameterError(f"n = {n} is smaller than |V(R)| = {r}", suggestion=f"use n >= {r}")
    if b * r != n:
        logger.info("rounding n = %d down to %d, a multiple of %d", n, b * r, r)
    return b


def theorem4_instance(n: int, epsilon, budgets: Budgets = DEFAULT_BUDGETS) -> HardInstance:
    """
    Induced-{C8, M}-free-looking instance far from induced {C8, M}-freeness.

    Blow R(8, 64 eps) up by n/r, make the blocks of odd layers cliques, and put a
    plain C8 blowup on the blocks of every registry clique.

    Raises:
        InfeasibleDeltaError: If R(8, 64 eps) cannot be built.
    """
    eps = as_rational(epsilon)
    if eps <= 0:
        raise ParameterError(f"epsilon must be positive, got {eps}")
    rs = rs_graph(8, _scaled_delta(64 * eps), budgets=budgets)
    b = _block_count(n, rs.r)
    n_eff = b * rs.r
    rows = [0] * n_eff
    parts = []
    for j in range(1, 9):
        start, size = rs.offset(j) * b, j * rs.m * b
        part = tuple(range(start, start + size))
        parts.append(part)
        if j % 2 == 1:
            mask = mask_of(part)
            for v in part:
                rows[v] |= mask ^ (1 << v)
    for clique in rs.cliques:
        block_masks = [mask_of(_blocks(b, v)) for v in clique.vertices]
        for i in range(8):
            here, there = clique.vertices[i], clique.vertices[(i + 1) % 8]
            for v in _blocks(b, here):
                rows[v] |= block_masks[(i + 1) % 8]
            for v in _blocks(b, there):
                rows[v] |= block_masks[i]
    g = Graph._trusted(n_eff, rows)
    c8 = cycle_graph(8)
    certificates = [
        StructureCertificate(parts=parts),
        PackingCertificate(
            pattern=c8,
            mode="induced",
            packing=_transversal_packing(rs.cliques, b, 8),
            minimum=math.ceil(eps * n_eff ** 2),
        ),
    ]
    _ensure(g, certificates)
    logger.info("thm4 instance: r=%d b=%d n=%d copies=%d", rs.r, b, n_eff, len(certificates[1].packing.copies))
    return HardInstance(
        kind="thm4",
        graph=g,
        epsilon=eps,
        n=n_eff,
        requested_n=n,
        forbidden=[c8, m_graph()],
        certificates=certificates,
        r=rs.r,
        rs_m=rs.m,
        c8_upper_bound=rs.r ** 2 * b ** 8,
        checks={"structure": structural_c8_checker(g, parts)},
    )


def shortest_odd_cycle(k: Graph) -> tuple[int, ...] | None:
    """Shortest odd cycle, lexicographically least vertex sequence among the shortest."""
    for length in range(3, k.n + 1, 2):
        found = find_copy(k, cycle_graph(length), "subgraph", budgets=_wide(length))
        if found is not None:
            return found.vertices
    return None


def _wide(length: int, budgets: Budgets = DEFAULT_BUDGETS) -> Budgets:
    if length <= budgets.pattern_vertices:
        return budgets
    return budgets.model_copy(update={"pattern_vertices": length})


def theorem13_instance(h_graph: Graph, epsilon, n: int, budgets: Budgets = DEFAULT_BUDGETS) -> HardInstance:
    """
    Instance homomorphic to K = core(H) and eps-far from induced H-freeness.

    H is relabelled so each homomorphism class is a contiguous label range, an
    induced copy of it is put on every clique of R(h, h^2 eps), and the result is
    blown up by n/r.

    Raises:
        ConditionError: If H is bipartite.
    """
    if is_bipartite(h_graph) is not None:
        raise ConditionError("H must be non-bipartite")
    eps = as_rational(epsilon)
    if eps <= 0:
        raise ParameterError(f"epsilon must be positive, got {eps}")
    h = h_graph.n
    cr = core(h_graph, budgets)
    cycle = shortest_odd_cycle(cr.core)
    labels = list(cycle) + [a for a in range(cr.core.n) if a not in cycle]
    label_of = {a: j for j, a in enumerate(labels)}
    order = [v for a in labels for v in range(h) if cr.retraction(v) == a]
    pattern = permute(h_graph, order)
    k_graph = permute(cr.core, labels)
    class_of = [label_of[cr.retraction(v)] for v in order]

    rs = rs_graph(h, _scaled_delta(h * h * eps), budgets=budgets)
    b = _block_count(n, rs.r)
    n_eff = b * rs.r
    base_rows = [0] * rs.r
    for clique in rs.cliques:
        for i, j in pattern.edges():
            u, v = clique.vertices[i], clique.vertices[j]
            base_rows[u] |= 1 << v
            base_rows[v] |= 1 << u
    base = Graph._trusted(rs.r, base_rows)
    g = blowup(BlowupSpec.uniform(base, b))
    assignment = tuple(class_of[rs.layer_of(v // b) - 1] for v in range(n_eff))
    certificates = [
        HomomorphismCertificate(target=k_graph, map=HomMap(assignment=assignment)),
        PackingCertificate(
            pattern=pattern,
            mode="induced",
            packing=_transversal_packing(rs.cliques, b, h),
            minimum=math.ceil(eps * n_eff ** 2),
        ),
    ]
    _ensure(g, certificates)
    logger.info("thm13 instance: h=%d |K|=%d t=%d r=%d n=%d", h, k_graph.n, len(cycle), rs.r, n_eff)
    return HardInstance(
        kind="thm13",
        graph=g,
        epsilon=eps,
        n=n_eff,
        requested_n=n,
        forbidden=[pattern],
        certificates=certificates,
        r=rs.r,
        rs_m=rs.m,
        k_copy_bound=Fraction(math.comb(h, len(cycle)) * n_eff ** k_graph.n, rs.r),
    )


def core_copies_transversal(instance: HardInstance, budgets: Budgets = DEFAULT_BUDGETS) -> bool:
    """Whether every copy of K meets each homomorphism class in exactly one vertex."""
    cert = instance.certificate("homomorphism")
    if cert is None:
        raise ParameterError("instance carries no homomorphism certificate")
    k_graph = cert.target
    for phi in iter_copies(instance.graph, k_graph, "subgraph", budgets=budgets):
        if len({cert.map(v) for v in phi}) != k_graph.n:
            return False
    return True


def odd_cycle_blowup_instance(k: int, n: int, budgets: Budgets = DEFAULT_BUDGETS, exhaustive_n: int = 30) -> HardInstance:
    """
    Plain n/k blowup of C_k: no odd cycle shorter than k and no induced C6.

    Below ``exhaustive_n`` vertices both facts are also checked by search.
    """
    if k < 5 or k % 2 == 0:
        raise ParameterError(f"k must be odd and at least 5, got {k}")
    b = _block_count(n, k)
    g = blowup(BlowupSpec.uniform(cycle_graph(k), b))
    certificates = [OddGirthCertificate(k=k, classes=[(i * b, b) for i in range(k)])]
    _ensure(g, certificates)
    checks = {}
    if g.n <= exhaustive_n:
        checks["no_induced_c6"] = find_copy(g, cycle_graph(6), "induced", budgets=budgets) is None
        checks["no_short_odd_cycle"] = all(
            find_copy(g, cycle_graph(length), "subgraph", budgets=_wide(length, budgets)) is None
            for length in range(3, k, 2)
        )
        if not all(checks.values()):
            raise ConsistencyError(f"exhaustive checks failed on the C_{k} blowup: {checks}")
    return HardInstance(
        kind="oddcycle",
        graph=g,
        epsilon=Fraction(1, 2 * k * k),
        n=g.n,
        requested_n=n,
        forbidden=[cycle_graph(6)],
        certificates=certificates,
        checks=checks,
    )


# --- The symbolic odd-cycle family ---

class CycleLevel(BaseModel):
    """One level SG(C_a) of the family; huge lengths are kept as a = 2**length_exponent + 1."""
    index: int
    length: Count | None = None
    length_exponent: Count | None = None
    epsilon_inverse: Count | None = None
    # samples below 2**sample_floor_log2 vertices see no member of this level
    sample_floor_log2: Count | None = None
    materialized: bool = False


class Theorem5Family(BaseModel):
    """{C6} together with SG(C_a) for every level length a."""
    kind: Literal["theorem5"] = "theorem5"
    levels: list[CycleLevel]
    cap: int

    @property
    def materialized_lengths(self) -> list[int]:
        return [lv.length for lv in self.levels if lv.materialized]

    def describe(self) -> list[str]:
        names = ["C6 (induced)"]
        for lv in self.levels:
            a = str(lv.length) if lv.length is not None else f"2^{lv.length_exponent}+1"
            names.append(f"SG(C_{a})")
        return names

    def find_in(self, g: Graph, within: VertexSet | None = None, budgets: Budgets = DEFAULT_BUDGETS) -> CopyRecord | None:
        """An induced C6, or a not necessarily induced C_a for a materialized a that fits."""
        found = find_copy(g, cycle_graph(6), "induced", within, budgets)
        if found is not None:
            return found
        size = g.n if within is None else len(within)
        for index, lv in enumerate(self.levels, start=1):
            if lv.materialized and lv.length <= size:
                found = find_copy(g, cycle_graph(lv.length), "subgraph", within, _wide(lv.length, budgets))
                if found is not None:
                    return found.model_copy(update={"member": index})
        return None

    def contains_member(self, graph: Graph) -> bool:
        if graph.n == 6 and is_isomorphic(graph, cycle_graph(6)):
            return True
        return any(
            lv.materialized and lv.length == graph.n
            and find_copy(graph, cycle_graph(lv.length), "subgraph", budgets=_wide(lv.length)) is not None
            for lv in self.levels
        )


def _level(index: int, length: int | None, exponent: int | None, cap: int) -> CycleLevel:
    if length is None:
        return CycleLevel(index=index, length_exponent=exponent)
    return CycleLevel(
        index=index,
        length=length,
        epsilon_inverse=2 * (length + 2) ** 2,
        sample_floor_log2=2 * (length + 2) ** 2,
        materialized=length <= cap,
    )


def theorem5_family(levels: int, growth: Sequence[int] | None = None, cap: int = 12) -> Theorem5Family:
    """
    The family {C6} + SG(C_a1) + ... with a_1 = 3 and a_{i+1} = 2^(2(a_i+2)^2) + 1.

    A ``growth`` override (strictly increasing odd lengths >= 3) replaces the
    recurrence; lengths up to ``cap`` are searched for at match time.

    Raises:
        ParameterError: For a bad override or more than three recurrence levels.
    """
    if growth is not None:
        lengths = [int(a) for a in growth]
        if not lengths or any(a < 3 or a % 2 == 0 for a in lengths) or any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ParameterError(f"growth must be a strictly increasing sequence of odd lengths >= 3, got {lengths}")
        return Theorem5Family(levels=[_level(i, a, None, cap) for i, a in enumerate(lengths, start=1)], cap=cap)
    if not 1 <= levels <= 3:
        raise ParameterError(f"levels must lie in 1..3, got {levels}", suggestion="pass a growth override for deeper families")
    out = [_level(1, 3, None, cap)]
    if levels >= 2:
        out.append(_level(2, 2 ** (2 * 5 ** 2) + 1, None, cap))
    if levels >= 3:
        a2 = out[1].length
        out.append(_level(3, None, 2 * (a2 + 2) ** 2, cap))
    return Theorem5Family(levels=out, cap=cap)
