"""
Homogeneous partitions: exact checkers for block and equipartition
homogeneity, a refinement heuristic that looks for one, the pattern-frequency
probe for the other side of the dichotomy, and uniform-family extraction.
"""
import logging
from fractions import Fraction
from itertools import combinations, product
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, model_validator

from removal_lab.config import DEFAULT_BUDGETS, Budgets
from removal_lab.errors import ParameterError, ScaleError
from removal_lab.graph import (
    Equipartition,
    Graph,
    Rational,
    VertexSet,
    check_delta,
    density_between,
    equipartition,
    mask_of,
    vertex_set,
    verdict_for_density,
)
from removal_lab.recognize import ramsey_homogeneous_set

logger = logging.getLogger(__name__)


class BlockPartition(BaseModel):
    """Row parts and column parts of the n x n adjacency matrix."""
    n: int
    rows: tuple[VertexSet, ...]
    cols: tuple[VertexSet, ...]

    @model_validator(mode="after")
    def _covers(self):
        for name, side in (("rows", self.rows), ("cols", self.cols)):
            seen = 0
            for part in side:
                mask = mask_of(part)
                if not part or seen & mask or len(set(part)) != len(part):
                    raise ParameterError(f"{name} parts must be non-empty and pairwise disjoint")
                seen |= mask
            if seen != (1 << self.n) - 1:
                raise ParameterError(f"{name} parts must cover 0..{self.n - 1}")
        return self


class PairVerdict(BaseModel):
    """Block R_i x C_j, or part pair (V_i, V_j) with i < j."""
    i: int
    j: int
    density: Rational
    weight: Rational
    homogeneous: bool


class HomogeneityReport(BaseModel):
    delta: Rational
    non_homogeneous_weight: Rational
    failing_pairs: int
    passed: bool
    verdicts: list[PairVerdict]


def _cell_ones(g: Graph, rows: Sequence[int], col_mask: int) -> int:
    return sum((g.rows[r] & col_mask).bit_count() for r in rows)


def _report(delta: Fraction, verdicts: list[PairVerdict]) -> HomogeneityReport:
    failing = [v for v in verdicts if not v.homogeneous]
    weight = sum((v.weight for v in failing), Fraction(0))
    return HomogeneityReport(
        delta=delta,
        non_homogeneous_weight=weight,
        failing_pairs=len(failing),
        passed=weight <= delta,
        verdicts=verdicts,
    )


def check_block_partition(g: Graph, partition: BlockPartition, delta) -> HomogeneityReport:
    """
    Exact homogeneity of every block R_i x C_j of the adjacency matrix.

    Diagonal entries are 0 and are counted when a block meets the diagonal.
    The report passes iff the blocks that are not delta-homogeneous weigh at most delta.
    """
    d = check_delta(delta)
    if partition.n != g.n:
        raise ParameterError(f"partition is over {partition.n} vertices, graph has {g.n}")
    n2 = g.n * g.n
    verdicts = []
    for i, rows in enumerate(partition.rows):
        for j, cols in enumerate(partition.cols):
            cells = len(rows) * len(cols)
            density = Fraction(_cell_ones(g, rows, mask_of(cols)), cells)
            verdicts.append(PairVerdict(
                i=i,
                j=j,
                density=density,
                weight=Fraction(cells, n2),
                homogeneous=verdict_for_density(density, d).is_delta_homogeneous,
            ))
    return _report(d, verdicts)


def check_equipartition(g: Graph, q: Equipartition, delta) -> HomogeneityReport:
    """
    Weight |V_i||V_j|/n^2 of the unordered part pairs that are not delta-homogeneous.

    Densities inside a part play no role; a single part passes vacuously.
    """
    d = check_delta(delta)
    if q.n != g.n:
        raise ParameterError(f"equipartition is over {q.n} vertices, graph has {g.n}")
    if q.q == 1:
        logger.warning("equipartition has a single part; homogeneity is vacuous")
    n2 = g.n * g.n
    verdicts = []
    for i, j in combinations(range(q.q), 2):
        density = density_between(g, q.parts[i], q.parts[j])
        verdicts.append(PairVerdict(
            i=i,
            j=j,
            density=density,
            weight=Fraction(len(q.parts[i]) * len(q.parts[j]), n2),
            homogeneous=verdict_for_density(density, d).is_delta_homogeneous,
        ))
    return _report(d, verdicts)


# --- Refinement heuristic ---

def _bisect(parts: Sequence[int], keys: dict[int, tuple[int, int]]) -> tuple[VertexSet, VertexSet] | None:
    """Cut the sorted part at the key boundary nearest its middle; None if all keys agree."""
    ordered = sorted(parts, key=lambda v: (keys[v], v))
    cuts = [i for i in range(1, len(ordered)) if keys[ordered[i - 1]] != keys[ordered[i]]]
    if not cuts:
        return None
    cut = min(cuts, key=lambda i: (abs(2 * i - len(ordered)), i))
    return vertex_set(ordered[:cut]), vertex_set(ordered[cut:])


def _split_block(g: Graph, rows: VertexSet, cols: VertexSet) -> tuple[str, tuple[VertexSet, VertexSet]] | None:
    col_mask, row_mask = mask_of(cols), mask_of(rows)
    # rows sharing a neighbourhood into the block stay together
    row_keys = {r: ((g.rows[r] & col_mask).bit_count(), g.rows[r] & col_mask) for r in rows}
    col_keys = {c: ((g.rows[c] & row_mask).bit_count(), g.rows[c] & row_mask) for c in cols}
    sides = [("rows", rows, row_keys), ("cols", cols, col_keys)]
    sides.sort(key=lambda s: -len(s[1]))
    for name, part, keys in sides:
        halves = _bisect(part, keys)
        if halves is not None:
            return name, halves
    return None


def find_homogeneous_partition(
    g: Graph, delta, max_parts: int | None = None, budgets: Budgets = DEFAULT_BUDGETS
) -> tuple[BlockPartition, HomogeneityReport] | None:
    """
    Refine from the trivial 1 x 1 partition until it is delta-homogeneous.

    Each round splits the heaviest failing block along the side whose rows (or
    columns) disagree the most evenly. Gives up once either side would exceed
    ``max_parts`` parts. A returned partition has passed check_block_partition.
    """
    d = check_delta(delta)
    max_parts = budgets.partition_max_parts if max_parts is None else max_parts
    if g.n == 0:
        return None
    rows, cols = [tuple(range(g.n))], [tuple(range(g.n))]
    while True:
        partition = BlockPartition(n=g.n, rows=tuple(rows), cols=tuple(cols))
        report = check_block_partition(g, partition, d)
        if report.passed:
            logger.info("homogeneous partition with %d x %d blocks", len(rows), len(cols))
            return partition, report
        failing = [v for v in report.verdicts if not v.homogeneous]
        worst = max(failing, key=lambda v: (v.weight, -v.i, -v.j))
        split = _split_block(g, rows[worst.i], cols[worst.j])
        if split is None:
            return None
        side, (low, high) = split
        target, index = (rows, worst.i) if side == "rows" else (cols, worst.j)
        if len(target) + 1 > max_parts:
            logger.info("no %s-homogeneous partition within %d parts", d, max_parts)
            return None
        target[index:index + 1] = [low, high]


# --- The pattern side of the dichotomy ---

class PatternProbe(BaseModel):
    branch: Literal["partition", "patterns"]
    k: int
    trials: int = 0
    seed: int = 0
    partition: BlockPartition | None = None
    frequencies: dict[str, float] = {}
    min_pattern: str | None = None
    min_frequency: float | None = None


def pattern_name(bits: int, k: int) -> str:
    """Row-major k x k 0/1 matrix, rows joined by '/'."""
    return "/".join(
        "".join(str(bits >> (i * k + j) & 1) for j in range(k)) for i in range(k)
    )


def afn_dichotomy_probe(
    g: Graph,
    k: int,
    delta,
    trials: int,
    seed: int,
    budgets: Budgets = DEFAULT_BUDGETS,
    try_partition: bool = True,
) -> PatternProbe:
    """
    Either a homogeneous partition, or Monte-Carlo frequencies of every k x k
    pattern over increasing row and column k-tuples.

    Raises:
        ScaleError: If k > 3.
    """
    if k > 3:
        raise ScaleError(f"the full pattern sweep is capped at k = 3, got {k}")
    if k < 1 or trials < 1:
        raise ParameterError(f"need k >= 1 and trials >= 1, got k={k}, trials={trials}")
    if k > g.n:
        raise ParameterError(f"cannot pick {k} rows from {g.n} vertices")
    d = check_delta(delta)
    if try_partition:
        found = find_homogeneous_partition(g, d, budgets=budgets)
        if found is not None:
            return PatternProbe(branch="partition", k=k, partition=found[0])
    rng = np.random.default_rng(seed)
    hits = [0] * (1 << (k * k))
    for _ in range(trials):
        rows = sorted(rng.choice(g.n, size=k, replace=False).tolist())
        cols = sorted(rng.choice(g.n, size=k, replace=False).tolist())
        bits = 0
        for i, j in product(range(k), range(k)):
            if g.rows[rows[i]] >> cols[j] & 1:
                bits |= 1 << (i * k + j)
        hits[bits] += 1
    frequencies = {pattern_name(b, k): hits[b] / trials for b in range(len(hits))}
    weakest = min(range(len(hits)), key=lambda b: (hits[b], b))
    return PatternProbe(
        branch="patterns",
        k=k,
        trials=trials,
        seed=seed,
        frequencies=frequencies,
        min_pattern=pattern_name(weakest, k),
        min_frequency=hits[weakest] / trials,
    )


# --- Checkers for the partition lemmas ---

def claim2_threshold(beta, gamma) -> float:
    """Subsets keeping at least this fraction of each side inherit homogeneity."""
    b, c = check_delta(beta), check_delta(gamma)
    return float(c / b) ** 0.5


def inherits_homogeneity(
    g: Graph, x: Sequence[int], y: Sequence[int], x_sub: Sequence[int], y_sub: Sequence[int], beta, gamma
) -> bool:
    """
    False only when the inheritance claim is contradicted: (X, Y) is
    gamma-homogeneous, the subsets are large enough, and (X', Y') is not
    beta-homogeneous on the same side.
    """
    b, c = check_delta(beta), check_delta(gamma)
    if not set(x_sub) <= set(x) or not set(y_sub) <= set(y):
        raise ParameterError("X' and Y' must be subsets of X and Y")
    # |X'| >= sqrt(c/b)|X|, squared to stay exact
    large = all(len(s) ** 2 * b >= c * len(t) ** 2 for s, t in ((x_sub, x), (y_sub, y)))
    outer = density_between(g, x, y)
    if not large or c < outer < 1 - c:
        return True
    inner = density_between(g, x_sub, y_sub)
    return inner >= 1 - b if outer >= 1 - c else inner <= b


class Lemma6Report(BaseModel):
    exceptional_pairs: int
    allowed_exceptions: Rational
    non_gamma_homogeneous: list[tuple[int, int]]
    undersized_parts: list[int]
    passed: bool


def check_lemma6_output(
    g: Graph, q: Equipartition, u: Sequence[Sequence[int]], delta, gamma, min_size: int = 1
) -> Lemma6Report:
    """
    Check a candidate (Q, U): at most delta*q^2 pairs where (Q_i, Q_j) is not
    delta-homogeneous or (U_i, U_j) has another dominant value; every (U_i, U_j)
    gamma-homogeneous; every |U_i| >= min_size.

    Raises:
        ParameterError: If some U_i is not inside Q_i.
    """
    d, c = check_delta(delta), check_delta(gamma)
    if len(u) != q.q:
        raise ParameterError(f"need one subset per part, got {len(u)} for {q.q} parts")
    us = [vertex_set(s, g.n) for s in u]
    for i, (sub, part) in enumerate(zip(us, q.parts)):
        if not set(sub) <= set(part) or not sub:
            raise ParameterError(f"U_{i} must be a non-empty subset of Q_{i}")
    exceptional, loose = 0, []
    for i, j in combinations(range(q.q), 2):
        outer = verdict_for_density(density_between(g, q.parts[i], q.parts[j]), d)
        inner = verdict_for_density(density_between(g, us[i], us[j]), c)
        if not outer.is_delta_homogeneous or outer.dominant_value != inner.dominant_value:
            exceptional += 1
        if not inner.is_delta_homogeneous:
            loose.append((i, j))
    allowed = d * q.q ** 2
    small = [i for i, sub in enumerate(us) if len(sub) < min_size]
    return Lemma6Report(
        exceptional_pairs=exceptional,
        allowed_exceptions=allowed,
        non_gamma_homogeneous=loose,
        undersized_parts=small,
        passed=exceptional <= allowed and not loose and not small,
    )


# --- Uniform families ---

class UniformFamily(BaseModel):
    sets: list[VertexSet]
    branch: Literal["dense", "sparse"]
    alpha: Rational
    parts: int


def _candidate_part_counts(n: int, m: int) -> list[int]:
    counts, q = [], 4 ** m
    while q < n:
        counts.append(q)
        q *= 2
    return counts + [n]


def find_uniform_family(
    g: Graph, m: int, alpha, budgets: Budgets = DEFAULT_BUDGETS, seed: int = 0, min_size: int = 1
) -> UniformFamily | None:
    """
    m disjoint vertex sets with all pair densities >= 1 - alpha, or all <= alpha.

    Equipartitions with 4^m, 2*4^m, ... parts (and finally singletons) are tried
    in turn: parts with alpha-homogeneous pairs form an auxiliary graph, a greedy
    clique of 4^m parts is colored by dominant value and a Ramsey set of m
    parts is taken. The result is re-checked pair by pair.

    With m < 2 there are no pairs to check: m = 1 gives the whole vertex set
    and m = 0 the empty family, both reported as "dense". ``seed`` fixes the
    equipartition shuffles and ``min_size`` stops before parts get smaller.
    """
    a = check_delta(alpha)
    if m < 0:
        raise ParameterError(f"m must not be negative, got {m}")
    if m < 2:
        sets = [vertex_set(range(g.n))] if m == 1 and g.n > 0 else []
        if len(sets) != m:
            return None
        return UniformFamily(sets=sets, branch="dense", alpha=a, parts=m)
    need = 4 ** m
    if g.n < need:
        logger.info("need %d vertices for m = %d, graph has %d", need, m, g.n)
        return None
    for q in _candidate_part_counts(g.n, m):
        if g.n // q < min_size:
            break
        parts = equipartition(g, q, seed).parts
        ok = [[i != j and verdict_for_density(density_between(g, parts[i], parts[j]), a).is_delta_homogeneous
               for j in range(q)] for i in range(q)]
        clique: list[int] = []
        for i in range(q):
            if all(ok[i][j] for j in clique):
                clique.append(i)
                if len(clique) == need:
                    break
        if len(clique) < need:
            continue
        dense_rows = [0] * need
        for s, t in combinations(range(need), 2):
            if density_between(g, parts[clique[s]], parts[clique[t]]) >= Fraction(1, 2):
                dense_rows[s] |= 1 << t
                dense_rows[t] |= 1 << s
        chosen = ramsey_homogeneous_set(Graph._trusted(need, dense_rows), m)[:m]
        sets = [parts[clique[s]] for s in chosen]
        densities = [density_between(g, x, y) for x, y in combinations(sets, 2)]
        if all(dd >= 1 - a for dd in densities):
            branch = "dense"
        elif all(dd <= a for dd in densities):
            branch = "sparse"
        else:
            continue
        logger.info("uniform %s family of %d sets from %d parts", branch, m, q)
        return UniformFamily(sets=sets, branch=branch, alpha=a, parts=q)
    return None
