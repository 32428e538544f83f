"""
The one-sided sampling tester, Monte-Carlo detection rates, farness
certificates and the experiment harness built on them.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations
from typing import Callable, Literal, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel
from scipy.stats import norm

from removal_lab.certificates import PackingCertificate, check_certificate
from removal_lab.config import DEFAULT_BUDGETS, Budgets
from removal_lab.construct import HardInstance, Theorem5Family
from removal_lab.count import (
    CopyRecord,
    Mode,
    Packing,
    count_induced_bipartite_copies,
    find_copy,
    find_induced_bipartite_copy,
    find_induced_copy,
    greedy_pair_disjoint_packing,
    is_copy,
)
from removal_lab.errors import ConditionError, ParameterError, ScaleError
from removal_lab.formats import Graph6, to_graph6
from removal_lab.graph import (
    BlowupSpec,
    Count,
    Graph,
    Rational,
    VertexSet,
    as_rational,
    blowup,
    density_between,
    vertex_set,
)
from removal_lab.homomorphism import find_homomorphism
from removal_lab.recognize import BipartitePattern, GraphFamily

logger = logging.getLogger(__name__)

Family = Union[GraphFamily, Theorem5Family]

TWO_THIRDS = Fraction(2, 3)


class TesterVerdict(BaseModel):
    accepted: bool
    sample: VertexSet
    witness: CopyRecord | None = None


class TestReport(BaseModel):
    __test__ = False

    q: int
    trials: int
    rejections: int
    frequency: float
    ci_low: float
    ci_high: float
    seed: int
    family: str
    instance: str
    meets_two_thirds: bool


class FarnessCertificate(BaseModel):
    kind: Literal["packing-lower-bound", "exact"]
    value: Count
    epsilon_equivalent: Rational
    pattern: Graph6 | None = None
    packing: Packing | None = None


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Two-sided Wilson score interval for a binomial frequency."""
    if trials < 1:
        raise ParameterError("a frequency needs at least one trial")
    z = float(norm.ppf(0.5 + confidence / 2))
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def family_label(family: Family) -> str:
    if isinstance(family, Theorem5Family):
        return " + ".join(family.describe())
    if family.name:
        return family.name
    return ",".join(to_graph6(g) for g in family.members)


def find_forbidden(
    g: Graph, family: Family, within: VertexSet | None = None, budgets: Budgets = DEFAULT_BUDGETS
) -> CopyRecord | None:
    """An induced member inside G[within]; symbolic families use their own matcher."""
    if isinstance(family, Theorem5Family):
        return family.find_in(g, within, budgets)
    return find_induced_copy(g, family, within, budgets)


def sample_vertices(n: int, q: int, seed) -> VertexSet:
    """The first q entries of a seeded permutation, so samples grow by prefixes."""
    if not 0 <= q <= n:
        raise ParameterError(f"sample size must lie in 0..{n}, got {q}")
    order = np.random.default_rng(seed).permutation(n)[:q]
    return vertex_set(order.tolist())


def sample_tester(g: Graph, family: Family, q: int, seed, budgets: Budgets = DEFAULT_BUDGETS) -> TesterVerdict:
    """
    Sample q distinct vertices and reject iff they span an induced member of the family.

    Raises:
        ParameterError: If q > n.
    """
    sample = sample_vertices(g.n, q, seed)
    witness = find_forbidden(g, family, sample, budgets)
    return TesterVerdict(accepted=witness is None, sample=sample, witness=witness)


def _run_trials(trials: int, seed: int, threads: int, trial: Callable[[np.random.SeedSequence], bool]) -> int:
    """Number of trials returning True; one spawned seed per trial, in submission order."""
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    seeds = np.random.SeedSequence(seed).spawn(trials)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return sum(pool.map(trial, seeds))


def _report(q: int, trials: int, hits: int, seed: int, family: str, instance: str) -> TestReport:
    low, high = wilson_interval(hits, trials)
    return TestReport(
        q=q,
        trials=trials,
        rejections=hits,
        frequency=hits / trials,
        ci_low=low,
        ci_high=high,
        seed=seed,
        family=family,
        instance=instance,
        meets_two_thirds=low >= TWO_THIRDS,
    )


def detection_probability(
    g: Graph,
    family: Family,
    q: int,
    trials: int,
    seed: int,
    threads: int = 1,
    instance: str | None = None,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> TestReport:
    """
    Rejection frequency of sample_tester over independent trials, with a 95%
    Wilson interval. The result does not depend on ``threads``.
    """
    if q > g.n:
        raise ParameterError(f"sample size {q} exceeds n = {g.n}")

    def trial(child: np.random.SeedSequence) -> bool:
        return not sample_tester(g, family, q, child, budgets).accepted

    hits = _run_trials(trials, seed, threads, trial)
    report = _report(q, trials, hits, seed, family_label(family), instance or repr(g))
    logger.info("q=%d: %d/%d rejections", q, hits, trials)
    return report


# --- Farness certificates ---

def epsilon_far_lower_bound(
    g: Graph,
    family: GraphFamily,
    certificate: PackingCertificate | None = None,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> FarnessCertificate:
    """
    Pair-disjoint induced-copy packing size as a lower bound on the edit distance.

    A supplied packing certificate is used once it re-verifies against G;
    otherwise the largest greedy packing over the members is taken.
    """
    n2 = max(1, g.n * g.n)
    if certificate is not None:
        line = check_certificate(g, certificate)
        if not line.passed:
            raise ConditionError(f"packing certificate does not verify: {line.detail}")
        size = len(certificate.packing.copies)
        return FarnessCertificate(
            kind="packing-lower-bound",
            value=size,
            epsilon_equivalent=Fraction(size, n2),
            pattern=certificate.pattern,
            packing=certificate.packing,
        )
    best: tuple[Graph, Packing] | None = None
    for h in family.members:
        if h.n > budgets.pattern_vertices:
            logger.warning("skipping %r in the packing bound: over the pattern cap", h)
            continue
        packing = greedy_pair_disjoint_packing(g, h, "induced", budgets)
        if best is None or len(packing) > len(best[1]):
            best = (h, packing)
    if best is None:
        return FarnessCertificate(kind="packing-lower-bound", value=0, epsilon_equivalent=0)
    h, packing = best
    return FarnessCertificate(
        kind="packing-lower-bound",
        value=len(packing),
        epsilon_equivalent=Fraction(len(packing), n2),
        pattern=h,
        packing=packing,
    )


def _toggle(g: Graph, u: int, v: int) -> Graph:
    rows = list(g.rows)
    rows[u] ^= 1 << v
    rows[v] ^= 1 << u
    return Graph._trusted(g.n, rows)


def _first_copy(g: Graph, family: GraphFamily, mode: Mode, budgets: Budgets) -> tuple[Graph, CopyRecord] | None:
    for h in family.members:
        found = find_copy(g, h, mode, budgets=budgets)
        if found is not None:
            return h, found
    return None


def _editable_pairs(h: Graph, found: CopyRecord, mode: Mode) -> list[tuple[int, int]]:
    phi = found.vertices
    if mode == "subgraph":
        # only deletions can destroy a not necessarily induced copy
        return [tuple(sorted((phi[i], phi[j]))) for i, j in h.edges()]
    return [tuple(sorted(pair)) for pair in combinations(phi, 2)]


def exact_edit_distance(
    g: Graph, family: GraphFamily, mode: Mode = "induced", budgets: Budgets = DEFAULT_BUDGETS
) -> FarnessCertificate:
    """
    Fewest edge flips making G free of the family.

    Iterative deepening from the greedy packing bound: every solution must flip
    a pair of the first remaining copy, and pairs already decided in earlier
    branches stay frozen.

    Raises:
        ScaleError: If n is over the exhaustive cap.
    """
    if g.n > budgets.edit_distance_vertices:
        raise ScaleError(f"exact edit distance is capped at {budgets.edit_distance_vertices} vertices, got {g.n}")
    nodes = 0

    def solvable(current: Graph, left: int, frozen: frozenset) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budgets.backtracking_nodes:
            raise ScaleError("edit distance search exceeded the node budget")
        found = _first_copy(current, family, mode, budgets)
        if found is None:
            return True
        if left == 0:
            return False
        tried = set(frozen)
        for u, v in _editable_pairs(*found, mode):
            if (u, v) in tried:
                continue
            if solvable(_toggle(current, u, v), left - 1, frozenset(tried | {(u, v)})):
                return True
            tried.add((u, v))
        return False

    floor = max(
        (len(greedy_pair_disjoint_packing(g, h, mode, budgets)) for h in family.members if h.n <= g.n),
        default=0,
    )
    distance = floor
    while not solvable(g, distance, frozenset()):
        distance += 1
    logger.debug("exact %s edit distance %d (packing floor %d)", mode, distance, floor)
    return FarnessCertificate(kind="exact", value=distance, epsilon_equivalent=Fraction(distance, max(1, g.n * g.n)))


# --- Experiments ---

class CountingLemmaReport(BaseModel):
    sample_size: int
    sample: TestReport
    transversal_trials: int
    transversal_frequency: float


def _check_counting_hypothesis(g: Graph, f: Graph, w: Sequence[VertexSet], lam: Fraction) -> None:
    r = f.n
    if len(w) != r:
        raise ConditionError(f"need one set per pattern vertex, got {len(w)} for {r}")
    seen: set[int] = set()
    for i, part in enumerate(w):
        if seen & set(part):
            raise ConditionError("the sets W_i must be pairwise disjoint")
        seen |= set(part)
        if len(part) < lam * g.n:
            raise ConditionError(f"|W_{i}| = {len(part)} is below lambda*n = {lam * g.n}")
    slack = Fraction(1, 2 * r * r)
    for i, j in combinations(range(r), 2):
        d = density_between(g, w[i], w[j])
        if f.has_edge(i, j) and d < 1 - slack:
            raise ConditionError(f"d(W_{i}, W_{j}) = {d} is below 1 - 1/(2r^2)")
        if not f.has_edge(i, j) and d > slack:
            raise ConditionError(f"d(W_{i}, W_{j}) = {d} is above 1/(2r^2)")


def counting_lemma_experiment(
    g: Graph,
    f: Graph,
    w: Sequence[Sequence[int]],
    lam,
    trials: int,
    seed: int,
    threads: int = 1,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> CountingLemmaReport:
    """
    How often a sample of ceil(9r/lambda) vertices spans an induced F, next to
    how often one uniform vertex from each W_i does.

    Raises:
        ConditionError: If the sets or cross densities miss the hypothesis.
    """
    lam = as_rational(lam)
    if not 0 < lam <= 1:
        raise ParameterError(f"lambda must lie in (0, 1], got {lam}")
    sets = [vertex_set(s, g.n) for s in w]
    _check_counting_hypothesis(g, f, sets, lam)
    q = math.ceil(9 * f.n / lam)
    if q > g.n:
        raise ParameterError(f"sample size {q} exceeds n = {g.n}", suggestion=f"use at least {q} vertices")
    sample = detection_probability(g, GraphFamily.of(f), q, trials, seed, threads, budgets=budgets)

    def transversal(child: np.random.SeedSequence) -> bool:
        rng = np.random.default_rng(child)
        picks = [part[int(rng.integers(len(part)))] for part in sets]
        return is_copy(g, f, picks, "induced")

    hits = _run_trials(trials, seed + 1, threads, transversal)
    return CountingLemmaReport(
        sample_size=q,
        sample=sample,
        transversal_trials=trials,
        transversal_frequency=hits / trials,
    )


def claim3_experiment(
    g: Graph,
    pattern: BipartitePattern,
    alpha,
    trials: int,
    seed: int,
    threads: int = 1,
    assume_precondition: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> TestReport:
    """
    Frequency of an induced bipartite copy in samples of ceil(4k/alpha) vertices.

    Unless ``assume_precondition`` is set, G must be shown to hold at least
    alpha*n^(2k) labeled induced bipartite copies.

    Raises:
        ConditionError: If the copy count is too small or cannot be computed.
    """
    a = as_rational(alpha)
    if not 0 < a < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {a}")
    k = max(pattern.s_size, pattern.t_size)
    if not assume_precondition:
        try:
            copies = count_induced_bipartite_copies(g, pattern, budgets)
        except ScaleError as e:
            raise ConditionError(f"cannot verify the copy count ({e}); assert it explicitly")
        if copies < a * g.n ** (2 * k):
            raise ConditionError(f"only {copies} induced bipartite copies, need alpha*n^{2 * k}")
    q = math.ceil(4 * k / a)
    if q > g.n:
        raise ParameterError(f"sample size {q} exceeds n = {g.n}", suggestion="use a larger alpha or graph")

    def trial(child: np.random.SeedSequence) -> bool:
        sample = sample_vertices(g.n, q, child)
        return find_induced_bipartite_copy(g, pattern, sample, budgets) is not None

    hits = _run_trials(trials, seed, threads, trial)
    return _report(q, trials, hits, seed, f"bipartite {pattern.s_size}+{pattern.t_size}", repr(g))


class CurveInstance(BaseModel):
    name: str
    graph: Graph6
    epsilon: Rational | None = None

    @classmethod
    def from_hard(cls, name: str, instance: HardInstance) -> "CurveInstance":
        return cls(name=name, graph=instance.graph, epsilon=instance.epsilon)


def tester_curve(
    instances: Sequence[CurveInstance],
    family: Family,
    q_grid: Sequence[int],
    trials: int,
    seed: int,
    threads: int = 1,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """
    Least grid sample size q* whose lower Wilson bound reaches 2/3, per instance.

    Returns:
        The summary (instance, n, epsilon, q_star, censored) and the per-q
        frequency rows. Instances never detected are censored with q_star None.
    """
    grid = sorted(set(q_grid))
    summary, rows = [], []
    for inst in instances:
        q_star = None
        for q in grid:
            if q > inst.graph.n:
                break
            report = detection_probability(inst.graph, family, q, trials, seed, threads, inst.name, budgets)
            rows.append({
                "instance": inst.name,
                "q": q,
                "frequency": report.frequency,
                "ci_low": report.ci_low,
                "ci_high": report.ci_high,
            })
            if report.meets_two_thirds:
                q_star = q
                break
        summary.append({
            "instance": inst.name,
            "n": inst.graph.n,
            "epsilon": None if inst.epsilon is None else str(inst.epsilon),
            "q_star": q_star,
            "censored": q_star is None,
        })
    summary_frame = pd.DataFrame(summary, columns=["instance", "n", "epsilon", "q_star", "censored"])
    summary_frame["q_star"] = summary_frame["q_star"].astype("Int64")
    frequency_frame = pd.DataFrame(rows, columns=["instance", "q", "frequency", "ci_low", "ci_high"])
    return summary_frame, frequency_frame


class Lemma15Report(BaseModel):
    n: int
    k: int
    mode: Mode
    target: Rational
    certificate: FarnessCertificate
    measured: Rational
    meets_target: bool


def lemma15_experiment(
    k_graph: Graph, f_graph: Graph, n: int, mode: Mode = "subgraph", budgets: Budgets = DEFAULT_BUDGETS
) -> Lemma15Report:
    """
    Farness of the n/k-blowup of K from F-freeness against 1/(2k^2).

    Exact below the edit-distance cap, a greedy packing bound above it.

    Raises:
        ConditionError: If F has no homomorphism into K.
    """
    if find_homomorphism(f_graph, k_graph, budgets) is None:
        raise ConditionError("F has no homomorphism into K")
    k = k_graph.n
    b = n // k
    if b < 1:
        raise ParameterError(f"n = {n} is smaller than |V(K)| = {k}")
    g = blowup(BlowupSpec.uniform(k_graph, b))
    family = GraphFamily.of(f_graph)
    if g.n <= budgets.edit_distance_vertices:
        cert = exact_edit_distance(g, family, mode, budgets)
    else:
        packing = greedy_pair_disjoint_packing(g, f_graph, mode, budgets)
        cert = FarnessCertificate(
            kind="packing-lower-bound",
            value=len(packing),
            epsilon_equivalent=Fraction(len(packing), g.n * g.n),
            pattern=f_graph,
            packing=packing,
        )
    target = Fraction(1, 2 * k * k)
    return Lemma15Report(
        n=g.n,
        k=k,
        mode=mode,
        target=target,
        certificate=cert,
        measured=cert.epsilon_equivalent,
        meets_target=cert.epsilon_equivalent >= target,
    )
