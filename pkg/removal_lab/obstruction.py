"""
Bipartite obstructions (patterns whose every completion holds a member of the
family) and bounded blowup-quality witnesses.
"""
import logging
from itertools import combinations, product
from typing import Iterator, Literal

import numpy as np
from pydantic import BaseModel

from removal_lab.config import DEFAULT_BUDGETS, Budgets
from removal_lab.count import find_induced_copy
from removal_lab.errors import ConditionError, ParameterError, ScaleError
from removal_lab.graph import BlowupSpec, Graph, blowup
from removal_lab.recognize import BipartitePattern, GraphFamily, check_family_conditions

logger = logging.getLogger(__name__)


def _free_pairs(pattern: BipartitePattern) -> list[tuple[int, int]]:
    s, t = pattern.s_size, pattern.t_size
    return list(combinations(range(s), 2)) + list(combinations(range(s, s + t), 2))


def completion_count(pattern: BipartitePattern) -> int:
    return 1 << len(_free_pairs(pattern))


def iter_completions(pattern: BipartitePattern, budgets: Budgets = DEFAULT_BUDGETS) -> Iterator[Graph]:
    """
    Every graph on S + T agreeing with the pattern's cross edges, S on vertices
    0..s-1 and T after it. Ordered by the bitmask over the free pairs.

    Raises:
        ScaleError: If there are more completions than the completion cap.
    """
    total = completion_count(pattern)
    if total > budgets.completion_cap:
        raise ScaleError(
            f"{total} completions exceed the cap of {budgets.completion_cap}",
        )
    s = pattern.s_size
    cross = [(i, s + j) for i, j in pattern.cross_edges]
    free = _free_pairs(pattern)
    for bits in range(total):
        inside = [pair for k, pair in enumerate(free) if bits >> k & 1]
        yield Graph.from_edges(s + pattern.t_size, cross + inside)


def verify_bipartite_obstruction(
    pattern: BipartitePattern, family: GraphFamily, budgets: Budgets = DEFAULT_BUDGETS
) -> bool:
    """True iff every completion of the pattern contains an induced member of the family."""
    for index, g in enumerate(iter_completions(pattern, budgets)):
        if find_induced_copy(g, family, budgets=budgets) is None:
            logger.debug("completion %d of %r avoids the family", index, pattern)
            return False
    return True


def search_bipartite_obstruction(
    family: GraphFamily, side: int, attempts: int, seed, budgets: Budgets = DEFAULT_BUDGETS
) -> BipartitePattern | None:
    """
    Random side x side cross patterns, each cross pair present with probability
    1/2; the first one that verifies is returned.

    Raises:
        ConditionError: If the family misses a bipartite, co-bipartite or split member.
        ScaleError: If a pattern of this side has too many completions.
    """
    if side < 1 or attempts < 1:
        raise ParameterError(f"side and attempts must be positive, got {side} and {attempts}")
    if not check_family_conditions(family).thm1_sufficient:
        raise ConditionError("the family needs a bipartite, a co-bipartite and a split member")
    free = 2 * (side * (side - 1) // 2)
    if 1 << free > budgets.completion_cap:
        raise ScaleError(f"2^{free} completions per pattern exceed the cap of {budgets.completion_cap}")
    rng = np.random.default_rng(seed)
    for attempt in range(attempts):
        bits = rng.random((side, side)) < 0.5
        cross = tuple((int(i), int(j)) for i, j in np.argwhere(bits))
        pattern = BipartitePattern(s_size=side, t_size=side, cross_edges=cross)
        if verify_bipartite_obstruction(pattern, family, budgets):
            logger.info("obstruction found after %d attempts", attempt + 1)
            return pattern
    logger.info("no obstruction with side %d in %d attempts", side, attempts)
    return None


class BlowupWitness(BaseModel):
    """g[i] == 1 makes part i a clique. Checked for uniform blowups up to ``verified_up_to``."""
    g: tuple[int, ...]
    verified_up_to: int
    kind: Literal["bounded witness"] = "bounded witness"


def blowup_quality_witness(
    family: GraphFamily, candidate: Graph, s_max: int, budgets: Budgets = DEFAULT_BUDGETS
) -> BlowupWitness | None:
    """
    Least g (lexicographic over {0,1}^n) whose uniform s-blowups of the
    candidate stay induced-family-free for every s <= s_max.

    Raises:
        ConditionError: If the candidate itself holds an induced member.
        ScaleError: If the blowups or the number of maps exceed the budgets.
    """
    if s_max < 1:
        raise ParameterError(f"s_max must be positive, got {s_max}")
    if candidate.n * s_max > budgets.blowup_vertices:
        raise ScaleError(
            f"blowups on {candidate.n * s_max} vertices exceed the cap of {budgets.blowup_vertices}"
        )
    if 1 << candidate.n > budgets.completion_cap:
        raise ScaleError(f"2^{candidate.n} maps exceed the cap of {budgets.completion_cap}")
    if find_induced_copy(candidate, family, budgets=budgets) is not None:
        raise ConditionError("the candidate contains an induced member of the family")
    for g in product((0, 1), repeat=candidate.n):
        # s = 1 is the candidate itself
        if all(
            find_induced_copy(blowup(BlowupSpec.uniform(candidate, s, g)), family, budgets=budgets) is None
            for s in range(2, s_max + 1)
        ):
            return BlowupWitness(g=g, verified_up_to=s_max)
    return None
