"""
Machine-checkable certificates shipped with generated graphs, and their
independent verification.
"""
import logging
from itertools import combinations
from typing import Annotated, Literal, Sequence, Union

from pydantic import BaseModel, Field

from removal_lab.count import Mode, Packing, packing_problems
from removal_lab.errors import ParameterError
from removal_lab.formats import Graph6
from removal_lab.graph import Count, Graph, VertexSet, mask_of, members_of
from removal_lab.homomorphism import HomMap, is_homomorphism
from removal_lab.recognize import is_clique, is_independent

logger = logging.getLogger(__name__)


class PackingCertificate(BaseModel):
    kind: Literal["packing"] = "packing"
    pattern: Graph6
    mode: Mode = "induced"
    packing: Packing
    minimum: Count = 0


class StructureCertificate(BaseModel):
    """Eight parts: odd parts cliques, even parts independent, edges only between cyclically consecutive parts."""
    kind: Literal["structure"] = "structure"
    parts: list[VertexSet]


class HomomorphismCertificate(BaseModel):
    kind: Literal["homomorphism"] = "homomorphism"
    target: Graph6
    map: HomMap


class RegistryClique(BaseModel):
    x: int
    s: int
    vertices: tuple[int, ...]


class LayeredCertificate(BaseModel):
    """Layers as (start, size) ranges plus the registry of cliques whose union is the graph."""
    kind: Literal["layered"] = "layered"
    h: int
    m: int
    behrend: tuple[int, ...]
    layers: list[tuple[int, int]]
    cliques: list[RegistryClique]
    minimum_cliques: Count = 0


class OddGirthCertificate(BaseModel):
    """The graph is the plain blowup of C_k over ``classes`` (contiguous (start, size) ranges)."""
    kind: Literal["odd-girth"] = "odd-girth"
    k: int
    classes: list[tuple[int, int]]


Certificate = Annotated[
    Union[PackingCertificate, StructureCertificate, HomomorphismCertificate, LayeredCertificate, OddGirthCertificate],
    Field(discriminator="kind"),
]


class CheckLine(BaseModel):
    kind: str
    passed: bool
    detail: str


# --- Structural checks ---

def _is_partition(n: int, parts: Sequence[Sequence[int]]) -> bool:
    seen = 0
    for part in parts:
        mask = mask_of(part)
        if seen & mask or len(set(part)) != len(part) or any(not 0 <= v < n for v in part):
            return False
        seen |= mask
    return seen == (1 << n) - 1


def structure_problems(g: Graph, parts: Sequence[Sequence[int]]) -> list[str]:
    if len(parts) != 8 or not _is_partition(g.n, parts):
        raise ParameterError("the structural witness must be a partition of V(G) into 8 parts")
    problems = []
    masks = [mask_of(p) for p in parts]
    for i, part in enumerate(parts):
        # parts are numbered from 1: X_1, X_3, X_5, X_7 are cliques
        if i % 2 == 0 and not is_clique(g, part):
            problems.append(f"part X_{i + 1} is not a clique")
        if i % 2 == 1 and not is_independent(g, part):
            problems.append(f"part X_{i + 1} is not independent")
    for i, j in combinations(range(8), 2):
        if (j - i) % 8 in (1, 7):
            continue
        if any(g.rows[v] & masks[j] for v in parts[i]):
            problems.append(f"edges between non-consecutive parts X_{i + 1} and X_{j + 1}")
    return problems


def structural_c8_checker(g: Graph, parts: Sequence[Sequence[int]]) -> bool:
    """
    True iff X_1, X_3, X_5, X_7 are cliques, X_2, X_4, X_6, X_8 independent and
    edges run only between cyclically consecutive parts.

    Raises:
        ParameterError: If parts is not a partition of V(G) into 8 sets.
    """
    return not structure_problems(g, parts)


def layered_problems(g: Graph, cert: LayeredCertificate) -> list[str]:
    problems = []
    layer_masks = [mask_of(range(start, start + size)) for start, size in cert.layers]
    if len(cert.layers) != cert.h or not _is_partition(g.n, [range(s, s + z) for s, z in cert.layers]):
        return ["layers do not partition the vertex set into h parts"]
    for j, mask in enumerate(layer_masks, start=1):
        if any(g.rows[v] & mask for v in members_of(mask)):
            problems.append(f"layer V_{j} is not independent")
    pair_owner: dict[tuple[int, int], int] = {}
    for index, clique in enumerate(cert.cliques):
        vs = clique.vertices
        if len(vs) != cert.h or not all(0 <= vs[j] < g.n and layer_masks[j] >> vs[j] & 1 for j in range(cert.h)):
            problems.append(f"clique {index} does not take its j-th vertex from layer V_j")
            continue
        if not is_clique(g, vs):
            problems.append(f"clique {index} {vs} is not a clique of the graph")
        for pair in combinations(sorted(vs), 2):
            if pair in pair_owner:
                problems.append(f"cliques {pair_owner[pair]} and {index} share the pair {pair}")
            pair_owner[pair] = index
    if g.edge_count != len(pair_owner):
        problems.append(f"graph has {g.edge_count} edges but the cliques cover {len(pair_owner)} pairs")
    if len(cert.cliques) < cert.minimum_cliques:
        problems.append(f"only {len(cert.cliques)} cliques, need {cert.minimum_cliques}")
    return problems


def odd_girth_problems(g: Graph, cert: OddGirthCertificate) -> list[str]:
    if cert.k < 3 or cert.k % 2 == 0:
        return [f"k must be odd and at least 3, got {cert.k}"]
    if len(cert.classes) != cert.k or not _is_partition(g.n, [range(s, s + z) for s, z in cert.classes]):
        return ["classes do not partition the vertex set into k parts"]
    masks = [mask_of(range(s, s + z)) for s, z in cert.classes]
    problems = []
    for i, (start, size) in enumerate(cert.classes):
        expected = masks[(i - 1) % cert.k] | masks[(i + 1) % cert.k]
        if any(g.rows[v] != expected for v in range(start, start + size)):
            problems.append(f"class {i} is not joined exactly to classes {(i - 1) % cert.k} and {(i + 1) % cert.k}")
    return problems


def odd_girth(g: Graph) -> int | None:
    """Length of a shortest odd cycle, by breadth-first layering from every vertex."""
    best = None
    for root in range(g.n):
        seen = layer = 1 << root
        depth = 0
        while layer and (best is None or 2 * depth + 1 < best):
            if any(g.rows[v] & layer for v in members_of(layer)):
                best = 2 * depth + 1
                break
            following = 0
            for v in members_of(layer):
                following |= g.rows[v]
            layer = following & ~seen
            seen |= layer
            depth += 1
    return best


# --- Verification ---

def check_certificate(g: Graph, cert: Certificate) -> CheckLine:
    if isinstance(cert, PackingCertificate):
        problems = packing_problems(g, cert.pattern, cert.packing, cert.mode)
        if len(cert.packing.copies) < cert.minimum:
            problems.append(f"packing has {len(cert.packing.copies)} copies, need {cert.minimum}")
        ok_detail = f"{len(cert.packing.copies)} {cert.packing.disjointness} {cert.mode} copies (need {cert.minimum})"
    elif isinstance(cert, StructureCertificate):
        try:
            problems = structure_problems(g, cert.parts)
        except ParameterError as e:
            problems = [str(e)]
        ok_detail = "8-part consecutive structure holds"
    elif isinstance(cert, HomomorphismCertificate):
        ok = is_homomorphism(g, cert.target, cert.map.assignment)
        problems = [] if ok else ["map does not preserve every edge"]
        ok_detail = f"homomorphism onto a {cert.target.n}-vertex target"
    elif isinstance(cert, LayeredCertificate):
        problems = layered_problems(g, cert)
        ok_detail = f"{cert.h} independent layers, {len(cert.cliques)} edge-disjoint cliques"
    else:
        problems = odd_girth_problems(g, cert)
        ok_detail = f"exact blowup of C_{cert.k}, no odd cycle shorter than {cert.k}"
    if problems:
        return CheckLine(kind=cert.kind, passed=False, detail="; ".join(problems[:5]))
    return CheckLine(kind=cert.kind, passed=True, detail=ok_detail)


def verify_certificates(g: Graph, certificates: Sequence[Certificate]) -> list[CheckLine]:
    """One pass/fail line per certificate."""
    if not certificates:
        logger.warning("no certificates to verify; passing vacuously")
    return [check_certificate(g, cert) for cert in certificates]
