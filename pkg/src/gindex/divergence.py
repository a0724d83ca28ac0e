"""Match-based divergence between program DAGs.

Two DAGs are compared by pairing their vertices through an association graph:
each candidate pairing of same-type vertices becomes an association vertex
weighted by node similarity, and pairings are adjacent when they agree on the
presence of directed edges in both programs. The heaviest clique of the
association graph is the best vertex correspondence, and the divergence is

    delta = 1 - (sum of pair weights)^2 / (|V1| * |V2|)

All weights are exact rationals, so equal inputs produce bit-identical
results regardless of evaluation order.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import TooLargeError
from .flow import ProgramDag, attribute_values_equal

#: Default cap on branch-and-bound search nodes before a result is flagged inexact.
DEFAULT_CLIQUE_BUDGET = 10_000_000

Vertex = tuple[str, dict[str, Any]]


def similarity_fraction(a: Vertex, b: Vertex) -> Fraction:
    """Exact node similarity: 0 across types, matched-attribute fraction within."""
    if a[0] != b[0]:
        return Fraction(0)
    keys = set(a[1]) | set(b[1])
    if not keys:
        return Fraction(1)
    matched = sum(
        1
        for k in keys
        if k in a[1] and k in b[1] and attribute_values_equal(a[1][k], b[1][k])
    )
    return Fraction(matched, len(keys))


def node_similarity(a: Vertex, b: Vertex) -> float:
    """Node similarity in [0, 1]; 1 iff same type and all attributes equal."""
    return float(similarity_fraction(a, b))


def _delta_value(total_weight: Fraction, n1: int, n2: int) -> float:
    return float(1 - total_weight * total_weight / Fraction(n1 * n2))


def delta_single(a: Vertex, b: Vertex) -> float:
    """Divergence of two one-vertex DAGs: 1 - similarity squared."""
    return _delta_value(similarity_fraction(a, b), 1, 1)


@dataclass(frozen=True)
class AssociationVertex:
    """A candidate pairing of vertex ``i`` of the first DAG with ``j`` of the second."""

    i: int
    j: int
    w: Fraction


@dataclass(frozen=True)
class AssociationGraph:
    """Candidate pairings plus the structure-agreement adjacency between them.

    ``masks[k]`` is the bitset of vertices adjacent to vertex ``k``.
    """

    vertices: tuple[AssociationVertex, ...]
    masks: tuple[int, ...]
    n1: int
    n2: int

    def adjacent(self, a: int, b: int) -> bool:
        return bool(self.masks[a] >> b & 1)


def build_association_graph(g1: ProgramDag, g2: ProgramDag) -> AssociationGraph:
    """Vertices are all pairings with positive similarity; edges require that the
    two pairings involve distinct endpoints on both sides and agree on edge
    presence in both orientations."""
    vertices: list[AssociationVertex] = []
    for i, v1 in enumerate(g1.vertices):
        for j, v2 in enumerate(g2.vertices):
            w = similarity_fraction(v1, v2)
            if w > 0:
                vertices.append(AssociationVertex(i, j, w))

    e1, e2 = g1.edges, g2.edges
    masks = [0] * len(vertices)
    for a in range(len(vertices)):
        va = vertices[a]
        for b in range(a + 1, len(vertices)):
            vb = vertices[b]
            if (
                va.i != vb.i
                and va.j != vb.j
                and ((va.i, vb.i) in e1) == ((va.j, vb.j) in e2)
                and ((vb.i, va.i) in e1) == ((vb.j, va.j) in e2)
            ):
                masks[a] |= 1 << b
                masks[b] |= 1 << a
    return AssociationGraph(tuple(vertices), tuple(masks), len(g1), len(g2))


@dataclass(frozen=True)
class CliqueResult:
    """A set of pairwise-adjacent association vertices and the mapping it induces."""

    members: tuple[int, ...]
    vertices: tuple[AssociationVertex, ...]
    weight: Fraction
    exact: bool

    @property
    def total_weight(self) -> float:
        return float(self.weight)

    @property
    def mapping(self) -> dict[int, int]:
        """Injective map from first-DAG vertex index to second-DAG vertex index."""
        return {v.i: v.j for v in self.vertices}

    def rows(self) -> list[list[float]]:
        return [[v.i, v.j, float(v.w)] for v in self.vertices]


_EMPTY_CLIQUE = CliqueResult((), (), Fraction(0), True)


def max_weight_clique(graph: AssociationGraph, budget: int | None = None) -> CliqueResult:
    """Exact maximum-weight clique via branch and bound over vertex bitsets.

    Vertices are branched in index order, so the first optimum reached is the
    lexicographically smallest member set among equal-weight optima; later ties
    can then be pruned safely. Pruning combines a remaining-weight sum with a
    greedy colouring bound (independent classes contribute at most their
    heaviest member). When ``budget`` search nodes are exhausted the best
    clique found so far is returned with ``exact=False``.
    """
    n = len(graph.vertices)
    if n == 0:
        return _EMPTY_CLIQUE
    limit = DEFAULT_CLIQUE_BUDGET if budget is None else budget
    weights = [v.w for v in graph.vertices]
    adj = graph.masks

    best_members: tuple[int, ...] = ()
    best_weight = Fraction(0)
    visited = 0
    exhausted = False

    def mask_weight(mask: int) -> Fraction:
        total = Fraction(0)
        while mask:
            v = (mask & -mask).bit_length() - 1
            total += weights[v]
            mask &= mask - 1
        return total

    def color_bound(mask: int) -> Fraction:
        class_masks: list[int] = []
        class_max: list[Fraction] = []
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            for ci, cmask in enumerate(class_masks):
                if not adj[v] & cmask:
                    class_masks[ci] = cmask | (1 << v)
                    if weights[v] > class_max[ci]:
                        class_max[ci] = weights[v]
                    break
            else:
                class_masks.append(1 << v)
                class_max.append(weights[v])
        return sum(class_max, Fraction(0))

    def expand(mask: int, weight: Fraction, members: tuple[int, ...]) -> bool:
        nonlocal best_members, best_weight, visited, exhausted
        visited += 1
        if visited > limit:
            exhausted = True
            return True
        if weight > best_weight:
            best_weight = weight
            best_members = members
        if not mask:
            return False
        if weight + color_bound(mask) <= best_weight:
            return False
        while mask:
            if weight + mask_weight(mask) <= best_weight:
                return False
            v = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            if expand(mask & adj[v], weight + weights[v], members + (v,)):
                return True
        return False

    expand((1 << n) - 1, Fraction(0), ())
    chosen = tuple(graph.vertices[k] for k in best_members)
    total = sum((v.w for v in chosen), Fraction(0))
    return CliqueResult(best_members, chosen, total, not exhausted)


@dataclass(frozen=True)
class ErrorBreakdown:
    """Counts of the three discrepancy categories."""

    syntax: int = 0
    function: int = 0
    dataflow: int = 0

    def to_dict(self) -> dict[str, int]:
        return {"syntax": self.syntax, "function": self.function, "dataflow": self.dataflow}


def classify_errors(
    reference: ProgramDag,
    generated: ProgramDag,
    clique: CliqueResult,
    syntax_errors: int = 0,
) -> ErrorBreakdown:
    """Split the disagreement between two DAGs into function and dataflow counts.

    The clique mapping cannot contain structural disagreements (its edges agree
    by construction), so vertices left out purely because of rewired edges are
    first re-paired greedily with leftover same-type vertices. A reference
    vertex with no partner, or a partner differing in some attribute, is a
    function error; an edge present on one side of the pairing but not the
    other is a dataflow error. Syntax errors are counted at parse time and
    passed through.
    """
    pairing: dict[int, int] = {}
    pair_weight: dict[int, Fraction] = {}
    for v in clique.vertices:
        pairing[v.i] = v.j
        pair_weight[v.i] = v.w

    used_gen = set(pairing.values())
    free_ref = [i for i in range(len(reference)) if i not in pairing]
    free_gen = [j for j in range(len(generated)) if j not in used_gen]
    candidates: list[tuple[Fraction, int, int]] = []
    for i in free_ref:
        for j in free_gen:
            w = similarity_fraction(reference.vertices[i], generated.vertices[j])
            if w > 0:
                candidates.append((w, i, j))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    for w, i, j in candidates:
        if i not in pairing and j not in used_gen:
            pairing[i] = j
            pair_weight[i] = w
            used_gen.add(j)

    function = sum(
        1
        for i in range(len(reference))
        if i not in pairing or pair_weight[i] < 1
    )

    inverse = {j: i for i, j in pairing.items()}
    dataflow = 0
    for u, v in reference.edges:
        if u in pairing and v in pairing and (pairing[u], pairing[v]) not in generated.edges:
            dataflow += 1
    for u, v in generated.edges:
        if u in inverse and v in inverse and (inverse[u], inverse[v]) not in reference.edges:
            dataflow += 1

    return ErrorBreakdown(syntax=syntax_errors, function=function, dataflow=dataflow)


@dataclass(frozen=True)
class DivergenceReport:
    """Divergence value, the vertex mapping behind it, and the error split."""

    delta: float
    exact: bool
    mapping: CliqueResult
    errors: ErrorBreakdown

    @property
    def theta(self) -> float:
        """Performance reading of the report: 1 - delta."""
        return 1.0 - self.delta

    def to_dict(self) -> dict[str, Any]:
        return {
            "delta": self.delta,
            "exact": self.exact,
            "mapping": self.mapping.rows(),
            "errors": self.errors.to_dict(),
        }


def delta(
    reference: ProgramDag,
    generated: ProgramDag,
    budget: int | None = None,
    syntax_errors: int = 0,
) -> DivergenceReport:
    """Divergence between two DAGs; 1.0 when either is empty.

    The error breakdown reads ``reference`` as the ground truth. The metric
    itself is symmetric in its arguments.
    """
    n1, n2 = len(reference), len(generated)
    if n1 == 0 or n2 == 0:
        errors = classify_errors(reference, generated, _EMPTY_CLIQUE, syntax_errors)
        return DivergenceReport(1.0, True, _EMPTY_CLIQUE, errors)
    graph = build_association_graph(reference, generated)
    clique = max_weight_clique(graph, budget)
    value = _delta_value(clique.weight, n1, n2)
    errors = classify_errors(reference, generated, clique, syntax_errors)
    return DivergenceReport(value, clique.exact, clique, errors)


def delta_brute_force(g1: ProgramDag, g2: ProgramDag) -> float:
    """Divergence by exhaustive enumeration of injective, type-consistent,
    structure-preserving partial mappings. Testing oracle; limited to
    |V1|*|V2| <= 64."""
    n1, n2 = len(g1), len(g2)
    if n1 * n2 > 64:
        raise TooLargeError(f"brute force limited to 64 vertex pairs, got {n1 * n2}")
    if n1 == 0 or n2 == 0:
        return 1.0

    e1, e2 = g1.edges, g2.edges
    options: list[list[tuple[int, Fraction]]] = []
    for i in range(n1):
        row = []
        for j in range(n2):
            w = similarity_fraction(g1.vertices[i], g2.vertices[j])
            if w > 0:
                row.append((j, w))
        options.append(row)

    # Upper bound on the weight still reachable from reference vertex i onward.
    suffix_max = [Fraction(0)] * (n1 + 1)
    for i in range(n1 - 1, -1, -1):
        top = max((w for _, w in options[i]), default=Fraction(0))
        suffix_max[i] = suffix_max[i + 1] + top

    best = Fraction(0)

    def consistent(i: int, j: int, chosen: list[tuple[int, int]]) -> bool:
        for i2, j2 in chosen:
            if ((i, i2) in e1) != ((j, j2) in e2):
                return False
            if ((i2, i) in e1) != ((j2, j) in e2):
                return False
        return True

    def explore(i: int, used: set[int], chosen: list[tuple[int, int]], weight: Fraction) -> None:
        nonlocal best
        if weight > best:
            best = weight
        if i == n1 or weight + suffix_max[i] <= best:
            return
        explore(i + 1, used, chosen, weight)
        for j, w in options[i]:
            if j not in used and consistent(i, j, chosen):
                chosen.append((i, j))
                used.add(j)
                explore(i + 1, used, chosen, weight + w)
                chosen.pop()
                used.remove(j)

    explore(0, set(), [], Fraction(0))
    return _delta_value(best, n1, n2)


def pairwise_matrix(
    set_a: Sequence[ProgramDag],
    set_b: Sequence[ProgramDag],
    budget: int | None = None,
    jobs: int = 1,
) -> np.ndarray:
    """Matrix of delta values between two program sets; cells are independent."""
    if not set_a or not set_b:
        raise ValueError("pairwise_matrix requires nonempty program lists")
    out = np.zeros((len(set_a), len(set_b)))
    cells = list(itertools.product(range(len(set_a)), range(len(set_b))))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = pool.map(lambda c: delta(set_a[c[0]], set_b[c[1]], budget).delta, cells)
        for (i, j), value in zip(cells, values):
            out[i, j] = value
    else:
        for i, j in cells:
            out[i, j] = delta(set_a[i], set_b[j], budget).delta
    return out
