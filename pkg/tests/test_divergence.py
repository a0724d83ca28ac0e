import itertools
import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gindex import (
    AssociationGraph,
    AssociationVertex,
    ProgramDag,
    build_association_graph,
    build_dag,
    classify_errors,
    delta,
    delta_brute_force,
    delta_single,
    max_weight_clique,
    node_similarity,
    pairwise_matrix,
    parse_flow,
    score_documents,
)
from gindex.errors import TooLargeError

from conftest import random_dag


def _dag(*nodes, edges=()):
    """nodes: (type, attrs) pairs; edges: (i, j) pairs."""
    return ProgramDag(vertices=tuple(nodes), edges=frozenset(edges))


def _chain(*types, attrs=None):
    nodes = [(t, dict(attrs or {})) for t in types]
    return _dag(*nodes, edges=[(i, i + 1) for i in range(len(types) - 1)])


class TestNodeSimilarity:
    def test_different_types(self):
        assert node_similarity(("inject", {}), ("debug", {})) == 0.0

    def test_all_attributes_equal(self):
        attrs = {"a": 1, "b": "x", "c": [1], "d": None}
        assert node_similarity(("t", attrs), ("t", dict(attrs))) == 1.0

    def test_half_matching(self):
        a = ("t", {"a": 1, "b": 2, "c": 3, "d": 4})
        b = ("t", {"a": 1, "b": 2, "c": 30, "d": 40})
        assert node_similarity(a, b) == 0.5

    def test_no_attributes_same_type(self):
        assert node_similarity(("t", {}), ("t", {})) == 1.0

    def test_absent_key_differs_from_null(self):
        assert node_similarity(("t", {"a": None}), ("t", {})) == 0.0
        assert node_similarity(("t", {"a": None, "b": 1}), ("t", {"b": 1})) == 0.5


class TestDeltaSingle:
    @pytest.mark.parametrize(
        "attrs_a, attrs_b, expected",
        [
            ({"a": 1}, {"a": 1}, 0.0),
            ({"a": 1, "b": 2, "c": 3, "d": 4}, {"a": 1, "b": 2, "c": 0, "d": 0}, 0.75),
        ],
    )
    def test_values(self, attrs_a, attrs_b, expected):
        assert delta_single(("t", attrs_a), ("t", attrs_b)) == expected

    def test_disjoint_types(self):
        assert delta_single(("t", {}), ("u", {})) == 1.0

    def test_matches_general_delta_on_single_nodes(self):
        rng = random.Random(11)
        for _ in range(100):
            g1 = random_dag(rng, max_nodes=1)
            g2 = random_dag(rng, max_nodes=1)
            assert delta(g1, g2).delta == delta_single(g1.vertices[0], g2.vertices[0])


class TestAssociationGraph:
    def test_no_shared_types(self):
        g1 = _dag(("a", {}))
        g2 = _dag(("b", {}))
        assert build_association_graph(g1, g2).vertices == ()

    def test_single_shared_node(self):
        graph = build_association_graph(_dag(("a", {})), _dag(("a", {})))
        assert len(graph.vertices) == 1
        assert graph.masks == (0,)

    def test_two_chains_edge_rule_by_hand(self):
        # Two identical 2-node chains: 4 pairings, and of the 6 unordered
        # pairings exactly the order-consistent one is adjacent.
        g = _chain("t", "t", attrs={"k": 1})
        graph = build_association_graph(g, g)
        verts = [(v.i, v.j) for v in graph.vertices]
        assert verts == [(0, 0), (0, 1), (1, 0), (1, 1)]
        adjacent = {
            (a, b)
            for a, b in itertools.combinations(range(4), 2)
            if graph.adjacent(a, b)
        }
        assert adjacent == {(verts.index((0, 0)), verts.index((1, 1)))}

    def test_vertices_have_positive_weight(self):
        rng = random.Random(3)
        for _ in range(50):
            graph = build_association_graph(random_dag(rng, 6), random_dag(rng, 6))
            assert all(v.w > 0 for v in graph.vertices)


def _graph_from_weights(weights, edges):
    vertices = tuple(
        AssociationVertex(i, i, Fraction(w).limit_denominator()) for i, w in enumerate(weights)
    )
    masks = [0] * len(weights)
    for a, b in edges:
        masks[a] |= 1 << b
        masks[b] |= 1 << a
    return AssociationGraph(vertices, tuple(masks), len(weights), len(weights))


def _all_cliques_best(graph):
    """Exhaustive subset enumeration oracle for small association graphs."""
    n = len(graph.vertices)
    best = Fraction(0)
    best_members = ()
    for r in range(n + 1):
        for subset in itertools.combinations(range(n), r):
            if all(graph.adjacent(a, b) for a, b in itertools.combinations(subset, 2)):
                weight = sum((graph.vertices[k].w for k in subset), Fraction(0))
                if weight > best:
                    best = weight
                    best_members = subset
    return best, best_members


class TestMaxWeightClique:
    def test_empty_graph(self):
        result = max_weight_clique(AssociationGraph((), (), 0, 0))
        assert result.members == ()
        assert result.total_weight == 0.0
        assert result.exact

    def test_triangle(self):
        graph = _graph_from_weights([1, 1, 1], [(0, 1), (1, 2), (0, 2)])
        result = max_weight_clique(graph)
        assert result.members == (0, 1, 2)
        assert result.weight == 3

    def test_path_takes_heaviest_edge(self):
        # path a(0.9) - b(0.8) - c(0.7): best clique is {a, b} with 1.7
        graph = _graph_from_weights([0.9, 0.8, 0.7], [(0, 1), (1, 2)])
        result = max_weight_clique(graph)
        oracle_weight, oracle_members = _all_cliques_best(graph)
        assert result.members == (0, 1) == oracle_members
        assert result.weight == oracle_weight == Fraction(9, 10) + Fraction(4, 5)

    def test_matches_enumeration_on_random_graphs(self):
        rng = random.Random(5)
        for _ in range(60):
            n = rng.randint(0, 9)
            weights = [Fraction(rng.randint(1, 8), 8) for _ in range(n)]
            edges = [
                (a, b)
                for a, b in itertools.combinations(range(n), 2)
                if rng.random() < 0.5
            ]
            graph = _graph_from_weights(weights, edges)
            result = max_weight_clique(graph)
            assert result.weight == _all_cliques_best(graph)[0]
            # clique validity: members pairwise adjacent, weight consistent
            assert all(
                graph.adjacent(a, b) for a, b in itertools.combinations(result.members, 2)
            )
            assert result.weight == sum((graph.vertices[k].w for k in result.members), Fraction(0))

    def test_lexicographic_tie_break(self):
        # two equal-weight singleton optima: the lower index wins
        graph = _graph_from_weights([1, 1], [])
        assert max_weight_clique(graph).members == (0,)
        # equal-weight two-cliques {0,3} and {1,2}: {0,3} is lex-smaller
        graph = _graph_from_weights([0.5, 0.5, 0.5, 0.5], [(0, 3), (1, 2)])
        assert max_weight_clique(graph).members == (0, 3)

    def test_budget_exhaustion_flags_inexact(self):
        g = _chain("t", "t", "t", "t", attrs={"k": 1})
        graph = build_association_graph(g, g)
        result = max_weight_clique(graph, budget=3)
        assert not result.exact
        exact = max_weight_clique(graph)
        assert exact.exact
        assert result.weight <= exact.weight


class TestDelta:
    def test_identical_program_is_zero(self):
        g = _chain("a", "b", "c", attrs={"k": [1, {"x": None}]})
        report = delta(g, g)
        assert report.delta == 0.0
        # zero law: total bijection with unit weights
        assert len(report.mapping.vertices) == len(g)
        assert all(v.w == 1 for v in report.mapping.vertices)

    def test_disjoint_types_is_one(self):
        assert delta(_chain("a", "b"), _chain("c", "d")).delta == 1.0

    def test_chain_three_vs_chain_two(self):
        report = delta(_chain("a", "b", "c"), _chain("a", "b"))
        assert report.delta == pytest.approx(1 / 3, abs=0)
        assert report.delta == delta_brute_force(_chain("a", "b", "c"), _chain("a", "b"))

    def test_empty_dag_scores_one(self):
        g = _chain("a", "b")
        empty = ProgramDag()
        assert delta(g, empty).delta == 1.0
        assert delta(empty, g).delta == 1.0
        assert delta(empty, empty).delta == 1.0

    def test_budget_propagates(self):
        g = _chain("t", "t", "t", "t", "t", attrs={"k": 1})
        report = delta(g, g, budget=2)
        assert not report.exact
        assert 0.0 <= report.delta <= 1.0

    def test_serialized_report_shape(self):
        report = delta(_chain("a", "b", "c"), _chain("a", "b"))
        doc = report.to_dict()
        assert set(doc) == {"delta", "exact", "mapping", "errors"}
        assert doc["mapping"] == [[0, 0, 1.0], [1, 1, 1.0]]
        assert doc["errors"] == {"syntax": 0, "function": 1, "dataflow": 0}


class TestClassifyErrors:
    def test_missing_node_is_function_error(self):
        reference = _chain("a", "b")
        generated = _dag(("a", {}))
        report = delta(reference, generated)
        assert report.errors.function == 1
        assert report.errors.dataflow == 0

    def test_redirected_edge_is_dataflow_error(self):
        reference = _dag(("a", {}), ("b", {}), ("c", {}), edges=[(0, 1), (1, 2)])
        generated = _dag(("a", {}), ("b", {}), ("c", {}), edges=[(0, 1), (0, 2)])
        report = delta(reference, generated)
        assert report.errors.function == 0
        assert report.errors.dataflow >= 1

    def test_unparseable_generated_counts_syntax(self):
        reference = json.dumps([{"id": "n", "type": "a"}])
        report = score_documents(reference, "[{broken")
        assert report.delta == 1.0
        assert report.errors.syntax == 1
        assert report.errors.function == 1  # the reference node has no counterpart

    def test_attribute_mismatch_is_function_error(self):
        reference = _dag(("a", {"k": 1}))
        generated = _dag(("a", {"k": 2}))
        report = delta(reference, generated)
        assert report.delta == 1.0  # no positive-similarity pairing exists
        assert report.errors.function == 1


class TestPairwiseMatrix:
    def test_self_and_disjoint(self):
        p = _chain("a", "b")
        q = _chain("c", "d")
        assert pairwise_matrix([p], [p]).tolist() == [[0.0]]
        assert pairwise_matrix([p], [q]).tolist() == [[1.0]]

    def test_symmetry(self):
        rng = random.Random(9)
        dags = [random_dag(rng, 5) for _ in range(6)]
        m = pairwise_matrix(dags, dags)
        assert np.max(np.abs(m - m.T)) <= 1e-12

    def test_jobs_match_sequential(self):
        rng = random.Random(10)
        dags = [random_dag(rng, 5) for _ in range(5)]
        assert np.array_equal(pairwise_matrix(dags, dags), pairwise_matrix(dags, dags, jobs=4))

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            pairwise_matrix([], [_chain("a")])


class TestBruteForceOracle:
    def test_identical_chain(self):
        g = _chain("a", "b", "c")
        assert delta_brute_force(g, g) == 0.0

    def test_disjoint(self):
        assert delta_brute_force(_chain("a"), _chain("b")) == 1.0

    def test_too_large(self):
        g = _dag(*[("t", {}) for _ in range(9)])
        with pytest.raises(TooLargeError):
            delta_brute_force(g, g)

    def test_equals_delta_on_random_pairs(self):
        rng = random.Random(21)
        for _ in range(120):
            g1 = random_dag(rng, 6)
            g2 = random_dag(rng, 6)
            assert delta(g1, g2).delta == delta_brute_force(g1, g2)


_small_dags = st.builds(
    lambda seed, nodes: random_dag(random.Random(seed), nodes),
    st.integers(0, 10_000),
    st.integers(1, 6),
)


@settings(max_examples=80, deadline=None)
@given(_small_dags, _small_dags)
def test_metric_laws_property(g1, g2):
    r12 = delta(g1, g2)
    r21 = delta(g2, g1)
    assert 0.0 <= r12.delta <= 1.0
    assert abs(r12.delta - r21.delta) <= 1e-12
    assert delta(g1, g1).delta == 0.0
    assert (r12.delta == 1.0) == (len(build_association_graph(g1, g2).vertices) == 0)
    # clique members pairwise adjacent in the association graph
    graph = build_association_graph(g1, g2)
    members = r12.mapping.members
    assert all(graph.adjacent(a, b) for a, b in itertools.combinations(members, 2))


@settings(max_examples=50, deadline=None)
@given(_small_dags, _small_dags)
def test_oracle_equivalence_property(g1, g2):
    assert delta(g1, g2).delta == delta_brute_force(g1, g2)


def test_report_json_round_trip():
    doc = json.dumps([
        {"id": "n1", "type": "inject", "topic": "a", "wires": [["n2"]]},
        {"id": "n2", "type": "debug"},
    ])
    g = build_dag(parse_flow(doc))
    payload = json.loads(json.dumps(delta(g, g).to_dict()))
    assert payload["delta"] == 0.0
    assert payload["exact"] is True
