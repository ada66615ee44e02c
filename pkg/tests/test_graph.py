import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_advection import build_graph, classify, compute_potential, signed_distance
from graph_advection.errors import (
    DifferentComponents,
    DuplicateEdge,
    IndexOutOfRange,
    NonPositiveLength,
    NoPotential,
    ParseError,
    SelfLoop,
)
from graph_advection.graph import (
    format_edge_list,
    iterated_neighborhood,
    neighbors,
    parse_edge_list,
    predecessor_cone,
    read_edge_list,
    successor_cone,
    write_edge_list,
)
from graph_advection.scenarios import gen_branching_tree, gen_half_line, gen_two_leaf

from conftest import random_graph


def test_build_chord_cycle(chord_cycle):
    assert chord_cycle.node_count == 4
    assert chord_cycle.edge_count == 5
    assert chord_cycle.delta == 1.0
    assert chord_cycle.Delta == 3
    for v in range(4):
        assert sorted(chord_cycle.out_adj[v]) == sorted((u, d) for a, u, d in chord_cycle.edges if a == v)


def test_build_empty_with_node_count():
    g = build_graph([], 3)
    assert g.node_count == 3
    assert g.delta == math.inf
    assert g.Delta == 0


@pytest.mark.parametrize(
    "edges, exc",
    [
        ([(0, 1, 1), (0, 1, 2)], DuplicateEdge),
        ([(0, 0, 1)], SelfLoop),
        ([(0, 1, 0)], NonPositiveLength),
        ([(0, 1, -1.5)], NonPositiveLength),
        ([(0, 1, float("nan"))], NonPositiveLength),
    ],
)
def test_build_errors(edges, exc):
    with pytest.raises(exc):
        build_graph(edges)


def test_build_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        build_graph([(0, 5, 1)], node_count=3)


def test_adjacency_transposes():
    rng = np.random.default_rng(0)
    g = random_graph(rng, 20)
    out_pairs = {(v, u, d) for v in range(20) for u, d in g.out_adj[v]}
    in_pairs = {(v, u, d) for u in range(20) for v, d in g.in_adj[u]}
    assert out_pairs == in_pairs == set(g.edges)


def test_neighbors(chord_cycle):
    assert neighbors(chord_cycle, 1, "out") == [2, 3]
    assert neighbors(chord_cycle, 3, "both") == [0, 1, 2]
    assert neighbors(chord_cycle, 3, "in") == [1, 2]
    g = build_graph([], 2)
    for d in ("out", "in", "both"):
        assert neighbors(g, 0, d) == []
    with pytest.raises(IndexOutOfRange):
        neighbors(chord_cycle, 4, "out")


def test_iterated_neighborhood(chord_cycle):
    assert iterated_neighborhood(chord_cycle, 2, 0) == {2}
    assert iterated_neighborhood(chord_cycle, 0, 2, "out") == {0, 1, 2, 3}
    assert iterated_neighborhood(chord_cycle, 0, 1, "out") == {0, 1}
    assert iterated_neighborhood(chord_cycle, 0, 2, "out", closed=False) == {2, 3}
    assert iterated_neighborhood(build_graph([], 3), 1, 5) == {1}
    assert iterated_neighborhood(build_graph([], 3), 1, 5, closed=False) == set()


def test_successor_cone(chord_cycle):
    assert successor_cone(chord_cycle, {0}) == {0, 1, 2, 3}
    tree = gen_two_leaf()
    assert successor_cone(tree, {2}) == {2}
    hl = gen_half_line(20)
    assert successor_cone(hl, {3}) == set(range(3, 21))
    assert predecessor_cone(tree, {1}) == {0, 1}


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 15))
def test_cone_is_fixed_point_of_iterated_neighborhoods(seed, n):
    g = random_graph(np.random.default_rng(seed), n)
    for u in range(n):
        cone = successor_cone(g, {u})
        assert iterated_neighborhood(g, u, n, "out") == cone
        assert iterated_neighborhood(g, u, n + 3, "out") == cone


def test_classify_chord_cycle(chord_cycle):
    c = classify(chord_cycle)
    assert c.is_oriented and not c.is_oriented_tree and c.is_leafless and not c.has_potential


def test_classify_trees():
    c = classify(gen_two_leaf())
    assert c.is_oriented_tree and not c.is_leafless and c.has_potential
    single = classify(build_graph([], 1))
    assert single.is_oriented_tree and not single.is_leafless


def test_classify_bidirectional_not_oriented():
    c = classify(build_graph([(0, 1, 1), (1, 0, 1)]))
    assert not c.is_oriented and not c.is_oriented_tree


def _nx_is_oriented_tree(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.node_count))
    h.add_edges_from((v, u) for v, u, _ in g.edges)
    reciprocal = any(g.has_edge(u, v) for v, u, _ in g.edges)
    return g.node_count > 0 and not reciprocal and nx.is_tree(h)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(1, 12), p=st.floats(0.05, 0.5))
def test_oriented_tree_matches_networkx(seed, n, p):
    g = random_graph(np.random.default_rng(seed), n, p)
    assert classify(g).is_oriented_tree == _nx_is_oriented_tree(g)


def _random_oriented_tree(rng, n):
    edges = []
    for child in range(1, n):
        parent = int(rng.integers(0, child))
        d = rng.uniform(0.1, 10)
        edges.append((parent, child, d) if rng.random() < 0.5 else (child, parent, d))
    return build_graph(edges, n)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(1, 30))
def test_potential_on_random_oriented_trees(seed, n):
    g = _random_oriented_tree(np.random.default_rng(seed), n)
    c = classify(g)
    assert c.is_oriented_tree and c.has_potential
    pot = compute_potential(g)
    assert pot.phi[0] == 0.0
    for v, u, d in g.edges:
        assert abs(signed_distance(pot, v, u) - d) <= 1e-12 * max(1.0, d)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(2, 20))
def test_directed_cycle_has_no_potential(seed, n):
    rng = np.random.default_rng(seed)
    g0 = random_graph(rng, n)
    cycle_len = int(rng.integers(2, n + 1))
    edges = {(v, u): d for v, u, d in g0.edges}
    for i in range(cycle_len):
        edges[(i, (i + 1) % cycle_len)] = rng.uniform(0.1, 10)
    g = build_graph([(v, u, d) for (v, u), d in edges.items()], n)
    with pytest.raises(NoPotential):
        compute_potential(g)


def test_potential_examples(chord_cycle):
    pot = compute_potential(gen_half_line(30))
    np.testing.assert_array_equal(pot.phi, np.arange(31))
    pot = compute_potential(build_graph([(0, 1, 2.5)]))
    np.testing.assert_array_equal(pot.phi, [0.0, 2.5])
    with pytest.raises(NoPotential):
        compute_potential(chord_cycle)


def test_potential_components_anchored_at_min_node():
    g = build_graph([(1, 0, 2.0), (3, 2, 1.0)], 5)
    pot = compute_potential(g)
    np.testing.assert_array_equal(pot.phi, [0.0, -2.0, 0.0, -1.0, 0.0])
    with pytest.raises(DifferentComponents):
        signed_distance(pot, 0, 2)


def test_signed_distance():
    pot = compute_potential(gen_half_line(200))
    assert signed_distance(pot, 0, 150) == 150
    assert signed_distance(pot, 7, 7) == 0
    tree = compute_potential(gen_two_leaf(d_vw=1, d_vu=2))
    # nodes: v=0, u=1, w=2
    assert signed_distance(tree, 1, 2) == -1
    assert signed_distance(tree, 2, 1) == 1


def test_potential_on_branching_tree_is_depth():
    g = gen_branching_tree()
    pot = compute_potential(g)
    z3 = g.labels.index("z3")
    assert pot.phi[z3] == pytest.approx(1.75, abs=1e-15)


def test_edge_list_round_trip(tmp_path, chord_cycle):
    path = tmp_path / "g.tsv"
    write_edge_list(chord_cycle, path)
    assert read_edge_list(path) == chord_cycle
    labelled = gen_branching_tree()
    back = parse_edge_list(format_edge_list(labelled))

    def named(g):
        return {(g.label(v), g.label(u), d) for v, u, d in g.edges}

    assert named(back) == named(labelled)


def test_edge_list_writer_sorted_and_comments():
    text = "# comment\n2\t0\t1.5\n0\t1\t1\n\n"
    g = parse_edge_list(text)
    assert format_edge_list(g) == "0\t1\t1.0\n2\t0\t1.5\n"


def test_edge_list_errors():
    with pytest.raises(ParseError):
        parse_edge_list("a\t1\t1\n")
    with pytest.raises(ParseError):
        parse_edge_list("0\t1\n")
    with pytest.raises(ParseError):
        parse_edge_list("0\t1\tfoo\n")
    with pytest.raises(DuplicateEdge):
        parse_edge_list("a\tb\t1\na\tb\t2\n")
