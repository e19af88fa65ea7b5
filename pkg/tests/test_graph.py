import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from peacekit.graph import (
    Bipartition,
    EdgeListError,
    Graph,
    GenerationError,
    MalformedHeaderError,
    VertexIndexError,
    adversarial_bipartite,
    adversarial_sizes,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_union,
    empty_graph,
    find_large_cliques,
    is_clique,
    load_graph,
    max_codegree,
    path_graph,
    petersen_graph,
    random_regular,
    regularize_by_doubling,
    save_graph,
    star_graph,
)

from conftest import graphs


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges().tolist())
    return h


def brute_codegree(g):
    best = 0
    for u, v in itertools.combinations(range(g.n), 2):
        best = max(best, len(set(g.neighbours(u).tolist()) & set(g.neighbours(v).tolist())))
    return best


def test_complete_graph_basics():
    g = complete_graph(4)
    assert (g.n, g.m, g.delta) == (4, 6, 3)
    assert g.adjacency[0] == (1, 2, 3)


def test_regular_generator_degree_two_gives_union_of_cycles():
    g = random_regular(6, 2, seed=0)
    assert np.all(g.degree == 2)
    assert all(len(c) >= 3 for c in nx.cycle_basis(to_nx(g)))


@pytest.mark.parametrize("edges, exc", [
    ([(0, 0)], EdgeListError),
    ([(0, 1), (1, 0)], EdgeListError),
    ([(0, 5)], VertexIndexError),
])
def test_from_edges_rejects_bad_input(edges, exc):
    with pytest.raises(exc):
        Graph.from_edges(3, edges)


def test_arrays_are_read_only():
    g = cycle_graph(5)
    with pytest.raises(ValueError):
        g.indices[0] = 3


@given(graphs())
def test_file_round_trip_is_bit_exact(tmp_path_factory, g):
    p = tmp_path_factory.mktemp("g") / "g.txt"
    save_graph(g, p)
    text = p.read_text()
    h = load_graph(p)
    assert h == g
    save_graph(h, p)
    assert p.read_text() == text


@given(graphs())
def test_edges_match_networkx(g):
    h = to_nx(g)
    assert g.m == h.number_of_edges()
    assert sorted(map(tuple, g.edges().tolist())) == sorted(tuple(sorted(e)) for e in h.edges())
    assert g.delta == max((d for _, d in h.degree()), default=0)


@pytest.mark.parametrize("content, exc", [
    ("", MalformedHeaderError),
    ("3\n", MalformedHeaderError),
    ("3 x\n", MalformedHeaderError),
    ("3 2\n0 1\n", EdgeListError),
    ("3 1\n1 0\n", EdgeListError),
    ("3 2\n1 2\n0 1\n", EdgeListError),
    ("3 2\n0 1\n0 1\n", EdgeListError),
    ("3 1\n0 3\n", VertexIndexError),
    ("3 1\n0 1 2\n", EdgeListError),
])
def test_load_errors_are_specific(tmp_path, content, exc):
    p = tmp_path / "bad.txt"
    p.write_text(content)
    with pytest.raises(exc):
        load_graph(p)


def test_file_layout(tmp_path):
    p = tmp_path / "p3.txt"
    save_graph(path_graph(3), p)
    assert p.read_text() == "3 2\n0 1\n1 2\n"


@pytest.mark.parametrize("n, d", [(10, 3), (50, 7), (100, 8), (31, 30), (400, 200), (2000, 64)])
def test_random_regular_is_simple_and_regular(n, d):
    g = random_regular(n, d, seed=11)
    g.check()
    assert np.all(g.degree == d)


def test_random_regular_is_deterministic():
    assert random_regular(60, 5, seed=4) == random_regular(60, 5, seed=4)
    assert random_regular(60, 5, seed=4) != random_regular(60, 5, seed=5)


@pytest.mark.parametrize("n, d", [(5, 3), (3, 3), (4, -1)])
def test_random_regular_rejects_impossible(n, d):
    with pytest.raises((ValueError, GenerationError)):
        random_regular(n, d, seed=0)


def test_random_regular_edge_frequencies_look_uniform():
    # every one of the 6 edges of K_4 appears in a 2-regular graph on 4 vertices
    # (a 4-cycle) with probability 2/3; 3 distinct 4-cycles exist
    seen = {}
    for s in range(600):
        key = tuple(map(tuple, random_regular(4, 2, seed=s).edges().tolist()))
        seen[key] = seen.get(key, 0) + 1
    assert len(seen) == 3
    assert all(150 <= c <= 250 for c in seen.values())


@given(graphs(max_n=10))
def test_codegree_matches_brute_force(g):
    assert max_codegree(g) == brute_codegree(g)


@pytest.mark.parametrize("g, want", [(petersen_graph(), 1), (complete_bipartite(2, 2), 2), (complete_graph(3), 1), (star_graph(5), 1)])
def test_codegree_examples(g, want):
    assert max_codegree(g) == want


def test_two_disjoint_cliques_are_found():
    g = disjoint_union(complete_graph(7), complete_graph(7))
    found = find_large_cliques(g, 7)
    assert sorted(map(tuple, (c.tolist() for c in found))) == [tuple(range(7)), tuple(range(7, 14))]


def test_cycle_has_no_large_clique():
    assert find_large_cliques(cycle_graph(5), 3) == []


@given(graphs(max_n=12), st.integers(1, 6))
def test_found_cliques_are_cliques_and_disjoint(g, t):
    found = find_large_cliques(g, t)
    used = set()
    for c in found:
        assert c.size >= t
        assert is_clique(g, c)
        assert not used & set(c.tolist())
        used |= set(c.tolist())
        # exhaustive check of pairwise adjacency
        assert all(g.has_edge(u, v) for u, v in itertools.combinations(c.tolist(), 2))


def test_doubling_a_path():
    g = regularize_by_doubling(path_graph(3), 2)
    assert np.all(g.degree == 2)
    assert nx.is_isomorphic(to_nx(g), nx.cycle_graph(6))


@given(graphs(max_n=9))
def test_doubling_reaches_max_degree(g):
    if g.n == 0 or g.delta == 0:
        return
    h = regularize_by_doubling(g, g.delta)
    assert np.all(h.degree == g.delta)
    # the original graph survives as an induced subgraph
    assert h.induced_subgraph(range(g.n))[0] == g


def test_doubling_keeps_girth_and_codegree_bounded():
    g = cycle_graph(7)
    g = Graph.from_edges(7, [e for e in g.edges().tolist() if e != [0, 6]])
    h = regularize_by_doubling(g, 2)
    assert max_codegree(h) <= max(max_codegree(g), 1)


def test_adversarial_construction_shape():
    a, b = adversarial_sizes(64)
    g, bip = adversarial_bipartite(64, seed=2)
    bip.check(g)
    assert bip.side_a.size == a and bip.side_b.size == b == 64
    assert np.all(g.degree[bip.side_b] == 64)
    assert g.delta == 64 or g.degree[bip.side_a].max() <= 64


def test_bipartition_check_rejects_inner_edge():
    g = path_graph(3)
    with pytest.raises(ValueError):
        Bipartition(np.array([0, 1]), np.array([2])).check(g)


def test_induced_subgraph_labels():
    g = cycle_graph(6)
    h, labels = g.induced_subgraph([1, 2, 3, 5])
    assert labels.tolist() == [1, 2, 3, 5]
    assert h.edges().tolist() == [[0, 1], [1, 2]]


def test_empty_graph():
    g = empty_graph(3)
    assert g.m == 0 and g.delta == 0 and max_codegree(g) == 0
