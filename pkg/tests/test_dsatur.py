import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from peacekit.dsatur import dsatur_fill, dsatur_with_restarts
from peacekit.graph import complete_graph, cycle_graph, petersen_graph

from conftest import graphs


def proper(g, col):
    e = g.edges()
    return not np.any((col[e[:, 0]] >= 0) & (col[e[:, 0]] == col[e[:, 1]]))


@given(graphs(max_n=14), st.integers(0, 2**31))
def test_fills_with_delta_plus_one(g, seed):
    col = np.full(g.n, -1, dtype=np.int64)
    assert dsatur_fill(g, col, g.delta + 1, np.arange(g.n), rng=seed)
    assert np.all((col >= 0) & (col <= g.delta)) and proper(g, col)


@given(graphs(max_n=14), st.integers(0, 2**31))
def test_respects_precoloured_vertices(g, seed):
    rng = np.random.default_rng(seed)
    col = np.full(g.n, -1, dtype=np.int64)
    dsatur_fill(g, col, g.delta + 1, np.arange(g.n))
    keep = rng.random(g.n) < 0.5
    partial = np.where(keep, col, -1)
    todo = np.flatnonzero(~keep)
    out = partial.copy()
    assert dsatur_fill(g, out, g.delta + 1, todo, rng=seed)
    assert np.array_equal(out[keep], col[keep]) and proper(g, out)


def test_bipartite_even_cycle_uses_two_colours():
    col = np.full(10, -1, dtype=np.int64)
    assert dsatur_fill(cycle_graph(10), col, 2, np.arange(10))


def test_reports_infeasible():
    col = np.full(5, -1, dtype=np.int64)
    assert not dsatur_fill(complete_graph(5), col, 4, np.arange(5))
    assert dsatur_with_restarts(complete_graph(5), np.full(5, -1), 4, np.arange(5), restarts=3) is None


def test_out_of_palette_neighbour_blocks_colour():
    g = cycle_graph(3)
    col = np.array([-1, 5, -1])
    # colour 5 is outside the palette of 2 so vertices 0 and 2 need 0 and 1
    assert dsatur_fill(g, col, 2, [0, 2])
    assert sorted(col[[0, 2]].tolist()) == [0, 1]


def test_restarts_find_three_colouring_of_petersen():
    out = dsatur_with_restarts(petersen_graph(), np.full(10, -1, dtype=np.int64), 3, np.arange(10), restarts=20)
    assert out is not None and proper(petersen_graph(), out) and out.max() <= 2
