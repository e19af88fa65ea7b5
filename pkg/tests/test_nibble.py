import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peacekit.graph import complete_graph, random_regular, star_graph
from peacekit.logs import log_base
from peacekit.nibble import (
    NibbleRestartError,
    PostprocessError,
    audit_bookkeeping,
    default_low_band,
    flip_probability,
    idealized_trace,
    nibble_colour,
    postprocess_recolour,
    retention_frequency,
    simulate_star,
)
from peacekit.peace import PartialColouring, check_proper, peace_report
from peacekit.rng import split_seed

from conftest import random_graph, random_proper_colouring


def test_trace_start_values():
    t = idealized_trace(10_000)
    L = math.log(10_000)
    assert t.g[0] == 0 and t.D[0] == 10_000
    assert t.n[0] == pytest.approx(10_000 / L**2)
    assert t.palette == 10_000 + math.ceil(4 * 10_000 / math.log(L)) == t.l[0] == t.l_prime[0]
    assert t.i_star == math.ceil(L**2 * math.log(L)) == 189
    assert t.l.size == t.i_star + 1


def test_second_list_length_fixture():
    # l_1 (1 - 1/l_1)^{n_1} evaluated directly for delta = 10^4, B = 4
    assert idealized_trace(10_000, 4.0).l[1] == pytest.approx(27898.363252246196, rel=1e-12)


@pytest.mark.parametrize("delta", [16, 100, 1000, 10_000, 10**6])
def test_trace_is_strictly_decreasing(delta):
    t = idealized_trace(delta)
    assert np.all(np.diff(t.l) < 0) and np.all(np.diff(t.D) < 0)
    assert np.all(np.diff(t.g) > 0)


@pytest.mark.parametrize("delta", [16, 100, 1000, 10_000, 10**6])
def test_list_lengths_stay_large(delta):
    t = idealized_trace(delta)
    assert t.l.min() >= 0.9 * 4 * delta / math.log(math.log(delta))


def test_trace_recurrence_by_hand():
    t = idealized_trace(500, 2.0)
    l1 = t.l[0]
    for i in range(5):
        f = (1 - 1 / l1) ** t.n[i]
        assert t.l[i + 1] == pytest.approx(t.l[i] * f, rel=1e-12)
        assert t.g[i + 1] == pytest.approx(t.g[i] * f + t.n[i] * t.l[i] / l1, rel=1e-12)
        assert t.D[i + 1] == pytest.approx(t.D[i] - t.n[i])
    L = math.log(500)
    assert t.l_prime[3] == t.l[3] - math.ceil(4 * 500 / L**5)


def test_small_delta_rejected():
    with pytest.raises(ValueError):
        idealized_trace(15)


def test_log_base_changes_schedule():
    natural = idealized_trace(4096)
    with log_base("binary"):
        binary = idealized_trace(4096)
    assert binary.alpha == pytest.approx(1 / 144)
    assert natural.alpha == pytest.approx(1 / math.log(4096) ** 2)
    assert binary.i_star > natural.i_star


def test_star_first_iteration_mean():
    s = simulate_star(2000, trials=400, seed=1)
    alpha = s.trace.alpha
    sd = math.sqrt(2000 * alpha * (1 - alpha) / 400)
    assert abs(s.n[:, 0].mean() - alpha * 2000) < 5 * sd
    assert np.all(s.L[:, 0] == s.trace.palette) and np.all(s.good[:, 0] == 0)


def test_star_is_deterministic():
    a = simulate_star(100, trials=5, seed=3)
    b = simulate_star(100, trials=5, seed=3)
    assert np.array_equal(a.L, b.L) and np.array_equal(a.good, b.good)


def test_star_counts_are_consistent():
    s = simulate_star(300, trials=20, seed=2)
    assert np.array_equal(s.D[:, 1:], s.D[:, :-1] - s.n)
    # each colour used once is in Good, never more than the coloured leaves
    assert np.all(s.good <= 300 - s.D)
    assert np.all(s.L + (300 - s.D) >= s.trace.palette)


def test_star_process_matches_nibble_on_a_star():
    delta, seed = 64, 11
    g = star_graph(delta)
    stats = simulate_star(delta, seed=seed, trials=1)
    seen = []
    nibble_colour(g, seed=split_seed(seed, 0), equalize=False, truncate=False, hold=[0], monitor_sample=0,
                  on_iteration=lambda s: seen.append((int(s.list_size[0]), int(s.good[0]), int(s.D[0]))))
    k = len(seen)
    assert [x[0] for x in seen] == stats.L[0, 1 : k + 1].tolist()
    assert [x[1] for x in seen] == stats.good[0, 1 : k + 1].tolist()
    assert [x[2] for x in seen] == stats.D[0, 1 : k + 1].tolist()


def test_flip_probability():
    assert flip_probability(0.9, 0.6) == pytest.approx(1 / 3)
    assert flip_probability(0.5, 0.6) == 0.0
    assert flip_probability(0.6, 0.6) == 0.0


def test_retention_is_calibrated_in_the_large_degree_regime():
    trials = 100_000
    freq, p_star, q = retention_frequency(10**9, 3, 10**9 // 2, trials, seed=0)
    assert q > p_star
    assert abs(freq - p_star) <= 5 * math.sqrt(p_star * (1 - p_star) / trials)


def test_retention_is_clamped_when_q_is_below_target():
    freq, p_star, q = retention_frequency(1000, 2, 1000, 50_000, seed=1)
    assert q < p_star
    assert abs(freq - q) <= 5 * math.sqrt(q * (1 - q) / 50_000)


def run_small(seed=0, **kw):
    g = random_regular(300, 20, seed=1)
    return g, nibble_colour(g, seed=seed, **kw)


def test_output_is_proper_partial_with_expected_palette():
    g, (f, stats) = run_small()
    check_proper(g, f)
    assert f.palette == stats.palette == idealized_trace(20).palette
    assert stats.coloured == int(np.sum(f.colours >= 0))
    rep = peace_report(g, f, check=False)
    assert np.array_equal(stats.unique_neighbours, rep.undisturbed)
    assert len(stats.trace) == stats.i_star


def test_same_seed_same_run():
    _, (a, sa) = run_small(seed=4)
    _, (b, sb) = run_small(seed=4)
    assert a == b and sa.trace == sb.trace


def test_bookkeeping_matches_recomputation_every_iteration():
    problems = []
    run_small(seed=2, on_iteration=lambda s: problems.extend(audit_bookkeeping(s, samples=200, seed=s.iteration)))
    assert problems == []


def test_bookkeeping_without_equalizing():
    problems = []
    run_small(seed=3, equalize=False, on_iteration=lambda s: problems.extend(audit_bookkeeping(s, samples=200)))
    assert problems == []


def test_assigned_colour_was_listed():
    g = random_regular(300, 20, seed=1)
    P = idealized_trace(20).palette
    prev = [np.ones((g.n, P), dtype=np.uint8)]
    bad = []

    def check(state):
        i = state.iteration - 1
        fresh = np.flatnonzero((state.assigned_at == i) & (state.colours >= 0))
        if not np.all(prev[0][fresh, state.colours[fresh]] == 1):
            bad.append(i)
        prev[0] = state.in_list.copy()

    nibble_colour(g, seed=5, on_iteration=check)
    assert bad == []


def test_lists_equal_before_first_iteration_ends():
    sizes = []
    nibble_colour(random_regular(100, 16, seed=0), seed=0, truncate=False, equalize=False,
                  hold=range(100), on_iteration=lambda s: sizes.append(set(s.list_size.tolist())))
    assert sizes[0] == {idealized_trace(16).palette}


def test_restart_policy_raises_when_budget_spent():
    _, (_, stats) = run_small()
    assert sum(stats.monitor_violations.values()) > 0
    with pytest.raises(NibbleRestartError) as info:
        run_small(policy="restart-on-violation", max_restarts=1)
    assert info.value.stats.restarts == 1


def test_unknown_policy():
    with pytest.raises(ValueError):
        nibble_colour(complete_graph(20), policy="hope")


# -- postprocessing ------------------------------------------------------------------------------


def test_postprocess_leaves_clean_colouring_alone():
    g = random_regular(100, 20, seed=0)
    c_prime = 5
    col = np.full(g.n, -1, dtype=np.int64)
    from peacekit.dsatur import dsatur_fill

    # colour using only the middle band
    assert dsatur_fill(g, col, 21 - c_prime, np.arange(g.n))
    f = PartialColouring(col + c_prime, 21)
    out, info = postprocess_recolour(g, f, c_prime)
    assert out == f and info["recoloured"] == 0


@settings(max_examples=40)
@given(st.integers(0, 2**31))
def test_postprocess_properties(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, int(rng.integers(5, 40)), 0.25)
    if g.delta < 2:
        return
    palette = g.delta + 4
    f = PartialColouring(random_proper_colouring(rng, g, palette, 0.3), palette)
    c_prime = int(rng.integers(1, g.delta + 2))
    try:
        out, info = postprocess_recolour(g, f, c_prime)
    except PostprocessError:
        return
    check_proper(g, out)
    assert out.is_total and out.palette == g.delta + 1
    col, new = f.colours, out.colours
    band = (col >= 0) & ((col < c_prime) | (col > g.delta))
    stay = (col >= 0) & ~band
    assert np.array_equal(new[stay], col[stay])
    assert np.all(new[~stay] < c_prime)
    assert info["band_removed"] == int(band.sum())
    # a unique neighbour colour outside the bands survives, so the loss per
    # vertex is at most the number of unique-coloured band neighbours
    before = peace_report(g, f, check=False)
    after = peace_report(g, out, check=False)
    for v in range(g.n):
        nb = g.neighbours(v)
        c = col[nb]
        vals, cnt = np.unique(c[c >= 0], return_counts=True)
        uniq = set(vals[cnt == 1].tolist())
        lost = sum(1 for w in nb if band[w] and int(col[w]) in uniq)
        assert after.undisturbed[v] >= before.undisturbed[v] - lost


def test_default_low_band():
    assert default_low_band(4096) == math.ceil(4 * 4096 / math.log(4096))
    assert default_low_band(20) == 21


def test_postprocess_failure_is_explicit():
    g = complete_graph(10)
    with pytest.raises(PostprocessError):
        postprocess_recolour(g, PartialColouring.empty(10, 10), 3)


def test_nibble_then_postprocess_is_total():
    g, (f, _) = run_small(seed=1)
    out, info = postprocess_recolour(g, f, 21)
    check_proper(g, out)
    assert out.is_total


@pytest.mark.slow
def test_unique_neighbours_against_coloured_degree(large_nibble_runs):
    for r in large_nibble_runs:
        assert r["total"]
        assert r["mean_unique"] >= (math.exp(-1) - 0.2) * r["mean_coloured_degree"], r
