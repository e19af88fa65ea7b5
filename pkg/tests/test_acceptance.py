"""End-to-end acceptance checks. Each test prints one PASS/FAIL line."""
import math
import time
from collections import Counter

import networkx as nx
import numpy as np
import pytest

from peacekit.adversary import audit_uniqueness
from peacekit.graph import Graph, adversarial_bipartite, Bipartition, cycle_graph, load_graph, max_codegree, random_regular, save_graph
from peacekit.nibble import audit_bookkeeping, idealized_trace, nibble_colour, simulate_star
from peacekit.oneshot import OneShotParams, oneshot_colour
from peacekit.oracle import certify_no_peaceful, min_peacefulness_exact
from peacekit.peace import PartialColouring, check_proper, greedy_complete, is_p_peaceful, load_colouring, peace_report, save_colouring
from peacekit.zcolour import UsableZ, assign_z_colours, z_params, z_pipeline

from conftest import random_proper_colouring

pytestmark = pytest.mark.slow


@pytest.fixture
def verdict(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail

    return emit


def test_c1_oracle_cross_validation(verdict):
    t0 = time.perf_counter()
    counts = Counter()
    failures = []
    for h in nx.graph_atlas_g()[1:]:
        if not nx.is_connected(h):
            continue
        n = h.number_of_nodes()
        counts[n] += 1
        g = Graph.from_edges(n, list(h.edges()))
        c = g.delta + 1
        p, w = min_peacefulness_exact(g, c)
        ok = is_p_peaceful(g, w, p) and not is_p_peaceful(g, w, p - 1)
        ok = ok and (p == 0 or certify_no_peaceful(g, c, p - 1))
        if not ok:
            failures.append(list(h.edges()))
    anchor = min_peacefulness_exact(cycle_graph(5), 3)[0]
    elapsed = time.perf_counter() - t0
    # connected graphs on 1..7 vertices, up to isomorphism
    complete_list = [counts[n] for n in range(1, 8)] == [1, 1, 2, 6, 21, 112, 853]
    ok = not failures and anchor == 2 and complete_list and elapsed < 300
    verdict("C1 oracle cross-validation", ok,
            f"{sum(counts.values())} graphs, {len(failures)} failures, C5 p*={anchor}, {elapsed:.1f}s")


def disturbed_by_counter(g, col):
    out = []
    for v in range(g.n):
        hist = Counter(int(col[w]) for w in g.neighbours(v) if col[w] >= 0)
        out.append(sum(k for k in hist.values() if k > 1))
    return out


def bounded_degree_graph(rng, n, cap):
    deg = np.zeros(n, dtype=int)
    edges = set()
    for _ in range(4 * n * cap):
        u, v = rng.integers(0, n, 2)
        if u != v and deg[u] < cap and deg[v] < cap and (min(u, v), max(u, v)) not in edges:
            edges.add((int(min(u, v)), int(max(u, v))))
            deg[u] += 1
            deg[v] += 1
    return Graph.from_edges(n, sorted(edges))


def test_c2_verifier_identity(verdict):
    rng = np.random.default_rng(2)
    bad_identity = bad_agree = 0
    for _ in range(100):
        g = bounded_degree_graph(rng, int(rng.integers(1, 61)), int(rng.integers(1, 13)))
        palette = g.delta + 1 + int(rng.integers(0, 4))
        col = random_proper_colouring(rng, g, palette, float(rng.choice([0.0, 0.2, 0.5])))
        rep = peace_report(g, PartialColouring(col, palette))
        bad_identity += int(not np.array_equal(rep.undisturbed + rep.disturbed + rep.uncoloured_neighbours, g.degree))
        bad_agree += int(rep.disturbed.tolist() != disturbed_by_counter(g, col))
    verdict("C2 verifier identity", bad_identity == 0 and bad_agree == 0,
            f"100 graphs, identity failures {bad_identity}, implementation disagreements {bad_agree}")


def test_c3_oneshot(verdict):
    t0 = time.perf_counter()
    good = proper = 0
    for seed in range(20):
        g = random_regular(200, 16, seed=seed)
        f, stats = oneshot_colour(g, OneShotParams(mu=0.5, seed=seed, palette_size=160))
        try:
            check_proper(g, f)
            proper += 1
        except ValueError:
            continue
        if stats.residual_bad == 0 and f.is_total and is_p_peaceful(g, f, 8):
            good += 1
    elapsed = time.perf_counter() - t0
    ok = good >= 19 and proper == 20 and elapsed < 60
    verdict("C3 one-shot colouring", ok, f"{good}/20 zero-residual and 8-peaceful, {proper}/20 proper, {elapsed:.1f}s")


def test_c4_star_process(verdict):
    t0 = time.perf_counter()
    delta, trials = 20_000, 200
    s = simulate_star(delta, 4.0, seed=4, trials=trials)
    tr = s.trace
    L = math.log(delta)
    worst_l = worst_g = 0.0
    for i in range(1, tr.i_star + 1):
        dl = abs(s.L[:, i - 1].mean() - tr.l[i - 1])
        tol_l = 2 * i * delta**0.75
        dg = abs(s.good[:, i - 1].mean() - tr.g[i - 1])
        tol_g = 2 * 6 * i * delta / L**4 + 3 * s.good[:, i - 1].std(ddof=1) / math.sqrt(trials)
        worst_l = max(worst_l, dl / tol_l)
        worst_g = max(worst_g, dg / tol_g)
    elapsed = time.perf_counter() - t0
    ok = worst_l <= 1 and worst_g <= 1 and elapsed < 300
    verdict("C4 idealized star", ok,
            f"i*={tr.i_star}, worst |L| deviation/tolerance {worst_l:.4f}, worst |Good| deviation/tolerance {worst_g:.4f}, {elapsed:.1f}s")


def test_c5_nibble_bookkeeping(verdict):
    t0 = time.perf_counter()
    mismatches = []
    wrong_sizes = 0
    checked = 0
    for seed in range(3):
        g = random_regular(2000, 64, seed=seed)
        tr = idealized_trace(64)

        def check(state):
            nonlocal wrong_sizes, checked
            checked += 1
            mismatches.extend(audit_bookkeeping(state, samples=100, seed=state.iteration))
            wrong_sizes += int(np.sum(state.list_size != tr.list_size(state.iteration)))

        nibble_colour(g, seed=seed, on_iteration=check)
    elapsed = time.perf_counter() - t0
    ok = not mismatches and wrong_sizes == 0 and elapsed < 600
    verdict("C5 nibble bookkeeping", ok,
            f"{checked} iteration audits, {len(mismatches)} recomputation mismatches, "
            f"{wrong_sizes} vertex-iterations with list size off schedule, {elapsed:.1f}s")


def test_c6_nibble_trend(verdict, large_nibble_runs):
    gaps = [r["nibble_fraction"] - r["greedy_fraction"] for r in large_nibble_runs]
    ok = all(r["total"] for r in large_nibble_runs) and all(gap >= 0.10 for gap in gaps)
    detail = ", ".join(f"seed {r['seed']}: {r['nibble_fraction']:.4f} vs greedy {r['greedy_fraction']:.4f}" for r in large_nibble_runs)
    verdict("C6 nibble outcome trend", ok, detail)


def test_c7_z_pipeline(verdict):
    t0 = time.perf_counter()
    usable = completed = good_colouring = 0
    residual = []
    for seed in range(20):
        g = random_regular(400, 200, seed=seed)
        res = z_pipeline(g, "1/40", seed=seed, max_rounds=2000, colour_rounds=200)
        usable += int(res.z.ok)
        residual.append(sum(len(v) for v in res.z.residual.values()))
        completed += 1
        f = res.result.colouring
        try:
            check_proper(g, f)
            good_colouring += int(f.is_total and f.palette == 201 and f.colours.max() <= 200)
        except ValueError:
            pass
    # marginal uniformity of the permutation assignment on one K_i
    params = z_params(200, "1/40")
    k = params.k
    z = UsableZ((np.arange(k),), (np.arange(201),), np.zeros(0, dtype=np.int64), params.epsilon)
    rng = np.random.default_rng(7)
    samples = 100_000
    counts = np.zeros((k, k), dtype=np.int64)
    pos = np.arange(k)
    for _ in range(samples):
        counts[pos, assign_z_colours(201, z, params, rng)[:k] - params.complement_palette] += 1
    expect = samples / k
    sd = math.sqrt(samples * (1 / k) * (1 - 1 / k))
    marg = float(np.abs(counts - expect).max() / sd)
    elapsed = time.perf_counter() - t0
    ok = usable >= 18 and good_colouring == completed and marg <= 5
    verdict("C7 Z-pipeline integrity", ok,
            f"usable Z on {usable}/20 seeds (residual violating vertices min {min(residual)}, max {max(residual)}), "
            f"{good_colouring}/{completed} total proper colourings, marginal max deviation {marg:.2f} sd, {elapsed:.1f}s")


def tiny_bipartite():
    # |A| = 8, |B| = 4, each b has three neighbours in A, found by search
    # among such graphs for one with a positive optimum
    nbrs = [(0, 1, 2), (0, 1, 3), (0, 1, 4), (2, 4, 7)]
    edges = [(a, 8 + j) for j, row in enumerate(nbrs) for a in row]
    return Graph.from_edges(12, edges), Bipartition(np.arange(8), 8 + np.arange(4))


def brute_force_min_peacefulness(g, c):
    """All c^m colourings of the m non-isolated vertices, vectorised."""
    verts = np.flatnonzero(g.degree > 0)
    m = verts.size
    pos = {int(v): j for j, v in enumerate(verts)}
    cols = np.stack(np.unravel_index(np.arange(c**m), (c,) * m), axis=1).astype(np.int8)
    ok = np.ones(len(cols), dtype=bool)
    for u, v in g.edges():
        ok &= cols[:, pos[int(u)]] != cols[:, pos[int(v)]]
    cols = cols[ok]
    worst = np.zeros(len(cols), dtype=np.int64)
    for v in verts:
        nb = [pos[int(w)] for w in g.neighbours(v)]
        dis = np.zeros(len(cols), dtype=np.int64)
        for w in nb:
            dup = np.zeros(len(cols), dtype=bool)
            for x in nb:
                if x != w:
                    dup |= cols[:, w] == cols[:, x]
            dis += dup
        worst = np.maximum(worst, dis)
    return int(worst.min())


def test_c8_adversary(verdict):
    delta = 256
    bound = math.log(delta) ** 2
    low_codegree = 0
    codegrees = []
    m_agree = averaging = colourings = 0
    for seed in range(10):
        g, bip = adversarial_bipartite(delta, seed=seed)
        cd = max_codegree(g)
        codegrees.append(cd)
        low_codegree += int(cd <= bound)
        fs = [oneshot_colour(g, OneShotParams(seed=seed))[0],
              greedy_complete(g, PartialColouring.empty(g.n, g.delta + 1)).colouring]
        for f in fs:
            a = audit_uniqueness(g, bip, f)
            colourings += 1
            m_agree += int(a.M == a.M_sorted)
            averaging += int(a.averaging_holds)
    g, bip = tiny_bipartite()
    p, w = min_peacefulness_exact(g, g.delta + 1)
    exhaustive = brute_force_min_peacefulness(g, 4)
    tiny_ok = g.delta == 3 and p == exhaustive > 0 and not certify_no_peaceful(g, 4, p) and certify_no_peaceful(g, 4, p - 1)
    ok = low_codegree >= 8 and m_agree == colourings and averaging == colourings and tiny_ok
    verdict("C8 adversary audit", ok,
            f"codegree <= ln^2(256)={bound:.2f} on {low_codegree}/10 seeds (max codegrees {codegrees}), "
            f"M agreement {m_agree}/{colourings}, averaging {averaging}/{colourings}, tiny instance p*={p} (exhaustive {exhaustive}) certified={tiny_ok}")


def test_c9_round_trips(verdict, tmp_path):
    rng = np.random.default_rng(9)
    bad = 0
    for i in range(50):
        n = int(rng.integers(0, 80))
        upper = np.triu(rng.random((n, n)) < rng.random(), 1)
        u, v = np.nonzero(upper)
        g = Graph.from_edges(n, np.stack([u, v], axis=1))
        palette = g.delta + 1 + int(rng.integers(0, 5))
        f = PartialColouring(random_proper_colouring(rng, g, palette, 0.3), palette)
        gp, fp = tmp_path / f"g{i}.txt", tmp_path / f"f{i}.json"
        save_graph(g, gp)
        save_colouring(f, fp)
        g2, f2 = load_graph(gp), load_colouring(fp)
        same = np.array_equal(g.indptr, g2.indptr) and np.array_equal(g.indices, g2.indices) and g.n == g2.n and f2 == f
        save_graph(g2, tmp_path / "again.txt")
        save_colouring(f2, tmp_path / "again.json")
        same = same and (tmp_path / "again.txt").read_bytes() == gp.read_bytes()
        same = same and (tmp_path / "again.json").read_bytes() == fp.read_bytes()
        bad += int(not same)
    verdict("C9 format round-trips", bad == 0, f"50 fixtures, {bad} mismatches")
