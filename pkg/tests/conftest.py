import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from peacekit.graph import Graph

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@st.composite
def graphs(draw, max_n=14, min_n=0):
    """Arbitrary simple graphs as edge subsets of K_n."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


def random_graph(rng, n, p):
    upper = np.triu(rng.random((n, n)) < p, 1)
    u, v = np.nonzero(upper)
    return Graph.from_edges(n, np.stack([u, v], axis=1))


def random_proper_colouring(rng, g, palette, uncoloured_frac=0.0):
    """Random order greedy with random colour choice among the free ones."""
    col = np.full(g.n, -1, dtype=np.int64)
    for v in rng.permutation(g.n):
        if rng.random() < uncoloured_frac:
            continue
        used = set(col[g.neighbours(v)].tolist())
        free = [c for c in range(palette) if c not in used]
        col[v] = rng.choice(free)
    return col


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def large_nibble_runs():
    """Nibble + postprocess and plain greedy on three random 4096-regular
    graphs with 8192 vertices. Slow (tens of minutes), shared by every test
    that needs it."""
    from peacekit.graph import random_regular
    from peacekit.nibble import nibble_colour, postprocess_recolour
    from peacekit.peace import PartialColouring, check_proper, greedy_complete, peace_report

    delta = 4096
    runs = []
    for seed in range(3):
        g = random_regular(2 * delta, delta, seed=seed)
        partial, stats = nibble_colour(g, seed=seed)
        f, info = postprocess_recolour(g, partial)
        check_proper(g, f)
        greedy = greedy_complete(g, PartialColouring.empty(g.n, delta + 1)).colouring
        deg = g.degree.astype(float)
        rep, base = peace_report(g, f), peace_report(g, greedy)
        runs.append({
            "seed": seed,
            "total": f.is_total,
            "colours_used": f.colours_used(),
            "nibble_fraction": float(np.mean(rep.undisturbed / deg)),
            "greedy_fraction": float(np.mean(base.undisturbed / deg)),
            "mean_unique": float(rep.undisturbed.mean()),
            "mean_coloured_degree": float(np.mean(deg - rep.uncoloured_neighbours)),
            "anomalies": stats.anomalies,
            "short_lists": stats.short_lists,
        })
    return runs
