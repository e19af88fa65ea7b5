"""Counting audit on the random bipartite construction: the number of
uniquely coloured neighbours of each vertex of B, summed two ways, for a
greedy and a one-shot colouring, plus sampled subset statistics."""
from peacekit.adversary import audit_subsets, audit_uniqueness, default_subset_size
from peacekit.graph import adversarial_bipartite, max_codegree
from peacekit.oneshot import OneShotParams, oneshot_colour
from peacekit.peace import PartialColouring, greedy_complete

delta = 256
g, bip = adversarial_bipartite(delta, seed=0)
print(f"|A| = {bip.side_a.size}, |B| = {bip.side_b.size}, max codegree {max_codegree(g)}")
for name, f in [
    ("greedy", greedy_complete(g, PartialColouring.empty(g.n, g.delta + 1)).colouring),
    ("oneshot", oneshot_colour(g, OneShotParams(seed=0))[0]),
]:
    a = audit_uniqueness(g, bip, f)
    print(f"{name:8s} colours {f.colours_used():5d}  M = {a.M} (sorted pass {a.M_sorted}), "
          f"min c_b = {a.min_cb} at vertex {a.witness_b} (M/|B| = {a.M / bip.side_b.size:.1f})")
s = audit_subsets(g, bip, default_subset_size(delta), samples=30, seed=0)
print(f"subset sizes {s.sizes}: max exactly-one counts {s.max_count}, bound {s.bound:.1f}")
