"""Two-phase colouring through a sampled set Z on a clique plus a sparse
random part. Shows the validator residue, the bad-event report and the
final peacefulness."""
from peacekit.graph import complete_graph, disjoint_union, random_regular
from peacekit.peace import check_proper
from peacekit.zcolour import z_pipeline

g = disjoint_union(complete_graph(201), random_regular(400, 200, seed=3))
res = z_pipeline(g, "1/40", seed=0, max_rounds=2000, colour_rounds=100)
z = res.z
print(f"{g.n} vertices, max degree {g.delta}")
print(f"clique parts K_i: {[k.size for k in z.k_sets]}, |Y| = {z.y_set.size}, resampling rounds {z.rounds}")
print("vertices still violating each neighbour condition:", {k: len(v) for k, v in z.residual.items()})
r = res.result
check_proper(g, r.colouring)
print(f"bad events left {r.residual_bad} after {r.rounds} rounds; completion violations {r.completion_violations}")
print(f"final colouring total={r.colouring.is_total}, peacefulness {r.peacefulness}")
