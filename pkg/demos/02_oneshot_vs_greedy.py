"""One-shot random colouring with a large palette against plain greedy.

With 5*delta/mu colours and local resampling, every vertex ends up with at
most mu*delta disturbed neighbours; greedy with delta + 1 colours leaves
most neighbourhoods crowded.
"""
import argparse

from peacekit.graph import random_regular
from peacekit.oneshot import OneShotParams, oneshot_colour
from peacekit.peace import PartialColouring, greedy_complete, peace_report

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=400)
ap.add_argument("--delta", type=int, default=16)
ap.add_argument("--seeds", type=int, default=5)
args = ap.parse_args()

print(f"random {args.delta}-regular graphs on {args.n} vertices")
print("seed  oneshot(peace, rounds, colours)  greedy(peace, colours)")
for seed in range(args.seeds):
    g = random_regular(args.n, args.delta, seed=seed)
    f, stats = oneshot_colour(g, OneShotParams(mu=0.5, seed=seed))
    h = greedy_complete(g, PartialColouring.empty(g.n, g.delta + 1)).colouring
    print(f"{seed:4d}  {stats.peacefulness:5d} {stats.rounds:7d} {f.colours_used():8d}"
          f"           {peace_report(g, h).peacefulness:5d} {h.colours_used():7d}")
