"""The nibble schedule: idealized list lengths against the star process,
then one real run with its per-iteration trace."""
import argparse

import numpy as np

from peacekit.graph import random_regular
from peacekit.nibble import idealized_trace, nibble_colour, postprocess_recolour, simulate_star
from peacekit.peace import peace_report

ap = argparse.ArgumentParser()
ap.add_argument("--delta", type=int, default=256)
ap.add_argument("--trials", type=int, default=50)
args = ap.parse_args()

tr = idealized_trace(args.delta)
star = simulate_star(args.delta, trials=args.trials, seed=1)
print(f"delta={args.delta}: palette {tr.palette}, alpha {tr.alpha:.4f}, {tr.i_star} iterations")
print("   i        l_i   star mean |L|        g_i  star mean |Good|")
for i in np.unique(np.linspace(1, tr.i_star, 8).astype(int)):
    print(f"{i:4d} {tr.l[i - 1]:10.1f} {star.L[:, i - 1].mean():15.1f} {tr.g[i - 1]:10.1f} {star.good[:, i - 1].mean():17.1f}")

g = random_regular(4 * args.delta, args.delta, seed=0)
f, stats = nibble_colour(g, seed=0)
print(f"\nrun on {g.n} vertices: {stats.coloured} coloured, {stats.uncoloured_bad} stripped for conflicts")
print(f"equalizing flips clamped {stats.anomalies} times, {stats.short_lists} lists fell short of schedule")
print(f"monitor violations {stats.monitor_violations}")
total, info = postprocess_recolour(g, f)
rep = peace_report(g, total)
print(f"after low-band recolouring ({info['c_prime']} colours): mean unique-coloured neighbours "
      f"{rep.undisturbed.mean():.1f} of {args.delta}")
