"""Volume entropy of small metric graphs, computed two ways.

The Perron route solves rho(B(h)) = 1 for the weighted non-backtracking
matrix. The orbit route counts lifts of the basepoint in the universal cover
and brackets the exponential growth rate. Run: python demos/graph_entropy.py
"""
import math

import numpy as np

from volentropy import entropy as E
from volentropy import graph as G

print("known values")
for name, g, exact in [("figure-8", G.figure_eight(), math.log(3)),
                       ("theta", G.theta(), math.log(2)),
                       ("rose of 3", G.rose(3), math.log(5))]:
    h = E.entropy_perron(g).value
    print(f"  {name:10s} perron={h:.12f}  exact={exact:.12f}")

print("\nrandom graphs: the orbit-count bracket should contain the Perron value")
rng = np.random.default_rng(1)
for _ in range(5):
    g = G.random_graph(rng, int(rng.integers(2, 5)))
    h = E.entropy_perron(g).value
    lo, hi = E.entropy_orbit_count(g, t_max=25.0).bracket
    print(f"  rank {g.rank()}  {lo:.4f} <= {h:.4f} <= {hi:.4f}")

# entropy scales like 1/length, so entropy * total length does not move
g = G.theta(1.0, 2.0, 0.5)
print("\nOmega = ent * length under rescaling")
for lam in (0.1, 1.0, 10.0):
    print(f"  lambda={lam:5}  omega={E.omega_value(g.scaled(lam)):.12f}")

# a connected 3-sheeted cover: same entropy, three times the length
fig8 = G.figure_eight()
cover = G.finite_cover(fig8, G.CoverSpec.finite(3, {"a": "(0 1 2)", "b": "(0 1)"}))
print(f"\n3-fold cover: ent {E.entropy_perron(cover).value:.12f}, "
      f"length {cover.total_length()} (base {fig8.total_length()})")

lengths, om = E.minimize_omega_lengths(fig8, 1.0, seed=0)
print(f"best figure-8 metric of length 1: lengths {np.round(lengths, 6)}, omega {om:.8f}"
      f" vs 2 log 3 = {2 * math.log(3):.8f}")
