"""Entropy of free products realised as two factor graphs joined by a bar.

For Z3 * Z3 the answer has the closed form log 2 / (1 + 2d). For two
balanced figure-8 factors, h(d) decreases to the balanced value alpha as the
bar grows. Run: python demos/free_product_dumbbells.py
"""
import math

from volentropy import freeproduct as F
from volentropy import graph as G

c = G.circle(1.0)
z3 = G.CoverSpec.finite(3, {"a": "(0 1 2)"})
print("Z3 * Z3 with unit circles")
for d in (1, 2, 4, 8):
    m = F.build_dumbbell(c, z3, c, z3, d, balance=False)
    h = F.dumbbell_entropy_exact(m)
    print(f"  d={d}  h={h:.12f}  log2/(1+2d)={math.log(2) / (1 + 2 * d):.12f}")

m = F.build_dumbbell(c, z3, c, z3, 1.0, balance=False)
lo, slope, hi = F.ball_growth_bracket(m, 40.0, 0.25)
print(f"  ball growth at d=1: bracket [{lo:.5f}, {hi:.5f}], fitted slope {slope:.5f}")
print("  ball counts:", F.ball_count_table(m, [3, 6, 9, 12, 15]))

fig8 = G.figure_eight()
rows = F.additivity_report(fig8, None, fig8, None, [1, 2, 4, 8, 16, 32])
print(f"\nbalanced figure-8 pair, alpha = {rows[0].alpha:.10f}")
for r in rows:
    print(f"  d={r.d:4}  h(d)={r.h_d:.10f}  gap={r.gap:.3e}")
