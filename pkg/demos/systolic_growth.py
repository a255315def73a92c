"""Systoles of congruence kernels of F2 -> SL2(Z/p).

The systole is the shortest nontrivial reduced word in the kernel. It grows
like log of the index, so vol/sys behaves like k / log k.
Run: python demos/systolic_growth.py
"""
from volentropy import systole as S

F2 = S.MarkedGroup(2)
scan = S.sigma_scan_multiples(F2, [S.sl2_mod(p) for p in (3, 5, 7, 11, 13)])
print("index  sys  vol  vol/sys")
for k, sys, vol, ratio in scan.rows:
    print(f"{k:5d}  {sys:3d}  {vol:4d}  {ratio:.2f}")
print(f"fit sys ~ c log k with c = {scan.fit_c:.4f}; ratio spread {scan.ratio_spread():.3f}")

n, word = S.cayley_systole(F2, S.sl2_mod(3))
print("a shortest kernel word for p = 3:", word)
