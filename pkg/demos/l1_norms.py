"""Exact l1 norms of homology classes via rational linear programming.

The LP gives the rational norm together with a dual certificate that is
checked exactly. The integer program gives the integral norm, which can be
larger: on RP^2 the torsion loop has rational norm 0 and integral norm 1.
Run: python demos/l1_norms.py
"""
from volentropy import complex as cx
from volentropy import l1norm as L

for name, make in [("torus", cx.torus), ("genus 2", cx.genus2), ("pillow", cx.pillow)]:
    X = make()
    z = cx.check_pseudomanifold(X).fundamental_cycle
    p = L.NormProblem(X, z)
    r = L.l1_lp(p)
    ok = L.dual_certificate_check(r, p)
    ri = L.l1_ilp(L.NormProblem(X, z, "int"))
    print(f"{name:8s} |[X]|_1 = {r.value} (certificate ok: {ok}), integral {ri.value}, "
          f"betti {cx.betti_numbers(X)}")

RP = cx.projective_plane()
loop = cx.Chain(1, {RP.index(1, "c"): 1})
print("RP^2 loop: rational", L.l1_lp(L.NormProblem(RP, loop)).value,
      "integral", L.l1_ilp(L.NormProblem(RP, loop, "int")).value)

# every multiple n[S^1] is carried by the one-edge loop, so kappa/n = 1/n -> 0
seq = L.fekete_estimate([(n, L.kappa_of_cycle(cx.circle())) for n in range(1, 9)])
print("Fekete ratios for the circle:", [str(x) for x in seq.ratios])
