"""Permutahedra, the Tomei manifold and the resulting constant.

Builds the permutahedron face lattice, its exact volume, the Tomei cell
complex obtained by gluing 2^m copies, and a constant report for m = 2.
Run: python demos/tomei_constants.py
"""
from volentropy import permutahedron as P

for m in (1, 2, 3, 4):
    poly = P.build_permutahedron(m)
    print(f"m={m}: f-vector {poly.f_vector()}")

for m in (1, 2, 3):
    T = P.build_tomei(m)
    print(f"m={m}: volume {P.permutahedron_volume(m):.10f} "
          f"(times sqrt(m+1): {P.permutahedron_volume_exact(m)}), "
          f"Tomei cells {T.cell_counts}, chi {T.euler_characteristic()}")

rep = P.constants_report(2, t_max=30.0)
print("\nconstants for m = 2")
for q, v, how in rep.rows():
    print(f"  {q:22s} {v:24s} {how}")

th = P.ThetaMap(2)
print("\ncentre of the hexagon maps to", th([2, 2, 2]))
