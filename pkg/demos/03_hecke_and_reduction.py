"""Hecke orbits of points and reduction into a fundamental domain for Gamma_0(N).

Run:  python demos/03_hecke_and_reduction.py
"""

from __future__ import annotations

from hecke_exponents import QuadPoint, coset_reps, hecke_orbit, hecke_u0, reduce_gamma0
from hecke_exponents.qseries import QSeries

m, N = 6, 3
print(f"|T({m})| =", len(coset_reps(m)), "(sigma_1 =", 1 + 2 + 3 + 6, ")")

# orbit of i under T_6, reduced into a fundamental domain for Gamma_0(3)
for w in hecke_orbit(QuadPoint.i(), m):
    z, g = reduce_gamma0(N, w)
    print(f"  {w.real:+.4f} + {w.imag:.4f}i  ->  {z.real:+.4f} + {z.imag:.4f}i   via {g}")

# on q-expansions the Hecke operator sends a principal part q^-1 to q^-m
j_like = QSeries([1, 0, 196884], v=-1, prec=4)
print("hecke_u0(q^-1 + 196884 q, 3) =", hecke_u0(j_like, 3))
