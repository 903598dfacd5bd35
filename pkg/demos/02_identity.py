"""The generating series S = f_theta - E and the closed formula for J-values.

For a form f on Gamma_0(N) (N square-free) the q^m coefficient of S equals
-J_{N,1}(T_m . D_f) and is given in closed form by the product exponents of f.

Run:  python demos/02_identity.py
"""

from __future__ import annotations

from hecke_exponents import builtin, cusp_table, format_rat, identity_series, parse_form, verify

# worked case: eta(z)^8 eta(2z)^8 has no zeros in the upper half-plane, so S = 0
f = parse_form("2; 1:8, 2:8")
ident = identity_series(f, 60)
print("cusp table:", cusp_table(2).to_dict()["rows"])
print("f_theta cusp constants:", {d: format_rat(c) for d, c in ident.ftheta.cusp_constants.items()})
print("Eisenstein coefficients:", {d: format_rat(a) for d, a in ident.eis.coeffs.items()})
print("S is zero:", ident.S.is_zero())

# E4 lifted to level 2 vanishes at the elliptic point, so S carries information
g = builtin("E4", 2)
report = verify(g, 30)
print()
print(report.table())
print("sigma_1 ratio constant:", report.sigma_ratio_constant, "| sign audit:", report.winner)
