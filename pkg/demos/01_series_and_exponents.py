"""Exact q-series: Delta, E2 as its log-derivative, and product exponents.

Run:  python demos/01_series_and_exponents.py
"""

from __future__ import annotations

from hecke_exponents import builtin, delta_series, e2_series, extract_exponents, log_derivative, parse_form

P = 40

delta = delta_series(P)
print("Delta =", delta.truncate(8))

# theta(Delta)/Delta = E2, exactly
print("theta(Delta)/Delta == E2:", log_derivative(delta) == e2_series(P))

# Delta = q prod (1 - q^n)^24
print("exponents of Delta:", [int(c) for c in extract_exponents(delta, 12).c[:10]])

# E4 has a zero at rho, so its exponents are not constant
E4 = builtin("E4", 1).series(P)
print("exponents of E4:  ", [int(c) for c in extract_exponents(E4, 4).c[:8]])

# an eta quotient on Gamma_0(2): eta(z)^8 eta(2z)^8
f = parse_form("2; 1:8, 2:8")
ev = extract_exponents(f.series(P), f.weight)
print(f"{f.spec()}: weight {f.weight}, q^{ev.h} * prod (1-q^n)^c(n), c =", [int(c) for c in ev.c[:8]])
print("product rebuilds the series:", ev.product(P) == f.series(P))
