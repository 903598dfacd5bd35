"""Product exponents and the weight-2 form ``f_theta = theta(f)/f - (k/12) E_2``.

Sign convention: for ``f = q^h prod (1 - q^n)^{c(n)}``

    theta(f)/f = h - sum_{m>=1} (sum_{d|m} d c(d)) q^m

which is the only sign compatible with ``theta(Delta)/Delta = E_2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .arith import divisors, sigma
from .modforms import cusp_table, e2_series, product_expansion
from .qseries import PrecisionError, QSeries, Rat, inv, mul, rat, theta

__all__ = [
    "ExponentVector",
    "FThetaData",
    "log_derivative",
    "extract_exponents",
    "f_theta",
]


@dataclass(frozen=True)
class ExponentVector:
    """``c(1) .. c(P)`` together with the leading exponent and the weight."""

    c: tuple
    h: int
    k: int

    def __len__(self) -> int:
        return len(self.c)

    def __getitem__(self, n: int) -> Rat:
        """``c(n)``, 1-based."""
        if n < 1:
            raise IndexError("exponents are indexed from 1")
        if n > len(self.c):
            raise PrecisionError(f"insufficient precision: c({n}) requested, {len(self.c)} known")
        return self.c[n - 1]

    def weighted_divisor_sum(self, m: int) -> Rat:
        """``sum_{d|m} d c(d)``."""
        return sum((d * self[d] for d in divisors(m)), rat(0))

    def sigma_f(self, m: int) -> Rat:
        """``sum_{d|m} c(d)``."""
        return sum((self[d] for d in divisors(m)), rat(0))

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        n = min(len(self.c), len(other.c))
        return ExponentVector(tuple(a + b for a, b in zip(self.c[:n], other.c[:n])),
                              self.h + other.h, self.k + other.k)

    def product(self, prec: int | None = None) -> QSeries:
        """Rebuild ``q^h prod (1 - q^n)^{c(n)}`` from the stored exponents."""
        if prec is None:
            prec = self.h + len(self.c) + 1
        return product_expansion(self.c, self.h, prec)


def log_derivative(f: QSeries) -> QSeries:
    """``theta(f)/f``; its constant term is the leading exponent of ``f``."""
    if f.is_zero():
        raise ZeroDivisionError("log derivative of the zero series")
    # theta(q^v u)/(q^v u) = v + theta(u)/u with u a unit power series
    u = f.shift(-f.v)
    out = mul(theta(u), inv(u))
    return out + QSeries.monomial(0, f.v, max(out.prec, 1))


def extract_exponents(f: QSeries, k: int) -> ExponentVector:
    """Exponents ``c(n)`` of ``f = q^h prod (1 - q^n)^{c(n)}``.

    With ``s(m) = -[q^m] theta(f)/f`` the recursion is
    ``c(m) = (s(m) - sum_{d|m, d<m} d c(d)) / m``.
    """
    if f.is_zero() or f.leading_coefficient() != 1:
        raise ValueError("extract_exponents needs a series with leading coefficient 1")
    L = log_derivative(f)
    c: list = []
    for m in range(1, L.prec):
        s = -L.coeff(m)
        for d in divisors(m)[:-1]:
            s -= d * c[d - 1]
        c.append(s / m)
    return ExponentVector(tuple(c), f.v, k)


@dataclass(frozen=True)
class FThetaData:
    """``f_theta`` as a q-series plus its constant terms at the cusps ``1/d``."""

    series: QSeries
    cusp_constants: Mapping[int, Rat] = field(default_factory=dict)
    N: int | None = None
    weight: int | None = None

    def residue_sum(self, widths: Mapping[int, int], h_divisor_degree=0) -> Rat:
        """``sum_d width_d * c_d + (total order on Y_0(N))``; zero by the residue theorem."""
        return sum((widths[d] * c for d, c in self.cusp_constants.items()), rat(0)) + rat(h_divisor_degree)


def f_theta(f, P: int, weight: int | None = None) -> FThetaData:
    """Build ``f_theta`` to absolute precision ``P``.

    ``f`` is an eta quotient or lifted level-one form (anything with ``N``,
    ``weight``, ``series`` and ``order_at_cusp``), or a bare :class:`QSeries`
    together with ``weight``.  Cusp constants are ``ord_d / width_d - k/12``
    and are only available for forms that know their level.
    """
    if isinstance(f, QSeries):
        if weight is None:
            raise ValueError("a bare q-series needs an explicit weight")
        series, k, N = f, weight, None
    elif hasattr(f, "order_at_cusp") and hasattr(f, "series"):
        k, N = f.weight, f.N
        if weight is not None and weight != k:
            raise ValueError(f"weight {weight} disagrees with the form's weight {k}")
        series = f.series(P)
    else:
        raise TypeError(f"cannot build f_theta from {type(f).__name__}")
    if series.is_zero() or series.leading_coefficient() != 1:
        raise ValueError("f_theta needs a normalised series (leading coefficient 1)")
    L = log_derivative(series)
    S = L - e2_series(L.prec).scale(Fraction(k, 12))
    consts = {}
    if N is not None:
        if N == 1:
            consts = {1: rat(f.h_inf) - rat(Fraction(k, 12))}
        else:
            consts = {row.d: row.ftheta_const for row in cusp_table(N, f).rows}
    return FThetaData(S.truncate(min(P, S.prec)), consts, N, k)
