"""The generating series ``S = f_theta - E`` and the closed formula for
Hecke-orbit values of ``J_{N,1}``.

For square-free ``N`` and ``E`` the Eisenstein form matching ``f_theta`` at
every cusp other than infinity,

    S = -sum_tau nu_tau(f) - sum_{m>=1} J_{N,m}(D_f) q^m,

so ``J_{N,1}(T_m . D_f) = J_{N,m}(D_f) = -[q^m] S`` whenever ``gcd(m, N) = 1``,
and

    [q^m] S = -sum_{d|m} d c(d) + 24 (R + k/12) sigma_1(m),   R = sum_j a_j.

The "paper" variant flips the sign of the divisor-weighted exponent sum and
is kept for auditing only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Literal

from .arith import is_squarefree, sigma
from .eisspace import EisSolution, eis_coefficients
from .modforms import SquareFreeError, cusp_table
from .qseries import QSeries, Rat, format_rat, rat
from .thetaexp import ExponentVector, FThetaData, extract_exponents, f_theta

__all__ = [
    "IdentitySeries",
    "IdentityRow",
    "IdentityReport",
    "identity_series",
    "j_value_on_divisor",
    "rhs_closed",
    "sigma_ratio",
    "verify",
]

Sign = Literal["forced", "paper"]


@dataclass(frozen=True)
class IdentitySeries:
    form: object
    N: int
    weight: int
    S: QSeries
    ftheta: FThetaData
    eis: EisSolution
    exponents: ExponentVector

    @property
    def prec(self) -> int:
        return self.S.prec

    @property
    def det_ratio_sum(self) -> Rat:
        return self.eis.det_ratio_sum

    def h_divisor_degree(self) -> Rat:
        """``-[q^0] S``: total order of ``f`` on Y_0(N)."""
        return -self.S.coeff(0)


def identity_series(f, P: int) -> IdentitySeries:
    """``S = f_theta - E`` to absolute precision ``P`` for a form on Gamma_0(N), N square-free."""
    N = f.N
    if N <= 1 or not is_squarefree(N):
        raise SquareFreeError(f"square-free required: level {N} (and N > 1)")
    fd = f_theta(f, P)
    consts = {d: c for d, c in fd.cusp_constants.items() if d != N}
    eis = eis_coefficients(N, consts, P)
    S = fd.series - eis.series
    exps = extract_exponents(f.series(P), f.weight)
    return IdentitySeries(f, N, f.weight, S, fd, eis, exps)


def j_value_on_divisor(ident: IdentitySeries, m: int) -> Rat:
    """``J_{N,m}(D_f) = -[q^m] S``; equals ``J_{N,1}(T_m . D_f)`` when ``gcd(m, N) = 1``."""
    if m < 1:
        raise ValueError("J-values are read off for m >= 1 only")
    return -ident.S.coeff(m)


def _as_identity(f, m: int) -> IdentitySeries:
    return f if isinstance(f, IdentitySeries) else identity_series(f, m + 1)


def rhs_closed(f, m: int, sign: Sign = "forced") -> Rat:
    """Closed form ``-+ sum_{d|m} d c(d) + 24 (R + k/12) sigma_1(m)`` for ``[q^m] S``.

    ``f`` may be a precomputed :class:`IdentitySeries` or a form.
    """
    ident = _as_identity(f, m)
    if gcd(m, ident.N) != 1:
        raise ValueError(f"m={m} is not prime to the level {ident.N}")
    if sign not in ("forced", "paper"):
        raise ValueError(f"unknown sign convention {sign!r}")
    conv = ident.exponents.weighted_divisor_sum(m)
    base = 24 * (ident.det_ratio_sum + rat(Fraction(ident.weight, 12))) * sigma(m)
    return base - conv if sign == "forced" else base + conv


def sigma_ratio(ident: IdentitySeries, m: int) -> Rat:
    """``([q^m] S + sum_{d|m} d c(d)) / sigma_1(m)``; independent of ``m`` prime to ``N``."""
    return (ident.S.coeff(m) + ident.exponents.weighted_divisor_sum(m)) / sigma(m)


@dataclass(frozen=True)
class IdentityRow:
    m: int
    lhs: Rat  # [q^m] S = -J_{N,1}(T_m . D_f)
    rhs_forced: Rat
    rhs_paper: Rat
    det_ratio_sum: Rat

    @property
    def match_forced(self) -> bool:
        return self.lhs == self.rhs_forced

    @property
    def match_paper(self) -> bool:
        return self.lhs == self.rhs_paper

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "lhs": format_rat(self.lhs),
            "j_value": format_rat(-self.lhs),
            "rhs_forced": format_rat(self.rhs_forced),
            "rhs_paper": format_rat(self.rhs_paper),
            "det_ratio_sum": format_rat(self.det_ratio_sum),
            "match_forced": self.match_forced,
            "match_paper": self.match_paper,
        }


@dataclass(frozen=True)
class IdentityReport:
    form: str
    N: int
    weight: int
    rows: tuple[IdentityRow, ...]
    constant_term: Rat
    det_ratio_sum: Rat
    det_ratio_sum_statement: Rat
    sigma_ratios: tuple[Rat, ...]
    notes: tuple[str, ...] = ()

    @property
    def all_forced(self) -> bool:
        return all(r.match_forced for r in self.rows)

    @property
    def all_paper(self) -> bool:
        return all(r.match_paper for r in self.rows)

    @property
    def winner(self) -> str:
        if self.all_forced and self.all_paper:
            return "both"
        if self.all_forced:
            return "forced"
        if self.all_paper:
            return "paper"
        return "neither"

    @property
    def sigma_ratio_constant(self) -> bool:
        return len(set(self.sigma_ratios)) <= 1

    def ok(self, sign: Sign = "forced") -> bool:
        return self.all_forced if sign == "forced" else self.all_paper

    def mismatches(self, sign: Sign = "forced") -> list[int]:
        attr = "match_forced" if sign == "forced" else "match_paper"
        return [r.m for r in self.rows if not getattr(r, attr)]

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "N": self.N,
            "weight": self.weight,
            "constant_term": format_rat(self.constant_term),
            "det_ratio_sum": format_rat(self.det_ratio_sum),
            "det_ratio_sum_statement_normalisation": format_rat(self.det_ratio_sum_statement),
            "sign_audit": {
                "winner": self.winner,
                "all_forced": self.all_forced,
                "all_paper": self.all_paper,
            },
            "sigma_ratio_constant": self.sigma_ratio_constant,
            "sigma_ratio": format_rat(self.sigma_ratios[0]) if self.sigma_ratios else None,
            "notes": list(self.notes),
            "rows": [r.to_dict() for r in self.rows],
        }

    def table(self) -> str:
        lines = [f"form {self.form}  N={self.N}  k={self.weight}  sign audit: {self.winner}",
                 f"{'m':>5} {'-J(T_m.D_f)':>24} {'forced':>24} {'paper':>24}  ok"]
        for r in self.rows:
            lines.append(f"{r.m:>5} {_short(r.lhs):>24} {_short(r.rhs_forced):>24} "
                         f"{_short(r.rhs_paper):>24}  {'F' if r.match_forced else '-'}"
                         f"{'P' if r.match_paper else '-'}")
        return "\n".join(lines)


def _short(x: Rat) -> str:
    s = format_rat(x)
    if s.endswith("/1"):
        s = s[:-2]
    return s if len(s) <= 24 else s[:10] + "..." + s[-10:]


def verify(f, mmax: int, ident: IdentitySeries | None = None) -> IdentityReport:
    """Compare ``[q^m] S`` with both closed forms for ``m <= mmax`` prime to ``N``."""
    if ident is None:
        ident = f if isinstance(f, IdentitySeries) else identity_series(f, mmax + 1)
    N, k = ident.N, ident.weight
    R = ident.det_ratio_sum
    rows, ratios = [], []
    for m in range(1, mmax + 1):
        if gcd(m, N) != 1:
            continue
        rows.append(IdentityRow(m, ident.S.coeff(m), rhs_closed(ident, m, "forced"),
                                rhs_closed(ident, m, "paper"), R))
        ratios.append(sigma_ratio(ident, m))
    form = ident.form
    label = form.spec() if hasattr(form, "spec") else getattr(form, "name", str(form))
    # cusp constants without dividing the order by the width
    k12 = rat(Fraction(k, 12))
    stmt = {d: form.order_at_cusp(d) - k12 for d in cusp_table(N).widths if d != N}
    R_stmt = eis_coefficients(N, stmt, 2).det_ratio_sum
    notes = []
    if R_stmt != R:
        notes.append("cusp constants ord/width - k/12 and ord - k/12 give different det-ratio sums; "
                     "the width-normalised one is used")
    return IdentityReport(label, N, k, tuple(rows), ident.S.coeff(0), R, R_stmt, tuple(ratios), tuple(notes))
