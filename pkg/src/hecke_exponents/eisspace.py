"""Weight-2 Eisenstein space of Gamma_0(N), N square-free.

The space is spanned by ``E_2(z) - d E_2(dz)`` for ``d | N``, ``d != 1``.  A
form in it is pinned down by its constant terms at the cusps ``1/d_i``,
``d_i != N``; the constant term of ``E_2(z) - d_j E_2(d_j z)`` at ``1/d_i`` is
``1 - gcd(d_i, d_j)^2 / d_j``, which gives the square matrix solved here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Mapping, Sequence

from .arith import divisors, is_squarefree, sigma
from .modforms import SquareFreeError, e2_scaled, e2_series
from .qseries import PrecisionError, QSeries, Rat, rat

__all__ = [
    "SingularMatrixError",
    "GcdMatrix",
    "EisSolution",
    "SigmaReport",
    "build_AN",
    "det_exact",
    "solve_exact",
    "basis_constant_at_cusp",
    "basis_form",
    "eis_coefficients",
    "check_sigma_proportionality",
    "basis_coefficient_matrix",
]


class SingularMatrixError(ArithmeticError):
    pass


def _check_level(N: int) -> None:
    if N <= 1 or not is_squarefree(N):
        raise SquareFreeError(f"square-free required: level {N} (and N > 1)")


@dataclass(frozen=True)
class GcdMatrix:
    """Rows: cusps ``1/d_i`` with ``d_i != N``.  Columns: basis divisors ``d_j != 1``."""

    N: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    entries: tuple[tuple[Rat, ...], ...]

    def as_lists(self) -> list[list[Rat]]:
        return [list(r) for r in self.entries]

    def with_column(self, j: int, column: Sequence[Rat]) -> list[list[Rat]]:
        """Copy with column ``j`` (0-based) replaced."""
        out = self.as_lists()
        for i, v in enumerate(column):
            out[i][j] = rat(v)
        return out

    def __len__(self) -> int:
        return len(self.rows)


def basis_constant_at_cusp(N: int, d_j: int, d_i: int) -> Rat:
    """Constant term of ``E_2(z) - d_j E_2(d_j z)`` at the cusp ``1/d_i``."""
    if N % d_i or N % d_j or d_i <= 0 or d_j <= 0:
        raise ValueError(f"{d_i} and {d_j} must both divide {N}")
    return 1 - rat(gcd(d_i, d_j) ** 2) / d_j


def build_AN(N: int) -> GcdMatrix:
    _check_level(N)
    ds = divisors(N)
    rows = tuple(d for d in ds if d != N)
    cols = tuple(d for d in ds if d != 1)
    entries = tuple(tuple(basis_constant_at_cusp(N, dj, di) for dj in cols) for di in rows)
    return GcdMatrix(N, rows, cols, entries)


def det_exact(M: Sequence[Sequence]) -> Rat:
    """Determinant by fraction-free (Bareiss) elimination on the row-scaled integer matrix."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return rat(1)
    rows = [[rat(x) for x in row] for row in M]
    scale = rat(1)
    A = []
    for row in rows:
        den = 1
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
        A.append([int(x * den) for x in row])
        scale *= den
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k]:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return rat(0)
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            Ai, Ak = A[i], A[k]
            for j in range(k + 1, n):
                Ai[j] = (Ai[j] * akk - aik * Ak[j]) // prev
            Ai[k] = 0
        prev = akk
    return rat(sign * A[n - 1][n - 1]) / scale


def solve_exact(M: Sequence[Sequence], b: Sequence) -> list[Rat]:
    """Solve ``M x = b`` by Gauss-Jordan elimination over the rationals."""
    n = len(M)
    A = [[rat(x) for x in row] + [rat(bi)] for row, bi in zip(M, b)]
    for k in range(n):
        piv = next((r for r in range(k, n) if A[r][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("singular system")
        A[k], A[piv] = A[piv], A[k]
        inv = 1 / A[k][k]
        A[k] = [x * inv for x in A[k]]
        for r in range(n):
            if r != k and A[r][k] != 0:
                f = A[r][k]
                A[r] = [x - f * y for x, y in zip(A[r], A[k])]
    return [A[i][n] for i in range(n)]


def basis_form(d: int, P: int) -> QSeries:
    """``E_2(z) - d E_2(dz)`` with exponents ``0 .. P-1``."""
    return e2_series(P) - e2_scaled(d, P).scale(d)


@dataclass(frozen=True)
class EisSolution:
    N: int
    coeffs: Mapping[int, Rat]  # d_j -> a_j
    series: QSeries
    sigma_constant: Rat
    det_AN: Rat
    cramer_dets: Mapping[int, Rat] = field(default_factory=dict)

    @property
    def det_ratio_sum(self) -> Rat:
        """``sum_j det(A_{f,j}) / det(A_N)``, i.e. ``sum_j a_j``."""
        return sum(self.coeffs.values(), rat(0))

    def constant_at_cusp(self, d_i: int) -> Rat:
        return sum((a * basis_constant_at_cusp(self.N, dj, d_i) for dj, a in self.coeffs.items()), rat(0))

    def to_dict(self, head: int = 20) -> dict:
        from .qseries import format_rat

        return {
            "N": self.N,
            "coefficients": {str(d): format_rat(a) for d, a in self.coeffs.items()},
            "det_AN": format_rat(self.det_AN),
            "det_ratio_sum": format_rat(self.det_ratio_sum),
            "sigma_constant": format_rat(self.sigma_constant),
            "series_head": self.series.truncate(min(self.series.prec, head)).to_dict(),
        }


def eis_coefficients(N: int, cusp_constants: Mapping[int, object], P: int = 256) -> EisSolution:
    """Form in the Eisenstein space with prescribed constants at the cusps ``1/d_i``, ``d_i != N``.

    Coefficients come from Cramer's rule and are cross-checked against a
    direct solve; a mismatch raises ``ArithmeticError``.  A key ``N`` in
    ``cusp_constants`` (the cusp at infinity) is ignored.
    """
    A = build_AN(N)
    consts = {int(d): rat(c) for d, c in cusp_constants.items() if int(d) != N}
    missing = set(A.rows) - set(consts)
    extra = set(consts) - set(A.rows)
    if missing or extra:
        raise ValueError(f"cusp constants must be given exactly for d in {A.rows}; "
                         f"missing {sorted(missing)}, unexpected {sorted(extra)}")
    column = [consts[d] for d in A.rows]
    det = det_exact(A.entries)
    if det == 0:
        raise SingularMatrixError(f"A_{N} is singular")
    cramer = {dj: det_exact(A.with_column(j, column)) for j, dj in enumerate(A.cols)}
    a = {dj: cramer[dj] / det for dj in A.cols}
    direct = solve_exact(A.entries, column)
    if [a[dj] for dj in A.cols] != direct:
        raise ArithmeticError(f"Cramer ratios disagree with the direct solve for N={N}")
    series = QSeries.zero(P)
    for dj, aj in a.items():
        if aj:
            series = series + basis_form(dj, P).scale(aj)
    # gcd(1, N) = 1, so the proportionality constant is b(1) = -24 sum_j a_j
    sigma_c = series.coeff(1) if series.prec > 1 else -24 * sum(a.values(), rat(0))
    return EisSolution(N, a, series, sigma_c, det, cramer)


@dataclass(frozen=True)
class SigmaReport:
    ok: bool
    constant: Rat
    checked: int
    first_violation: int | None = None


def check_sigma_proportionality(sol: EisSolution, M: int) -> SigmaReport:
    """``b(m) == sigma_constant * sigma_1(m)`` for every ``m <= M`` prime to ``N``."""
    if sol.series.prec <= M:
        raise PrecisionError(f"insufficient precision: series known below q^{sol.series.prec}, need q^{M}")
    c = sol.sigma_constant
    checked = 0
    for m in range(1, M + 1):
        if gcd(m, sol.N) != 1:
            continue
        checked += 1
        if sol.series.coeff(m) != c * sigma(m):
            return SigmaReport(False, c, checked, m)
    return SigmaReport(True, c, checked)


def basis_coefficient_matrix(N: int) -> list[list[Rat]]:
    """Coefficients of the basis forms at ``q^e`` for ``e`` in the divisors ``!= 1``;
    rows indexed by ``e``, columns by the basis divisor."""
    _check_level(N)
    ds = [d for d in divisors(N) if d != 1]
    P = N + 1
    forms = {d: basis_form(d, P) for d in ds}
    return [[forms[d].coeff(e) for d in ds] for e in ds]
