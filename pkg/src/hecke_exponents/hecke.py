"""Hecke cosets, the weight-0 Hecke action, and reduction modulo Gamma_0(N).

Points of the upper half-plane come in two flavours:

* :class:`QuadPoint` -- an exact point ``x + i*sqrt(y2)`` with rational ``x``
  and ``y2``.  The set of such points is stable under rational Moebius maps,
  so CM points (``i``, ``rho``) and all their Hecke images stay exact and can
  be evaluated at any working precision later.
* plain ``complex`` or ``mpmath.mpc`` values.

Reduction always locates the witness matrix with double-precision floats and
then applies it in the point's own arithmetic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, NamedTuple, Sequence, Union

import mpmath

from .arith import divisors, egcd, sigma
from .qseries import PrecisionError, QSeries, Rat, rat

__all__ = [
    "HeckeCoset",
    "coset_reps",
    "hecke_u0",
    "QuadPoint",
    "Matrix",
    "HDivisor",
    "hecke_orbit",
    "hecke_image",
    "sl2_reduce",
    "reduce_gamma0",
    "divisor_tail",
    "exp_sum",
    "gamma0_coset_reps",
    "random_gamma0",
    "mobius",
    "imag",
]

Matrix = tuple  # (a, b, c, d) integer entries
_I = (1, 0, 0, 1)


class HeckeCoset(NamedTuple):
    a: int
    b: int
    d: int

    @property
    def matrix(self) -> Matrix:
        return (self.a, self.b, 0, self.d)


def coset_reps(m: int) -> list[HeckeCoset]:
    """Upper-triangular representatives ``(a b; 0 d)``, ``ad = m``, ``0 <= b < d``.

    Sorted by ``(a, b, d)``; there are ``sigma_1(m)`` of them.
    """
    if m <= 0:
        raise ValueError(f"Hecke index must be positive, got {m}")
    return sorted(HeckeCoset(a, b, m // a) for a in divisors(m) for b in range(m // a))


def hecke_u0(f: QSeries, m: int) -> QSeries:
    """``sum_{gamma in T(m)} f(gamma z)`` on q-expansions (no normalising factor).

    The coefficient of ``q^l`` is ``sum_{ad=m, a | l} d * c(d*l/a)``.  The
    output is known exactly where every needed input coefficient is known.
    """
    if m <= 0:
        raise ValueError(f"Hecke index must be positive, got {m}")
    if m == 1:
        return f
    top = f.prec - 1  # largest known input exponent
    vf = f.v  # input coefficients below vf are zero
    pairs = [(a, m // a) for a in divisors(m)]
    lo = min(m * vf, vf // m, 0)
    out = []
    ell = lo
    while all(ell % a or d * ell // a <= top for a, d in pairs):
        s = rat(0)
        for a, d in pairs:
            if ell % a == 0:
                n = d * ell // a
                if n >= vf:
                    s += d * f.coeff(n)
        out.append(s)
        ell += 1
    if not out:
        raise PrecisionError(
            f"insufficient precision: input known below q^{f.prec} determines no coefficient of T_{m}"
        )
    return QSeries._raw(lo, out)


# ----------------------------------------------------------------------
# points
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class QuadPoint:
    """Exact point ``x + i*sqrt(y2)`` of the upper half-plane."""

    x: Fraction
    y2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y2", Fraction(self.y2))
        if self.y2 <= 0:
            raise ValueError("point must lie in the upper half-plane")

    @classmethod
    def i(cls) -> "QuadPoint":
        return cls(Fraction(0), Fraction(1))

    @classmethod
    def rho(cls) -> "QuadPoint":
        """``exp(2 pi i / 3) = -1/2 + i*sqrt(3)/2``."""
        return cls(Fraction(-1, 2), Fraction(3, 4))

    @property
    def imag(self) -> float:
        return math.sqrt(self.y2)

    @property
    def real(self) -> float:
        return float(self.x)

    def __complex__(self) -> complex:
        return complex(float(self.x), math.sqrt(self.y2))

    def to_mpc(self) -> mpmath.mpc:
        """Value at the current mpmath working precision."""
        return mpmath.mpc(mpmath.mpf(self.x.numerator) / self.x.denominator,
                          mpmath.sqrt(mpmath.mpf(self.y2.numerator) / self.y2.denominator))

    def act(self, M: Matrix) -> "QuadPoint":
        a, b, c, d = M
        det = a * d - b * c
        if det <= 0:
            raise ValueError("Moebius map must have positive determinant")
        x, y2 = self.x, self.y2
        den = (c * x + d) ** 2 + c * c * y2
        re = ((a * x + b) * (c * x + d) + a * c * y2) / den
        return QuadPoint(re, det * det * y2 / (den * den))

    def translate(self, n: int) -> "QuadPoint":
        return QuadPoint(self.x + n, self.y2)

    def __repr__(self) -> str:
        return f"QuadPoint({self.x} + i*sqrt({self.y2}))"


Point = Union[QuadPoint, complex, "mpmath.mpc"]


def imag(z: Point) -> float:
    return z.imag if isinstance(z, QuadPoint) else float(z.imag)


def _as_complex(z: Point) -> complex:
    return complex(z) if isinstance(z, QuadPoint) else complex(float(z.real), float(z.imag))


def mobius(M: Matrix, z: Point) -> Point:
    """``(az + b)/(cz + d)`` in the arithmetic of ``z``."""
    if isinstance(z, QuadPoint):
        return z.act(M)
    a, b, c, d = M
    return (a * z + b) / (c * z + d)


def _check_upper(z: Point) -> None:
    if isinstance(z, QuadPoint):
        return
    if not z.imag > 0:
        raise ValueError(f"point {z} is not in the upper half-plane")


def _matmul(A: Matrix, B: Matrix) -> Matrix:
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


# ----------------------------------------------------------------------
# Hecke orbits
# ----------------------------------------------------------------------
def hecke_orbit(z: Point, m: int) -> list:
    """Images ``(az + b)/d`` over :func:`coset_reps`, in coset order."""
    _check_upper(z)
    return [mobius(g.matrix, z) for g in coset_reps(m)]


@dataclass(frozen=True)
class HDivisor:
    """Finite formal sum of points of the upper half-plane with rational multiplicities."""

    points: tuple = ()
    N: int = 1

    def __post_init__(self):
        pts = []
        for z, mult in self.points:
            _check_upper(z)
            mult = rat(mult)
            if mult == 0:
                raise ValueError("divisor multiplicities must be nonzero")
            pts.append((z, mult))
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def degree(self) -> Rat:
        return sum((m for _, m in self.points), rat(0))


def hecke_image(D: HDivisor, m: int) -> HDivisor:
    """``T_m . D``: every point replaced by its Hecke orbit, multiplicities carried."""
    pts = [(w, mult) for z, mult in D.points for w in hecke_orbit(z, m)]
    return HDivisor(tuple(pts), D.N)


# ----------------------------------------------------------------------
# reduction
# ----------------------------------------------------------------------
def sl2_reduce(z: complex, max_steps: int = 10_000) -> tuple[complex, Matrix]:
    """Float reduction into the standard SL_2(Z) domain; returns ``(w, g)`` with ``w = g z``."""
    x, y = z.real, z.imag
    if not y > 0:
        raise ValueError(f"point {z} is not in the upper half-plane")
    g = _I
    for _ in range(max_steps):
        n = math.floor(x + 0.5)
        if n:
            x -= n
            g = _matmul((1, -n, 0, 1), g)
        r2 = x * x + y * y
        if r2 >= 1.0 - 1e-14:
            return complex(x, y), g
        x, y = -x / r2, y / r2
        g = _matmul((0, -1, 1, 0), g)
    raise RuntimeError(f"SL2 reduction of {z} did not terminate")


def _best_in_class(w: complex, a: int, c: int, N: int) -> tuple[int, int] | None:
    """Coprime ``(c', d')`` with ``c' a + d' c = 0 mod N`` minimising ``|c' w + d'|``.

    ``w`` is SL_2(Z)-reduced, so ``Im w >= sqrt(3)/2`` and the search is short.
    Returns ``None`` when ``(0, 1)`` (the identity coset) is optimal.
    """
    x, y = w.real, w.imag
    if c % N == 0:
        best, arg = 1.0, None
    else:
        best, arg = math.inf, None
    cp = 1
    cap = 50 * N + 50
    while cp * cp * y * y < best:
        if cp > cap:
            raise RuntimeError("coset search failed to find a representative")
        centre = -cp * x
        radius = math.sqrt(best - cp * cp * y * y) if best < math.inf else 2 * N + 2
        for dp in range(math.floor(centre - radius), math.ceil(centre + radius) + 1):
            if (cp * a + dp * c) % N or gcd(cp, dp) != 1:
                continue
            val = (cp * x + dp) ** 2 + (cp * y) ** 2
            if val < best * (1 - 1e-12):
                best, arg = val, (cp, dp)
        cp += 1
    return arg


def _strip_shift(x) -> int:
    """Integer n with ``x + n`` in ``(-1/2, 1/2]``."""
    return -math.ceil(x - Fraction(1, 2)) if isinstance(x, Fraction) else -math.ceil(x - 0.5)


def reduction_witness(N: int, zc: complex) -> tuple[Matrix, float]:
    """Float search for ``gamma`` in Gamma_0(N) maximising ``Im(gamma z)``.

    Returns ``(gamma, Im(gamma z))`` before the final translation; the
    identity is returned when ``z`` itself is (numerically) maximal.
    """
    w, g = sl2_reduce(zc)
    a, _, c, _ = g
    pick = _best_in_class(w, a, c, N)
    if pick is None:
        gamma, y_best = g, w.imag
    else:
        cp, dp = pick
        gamma = _matmul(lift_bottom_row(cp, dp), g)
        y_best = w.imag / ((cp * w.real + dp) ** 2 + (cp * w.imag) ** 2)
    if y_best <= zc.imag * (1 + 1e-12):
        return _I, zc.imag
    return gamma, y_best


def reduce_gamma0(N: int, z: Point) -> tuple[Point, Matrix]:
    """Representative of the Gamma_0(N)-orbit of ``z`` with maximal imaginary part.

    Returns ``(z_tilde, gamma)`` with ``gamma`` in Gamma_0(N) (``c = 0 mod N``,
    ``det = 1``), ``gamma z = z_tilde`` and ``Re(z_tilde)`` in ``(-1/2, 1/2]``.
    Ties in the imaginary part are broken in favour of ``z`` itself, which
    makes the map idempotent.
    """
    if N < 1:
        raise ValueError("level must be positive")
    _check_upper(z)
    gamma, _ = reduction_witness(N, _as_complex(z))
    zt = mobius(gamma, z)
    n = _strip_shift(zt.x if isinstance(zt, QuadPoint) else float(zt.real))
    if n:
        gamma = _matmul((1, n, 0, 1), gamma)
        zt = zt.translate(n) if isinstance(zt, QuadPoint) else zt + n
    return zt, gamma


def divisor_tail(D: HDivisor, r=1) -> HDivisor:
    """Reduced points of ``D`` with ``Im(z_tilde) > r``; multiplicities unchanged.

    Exact points are compared exactly (``Im^2 > r^2``).
    """
    if r < 1:
        raise ValueError("tail threshold must satisfy r >= 1")
    r2 = Fraction(r) ** 2
    kept = []
    for z, mult in D.points:
        zt, _ = reduce_gamma0(D.N, z)
        if isinstance(zt, QuadPoint):
            if zt.y2 > r2:
                kept.append((zt, mult))
        elif zt.imag > r:
            kept.append((zt, mult))
    return HDivisor(tuple(kept), D.N)


def exp_sum(D: HDivisor, dps: int | None = None) -> mpmath.mpc:
    """``sum nu * e(-z) = sum nu * exp(2 pi Im z) * exp(-2 pi i Re z)`` over the points of ``D``.

    With ``dps=None`` the working precision is chosen so that the largest term
    is resolved to about 30 digits below the unit.
    """
    if not D.points:
        return mpmath.mpc(0)
    if dps is None:
        ymax = max(imag(z) for z, _ in D.points)
        dps = 30 + int(2 * math.pi * ymax / math.log(10))
    with mpmath.workdps(dps):
        total = mpmath.mpc(0)
        for z, mult in D.points:
            if isinstance(z, QuadPoint):
                zz = z.to_mpc()
            else:
                zz = mpmath.mpc(z)
            nu = mpmath.mpf(mult.numerator) / mult.denominator
            total += nu * mpmath.exp(-2j * mpmath.pi * zz)
        return +total


# ----------------------------------------------------------------------
# Gamma_0(N) helpers
# ----------------------------------------------------------------------
def lift_bottom_row(c: int, d: int) -> Matrix:
    """An SL_2(Z) matrix with bottom row ``(c, d)``; requires ``gcd(c, d) = 1``."""
    g, u, v = egcd(c, d)
    if g != 1:
        raise ValueError(f"bottom row ({c}, {d}) is not primitive")
    # u*c + v*d = 1  ->  (v, -u; c, d) has det v*d + u*c = 1
    return (v, -u, c, d)


def gamma0_coset_reps(N: int) -> list[Matrix]:
    """Right coset representatives of Gamma_0(N) in SL_2(Z), one per point of P^1(Z/N)."""
    seen = set()
    reps = []
    for c in range(N):
        for d in range(N if N > 1 else 1):
            if gcd(gcd(c, d), N) != 1:
                continue
            key = _p1_key(c, d, N)
            if key in seen:
                continue
            seen.add(key)
            cc, dd = c, d
            while gcd(cc, dd) != 1:
                dd += N
            reps.append(lift_bottom_row(cc, dd))
    if N == 1:
        return [_I]
    return reps


def _p1_key(c: int, d: int, N: int) -> tuple[int, int]:
    """Canonical representative of the class of ``(c : d)`` in P^1(Z/N)."""
    best = None
    for u in range(1, N):
        if gcd(u, N) == 1:
            key = ((u * c) % N, (u * d) % N)
            if best is None or key < best:
                best = key
    return best if best is not None else (0, 0)


def p1_key(M: Matrix, N: int) -> tuple[int, int]:
    """The P^1(Z/N) class labelling the coset ``Gamma_0(N) M``."""
    return _p1_key(M[2], M[3], N)


def random_gamma0(N: int, rng: random.Random, size: int = 20) -> Matrix:
    """A random element of Gamma_0(N) with entries of moderate size."""
    while True:
        c = N * rng.randint(-size, size)
        d = rng.randint(-size * N, size * N)
        if gcd(c, d) != 1:
            continue
        a, b, _, _ = lift_bottom_row(c, d)
        t = rng.randint(-size, size)
        return _matmul((1, t, 0, 1), (a, b, c, d))
