"""Concrete modular forms: E2 and its rescalings, level-one Eisenstein series,
Delta, eta quotients, level-one forms viewed on Gamma_0(N), and cusp data for
square-free levels.
"""

from __future__ import annotations

import csv
import io
import json
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import gcd, isqrt
from typing import Mapping, Sequence

from .arith import divisors, is_squarefree, prime_factors, psi, sigma_table
from .hecke import HDivisor, QuadPoint, gamma0_coset_reps, p1_key
from .qseries import QSeries, Rat, format_rat, rat

__all__ = [
    "e2_series",
    "e2_scaled",
    "eisenstein_level_one",
    "delta_series",
    "product_expansion",
    "EtaQuotient",
    "Validation",
    "validate",
    "eta_order_at_cusp",
    "eta_quotient_series",
    "LevelOneForm",
    "LiftedForm",
    "BUILTINS",
    "builtin",
    "CuspRow",
    "CuspTable",
    "cusp_table",
    "parse_form",
    "eta_generators",
    "random_eta_quotient",
]


class SquareFreeError(ValueError):
    pass


def _require_squarefree(N: int) -> None:
    if N <= 1 or not is_squarefree(N):
        raise SquareFreeError(f"square-free required: level {N} (and N > 1)")


# ----------------------------------------------------------------------
# Eisenstein series and Delta
# ----------------------------------------------------------------------
def e2_series(P: int) -> QSeries:
    """``E_2 = 1 - 24 sum sigma_1(n) q^n``, exponents ``0 .. P-1``."""
    return e2_scaled(1, P)


def e2_scaled(d: int, P: int) -> QSeries:
    """``E_2(dz)``, exponents ``0 .. P-1``."""
    if d <= 0:
        raise ValueError(f"scaling factor must be positive, got {d}")
    if P <= 0:
        raise ValueError("precision must be positive")
    sig = sigma_table((P - 1) // d + 1)
    c = [rat(0)] * P
    c[0] = rat(1)
    for n in range(1, (P - 1) // d + 1):
        c[d * n] = rat(-24 * sig[n])
    return QSeries(c, 0, P)


_EIS_NORMALISER = {4: 240, 6: -504, 8: 480, 10: -264, 14: -24}


def eisenstein_level_one(k: int, P: int) -> QSeries:
    """Normalised holomorphic Eisenstein series ``E_k`` (k in 4, 6, 8, 10, 14)."""
    if k not in _EIS_NORMALISER:
        raise ValueError(f"E_{k} is not available (choose one of {sorted(_EIS_NORMALISER)})")
    sig = sigma_table(P, k - 1)
    a = _EIS_NORMALISER[k]
    return QSeries([1] + [a * sig[n] for n in range(1, P)], 0, P)


def product_expansion(c: Sequence, h: int, prec: int) -> QSeries:
    """``q^h prod_{n>=1} (1 - q^n)^{c(n)}`` to absolute precision ``prec``.

    ``c[n-1]`` is the exponent of ``(1 - q^n)``.  Computed through the
    logarithmic derivative ``-sum_m (sum_{d|m} d c(d)) q^m`` and the
    recurrence ``n u_n = sum_j L_j u_{n-j}`` for the unit part ``u``.
    """
    P = prec - h
    if P <= 0:
        return QSeries.zero(prec)
    if len(c) < P - 1:
        raise ValueError(f"need {P - 1} exponents for precision {prec}, got {len(c)}")
    cc = [rat(x) for x in c[: P - 1]]
    L = [rat(0)] * P
    for d in range(1, P):
        w = d * cc[d - 1]
        if w:
            for m in range(d, P, d):
                L[m] -= w
    u = [rat(1)] + [rat(0)] * (P - 1)
    for n in range(1, P):
        s = rat(0)
        for j in range(1, n + 1):
            if L[j]:
                s += L[j] * u[n - j]
        u[n] = s / n
    return QSeries(u, h, prec)


def delta_series(P: int) -> QSeries:
    """``Delta = q prod (1 - q^n)^24``, exponents ``1 .. P`` (absolute precision ``P + 1``)."""
    return product_expansion([24] * P, 1, P + 1)


# ----------------------------------------------------------------------
# eta quotients
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Validation:
    ok: bool
    diagnostics: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class EtaQuotient:
    """``prod_{delta | N} eta(delta z)^{r_delta}``."""

    N: int
    r: Mapping[int, int]

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("level must be positive")
        r = {}
        for delta, e in dict(self.r).items():
            delta, e = int(delta), int(e)
            if delta <= 0 or self.N % delta:
                raise ValueError(f"eta exponent key {delta} does not divide N={self.N}")
            if e:
                r[delta] = e
        object.__setattr__(self, "r", dict(sorted(r.items())))

    def __hash__(self):
        return hash((self.N, tuple(self.r.items())))

    @property
    def weight_frac(self) -> Fraction:
        return Fraction(sum(self.r.values()), 2)

    @property
    def weight(self) -> int:
        k = self.weight_frac
        if k.denominator != 1:
            raise ValueError(f"eta quotient {self} has half-integral weight {k}")
        return int(k)

    @property
    def h_frac(self) -> Fraction:
        return Fraction(sum(d * e for d, e in self.r.items()), 24)

    @property
    def h_inf(self) -> int:
        h = self.h_frac
        if h.denominator != 1:
            raise ValueError(f"order at infinity {h} is not an integer")
        return int(h)

    def exponents(self, n_max: int) -> list[int]:
        """Product exponents ``c(n) = sum_{delta | gcd(n, N)} r_delta`` for ``n = 1 .. n_max``."""
        return [sum(e for d, e in self.r.items() if n % d == 0) for n in range(1, n_max + 1)]

    def series(self, P: int) -> QSeries:
        return eta_quotient_series(self, P)

    def order_at_cusp(self, d: int) -> Rat:
        return eta_order_at_cusp(self, d)

    def h_divisor(self) -> HDivisor:
        """Eta quotients never vanish on the upper half-plane."""
        return HDivisor((), self.N)

    def __mul__(self, other: "EtaQuotient") -> "EtaQuotient":
        if not isinstance(other, EtaQuotient):
            return NotImplemented
        N = self.N * other.N // gcd(self.N, other.N)
        r = dict(self.r)
        for d, e in other.r.items():
            r[d] = r.get(d, 0) + e
        return EtaQuotient(N, r)

    def lift(self, N: int) -> "EtaQuotient":
        if N % self.N:
            raise ValueError(f"cannot view level {self.N} as level {N}")
        return EtaQuotient(N, self.r)

    @classmethod
    def parse(cls, text: str, level: int | None = None) -> "EtaQuotient":
        """Parse ``"N; d1:r1, d2:r2"`` or, with ``level`` given, ``"d1:r1, d2:r2"``."""
        text = text.strip()
        if ";" in text:
            head, _, body = text.partition(";")
            N = int(head.strip())
            if level is not None and level != N:
                raise ValueError(f"level {level} disagrees with eta spec level {N}")
        else:
            if level is None:
                raise ValueError("eta spec without 'N;' prefix needs an explicit level")
            N, body = level, text
        r = {}
        for item in filter(None, (s.strip() for s in body.split(","))):
            m = re.fullmatch(r"(\d+)\s*:\s*([+-]?\d+)", item)
            if not m:
                raise ValueError(f"malformed eta factor {item!r}; expected 'delta:exponent'")
            d, e = int(m.group(1)), int(m.group(2))
            r[d] = r.get(d, 0) + e
        return cls(N, r)

    def spec(self) -> str:
        return f"{self.N}; " + ", ".join(f"{d}:{e}" for d, e in self.r.items())

    def __str__(self) -> str:
        return self.spec()


def eta_order_at_cusp(f: EtaQuotient, d: int) -> Rat:
    """Order at the cusp ``1/d`` in the local uniformiser of X_0(N).

    ``(N / (24 gcd(d^2, N))) * sum_delta r_delta gcd(d, delta)^2 / delta``.
    """
    if d <= 0 or f.N % d:
        raise ValueError(f"{d} does not divide the level {f.N}")
    s = sum(Fraction(e * gcd(d, delta) ** 2, delta) for delta, e in f.r.items())
    return rat(Fraction(f.N, 24 * gcd(d * d, f.N)) * s)


def validate(f: EtaQuotient) -> Validation:
    """Check that ``f`` is a modular form of even weight and trivial character on Gamma_0(N)."""
    msgs = []
    k = f.weight_frac
    if k.denominator != 1 or k.numerator % 2:
        msgs.append(f"weight {k} is not an even integer")
    h = f.h_frac
    if h.denominator != 1:
        msgs.append(f"order at infinity {h} is not an integer")
    for d in divisors(f.N):
        o = eta_order_at_cusp(f, d)
        if o.denominator != 1:
            msgs.append(f"order {o} at cusp 1/{d} is not an integer")
    # trivial character needs prod delta^{r_delta} to be a rational square
    odd = [p for p, _ in prime_factors(f.N).items()
           if sum(e * prime_factors(d).get(p, 0) for d, e in f.r.items()) % 2]
    if odd:
        msgs.append(f"prod delta^r_delta is not a square (odd at primes {odd})")
    return Validation(not msgs, tuple(msgs))


def eta_quotient_series(f: EtaQuotient, P: int) -> QSeries:
    """q-expansion of ``f`` at infinity with ``P`` coefficients from ``q^h``."""
    v = validate(f)
    if not v:
        raise ValueError(f"invalid eta quotient {f}: " + "; ".join(v.diagnostics))
    h = f.h_inf
    return product_expansion(f.exponents(P), h, h + P)


# ----------------------------------------------------------------------
# level-one forms on Gamma_0(N)
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class LevelOneForm:
    """A level-one form with rational product exponents and CM-point zeros."""

    name: str
    weight: int
    h: int
    zeros: tuple  # ((QuadPoint, multiplicity on X(1)), ...)

    def series(self, P: int) -> QSeries:
        if self.name == "Delta":
            return delta_series(P)
        return eisenstein_level_one(self.weight, P)

    def lift(self, N: int) -> "LiftedForm":
        return LiftedForm(self, N)


@dataclass(frozen=True)
class LiftedForm:
    """A level-one form regarded as a form on Gamma_0(N)."""

    base: LevelOneForm
    N: int

    @property
    def weight(self) -> int:
        return self.base.weight

    @property
    def h_inf(self) -> int:
        return self.base.h

    @property
    def name(self) -> str:
        return f"{self.base.name}@{self.N}"

    def series(self, P: int) -> QSeries:
        return self.base.series(P)

    def spec(self) -> str:
        return f"builtin:{self.base.name}"

    def order_at_cusp(self, d: int) -> Rat:
        """Order at ``1/d``: the q-order ``h`` scaled by the width ``N/gcd(d^2, N)``."""
        if d <= 0 or self.N % d:
            raise ValueError(f"{d} does not divide the level {self.N}")
        return rat(self.base.h * (self.N // gcd(d * d, self.N)))

    def h_divisor(self) -> HDivisor:
        """Divisor on Y_0(N): each zero ``w`` of order ``e`` on X(1) pulls back to
        ``sum_M e [M w]`` over the cosets ``Gamma_0(N) M``, with cosets in one
        orbit of the stabiliser of ``w`` merged into a single point."""
        pts = []
        reps = gamma0_coset_reps(self.N)
        for w, mult in self.base.zeros:
            stab = _stabiliser(w)
            classes = {p1_key(M, self.N): M for M in reps}
            seen = set()
            for key in sorted(classes):
                if key in seen:
                    continue
                orbit = {key}
                frontier = [classes[key]]
                while frontier:
                    M = frontier.pop()
                    for s in stab:
                        k2 = p1_key(_mul(M, s), self.N)
                        if k2 not in orbit:
                            orbit.add(k2)
                            frontier.append(classes[k2])
                seen |= orbit
                pts.append((w.act(classes[key]), rat(mult) * len(orbit)))
        return HDivisor(tuple(pts), self.N)


def _mul(A, B):
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _stabiliser(w: QuadPoint) -> tuple:
    if w == QuadPoint.i():
        return ((0, -1, 1, 0),)
    if w == QuadPoint.rho():
        return ((0, -1, 1, 1),)  # rho -> -1/(rho+1) = rho
    return ()


BUILTINS = {
    "Delta": LevelOneForm("Delta", 12, 1, ()),
    "E4": LevelOneForm("E4", 4, 0, ((QuadPoint.rho(), Fraction(1, 3)),)),
    "E6": LevelOneForm("E6", 6, 0, ((QuadPoint.i(), Fraction(1, 2)),)),
}


def builtin(name: str, N: int) -> LiftedForm:
    try:
        return BUILTINS[name].lift(N)
    except KeyError:
        raise ValueError(f"unknown builtin form {name!r}; choose from {sorted(BUILTINS)}") from None


def parse_form(spec: str, level: int | None = None):
    """``"builtin:E4"`` / ``"builtin:Delta"`` / eta spec (``"N; d:r, ..."`` or ``"d:r, ..."``)."""
    spec = spec.strip()
    if spec.startswith("builtin:"):
        if level is None:
            raise ValueError("builtin forms need a level")
        return builtin(spec.split(":", 1)[1].strip(), level)
    return EtaQuotient.parse(spec, level)


@lru_cache(maxsize=None)
def eta_generators(N: int, count: int = 6, seed: int = 0) -> tuple[EtaQuotient, ...]:
    """Up to ``count`` valid eta quotients of level ``N`` found by seeded rejection sampling.

    Validity is preserved under products, so integer combinations of these
    give further valid quotients cheaply.
    """
    rng = random.Random(seed * 1_000_003 + N)
    ds = divisors(N)
    found: list[EtaQuotient] = []
    seen = set()
    for _ in range(min(200_000, 40 * 25 ** len(ds))):
        f = EtaQuotient(N, {d: rng.randint(-12, 12) for d in ds})
        key = tuple(f.r.items())
        if f.r and key not in seen and validate(f):
            seen.add(key)
            found.append(f)
            if len(found) == count:
                break
    if len(found) < 2:
        raise RuntimeError(f"could not find valid eta quotients of level {N}")
    return tuple(found)


def random_eta_quotient(N: int, rng: random.Random, spread: int = 2) -> EtaQuotient:
    """Random nonzero integer combination of :func:`eta_generators` (always valid)."""
    gens = eta_generators(N)
    while True:
        r: dict[int, int] = {}
        for g in gens:
            k = rng.randint(-spread, spread)
            for d, e in g.r.items():
                r[d] = r.get(d, 0) + k * e
        f = EtaQuotient(N, r)
        if f.r:
            return f


# ----------------------------------------------------------------------
# cusps
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class CuspRow:
    d: int
    width: int
    order: Rat | None = None
    ftheta_const: Rat | None = None

    @property
    def representative(self) -> str:
        return f"1/{self.d}"


@dataclass(frozen=True)
class CuspTable:
    N: int
    rows: tuple[CuspRow, ...]
    index: int  # [SL_2(Z) : Gamma_0(N)]

    def row(self, d: int) -> CuspRow:
        for r in self.rows:
            if r.d == d:
                return r
        raise KeyError(d)

    @property
    def widths(self) -> dict[int, int]:
        return {r.d: r.width for r in self.rows}

    def to_dict(self) -> dict:
        def f(x):
            return None if x is None else format_rat(x)
        return {
            "N": self.N,
            "index": self.index,
            "rows": [{"d": r.d, "representative": r.representative, "width": r.width,
                      "order": f(r.order), "ftheta_const": f(r.ftheta_const)} for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "representative", "width", "order", "ftheta_const"])
        for r in self.to_dict()["rows"]:
            w.writerow([r["d"], r["representative"], r["width"], r["order"] or "", r["ftheta_const"] or ""])
        return buf.getvalue()


def cusp_table(N: int, form=None) -> CuspTable:
    """Cusps ``1/d`` (``d | N``) of Gamma_0(N) with widths ``N/d``; orders and
    f_theta constants are filled in when a form is supplied."""
    _require_squarefree(N)
    rows = []
    for d in divisors(N):
        width = N // gcd(d * d, N)
        order = const = None
        if form is not None:
            if form.N != N:
                raise ValueError(f"form has level {form.N}, table has level {N}")
            order = form.order_at_cusp(d)
            const = order / width - rat(Fraction(form.weight, 12))
        rows.append(CuspRow(d, width, order, const))
    return CuspTable(N, tuple(rows), psi(N))
