"""Truncated Laurent series in q with exact rational coefficients.

A :class:`QSeries` stores the coefficients of ``q^v, q^(v+1), ..., q^(v+P-1)``
and knows that everything from ``q^(v+P)`` on is unknown.  Precision is
tracked pessimistically: no operation ever reports a coefficient it cannot
prove from its inputs.

Coefficients are :class:`gmpy2.mpq`, which compare equal to ``int`` and
``fractions.Fraction`` values.
"""

from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from gmpy2 import mpq

__all__ = [
    "Rat",
    "rat",
    "PrecisionError",
    "QSeries",
    "add",
    "mul",
    "inv",
    "theta",
    "coeff",
    "format_rat",
    "parse_rat",
]

Rat = type(mpq(0))

_ZERO = mpq(0)
_ONE = mpq(1)


class PrecisionError(ValueError):
    """Raised when a coefficient outside the proven range is requested."""


def rat(x) -> Rat:
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to an exact rational."""
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, (int, Fraction, Rational)):
        return mpq(x)
    if isinstance(x, str):
        return parse_rat(x)
    if type(x).__name__ == "mpz":
        return mpq(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


def format_rat(x) -> str:
    x = rat(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s: str) -> Rat:
    s = s.strip()
    if not s:
        raise ValueError("empty rational literal")
    if "." in s or "e" in s.lower():
        raise ValueError(f"rational literal must be decimal-free: {s!r}")
    return mpq(s)


class QSeries:
    """Immutable truncated Laurent series ``sum_{n >= v} a_n q^n + O(q^prec)``.

    ``coeffs[0]`` is nonzero unless the series is zero to its precision, in
    which case ``coeffs`` is empty and ``v == prec``.
    """

    __slots__ = ("_v", "_c")
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, coeffs: Iterable = (), v: int = 0, prec: int | None = None):
        c = [rat(a) for a in coeffs]
        if prec is not None:
            if prec < v:
                raise ValueError(f"prec={prec} below start exponent v={v}")
            n = prec - v
            if len(c) > n:
                del c[n:]
            else:
                c.extend([_ZERO] * (n - len(c)))
        self._set(v, c)

    def _set(self, v: int, c: list) -> None:
        k = 0
        while k < len(c) and c[k] == 0:
            k += 1
        if k:
            c = c[k:]
            v += k
        self._v = v
        self._c = tuple(c)

    @classmethod
    def _raw(cls, v: int, c: list) -> "QSeries":
        obj = cls.__new__(cls)
        obj._set(v, c)
        return obj

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, prec: int) -> "QSeries":
        return cls._raw(prec, [])

    @classmethod
    def one(cls, prec: int) -> "QSeries":
        return cls.monomial(0, 1, prec)

    @classmethod
    def monomial(cls, n: int, a=1, prec: int | None = None) -> "QSeries":
        """``a * q^n + O(q^prec)``; default precision is ``n + 1``."""
        if prec is None:
            prec = n + 1
        if prec <= n:
            raise ValueError("monomial precision must exceed its exponent")
        return cls._raw(n, [rat(a)] + [_ZERO] * (prec - n - 1))

    @classmethod
    def from_dict(cls, terms: dict, prec: int) -> "QSeries":
        if not terms:
            return cls.zero(prec)
        lo = min(terms)
        if lo >= prec:
            return cls.zero(prec)
        c = [_ZERO] * (prec - lo)
        for n, a in terms.items():
            if n < prec:
                c[n - lo] = rat(a)
        return cls._raw(lo, c)

    # ------------------------------------------------------------------
    # accessors
    # ------------------------------------------------------------------
    @property
    def v(self) -> int:
        """Leading exponent (valuation)."""
        return self._v

    @property
    def P(self) -> int:
        """Relative precision: number of known coefficients from ``q^v`` on."""
        return len(self._c)

    @property
    def prec(self) -> int:
        """Absolute precision: coefficients are known for exponents < prec."""
        return self._v + len(self._c)

    @property
    def coeffs(self) -> tuple:
        return self._c

    def is_zero(self) -> bool:
        return not self._c

    def coeff(self, n: int) -> Rat:
        if n >= self.prec:
            raise PrecisionError(
                f"insufficient precision: coefficient of q^{n} requested, known below q^{self.prec}"
            )
        if n < self._v:
            return _ZERO
        return self._c[n - self._v]

    __getitem__ = coeff

    def coefficients(self, start: int, stop: int) -> list:
        """Coefficients of ``q^start .. q^(stop-1)``."""
        return [self.coeff(n) for n in range(start, stop)]

    def leading_coefficient(self) -> Rat:
        if not self._c:
            raise ValueError("zero series has no leading coefficient")
        return self._c[0]

    # ------------------------------------------------------------------
    # structural operations
    # ------------------------------------------------------------------
    def truncate(self, prec: int) -> "QSeries":
        if prec > self.prec:
            raise PrecisionError(f"cannot raise precision from {self.prec} to {prec}")
        if prec <= self._v:
            return QSeries.zero(prec)
        return QSeries._raw(self._v, list(self._c[: prec - self._v]))

    def shift(self, k: int) -> "QSeries":
        """Multiply by ``q^k``."""
        return QSeries._raw(self._v + k, list(self._c))

    def rescale(self, d: int) -> "QSeries":
        """Substitute ``q -> q^d`` (i.e. ``f(z) -> f(dz)``)."""
        if d <= 0:
            raise ValueError(f"rescale factor must be positive, got {d}")
        if d == 1:
            return self
        if not self._c:
            return QSeries.zero(d * self.prec)
        out = [_ZERO] * (d * len(self._c) - (d - 1))
        out[::d] = self._c
        out.extend([_ZERO] * (d - 1))
        return QSeries._raw(d * self._v, out)

    def scale(self, a) -> "QSeries":
        a = rat(a)
        return QSeries._raw(self._v, [a * x for x in self._c]) if a else QSeries.zero(self.prec)

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QSeries):
            try:
                other = QSeries.monomial(0, rat(other), max(self.prec, 1))
            except TypeError:
                return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries._raw(self._v, [-x for x in self._c])

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            try:
                other = QSeries.monomial(0, rat(other), max(self.prec, 1))
            except TypeError:
                return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return mul(self, inv(other))
        try:
            a = rat(other)
        except TypeError:
            return NotImplemented
        if a == 0:
            raise ZeroDivisionError("division of a series by zero")
        return self.scale(1 / a)

    def __pow__(self, e: int) -> "QSeries":
        if not isinstance(e, int):
            raise TypeError("only integer powers are supported")
        if e < 0:
            return inv(self) ** (-e)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else mul(result, base)
            e >>= 1
            if e:
                base = mul(base, base)
        if result is None:
            # relative precision of the base carries over to f^0 = 1
            return QSeries.one(max(self.P, 1))
        return result

    def __eq__(self, other) -> bool:
        """Agreement on the common known exponent range."""
        if not isinstance(other, QSeries):
            try:
                other = QSeries.monomial(0, rat(other), max(self.prec, 1))
            except TypeError:
                return NotImplemented
        lo = min(self._v, other._v)
        hi = min(self.prec, other.prec)
        return all(self.coeff(n) == other.coeff(n) for n in range(lo, hi))

    def identical(self, other: "QSeries") -> bool:
        """Same valuation, same precision, same coefficients."""
        return self._v == other._v and self._c == other._c

    # ------------------------------------------------------------------
    # serialization / display
    # ------------------------------------------------------------------
    def to_dict(self) -> dict:
        return {"v": self._v, "P": len(self._c), "coeffs": [format_rat(a) for a in self._c]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_mapping(cls, data: dict) -> "QSeries":
        coeffs = [parse_rat(s) if isinstance(s, str) else rat(s) for s in data["coeffs"]]
        if len(coeffs) != data["P"]:
            raise ValueError("P does not match the number of coefficients")
        return cls(coeffs, v=data["v"], prec=data["v"] + data["P"])

    @classmethod
    def from_json(cls, text: str) -> "QSeries":
        return cls.from_mapping(json.loads(text))

    def __repr__(self) -> str:
        terms = []
        for i, a in enumerate(self._c[:8]):
            if a:
                terms.append(f"({a})*q^{self._v + i}")
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.prec}))"


# ----------------------------------------------------------------------
# module-level operations
# ----------------------------------------------------------------------
def add(f: QSeries, g: QSeries) -> QSeries:
    prec = min(f.prec, g.prec)
    lo = min(f.v, g.v)
    if lo >= prec:
        return QSeries.zero(prec)
    out = [_ZERO] * (prec - lo)
    for src in (f, g):
        off = src.v - lo
        for i, a in enumerate(src.coeffs):
            j = off + i
            if j >= len(out):
                break
            out[j] += a
    return QSeries._raw(lo, out)


def _convolve(a: Sequence, b: Sequence, n: int) -> list:
    """First ``n`` coefficients of the Cauchy product of ``a`` and ``b``."""
    out = []
    la, lb = len(a), len(b)
    for k in range(n):
        lo = max(0, k - lb + 1)
        hi = min(k, la - 1)
        s = _ZERO
        for i in range(lo, hi + 1):
            ai = a[i]
            if ai:
                s += ai * b[k - i]
        out.append(s)
    return out


def mul(f: QSeries, g: QSeries) -> QSeries:
    """Cauchy product; valuation ``v_f + v_g``, relative precision ``min(P_f, P_g)``."""
    if f.is_zero() or g.is_zero():
        # f = O(q^A) with A = f.prec; the product is O(q^(A + v_g)) and symmetrically
        bounds = []
        if f.is_zero():
            bounds.append(f.prec + (g.v if not g.is_zero() else g.prec))
        if g.is_zero():
            bounds.append(g.prec + (f.v if not f.is_zero() else f.prec))
        return QSeries.zero(min(bounds))
    n = min(f.P, g.P)
    return QSeries._raw(f.v + g.v, _convolve(f.coeffs, g.coeffs, n))


def inv(f: QSeries) -> QSeries:
    """Multiplicative inverse to the same relative precision."""
    if f.is_zero():
        raise ZeroDivisionError("non-invertible: series is zero to its known precision")
    a = f.coeffs
    n = len(a)
    a0inv = _ONE / a[0]
    out = [a0inv]
    for k in range(1, n):
        s = _ZERO
        for i in range(1, k + 1):
            ai = a[i]
            if ai:
                s += ai * out[k - i]
        out.append(-s * a0inv)
    return QSeries._raw(-f.v, out)


def theta(f: QSeries) -> QSeries:
    """``q d/dq``: multiply the coefficient of ``q^n`` by ``n``."""
    return QSeries._raw(f.v, [(f.v + i) * a for i, a in enumerate(f.coeffs)]) if not f.is_zero() \
        else QSeries.zero(f.prec)


def coeff(f: QSeries, n: int) -> Rat:
    return f.coeff(n)


def is_integral(f: QSeries) -> bool:
    return all(a.denominator == 1 for a in f.coeffs)
