"""Hecke-orbit statistic ``(J_{N,1}(T_m . D_f) - e((T_m . D_f)_{>1})) / sigma_1(m)``.

``J_{N,1}(T_m . D_f)`` is read off exactly from the identity series.  The
correction subtracts ``sum nu * e(-z)`` over the reduced Hecke points lying
above the line ``Im z = 1``; those terms grow like ``exp(2 pi Im z)`` and
cancel the exponential growth of the exact value, so the subtraction is done
at a working precision large enough to resolve the biggest term.

Only convergence and stability of the sequence are examined here; the limit
value involves an integral of ``J_{N,1}`` over a fundamental domain and is not
computed.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import mpmath
import numpy as np

from .arith import psi, sigma
from .hecke import (
    HDivisor,
    QuadPoint,
    coset_reps,
    imag,
    mobius,
    reduction_witness,
    _as_complex,
    _strip_shift,
)
from .identity import IdentitySeries, identity_series, j_value_on_divisor
from .modforms import parse_form
from .qseries import PrecisionError, Rat, format_rat, rat

__all__ = [
    "THETA_SPECTRAL",
    "ReductionError",
    "EquidistConfig",
    "EquidistRow",
    "EquidistSummary",
    "EquidistReport",
    "HaarNormalizer",
    "preset_config",
    "orbit_tail",
    "statistic",
    "convergence_report",
    "summarise",
    "haar_normalizer",
]

THETA_SPECTRAL = Fraction(7, 64)
_GUARD_DIGITS = 30
_MIN_DPS = 25  # >= 80 bits


class ReductionError(ValueError):
    """A Hecke point sits too close to the real axis to be reduced reliably."""


@dataclass(frozen=True)
class EquidistConfig:
    N: int
    form: object
    divisor: HDivisor
    ms: tuple[int, ...]
    r: int = 1
    theta: Fraction = THETA_SPECTRAL
    min_imag: float = 1e-9
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ms", tuple(sorted(set(int(m) for m in self.ms))))
        bad = [m for m in self.ms if m < 1 or gcd(m, self.N) != 1]
        if bad:
            raise ValueError(f"m must be positive and prime to N={self.N}; offending {bad[:5]}")
        if self.r < 1:
            raise ValueError("tail threshold must satisfy r >= 1")
        if self.divisor.N != self.N:
            raise ValueError("divisor level differs from the configured level")
        h = self.divisor.degree()
        expected = rat(Fraction(self.form.weight, 12)) * psi(self.N) - _cusp_order_total(self.form, self.N)
        if h != expected:
            raise ValueError(f"divisor degree {format_rat(h)} differs from the total order "
                             f"{format_rat(expected)} of the form on Y_0({self.N})")

    def to_dict(self) -> dict:
        spec = self.form.spec() if hasattr(self.form, "spec") else str(self.form)
        return {
            "N": self.N,
            "form": self.label or spec,
            "m_min": self.ms[0] if self.ms else None,
            "m_max": self.ms[-1] if self.ms else None,
            "count": len(self.ms),
            "r": self.r,
            "theta": format_rat(rat(self.theta)),
            "divisor": [{"point": repr(z), "mult": format_rat(mult)} for z, mult in self.divisor],
        }


def _cusp_order_total(form, N: int) -> Rat:
    from .modforms import cusp_table

    return sum((rat(row.order) for row in cusp_table(N, form).rows), rat(0))


def preset_config(form_spec: str, N: int, mmax: int, mmin: int = 1, r: int = 1) -> EquidistConfig:
    """Config for a catalogue form (``builtin:E4`` ...) or an eta spec at level ``N``."""
    form = parse_form(form_spec, N)
    ms = tuple(m for m in range(max(1, mmin), mmax + 1) if gcd(m, N) == 1)
    return EquidistConfig(N, form, form.h_divisor(), ms, r=r, label=form_spec)


# ----------------------------------------------------------------------
# per-m statistic
# ----------------------------------------------------------------------
def orbit_tail(cfg: EquidistConfig, m: int) -> list[tuple[object, Rat]]:
    """Reduced points of ``T_m . D`` with ``Im > r`` (exact test for exact points)."""
    r2 = Fraction(cfg.r) ** 2
    out = []
    cosets = [g.matrix for g in coset_reps(m)]
    for z, nu in cfg.divisor:
        for M in cosets:
            w = mobius(M, z)
            wc = _as_complex(w)
            if wc.imag < cfg.min_imag:
                raise ReductionError(f"Hecke point {wc} (m={m}) is too close to the real axis")
            gamma, y = reduction_witness(cfg.N, wc)
            if y <= cfg.r * (1 - 1e-9):
                continue
            zt = mobius(gamma, w)
            if isinstance(zt, QuadPoint):
                if zt.y2 <= r2:
                    continue
                zt = zt.translate(_strip_shift(zt.x))
            else:
                if zt.imag <= cfg.r:
                    continue
                zt = zt + _strip_shift(float(zt.real))
            out.append((zt, nu))
    return out


@dataclass(frozen=True)
class EquidistRow:
    m: int
    sigma1: int
    j_term: Rat
    tail: mpmath.mpc
    statistic: complex
    tail_points: int
    max_imag: float

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "sigma1": self.sigma1,
            "J_term": format_rat(self.j_term),
            "tail_term": {"re": mpmath.nstr(self.tail.real, 17), "im": mpmath.nstr(self.tail.imag, 17)},
            "statistic": {"re": self.statistic.real, "im": self.statistic.imag},
            "tail_points": self.tail_points,
            "max_imag": self.max_imag,
        }


def _row(cfg: EquidistConfig, ident: IdentitySeries, m: int) -> EquidistRow:
    if gcd(m, cfg.N) != 1:
        raise ValueError(f"m={m} is not prime to the level {cfg.N}")
    if ident.prec <= m:
        raise PrecisionError(f"insufficient precision: identity series known below q^{ident.prec}, need q^{m}")
    J = j_value_on_divisor(ident, m)
    pts = orbit_tail(cfg, m)
    s1 = sigma(m)
    ymax = max((imag(z) for z, _ in pts), default=0.0)
    # enough digits for the largest exp(2 pi y) plus guard digits
    dps = max(_MIN_DPS, _GUARD_DIGITS + int(2 * math.pi * ymax / math.log(10)))
    with mpmath.workdps(dps):
        tail = mpmath.mpc(0)
        for z, nu in pts:
            zz = z.to_mpc() if isinstance(z, QuadPoint) else mpmath.mpc(z)
            tail += (mpmath.mpf(nu.numerator) / nu.denominator) * mpmath.exp(-2j * mpmath.pi * zz)
        jv = mpmath.mpf(J.numerator) / J.denominator
        stat = (jv - tail) / s1
        tail = +tail
    return EquidistRow(m, s1, J, tail, complex(stat), len(pts), ymax)


def statistic(cfg: EquidistConfig, m: int, ident: IdentitySeries | None = None) -> complex:
    """``(J_{N,1}(T_m . D_f) - sum_{Im > r} nu e(-z)) / sigma_1(m)``."""
    if ident is None:
        ident = identity_series(cfg.form, m + 1)
    return _row(cfg, ident, m).statistic


# ----------------------------------------------------------------------
# convergence
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class EquidistSummary:
    limit_estimate: complex
    quartile_start: int
    max_successive_diff: float
    envelope_C: float
    envelope_exponent: float
    fitted_exponent: float | None
    envelope_ratio: float
    fit_rms: float

    def to_dict(self) -> dict:
        return {
            "limit_estimate": {"re": self.limit_estimate.real, "im": self.limit_estimate.imag},
            "last_quartile_from_m": self.quartile_start,
            "max_successive_diff_last_quartile": self.max_successive_diff,
            "envelope_C": self.envelope_C,
            "envelope_exponent": self.envelope_exponent,
            "fitted_exponent": self.fitted_exponent,
            "max_diff_over_envelope": self.envelope_ratio,
            "log_fit_rms": self.fit_rms,
        }


def summarise(ms: Sequence[int], stats: Sequence[complex], theta=THETA_SPECTRAL) -> EquidistSummary:
    """Tail-average limit estimate and least-squares envelope ``C m^{-1/2 + theta}``.

    ``C`` is fitted on log scale with the exponent held at ``-1/2 + theta``;
    the unconstrained log-log slope is reported alongside.  The envelope
    ratio is ``max |s(m_{i+1}) - s(m_i)| / (C m_i^{-1/2 + theta})`` over the
    last quartile.
    """
    n = len(ms)
    if n < 10:
        raise ValueError(f"at least 10 admissible m are needed, got {n}")
    q0 = (3 * n) // 4
    est = complex(np.mean(np.asarray(stats[q0:], dtype=complex)))
    alpha = 0.5 - float(theta)
    m_arr = np.asarray(ms, dtype=float)
    res = np.abs(np.asarray(stats, dtype=complex) - est)
    diffs = np.abs(np.diff(np.asarray(stats[q0:], dtype=complex)))
    max_diff = float(diffs.max()) if len(diffs) else 0.0
    keep = res > 0
    if keep.sum() == 0:
        return EquidistSummary(est, ms[q0], max_diff, 0.0, -alpha, None, 0.0, 0.0)
    logm, logr = np.log(m_arr[keep]), np.log(res[keep])
    logC = float(np.mean(logr + alpha * logm))
    rms = float(np.sqrt(np.mean((logr - (logC - alpha * logm)) ** 2)))
    slope = float(np.polyfit(logm, logr, 1)[0]) if keep.sum() >= 2 else None
    C = math.exp(logC)
    env = C * m_arr[q0:-1] ** (-alpha)
    ratio = float((diffs / env).max()) if len(diffs) else 0.0
    return EquidistSummary(est, ms[q0], max_diff, C, -alpha, slope, ratio, rms)


@dataclass(frozen=True)
class EquidistReport:
    config: EquidistConfig
    rows: tuple[EquidistRow, ...]
    summary: EquidistSummary
    half_range: EquidistSummary | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def ms(self) -> list[int]:
        return [r.m for r in self.rows]

    @property
    def statistics(self) -> list[complex]:
        return [r.statistic for r in self.rows]

    @property
    def doubling_shift(self) -> float | None:
        """``|estimate(full range) - estimate(first half of the range)|``."""
        if self.half_range is None:
            return None
        return abs(self.summary.limit_estimate - self.half_range.limit_estimate)

    @property
    def doubling_tolerance(self) -> float | None:
        """Envelope ``C m^{-1/2 + theta}`` at the end of the half range."""
        if self.half_range is None:
            return None
        m_half = self.config.ms[-1] // 2
        return self.summary.envelope_C * m_half ** self.summary.envelope_exponent

    def stable(self, factor: float = 10.0) -> bool:
        if self.half_range is None:
            return False
        return self.doubling_shift <= factor * self.doubling_tolerance

    def successive_ok(self, factor: float = 10.0) -> bool:
        return self.summary.envelope_ratio <= factor

    def to_dict(self) -> dict:
        out = {
            "config": self.config.to_dict(),
            "haar_normalizer": haar_normalizer(self.config.N).to_dict(),
            "summary": self.summary.to_dict(),
            "doubling": None,
            "notes": list(self.notes),
            "rows": [r.to_dict() for r in self.rows],
        }
        if self.half_range is not None:
            out["doubling"] = {
                "half_range_summary": self.half_range.to_dict(),
                "shift": self.doubling_shift,
                "tolerance": self.doubling_tolerance,
            }
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "sigma1", "statistic_re", "statistic_im", "tail_points", "max_imag"])
        for r in self.rows:
            w.writerow([r.m, r.sigma1, f"{r.statistic.real:.17g}", f"{r.statistic.imag:.17g}",
                        r.tail_points, f"{r.max_imag:.17g}"])
        return buf.getvalue()


_WORKER: dict = {}


def _init_worker(cfg, ident):
    _WORKER["cfg"], _WORKER["ident"] = cfg, ident


def _worker_row(m: int) -> EquidistRow:
    return _row(_WORKER["cfg"], _WORKER["ident"], m)


def convergence_report(cfg: EquidistConfig, workers: int = 1, ident: IdentitySeries | None = None) -> EquidistReport:
    """Run the statistic over ``cfg.ms`` and summarise convergence.

    Also summarises the first half of the range (``m <= max(ms)/2``) so that
    the shift of the limit estimate under doubling can be checked.  Results
    do not depend on ``workers``.
    """
    if len(cfg.ms) < 10:
        raise ValueError(f"at least 10 admissible m are needed, got {len(cfg.ms)}")
    if ident is None:
        ident = identity_series(cfg.form, cfg.ms[-1] + 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(cfg, ident)) as ex:
            rows = tuple(ex.map(_worker_row, cfg.ms, chunksize=max(1, len(cfg.ms) // (8 * workers))))
    else:
        rows = tuple(_row(cfg, ident, m) for m in cfg.ms)
    ms = [r.m for r in rows]
    stats = [r.statistic for r in rows]
    summ = summarise(ms, stats, cfg.theta)
    half_n = sum(1 for m in ms if m <= ms[-1] // 2)
    half = summarise(ms[:half_n], stats[:half_n], cfg.theta) if half_n >= 10 else None
    notes = ["tail term is sum nu * e(-z) over reduced points with Im > r; "
             "the opposite sign e(+z) would not cancel the q^-1 growth of J_{N,1}"]
    if cfg.divisor.degree() == 0 or not len(cfg.divisor):
        notes.append("empty divisor: statistic vanishes identically")
    return EquidistReport(cfg, rows, summ, half, tuple(notes))


# ----------------------------------------------------------------------
# Haar measure
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class HaarNormalizer:
    """``numerator / (pi * index)``: density of the normalised Haar measure w.r.t. ``dx dy / y^2``."""

    numerator: int
    index: int

    @property
    def coefficient(self) -> Rat:
        """Rational factor multiplying ``1/pi``."""
        return rat(Fraction(self.numerator, self.index))

    @property
    def value(self) -> float:
        return self.numerator / (math.pi * self.index)

    def to_dict(self) -> dict:
        return {"numerator": self.numerator, "index": self.index,
                "coefficient_of_inv_pi": format_rat(self.coefficient), "value": self.value}


def haar_normalizer(N: int) -> HaarNormalizer:
    """``3 / (pi [SL_2(Z) : Gamma_0(N)])``."""
    if N < 1:
        raise ValueError("level must be positive")
    return HaarNormalizer(3, psi(N))
