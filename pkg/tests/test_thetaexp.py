from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hecke_exponents.modforms import (
    EtaQuotient,
    builtin,
    cusp_table,
    delta_series,
    e2_series,
    eisenstein_level_one,
    random_eta_quotient,
)
from hecke_exponents.qseries import PrecisionError, QSeries, rat
from hecke_exponents.thetaexp import ExponentVector, extract_exponents, f_theta, log_derivative


def log_oracle_exponents(f: QSeries, n_max: int) -> list[Fraction]:
    """Exponents by peeling factors: divide f/q^h by (1 - q^n)^{c(n)} one n at a time.

    At stage n the series is 1 + a q^n + ..., and the factor (1 - q^n)^c
    contributes -c q^n, so c(n) = -a.  Uses Fraction arithmetic only.
    """
    u = [Fraction(int(f.coeff(f.v + i).numerator), int(f.coeff(f.v + i).denominator)) for i in range(n_max + 1)]
    out = []
    for n in range(1, n_max + 1):
        c = -u[n]
        out.append(c)
        # multiply by (1 - q^n)^{-c} = sum_k binom(-c, k) (-1)^k q^{nk}
        series = [Fraction(0)] * (n_max + 1)
        b = Fraction(1)
        k = 0
        while n * k <= n_max:
            series[n * k] = b * (-1) ** k
            b = b * (-c - k) / (k + 1)
            k += 1
        u = [sum(u[j] * series[i - j] for j in range(i + 1)) for i in range(n_max + 1)]
    return out


class TestLogDerivative:
    def test_monomial(self):
        L = log_derivative(QSeries.monomial(5, 1, 20))
        assert L.coeff(0) == 5 and all(L.coeff(n) == 0 for n in range(1, L.prec))

    def test_delta(self):
        assert log_derivative(delta_series(100)) == e2_series(100)

    def test_additive(self):
        rng = random.Random(1)
        for _ in range(10):
            f = random_eta_quotient(6, rng).series(40)
            g = random_eta_quotient(6, rng).series(40)
            assert log_derivative(f * g) == log_derivative(f) + log_derivative(g)


class TestExtract:
    def test_delta(self):
        c = extract_exponents(delta_series(101), 12)
        assert len(c) == 100 and all(c[n] == 24 for n in range(1, 101))

    def test_eta_2(self, eta_2_8_8):
        c = extract_exponents(eta_2_8_8.series(51), 8)
        assert all(c[n] == (16 if n % 2 == 0 else 8) for n in range(1, 51))

    def test_e4_against_peeling_oracle(self):
        E4 = eisenstein_level_one(4, 16)
        c = extract_exponents(E4, 4)
        assert c[1] == -240
        assert [c[n] for n in range(1, 15)] == log_oracle_exponents(E4, 14)

    def test_reconstruction(self):
        rng = random.Random(2)
        for N in (3, 10, 15):
            f = random_eta_quotient(N, rng)
            s = f.series(40)
            c = extract_exponents(s, f.weight)
            assert c.product(s.prec).identical(s)
            assert list(c.c) == [rat(x) for x in f.exponents(len(c))]

    def test_needs_normalised_series(self):
        with pytest.raises(ValueError):
            extract_exponents(QSeries([2, 1], 0, 2), 0)

    def test_index_errors(self):
        c = ExponentVector((24, 24), 1, 12)
        with pytest.raises(IndexError):
            c[0]
        with pytest.raises(PrecisionError):
            c[3]
        assert c.weighted_divisor_sum(2) == 72 and c.sigma_f(2) == 48


class TestFTheta:
    def test_delta_vanishes(self):
        fd = f_theta(delta_series(80), 80, weight=12)
        assert fd.series.is_zero()
        assert f_theta(builtin("Delta", 1), 50).cusp_constants == {1: 0}

    def test_level2_constants(self, eta_2_8_8):
        fd = f_theta(eta_2_8_8, 50)
        assert fd.cusp_constants == {1: Fraction(-1, 6), 2: Fraction(1, 3)}
        assert fd.series.coeff(0) == Fraction(1, 3)
        assert fd.residue_sum(cusp_table(2).widths) == 0

    def test_series_expansion_sign(self):
        # f_theta = h - sum (sum_{d|m} d c(d)) q^m - (k/12) E2
        f = builtin("E6", 3)
        fd = f_theta(f, 40)
        c = extract_exponents(f.series(40), 6)
        E2 = e2_series(40)
        for m in range(1, 39):
            assert fd.series.coeff(m) == -c.weighted_divisor_sum(m) - Fraction(6, 12) * E2.coeff(m)

    def test_bare_series_needs_weight(self):
        with pytest.raises(ValueError):
            f_theta(delta_series(10), 10)
