from __future__ import annotations

import dataclasses
import random
from fractions import Fraction
from math import gcd

import mpmath
import pytest

from hecke_exponents.arith import sigma
from hecke_exponents.hecke import coset_reps, reduce_gamma0
from hecke_exponents.identity import (
    identity_series,
    j_value_on_divisor,
    rhs_closed,
    sigma_ratio,
    verify,
)
from hecke_exponents.modforms import EtaQuotient, SquareFreeError, builtin, random_eta_quotient
from hecke_exponents.qseries import QSeries
from hecke_exponents.thetaexp import ExponentVector


@pytest.fixture(scope="module")
def ident_2(eta_2_8_8):
    return identity_series(eta_2_8_8, 301)


@pytest.fixture(scope="module")
def ident_e4():
    return identity_series(builtin("E4", 2), 60)


def hauptmodul_2(z):
    """J_{2,1} = (eta(z)/eta(2z))^24 + 24, evaluated directly."""
    q = mpmath.exp(2j * mpmath.pi * z)
    return (mpmath.qp(q) / (q ** (mpmath.mpf(1) / 24) * mpmath.qp(q ** 2))) ** 24 + 24


class TestLevel2EtaQuotient:
    def test_series_vanishes(self, ident_2):
        assert ident_2.S.prec >= 300 and ident_2.S.truncate(300).identical(QSeries.zero(300))

    def test_j_values_zero(self, ident_2):
        assert all(j_value_on_divisor(ident_2, m) == 0 for m in range(1, 50))
        with pytest.raises(ValueError):
            j_value_on_divisor(ident_2, 0)

    def test_closed_forms(self, ident_2):
        for m in range(1, 100, 2):
            assert rhs_closed(ident_2, m, "forced") == 0
            assert rhs_closed(ident_2, m, "paper") == 16 * sigma(m)
        assert ident_2.det_ratio_sum == Fraction(-1, 3)
        with pytest.raises(ValueError):
            rhs_closed(ident_2, 4)

    def test_verify(self, ident_2):
        rep = verify(ident_2, 200)
        assert rep.winner == "forced" and rep.ok("forced") and not rep.ok("paper")
        assert len(rep.rows) == 100 and rep.sigma_ratio_constant and rep.sigma_ratios[0] == 8
        assert rep.constant_term == 0

    def test_corrupted_c3(self, ident_2):
        c = list(ident_2.exponents.c)
        c[2] += 1
        bad = dataclasses.replace(ident_2, exponents=ExponentVector(tuple(c), 1, 8))
        rep = verify(bad, 60)
        assert rep.mismatches("forced") == [m for m in range(1, 61, 2) if m % 3 == 0]

    def test_internal_consistency(self, ident_2):
        for m in range(0, 300):
            assert ident_2.S.coeff(m) == ident_2.ftheta.series.coeff(m) - ident_2.eis.series.coeff(m)


class TestLiftedE4:
    def test_constant_term_is_minus_divisor_degree(self, ident_e4):
        assert ident_e4.S.coeff(0) == -1 == -builtin("E4", 2).h_divisor().degree()

    def test_j_values_against_hauptmodul(self, ident_e4):
        with mpmath.workdps(40):
            rho = mpmath.exp(2j * mpmath.pi / 3)
            for m in (1, 3, 5, 7):
                total = mpmath.mpc(0)
                for g in coset_reps(m):
                    w = (g.a * rho + g.b) / g.d
                    _, (a, b, c, d) = reduce_gamma0(2, complex(w))
                    total += hauptmodul_2((a * w + b) / (c * w + d))
                assert abs(total - j_value_on_divisor(ident_e4, m)) < 1e-15 * abs(total)

    def test_verify(self, ident_e4):
        rep = verify(ident_e4, 59)
        assert rep.winner == "forced" and rep.sigma_ratio_constant


class TestAudit:
    def test_forced_sign_across_levels(self):
        rng = random.Random(21)
        for N in (3, 5, 6, 10, 15):
            for f in [random_eta_quotient(N, rng) for _ in range(2)] + [builtin("E6", N)]:
                rep = verify(f, 80)
                assert rep.ok("forced"), (f, rep.mismatches())
                assert rep.sigma_ratio_constant
                if isinstance(f, EtaQuotient):
                    assert rep.constant_term == 0

    def test_sigma_ratio_value(self):
        f = builtin("Delta", 6)
        I = identity_series(f, 40)
        k12 = Fraction(12, 12)
        assert all(sigma_ratio(I, m) == 24 * (I.det_ratio_sum + k12) for m in range(1, 40) if gcd(m, 6) == 1)

    def test_linearity(self):
        rng = random.Random(22)
        for _ in range(5):
            f, g = random_eta_quotient(6, rng), random_eta_quotient(10, rng)
            L = 30
            a, b, ab = (identity_series(h, 30) for h in (f.lift(L), g.lift(L), f * g))
            assert ab.S.identical(a.S + b.S)
            assert ab.det_ratio_sum == a.det_ratio_sum + b.det_ratio_sum

    def test_level_restrictions(self):
        with pytest.raises(SquareFreeError):
            identity_series(EtaQuotient(4, {1: 8, 2: -4, 4: 4}), 10)
        with pytest.raises(SquareFreeError):
            identity_series(builtin("Delta", 1), 10)

    def test_report_serialisation(self, ident_2):
        d = verify(ident_2, 10).to_dict()
        assert d["sign_audit"]["winner"] == "forced"
        assert d["rows"][0] == {"m": 1, "lhs": "0/1", "j_value": "0/1", "rhs_forced": "0/1", "rhs_paper": "16/1",
                                "det_ratio_sum": "-1/3", "match_forced": True, "match_paper": False}
