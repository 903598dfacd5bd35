from __future__ import annotations

import math
from fractions import Fraction

import pytest

from hecke_exponents.arith import psi
from hecke_exponents.equidist import (
    EquidistConfig,
    ReductionError,
    convergence_report,
    haar_normalizer,
    orbit_tail,
    preset_config,
    statistic,
    summarise,
)
from hecke_exponents.hecke import HDivisor, QuadPoint, random_gamma0
from hecke_exponents.identity import identity_series
from hecke_exponents.modforms import EtaQuotient, builtin


@pytest.fixture(scope="module")
def e4_cfg():
    return preset_config("builtin:E4", 2, 61)


@pytest.fixture(scope="module")
def e4_ident():
    return identity_series(builtin("E4", 2), 62)


class TestStatistic:
    def test_empty_divisor(self):
        cfg = preset_config("2; 1:8, 2:8", 2, 40)
        rep = convergence_report(cfg)
        assert all(r.statistic == 0 and r.j_term == 0 and r.tail_points == 0 for r in rep.rows)
        assert rep.summary.limit_estimate == 0 and rep.summary.max_successive_diff == 0

    def test_m1_is_j_value(self, e4_cfg, e4_ident):
        assert statistic(e4_cfg, 1, e4_ident) == -232

    def test_real_by_symmetry(self, e4_cfg, e4_ident):
        for m in (3, 5, 25, 61):
            assert abs(statistic(e4_cfg, m, e4_ident).imag) < 1e-20

    def test_translate_invariance(self, e4_cfg, e4_ident):
        import random

        rng = random.Random(1)
        for _ in range(3):
            g = random_gamma0(2, rng, size=6)
            moved = EquidistConfig(2, e4_cfg.form, HDivisor(((QuadPoint.rho().act(g), 1),), 2), e4_cfg.ms)
            for m in (3, 7, 15, 31):
                assert abs(statistic(moved, m, e4_ident) - statistic(e4_cfg, m, e4_ident)) < 1e-8

    def test_integer_translation_of_tail(self, e4_cfg, e4_ident):
        shifted = EquidistConfig(2, e4_cfg.form, HDivisor(((QuadPoint.rho().translate(3), 1),), 2), e4_cfg.ms)
        for m in (5, 9):
            assert abs(statistic(shifted, m, e4_ident) - statistic(e4_cfg, m, e4_ident)) < 1e-8

    def test_tail_points_are_high(self, e4_cfg):
        for z, nu in orbit_tail(e4_cfg, 21):
            assert z.y2 > 1 and -Fraction(1, 2) < z.x <= Fraction(1, 2) and nu == 1

    def test_precision_shortfall(self, e4_cfg):
        from hecke_exponents.qseries import PrecisionError

        with pytest.raises(PrecisionError):
            statistic(e4_cfg, 61, identity_series(builtin("E4", 2), 30))

    def test_point_near_axis_reported(self, e4_cfg, e4_ident):
        cfg = EquidistConfig(2, e4_cfg.form, e4_cfg.divisor, e4_cfg.ms, min_imag=0.1)
        with pytest.raises(ReductionError):
            statistic(cfg, 15, e4_ident)


class TestConfig:
    def test_m_coprime(self, e4_cfg):
        with pytest.raises(ValueError):
            EquidistConfig(2, e4_cfg.form, e4_cfg.divisor, (1, 2, 3))

    def test_divisor_degree_checked(self, e4_cfg):
        with pytest.raises(ValueError):
            EquidistConfig(2, e4_cfg.form, HDivisor(((QuadPoint.rho(), 2),), 2), e4_cfg.ms)

    def test_threshold(self, e4_cfg):
        with pytest.raises(ValueError):
            EquidistConfig(2, e4_cfg.form, e4_cfg.divisor, e4_cfg.ms, r=0)

    def test_too_few_m(self):
        with pytest.raises(ValueError):
            convergence_report(preset_config("builtin:E4", 2, 17))


class TestReport:
    def test_workers_do_not_change_results(self):
        cfg = preset_config("builtin:E4", 3, 50)
        a = convergence_report(cfg, workers=1)
        b = convergence_report(cfg, workers=2)
        assert [r.statistic for r in a.rows] == [r.statistic for r in b.rows]
        assert a.to_csv() == b.to_csv()

    def test_summary_on_synthetic_sequence(self):
        ms = list(range(1, 400, 2))
        stats = [5 + 3 * (-1) ** i * m ** (-0.390625) for i, m in enumerate(ms)]
        s = summarise(ms, stats)
        assert abs(s.limit_estimate - 5) < 0.05
        assert abs(s.fitted_exponent + 0.390625) < 0.05
        assert s.envelope_ratio < 10

    def test_report_fields(self, e4_cfg, e4_ident):
        rep = convergence_report(e4_cfg, ident=e4_ident)
        d = rep.to_dict()
        assert d["config"]["N"] == 2 and d["rows"][0]["J_term"] == "-232/1"
        assert rep.half_range is not None and rep.doubling_shift is not None
        assert rep.to_csv().splitlines()[0] == "m,sigma1,statistic_re,statistic_im,tail_points,max_imag"


class TestHaar:
    def test_values(self):
        assert haar_normalizer(2).coefficient == 1
        assert haar_normalizer(6).coefficient == Fraction(1, 4)
        assert math.isclose(haar_normalizer(2).value, 1 / math.pi)
        assert (haar_normalizer(6).numerator, haar_normalizer(6).index) == (3, 12)

    def test_psi_multiplicative(self):
        assert psi(6) == psi(2) * psi(3) and psi(30) == psi(2) * psi(3) * psi(5)
