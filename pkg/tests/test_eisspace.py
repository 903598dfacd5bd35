from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hecke_exponents.arith import is_squarefree, sigma
from hecke_exponents.eisspace import (
    EisSolution,
    SingularMatrixError,
    basis_coefficient_matrix,
    basis_constant_at_cusp,
    build_AN,
    check_sigma_proportionality,
    det_exact,
    eis_coefficients,
    solve_exact,
)
from hecke_exponents.modforms import SquareFreeError
from hecke_exponents.qseries import QSeries, rat


def cofactor_det(M):
    n = len(M)
    if n == 1:
        return Fraction(M[0][0])
    return sum((-1) ** j * Fraction(M[0][j]) * cofactor_det([row[:j] + row[j + 1:] for row in M[1:]])
               for j in range(n))


class TestMatrix:
    def test_level2(self):
        A = build_AN(2)
        assert A.rows == (1,) and A.cols == (2,) and A.as_lists() == [[Fraction(1, 2)]]

    def test_level6(self):
        A = build_AN(6)
        assert A.rows == (1, 2, 3) and A.cols == (2, 3, 6)
        assert A.entries[1][1] == Fraction(2, 3)  # row d_i = 2, column d_j = 3

    def test_basis_constants(self):
        assert basis_constant_at_cusp(2, 2, 1) == Fraction(1, 2)
        assert basis_constant_at_cusp(6, 6, 1) == Fraction(5, 6)
        for d in (2, 3, 6):
            assert basis_constant_at_cusp(6, d, d) == 1 - d

    def test_square_free(self):
        with pytest.raises(SquareFreeError):
            build_AN(12)

    def test_nonsingular_up_to_210(self):
        for N in range(2, 211):
            if is_squarefree(N):
                assert det_exact(build_AN(N).entries) != 0

    def test_basis_coefficients_independent(self):
        for N in (2, 6, 30, 210):
            assert det_exact(basis_coefficient_matrix(N)) != 0


class TestDeterminant:
    def test_examples(self):
        assert det_exact([[1, 0], [0, 1]]) == 1
        assert det_exact([[Fraction(1, 2)]]) == Fraction(1, 2)
        assert det_exact([[1, 2], [2, 4]]) == 0

    def test_cofactor_oracle(self):
        rng = random.Random(3)
        for _ in range(20):
            n = rng.randint(2, 5)
            M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
            assert det_exact(M) == cofactor_det(M)
            R = [[Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(n)] for _ in range(n)]
            assert det_exact(R) == cofactor_det(R)

    def test_zero_pivot_handled(self):
        M = [[0, 1, 2], [1, 0, 3], [4, -3, 8]]
        assert det_exact(M) == cofactor_det(M)

    def test_solve(self):
        x = solve_exact([[2, 1], [1, 3]], [3, 5])
        assert x == [Fraction(4, 5), Fraction(7, 5)]
        with pytest.raises(SingularMatrixError):
            solve_exact([[1, 2], [2, 4]], [1, 1])


class TestSolution:
    def test_level2_worked_case(self):
        sol = eis_coefficients(2, {1: Fraction(-1, 6)}, 200)
        assert sol.coeffs == {2: Fraction(-1, 3)}
        assert sol.det_AN == Fraction(1, 2) and sol.cramer_dets == {2: Fraction(-1, 6)}
        assert all(sol.series.coeff(m) == 8 * sigma(m) for m in range(1, 200, 2))
        rep = check_sigma_proportionality(sol, 199)
        assert rep.ok and rep.constant == 8
        assert sol.constant_at_cusp(1) == Fraction(-1, 6)

    def test_zero_constants(self):
        sol = eis_coefficients(6, {1: 0, 2: 0, 3: 0}, 50)
        assert all(a == 0 for a in sol.coeffs.values()) and sol.series.is_zero()
        rep = check_sigma_proportionality(sol, 49)
        assert rep.ok and rep.constant == 0

    def test_infinity_key_ignored(self):
        a = eis_coefficients(2, {1: Fraction(-1, 6), 2: 99}, 10)
        assert a.coeffs == {2: Fraction(-1, 3)}

    def test_missing_constants(self):
        with pytest.raises(ValueError):
            eis_coefficients(6, {1: 0, 2: 0}, 10)

    def test_corrupted_b5_is_reported(self):
        sol = eis_coefficients(2, {1: Fraction(-1, 6)}, 40)
        c = list(sol.series.coeffs)
        c[5 - sol.series.v] += 1
        bad = EisSolution(sol.N, sol.coeffs, QSeries(c, sol.series.v, sol.series.prec),
                          sol.sigma_constant, sol.det_AN, sol.cramer_dets)
        rep = check_sigma_proportionality(bad, 39)
        assert not rep.ok and rep.first_violation == 5

    def test_prescribed_constants_recovered(self):
        rng = random.Random(4)
        for N in (6, 10, 30, 42):
            A = build_AN(N)
            consts = {d: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for d in A.rows}
            sol = eis_coefficients(N, consts, 5)
            assert all(sol.constant_at_cusp(d) == consts[d] for d in A.rows)
            assert sol.det_ratio_sum == sum(sol.cramer_dets.values(), rat(0)) / sol.det_AN
