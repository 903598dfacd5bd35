"""Exact q-series, product exponents and Hecke-orbit values of ``J_{N,1}``
for meromorphic modular forms on Gamma_0(N), N square-free."""

from __future__ import annotations

from .qseries import PrecisionError, QSeries, Rat, format_rat, parse_rat, rat
from .modforms import (
    BUILTINS,
    CuspTable,
    EtaQuotient,
    LevelOneForm,
    LiftedForm,
    SquareFreeError,
    builtin,
    cusp_table,
    delta_series,
    e2_series,
    parse_form,
    validate,
)
from .thetaexp import ExponentVector, extract_exponents, f_theta, log_derivative
from .eisspace import EisSolution, build_AN, det_exact, eis_coefficients, solve_exact
from .hecke import (
    HDivisor,
    QuadPoint,
    coset_reps,
    divisor_tail,
    exp_sum,
    hecke_image,
    hecke_orbit,
    hecke_u0,
    reduce_gamma0,
)
from .identity import IdentityReport, identity_series, j_value_on_divisor, rhs_closed, verify
from .equidist import EquidistConfig, convergence_report, haar_normalizer, preset_config, statistic

__version__ = "0.1.0"
