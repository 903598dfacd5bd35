from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from hecke_exponents.qseries import QSeries

small_rats = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 6))


@st.composite
def series(draw, min_v=-3, max_v=3, min_len=1, max_len=30):
    v = draw(st.integers(min_v, max_v))
    coeffs = draw(st.lists(small_rats, min_size=min_len, max_size=max_len))
    return QSeries(coeffs, v, v + len(coeffs))


@st.composite
def units(draw, max_len=30):
    """Series with nonzero leading coefficient (invertible)."""
    v = draw(st.integers(-3, 3))
    lead = draw(small_rats.filter(lambda x: x != 0))
    rest = draw(st.lists(small_rats, min_size=0, max_size=max_len - 1))
    c = [lead] + rest
    return QSeries(c, v, v + len(c))


@pytest.fixture(scope="session")
def eta_2_8_8():
    from hecke_exponents.modforms import EtaQuotient

    return EtaQuotient(2, {1: 8, 2: 8})
