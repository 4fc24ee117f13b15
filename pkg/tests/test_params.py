import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from screwmin.params import ScrewParams, check_constants, derive_constants, params_from_ab


def test_unit_constants():
    c = derive_constants(ScrewParams(1, 1))
    assert c.epsilon == pytest.approx(0.7071067811865475, rel=1e-15)
    assert (c.beta, c.kappa0, c.mu) == pytest.approx((0.5, 0.5, 0.5), rel=1e-15)
    assert (c.a, c.b) == pytest.approx((1.0, -1.0), rel=1e-15)
    assert c.gamma_sq == pytest.approx(2.0, rel=1e-15)


def test_helicoid_constants():
    c = derive_constants(ScrewParams(0, 1))
    assert (c.epsilon, c.beta, c.kappa0, c.mu, c.a, c.b) == (0, 1, 0, 1, 1, 0)
    assert c.gamma_sq is None


def test_gamma2_omega2():
    c = derive_constants(ScrewParams(2, 2))
    assert c.kappa0 == pytest.approx(0.8, rel=1e-15)
    assert c.mu == pytest.approx(0.4, rel=1e-15)


@pytest.mark.parametrize(
    "a,b,expected", [(1, -1, (1, 1)), (1, 0, (0, 1)), (0.5, -0.5, (1, 2))]
)
def test_params_from_ab(a, b, expected):
    p = params_from_ab(a, b)
    assert (p.gamma0, p.omega) == pytest.approx(expected, rel=1e-15)


def test_catenoid_rejected():
    with pytest.raises(ValueError, match="bonnet_chart_jet"):
        params_from_ab(0.0, 1.0)


@pytest.mark.parametrize("g,w", [(1, 0), (1, -1), (-1, 1), (math.nan, 1), (1, math.inf)])
def test_invalid_params(g, w):
    with pytest.raises(ValueError):
        ScrewParams(g, w)


def test_negative_pair_allowed():
    assert derive_constants(ScrewParams(-2, -0.5)).kappa0 > 0


magnitude = st.floats(min_value=1e-3, max_value=1e3)


@given(magnitude, magnitude, st.booleans(), st.booleans())
def test_round_trip(g, w, neg, helicoid):
    s = -1 if neg else 1
    p = ScrewParams(0.0 if helicoid else s * g, s * w)
    c = derive_constants(p)
    q = params_from_ab(c.a, c.b)
    assert q.omega == pytest.approx(p.omega, rel=1e-12)
    assert q.gamma0 == pytest.approx(p.gamma0, rel=1e-12, abs=1e-14)
    back = derive_constants(q)
    assert (back.a, back.b) == pytest.approx((c.a, c.b), rel=1e-12, abs=1e-14)


@given(magnitude, magnitude, st.booleans())
def test_invariants(g, w, neg):
    s = -1 if neg else 1
    p = ScrewParams(s * g, s * w)
    c = derive_constants(p)
    assert 0 < c.beta < 1
    assert -1 < c.epsilon < 1
    assert c.gamma_sq > 1
    assert math.copysign(1, c.kappa0) == 1  # gamma0 omega > 0
    assert max(check_constants(p, c).values()) <= 1e-12


@given(magnitude)
def test_beta_one_iff_helicoid(w):
    assert derive_constants(ScrewParams(0.0, w)).beta == 1.0
    assert derive_constants(ScrewParams(1e-3, w)).beta < 1.0
