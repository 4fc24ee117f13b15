import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import PARAM_GRID
from screwmin import curve2d as c2
from screwmin.params import ScrewParams, derive_constants


# -- closed forms -------------------------------------------------------------


def test_radius_examples(unit):
    assert c2.radius_of(0, unit) == 1.0
    assert c2.radius_of(math.sqrt(2), unit) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert c2.radius_of(-3, ScrewParams(0, 1)) == 3.0


def test_curvature_examples(unit):
    assert c2.curvature_of(0, unit) == 0.5
    assert c2.curvature_of(2 * math.sqrt(3), unit) == pytest.approx(0.25, rel=1e-15)
    assert np.all(c2.curvature_of(np.linspace(-5, 5, 11), ScrewParams(0, 1)) == 0)


def test_turning_angle(unit):
    assert c2.turning_angle_of(0, unit) == 0
    mu = derive_constants(unit).mu
    assert c2.turning_angle_of(1 / mu, unit) == pytest.approx(0.881373587019543, rel=1e-14)


@pytest.mark.parametrize("p", PARAM_GRID[::4])
def test_turning_angle_is_integrated_curvature(p):
    for s in np.linspace(-10, 10, 9):
        val, _ = integrate.quad(lambda x: c2.curvature_of(x, p), 0, s, epsabs=1e-13, epsrel=1e-13)
        assert c2.turning_angle_of(s, p) == pytest.approx(val, abs=1e-10)


def test_curve_point_start():
    assert c2.curve_point(0, ScrewParams(1, 1)) == pytest.approx([0, -1], abs=0)
    assert c2.curve_point(0, ScrewParams(2, 1)) == pytest.approx([0, -2], abs=0)


@pytest.mark.parametrize("p", PARAM_GRID)
def test_curve_point_radius(p, rng):
    eta = rng.uniform(-5, 5, 200)
    r = np.linalg.norm(c2.curve_point(eta, p), axis=-1)
    np.testing.assert_allclose(r, c2.radius_of(c2.s_of_eta(eta, p), p), rtol=1e-12)


def test_sample_invariants(unit):
    for s in np.linspace(-6, 6, 25):
        smp = c2.sample(s, unit)
        assert np.linalg.norm(smp.position) == pytest.approx(smp.r, rel=1e-14)
        assert np.linalg.norm(smp.tangent) == pytest.approx(1.0, abs=1e-12)
        assert smp.r >= 1.0 - 1e-15
    assert c2.sample(0.0, unit).r == 1.0


@settings(max_examples=50, deadline=None)
@given(
    st.floats(-4, 4),
    st.floats(0.2, 3),
    st.floats(0.2, 3),
)
def test_reflection_symmetry(eta, g, w):
    # flipping both signs is the same as running the curve backwards
    p, q = ScrewParams(g, w), ScrewParams(-g, -w)
    np.testing.assert_allclose(
        c2.curve_point(eta, q), c2.curve_point(-eta, p), rtol=1e-12, atol=1e-12
    )


@pytest.mark.parametrize("p", PARAM_GRID)
def test_radial_chain(p):
    res = c2.radial_chain_residuals(np.linspace(-10, 10, 201), p)
    assert max(np.max(np.abs(r)) for r in res) <= 1e-10


@pytest.mark.parametrize("p", PARAM_GRID + [ScrewParams(-1, -2)])
def test_conserved_ratios(p):
    eps_q, g_q = c2.conserved_ratios(np.linspace(-4, 4, 81), p)
    c = derive_constants(p)
    np.testing.assert_allclose(eps_q, c.epsilon, atol=1e-10)
    np.testing.assert_allclose(g_q, p.gamma0, atol=1e-10)
    assert c.epsilon / math.sqrt(1 - c.epsilon**2) == pytest.approx(p.gamma0, rel=1e-12)


@pytest.mark.parametrize("p", [ScrewParams(1, 1), ScrewParams(2, 0.5), ScrewParams(-1, -1)])
def test_arclength(p):
    for s in (0.5, 2.0, 7.0):
        eta = float(c2.eta_of_s(s, p))
        # eta runs against s when mu < 0, so the signed length flips too
        assert abs(c2.arclength_between(0, eta, p)) == pytest.approx(s, abs=1e-8)


@pytest.mark.parametrize("p", PARAM_GRID[::2])
def test_fd_derivatives_match(p):
    for s in (-2.0, 0.0, 0.7, 3.0):
        d1, d2 = c2.s_derivatives(s, p)
        f1, f2 = c2.fd_s_derivatives(s, p)
        np.testing.assert_allclose(f1, d1, atol=1e-9)
        np.testing.assert_allclose(f2, d2, atol=1e-8)


def test_polar_angle_inverse(unit):
    for eta in (-3.0, -0.5, 0.3, 2.0, 6.0):
        th = float(c2.polar_angle_of_eta(eta, unit))
        r, e = c2.radius_of_polar_angle(th, unit)
        assert e == pytest.approx(eta, abs=1e-12)
        assert r == pytest.approx(np.linalg.norm(c2.curve_point(eta, unit)), rel=1e-12)


def test_polar_angle_is_continuous(unit):
    eta = np.linspace(-8, 8, 20001)
    pts = c2.curve_point(eta, unit)
    ref = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
    ref += -math.pi / 2 - ref[10000]
    np.testing.assert_allclose(c2.polar_angle_of_eta(eta, unit), ref, atol=1e-12)


# -- quadrature route ------------------------------------------------------------


def test_quadrature_single_point(unit):
    q = c2.curve_by_quadrature([0.0], unit)
    assert len(q.samples) == 1
    assert np.linalg.norm(q.samples[0].position) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("p", PARAM_GRID + [ScrewParams(-2, -0.5)])
def test_quadrature_matches_closed_form(p):
    q = c2.curve_by_quadrature(np.linspace(-5, 5, 101), p)
    assert q.max_deviation <= 1e-8
    assert abs(q.rotation) <= 1e-10
    assert not q.failures


def test_quadrature_closed_form_tangent(unit):
    mu = derive_constants(unit).mu
    s = np.concatenate([[0.0], np.linspace(0.1, 5, 100)])
    q = c2.curve_by_quadrature(s, unit)
    theta = np.array([x.theta for x in q.samples[1:]])
    psi = np.arcsinh(mu * s[1:])
    np.testing.assert_allclose(np.tan(theta), c2.polar_tangent_closed_form(psi, 1.0), rtol=1e-8, atol=1e-8)
    pos = np.array([x.position for x in q.samples[1:]])
    np.testing.assert_allclose(
        pos[:, 0] / pos[:, 1], c2.component_ratio_closed_form(psi, 1.0), rtol=1e-8, atol=1e-8
    )


def test_quadrature_rotation_reported(unit):
    q = c2.curve_by_quadrature(np.linspace(-3, 3, 31), unit, theta0=0.4)
    assert q.rotation == pytest.approx(-0.4, abs=1e-12)
    assert q.max_deviation <= 1e-8


def test_quadrature_rejects_bad_grid(unit):
    with pytest.raises(ValueError):
        c2.curve_by_quadrature([0.0, 1.0, 0.5], unit)
    with pytest.raises(ValueError):
        c2.curve_by_quadrature([0.5, 1.0], unit)
    with pytest.raises(ValueError):
        c2.curve_by_quadrature([0.0, 1.0], ScrewParams(0, 1))


# -- residuals -------------------------------------------------------------------


@pytest.mark.parametrize("p", PARAM_GRID)
def test_shape_residuals_small(p):
    worst = 0.0
    for eta in np.linspace(-5, 5, 500):
        s = float(c2.s_of_eta(eta, p))
        d1, d2 = c2.s_derivatives(s, p)
        worst = max(worst, c2.shape_residuals(c2.sample(s, p), d1, d2, p).max_abs())
    assert worst <= 1e-10


def test_shape_residuals_with_fd(unit):
    for s in (-1.5, 0.4, 2.0):
        d1, d2 = c2.fd_s_derivatives(s, unit)
        res = c2.shape_residuals(c2.sample(s, unit), d1, d2, unit, fd_step=1e-3)
        assert res.fd_step == 1e-3
        assert res.max_abs() <= 1e-6


def test_circle_control():
    # the unit circle at omega = 1 sits on the excluded phi = pi/2 branch
    assert abs(c2.circle_residuals(1.0, ScrewParams(1, 1)).shape_invariant) <= 1e-14
    res = c2.circle_residuals(1.0, ScrewParams(1, 2))
    assert abs(res.shape_invariant) >= 0.1
    assert abs(res.shape) >= 0.1


def test_helicoid_branch():
    p = ScrewParams(0, 1)
    for s in (-2.0, 0.5, 3.0):
        smp = c2.sample(s, p)
        d1, d2 = c2.s_derivatives(s, p)
        res = c2.shape_residuals(smp, d1, d2, p)
        assert math.isnan(res.shape)
        r_sin = c2.cross2(smp.position, smp.tangent)
        assert r_sin / math.sqrt(1 + smp.r**2) == 0.0


def test_linear_ode_at_vertex(unit):
    assert np.all(np.abs(c2.linear_ode_residual(0.0, unit)) <= 1e-12)


@pytest.mark.parametrize("p", PARAM_GRID)
def test_linear_ode_coefficients(p):
    coef = c2.fit_linear_ode_coefficients(np.linspace(-3, 3, 61), p)
    g = p.gamma0
    assert coef["alpha_plus"] == pytest.approx(0.5, abs=1e-12)
    assert coef["alpha_minus"] == pytest.approx(-0.5, abs=1e-12)
    assert coef["beta_plus"] == pytest.approx(-g / 2, abs=1e-12)
    assert coef["beta_minus"] == pytest.approx(-g / 2, abs=1e-12)


def test_linear_ode_perturbed(unit):
    g, w = unit.gamma0, unit.omega

    def jet(e):
        pos, d1, d2 = c2.curve_jet(e, unit)
        R = c2.rotation(g * e)
        bump = 0.01 * R[:, 0] / w
        return pos + bump, d1 + g * c2.A @ bump, d2 - g * g * bump

    assert np.linalg.norm(c2.linear_ode_residual(1.0, unit, jet)) >= 1e-3


@pytest.mark.parametrize("s", [0.0, 5.0, -5.0])
def test_hyperbola_examples(unit, s):
    assert abs(c2.hyperbola_residual(s, unit)) <= 1e-12
    assert c2.hyperbola_residual(0.0, unit) == 0.0


@pytest.mark.parametrize("p", PARAM_GRID)
def test_hyperbola_grid(p):
    assert np.max(np.abs(c2.hyperbola_residual(np.linspace(-10, 10, 1000), p))) <= 1e-12


# -- ODE route -------------------------------------------------------------------


def test_ode_final_radius(unit):
    res = c2.integrate_shape_ode(unit, 10.0, rtol=1e-10)
    assert res.s[-1] == 10.0
    assert res.r[-1] == pytest.approx(math.sqrt(51), abs=1e-8)
    assert res.first_integral[0] == pytest.approx(0.5, abs=1e-15)
    assert np.ptp(res.first_integral) <= 1e-9


@pytest.mark.parametrize("p", PARAM_GRID)
def test_ode_step_bound(p):
    rtol = 1e-10
    res = c2.integrate_shape_ode(p, 10.0, rtol=rtol)
    assert np.all(np.abs(res.r - c2.radius_of(res.s, p)) <= 10 * rtol * (1 + res.r))
    c = derive_constants(p)
    assert np.max(np.abs(res.first_integral - c.beta)) <= 10 * rtol


def test_ode_scale_covariance():
    a = c2.integrate_shape_ode(ScrewParams(1, 1), 20.0, rtol=1e-11)
    b = c2.integrate_shape_ode(ScrewParams(1, 2), 10.0, rtol=1e-11)
    s = np.linspace(0, 10, 41)
    np.testing.assert_allclose(2 * b.solution.sol(s)[0], a.solution.sol(2 * s)[0], atol=1e-8)


def test_ode_rejects_helicoid():
    with pytest.raises(ValueError):
        c2.integrate_shape_ode(ScrewParams(0, 1), 1.0)


# -- self-intersections ------------------------------------------------------------


def _bisect_oracle(g, k):
    # plain bisection on the pole-free numerator, independent of the module
    lo, hi = (k - 0.5) * math.pi / g + 1e-12, (k + 0.5) * math.pi / g - 1e-12
    f = lambda e: math.sin(g * e) * g * math.cosh(e) + math.cos(g * e) * math.sinh(e)  # noqa: E731
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_first_root_gamma1(unit):
    (root,) = c2.self_intersections(unit, 1)
    assert root.eta == pytest.approx(2.3650203724313, abs=1e-12)
    assert root.eta == pytest.approx(_bisect_oracle(1.0, 1), abs=1e-12)
    assert root.residual <= 1e-12
    pp, pm = c2.curve_point(root.eta, unit), c2.curve_point(-root.eta, unit)
    np.testing.assert_allclose(pp, pm, atol=1e-10)
    assert abs(pp[0]) <= 1e-10


@pytest.mark.parametrize("g", [0.5, 1.0, 2.0, -1.5])
def test_roots_against_oracle(g):
    p = ScrewParams(g, math.copysign(1.0, g))
    roots = c2.self_intersections(p, 4)
    for k, r in enumerate(roots, start=1):
        assert r.eta == pytest.approx(_bisect_oracle(abs(g), k), rel=1e-12)
        assert r.residual <= 1e-12
        assert r.coincidence <= 1e-10 and r.axis_offset <= 1e-10
    assert all(np.diff([r.eta for r in roots]) > 0)


def test_roots_errors(unit):
    with pytest.raises(ValueError):
        c2.self_intersections(ScrewParams(0, 1), 1)
    with pytest.raises(ValueError):
        c2.self_intersections(unit, 0)
    with pytest.raises(ValueError):
        c2.self_intersections(unit, 1000)
