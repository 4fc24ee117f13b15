"""The planar generating curve.

The curve is parametrized primarily by the extended (signed) arclength ``s``
measured from the point closest to the origin. The closed form lives in the
hyperbolic parameter ``eta = arcsinh(mu * s)``:

    omega * c(eta) = R(gamma0 * eta) @ (sinh eta, -gamma0 cosh eta)

Every closed form here has an independent numerical route next to it
(quadrature of the polar angle, Runge-Kutta on the second-order radial ODE,
finite differences) so the two can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from screwmin.params import ScrewParams, derive_constants

# rotation generator: A @ (x, y) = (-y, x)
A = np.array([[0.0, -1.0], [1.0, 0.0]])


def rotation(angle):
    """2x2 rotation matrices, broadcasting over ``angle``; shape (..., 2, 2)."""
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def cross2(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def eta_of_s(s, p: ScrewParams):
    return np.arcsinh(derive_constants(p).mu * np.asarray(s, dtype=float))


def s_of_eta(eta, p: ScrewParams):
    return np.sinh(np.asarray(eta, dtype=float)) / derive_constants(p).mu


def radius_of(s, p: ScrewParams):
    """Distance from the origin at signed arclength ``s``."""
    beta = derive_constants(p).beta
    s = np.asarray(s, dtype=float)
    return np.sqrt(p.gamma0**2 + beta * p.omega**2 * s**2) / abs(p.omega)


def curvature_of(s, p: ScrewParams):
    c = derive_constants(p)
    s = np.asarray(s, dtype=float)
    return c.kappa0 / np.sqrt(1.0 + (c.mu * s) ** 2)


def turning_angle_of(s, p: ScrewParams):
    """Integral of the curvature from 0 to ``s`` (closed form)."""
    return p.gamma0 * np.arcsinh(derive_constants(p).mu * np.asarray(s, dtype=float))


def curve_point(eta, p: ScrewParams):
    eta = np.asarray(eta, dtype=float)
    g = p.gamma0
    w = np.stack([np.sinh(eta), -g * np.cosh(eta)], -1)
    return np.einsum("...ij,...j->...i", rotation(g * eta), w) / p.omega


def curve_jet(eta, p: ScrewParams):
    """Position and its first two ``eta``-derivatives, analytically.

    With ``v = omega * c`` one has ``v' = g A v + R w'`` and
    ``v'' = (1 + g^2) v + 2 g A v'``.
    """
    eta = np.asarray(eta, dtype=float)
    g = p.gamma0
    R = rotation(g * eta)
    w = np.stack([np.sinh(eta), -g * np.cosh(eta)], -1)
    dw = np.stack([np.cosh(eta), -g * np.sinh(eta)], -1)
    v = np.einsum("...ij,...j->...i", R, w)
    dv = g * (v @ A.T) + np.einsum("...ij,...j->...i", R, dw)
    ddv = (1 + g * g) * v + 2 * g * (dv @ A.T)
    return v / p.omega, dv / p.omega, ddv / p.omega


def s_derivatives(s, p: ScrewParams):
    """Analytic unit tangent and its ``s``-derivative at arclength ``s``."""
    c = derive_constants(p)
    eta = eta_of_s(s, p)
    _, d1, d2 = curve_jet(eta, p)
    deta = (c.mu / np.cosh(eta))[..., None]  # d eta / ds
    dd_eta = (-c.mu**2 * np.tanh(eta) / np.cosh(eta) ** 2)[..., None]
    return d1 * deta, d2 * deta**2 + d1 * dd_eta


def fd_s_derivatives(s, p: ScrewParams, h: float = 1e-3, richardson: bool = True):
    """Central-difference oracle for :func:`s_derivatives`.

    Richardson extrapolation over (h, h/2) lifts the O(h^2) error to O(h^4).
    """

    def pos(x):
        return curve_point(eta_of_s(x, p), p)

    def central(step):
        fp, f0, fm = pos(s + step), pos(s), pos(s - step)
        return (fp - fm) / (2 * step), (fp - 2 * f0 + fm) / step**2

    d1, d2 = central(h)
    if not richardson:
        return d1, d2
    e1, e2 = central(h / 2)
    return (4 * e1 - d1) / 3, (4 * e2 - d2) / 3


@dataclass(frozen=True)
class CurveSample:
    s: float
    eta: float
    r: float
    theta: float
    kappa: float
    position: np.ndarray
    tangent: np.ndarray


def polar_angle_of_eta(eta, p: ScrewParams):
    """Continuous (unwrapped) polar angle of ``curve_point(eta)``.

    Starts at -pi/2 at the vertex ``(0, -gamma0/omega)`` and is odd about it.
    """
    eta = np.asarray(eta, dtype=float)
    g = p.gamma0
    if g == 0:
        return np.where(eta * p.omega >= 0, 0.0, math.pi)
    ae = np.abs(eta)
    with np.errstate(divide="ignore"):
        inc = g * ae - np.arctan(g / np.tanh(ae)) + math.copysign(math.pi / 2, g)
    inc = np.where(ae == 0, 0.0, inc)
    return -math.pi / 2 + np.sign(eta) * inc


def radius_of_polar_angle(theta, p: ScrewParams):
    """Radius as a function of the unwrapped polar angle (``theta = -pi/2`` at the vertex).

    Inverts the monotone map eta -> polar angle with Brent's method, so the
    curve can be fed to routines that want ``r(theta)``.
    """
    from scipy.optimize import brentq

    if p.gamma0 == 0:
        raise ValueError("the helicoid generator is a line through the origin")
    target = float(theta)

    def f(e):
        return float(polar_angle_of_eta(e, p)) - target

    lo, hi = -1.0, 1.0
    while f(lo) * f(hi) > 0:
        lo, hi = 2 * lo, 2 * hi
        if hi > 700:
            raise ValueError(f"polar angle {theta} out of reach")
    eta = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)
    return float(np.linalg.norm(curve_point(eta, p))), eta


def sample(s: float, p: ScrewParams) -> CurveSample:
    eta = float(eta_of_s(s, p))
    pos = curve_point(eta, p)
    tangent, _ = s_derivatives(s, p)
    return CurveSample(
        s=float(s),
        eta=eta,
        r=float(np.hypot(*pos)),
        theta=float(polar_angle_of_eta(eta, p)),
        kappa=float(curvature_of(s, p)),
        position=pos,
        tangent=tangent,
    )


def arclength_between(eta0: float, eta1: float, p: ScrewParams) -> float:
    """Length of the closed-form curve between two ``eta`` values, by quadrature."""

    def speed(e):
        return float(np.linalg.norm(curve_jet(e, p)[1]))

    val, _ = integrate.quad(speed, eta0, eta1, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


# -- quadrature oracle -------------------------------------------------------


def polar_angle_rate(s, p: ScrewParams):
    """d(theta)/ds, the integrand of the quadrature route."""
    c = derive_constants(p)
    g, w, beta = p.gamma0, p.omega, c.beta
    s = np.asarray(s, dtype=float)
    return g * w * np.sqrt(1 + beta**2 * w**2 * s**2) / (g**2 + beta * w**2 * s**2)


@dataclass
class QuadratureCurve:
    samples: list[CurveSample]
    rotation: float
    max_deviation: float
    failures: list[tuple[float, float, float]] = field(default_factory=list)


def curve_by_quadrature(s_grid, p: ScrewParams, theta0: float = 0.0, tol: float = 1e-12):
    """Rebuild the curve as ``r(s) (cos theta, sin theta)`` by integrating theta'.

    ``theta(0) = theta0 - pi/2``; with the default ``theta0 = 0`` the result
    coincides with :func:`curve_point`. The rigid rotation that best aligns the
    two (least squares) and the residual deviation after it are reported.
    Intervals whose quadrature error estimate exceeds ``tol`` are listed in
    ``failures`` as ``(s_left, s_right, error_estimate)``.
    """
    if p.gamma0 == 0:
        raise ValueError("quadrature route needs gamma0 != 0")
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(np.diff(s_grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    zero = np.flatnonzero(s_grid == 0)
    if zero.size != 1:
        raise ValueError("grid must contain s = 0")
    i0 = int(zero[0])

    def rate(x):
        return float(polar_angle_rate(x, p))

    theta = np.empty_like(s_grid)
    theta[i0] = theta0 - math.pi / 2
    failures = []
    for i in range(i0 + 1, len(s_grid)):
        val, err = integrate.quad(rate, s_grid[i - 1], s_grid[i], epsabs=tol, epsrel=tol)
        if err > tol * max(1.0, abs(val)):
            failures.append((s_grid[i - 1], s_grid[i], err))
        theta[i] = theta[i - 1] + val
    for i in range(i0 - 1, -1, -1):
        val, err = integrate.quad(rate, s_grid[i], s_grid[i + 1], epsabs=tol, epsrel=tol)
        if err > tol * max(1.0, abs(val)):
            failures.append((s_grid[i], s_grid[i + 1], err))
        theta[i] = theta[i + 1] - val

    r = radius_of(s_grid, p)
    quad_pos = r[:, None] * np.stack([np.cos(theta), np.sin(theta)], -1)
    exact = curve_point(eta_of_s(s_grid, p), p)
    # best rotation carrying quad_pos onto exact
    angle = math.atan2(float(np.sum(cross2(quad_pos, exact))), float(np.sum(quad_pos * exact)))
    aligned = quad_pos @ rotation(angle).T
    dev = float(np.max(np.linalg.norm(aligned - exact, axis=-1)))

    tangents, _ = s_derivatives(s_grid, p)
    kappa = curvature_of(s_grid, p)
    samples = [
        CurveSample(
            s=float(s_grid[i]),
            eta=float(eta_of_s(s_grid[i], p)),
            r=float(r[i]),
            theta=float(theta[i]),
            kappa=float(kappa[i]),
            position=quad_pos[i],
            tangent=tangents[i],
        )
        for i in range(len(s_grid))
    ]
    return QuadratureCurve(samples, angle, dev, failures)


def polar_tangent_closed_form(psi, gamma0: float):
    """tan(theta - theta0) along the curve, in closed form in ``psi = eta``."""
    c0, s0 = np.cos(gamma0 * psi), np.sin(gamma0 * psi)
    return (s0 * np.sinh(psi) - gamma0 * c0 * np.cosh(psi)) / (
        c0 * np.sinh(psi) + gamma0 * s0 * np.cosh(psi)
    )


def component_ratio_closed_form(v, gamma0: float):
    """First-over-second component ratio of the curve, in closed form."""
    c0, s0 = np.cos(gamma0 * v), np.sin(gamma0 * v)
    return (c0 * np.sinh(v) + gamma0 * s0 * np.cosh(v)) / (
        s0 * np.sinh(v) - gamma0 * c0 * np.cosh(v)
    )


# -- residuals ---------------------------------------------------------------


@dataclass(frozen=True)
class CurveResiduals:
    """Identity residuals (LHS - RHS) at one curve point.

    ``shape``: the shape equation in (r, phi) form; ``shape_invariant``: its
    reparametrization-invariant form (divided by |v'|^2); ``conformal_norm`` and
    ``conformal_cross``: the two conformal-constancy relations in the ``eta``
    parametrization; ``linear_ode``: the linear second-order ODE;
    ``hyperbola``: the curvature-radius / arclength hyperbola. NaN marks a
    residual that does not apply (helicoid or r = 0).
    """

    shape: float
    shape_invariant: float
    conformal_norm: float
    conformal_cross: float
    linear_ode: np.ndarray
    hyperbola: float
    fd_step: float | None = None

    def max_abs(self) -> float:
        vals = [
            self.shape,
            self.shape_invariant,
            self.conformal_norm,
            self.conformal_cross,
            *np.abs(self.linear_ode),
            self.hyperbola,
        ]
        return max(abs(v) for v in vals if not math.isnan(v))


def shape_residuals(
    smp: CurveSample, d1, d2, p: ScrewParams, fd_step: float | None = None
) -> CurveResiduals:
    """Evaluate every curve identity at ``smp``.

    ``d1`` and ``d2`` are the first and second ``s``-derivatives of the
    position (analytic from :func:`s_derivatives` or finite differences, in
    which case pass ``fd_step``). They are converted to ``eta``-derivatives for
    the parametrization-dependent identities.
    """
    g, w = p.gamma0, p.omega
    c = derive_constants(p)
    d1, d2 = np.asarray(d1, dtype=float), np.asarray(d2, dtype=float)
    pos = np.asarray(smp.position, dtype=float)
    eta = smp.eta
    ds = math.cosh(eta) / c.mu  # ds / d eta
    dds = math.sinh(eta) / c.mu
    v = w * pos
    dv = w * d1 * ds
    ddv = w * (d2 * ds**2 + d1 * dds)

    vv, dvdv, vxdv = float(v @ v), float(dv @ dv), float(cross2(v, dv))
    r = math.sqrt(vv) / abs(w)
    if r == 0 or g == 0:
        shape = math.nan
    else:
        sin_phi = vxdv / math.sqrt(vv * dvdv)
        shape = w * w * r * r * (c.gamma_sq * sin_phi**2 - 1.0) - 1.0
    shape_inv = (g * g + 1) * vxdv**2 / dvdv - g * g * (1 + vv)
    conf_norm = dvdv - (g * g + 1) * (vv + 1)
    conf_cross = vxdv - g * (vv + 1)
    lin = ddv - 2 * g * (A @ dv) - (g * g + 1) * v
    hyp = float(hyperbola_residual(smp.s, p)) if g != 0 else math.nan
    return CurveResiduals(shape, shape_inv, conf_norm, conf_cross, lin, hyp, fd_step)


def circle_residuals(radius: float, p: ScrewParams, angle: float = 0.3) -> CurveResiduals:
    """Residuals of a circle about the origin, used as a non-solution control.

    Only ``shape`` and ``shape_invariant`` are meaningful here; both are
    unchanged by reparametrization.
    """
    c, s_ = math.cos(angle), math.sin(angle)
    pos = radius * np.array([c, s_])
    d1 = np.array([-s_, c])
    d2 = -np.array([c, s_]) / radius
    smp = CurveSample(0.0, 0.0, radius, angle, 1.0 / radius, pos, d1)
    return shape_residuals(smp, d1, d2, p)


def conserved_ratios(eta, p: ScrewParams):
    """The two conserved quantities along the closed-form curve.

    Returns ``(omega r sin(phi) / sqrt(1 + omega^2 r^2),
    omega r sin(phi) / sqrt(1 + omega^2 r^2 cos^2(phi)))``, expected to be
    ``(epsilon, gamma0)``. ``phi`` is measured in the direction of increasing
    ``s``.
    """
    pos, d1, _ = curve_jet(eta, p)
    sgn = math.copysign(1.0, derive_constants(p).mu)  # orientation of s vs eta
    w = p.omega
    rs = sgn * cross2(pos, d1) / np.linalg.norm(d1, axis=-1)  # r sin(phi)
    rc = sgn * np.sum(pos * d1, -1) / np.linalg.norm(d1, axis=-1)  # r cos(phi)
    r2 = np.sum(pos * pos, -1)
    return w * rs / np.sqrt(1 + w * w * r2), w * rs / np.sqrt(1 + w * w * rc * rc)


def linear_ode_residual(eta, p: ScrewParams, jet=None):
    """``v'' - 2 gamma0 A v' - (gamma0^2 + 1) v`` with ``v = omega * c(eta)``.

    ``jet`` is an optional callable ``eta -> (c, c', c'')`` replacing the
    closed-form curve (for negative controls).
    """
    jet = jet or (lambda e: curve_jet(e, p))
    c0, c1, c2 = (p.omega * np.asarray(x) for x in jet(eta))
    g = p.gamma0
    return c2 - 2 * g * (c1 @ A.T) - (g * g + 1) * c0


def fit_linear_ode_coefficients(eta_grid, p: ScrewParams) -> dict[str, float]:
    """Least-squares fit of the general solution of the linear ODE to the curve.

    The basis is ``C e^{+-eta}``, ``S e^{+-eta}`` with ``C = (cos, sin)(g eta)``
    and ``S = A C``; returns the four coefficients.
    """
    eta = np.asarray(eta_grid, dtype=float)
    g = p.gamma0
    C = np.stack([np.cos(g * eta), np.sin(g * eta)], -1)
    S = C @ A.T
    ep, em = np.exp(eta)[:, None], np.exp(-eta)[:, None]
    cols = [C * ep, S * ep, C * em, S * em]
    M = np.stack([c.reshape(-1) for c in cols], -1)
    target = (p.omega * curve_point(eta, p)).reshape(-1)
    coef, *_ = np.linalg.lstsq(M, target, rcond=None)
    return dict(zip(("alpha_plus", "beta_plus", "alpha_minus", "beta_minus"), map(float, coef)))


def hyperbola_residual(s, p: ScrewParams):
    """``kappa0^2 rho^2 - mu^2 s^2 - 1`` with ``rho = 1 / kappa(s)``."""
    c = derive_constants(p)
    s = np.asarray(s, dtype=float)
    rho = 1.0 / curvature_of(s, p)
    return c.kappa0**2 * rho**2 - c.mu**2 * s**2 - 1.0


def radial_chain_residuals(s, p: ScrewParams):
    """Residuals of ``r r' = beta s``, ``r'^2 + r r'' = beta`` and ``r'' = 1/(gamma^2 w^2 r^3)``.

    r, r' and r'' are taken from the closed-form curve itself (position,
    tangent, tangent derivative), not from the radius formula.
    """
    c = derive_constants(p)
    s = np.asarray(s, dtype=float)
    pos = curve_point(eta_of_s(s, p), p)
    t, dt = s_derivatives(s, p)
    r = np.linalg.norm(pos, axis=-1)
    pt = np.sum(pos * t, -1)
    dr = pt / r
    ddr = (np.sum(t * t, -1) + np.sum(pos * dt, -1)) / r - pt**2 / r**3
    res = [r * dr - c.beta * s, dr**2 + r * ddr - c.beta]
    if p.gamma0 != 0:
        res.append(ddr - 1.0 / (c.gamma_sq * p.omega**2 * r**3))
    return tuple(res)


# -- ODE oracle --------------------------------------------------------------


class ShapeOdeError(RuntimeError):
    def __init__(self, message, last_state):
        super().__init__(message)
        self.last_state = last_state


@dataclass
class ShapeOdeResult:
    s: np.ndarray
    r: np.ndarray
    dr: np.ndarray
    first_integral: np.ndarray
    solution: object = None

    @property
    def samples(self):
        return list(zip(self.s, self.r, self.dr))


def shape_ode_rhs(s, y, omega):
    r, dr = y
    return [dr, (1.0 - dr * dr) / (r * (1.0 + omega * omega * r * r))]


def first_integral(r, dr, omega):
    """(1 + w^2 r^2 r'^2) / (1 + w^2 r^2), constant on solutions."""
    w2 = omega * omega
    return (1 + w2 * r * r * dr * dr) / (1 + w2 * r * r)


def integrate_shape_ode(p: ScrewParams, s_max: float, rtol: float = 1e-10) -> ShapeOdeResult:
    """Integrate the second-order radial ODE from the vertex with adaptive RK.

    Starts from ``r(0) = |gamma0 / omega|``, ``r'(0) = 0``. Every accepted step
    is returned.
    """
    if p.gamma0 == 0:
        raise ValueError("the ODE route needs gamma0 != 0 (r(0) = 0 is singular)")
    y0 = [abs(p.gamma0 / p.omega), 0.0]
    sol = integrate.solve_ivp(
        shape_ode_rhs,
        (0.0, s_max),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=rtol * 1e-2,
        args=(p.omega,),
        dense_output=True,
    )
    if sol.status != 0:
        last = (sol.t[-1], *sol.y[:, -1])
        raise ShapeOdeError(f"integration stopped: {sol.message}", last)
    r, dr = sol.y
    return ShapeOdeResult(sol.t, r, dr, first_integral(r, dr, p.omega), sol)


# -- self-intersections ------------------------------------------------------


@dataclass(frozen=True)
class SelfIntersection:
    eta: float
    residual: float  # gamma0 tan(gamma0 eta) + tanh(eta)
    coincidence: float  # |c(eta) - c(-eta)| / (1 + |c(eta)|)
    axis_offset: float  # |first component of c(eta)| / (1 + |c(eta)|)


def intersection_function(eta, gamma0):
    return gamma0 * np.tan(gamma0 * eta) + np.tanh(eta)


def _bracket_sign(eta, g):
    # cos(g eta) cosh(eta) * intersection_function, free of the tangent poles
    return math.cos(g * eta) * math.sinh(eta) + g * math.sin(g * eta) * math.cosh(eta)


def self_intersections(p: ScrewParams, count: int, xtol: float = 1e-13) -> list[SelfIntersection]:
    """First ``count`` positive ``eta`` where the two spiral arms cross.

    One root lies between consecutive poles of ``tan(|g| eta)``; each is
    bracketed there, bisected to ``xtol`` (relative) and polished with up to
    three secant steps kept inside the bracket.
    """
    if p.gamma0 == 0:
        raise ValueError("the helicoid generator has no self-intersections")
    if count < 1:
        raise ValueError("count must be positive")
    g = abs(p.gamma0)
    roots = []
    for k in range(1, count + 1):
        lo, hi = (k - 0.5) * math.pi / g, (k + 0.5) * math.pi / g
        if hi > 700:
            raise ValueError(f"root {k} lies beyond eta = 700 where cosh overflows")
        flo = _bracket_sign(lo, g)
        while hi - lo > xtol * max(1.0, abs(lo)):
            mid = 0.5 * (lo + hi)
            fm = _bracket_sign(mid, g)
            if fm == 0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        x0, x1 = lo, hi
        f0, f1 = intersection_function(x0, g), intersection_function(x1, g)
        best = x0 if abs(f0) <= abs(f1) else x1
        a, b = lo, hi
        for _ in range(3):
            if f1 == f0:
                break
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            if not (a - xtol <= x2 <= b + xtol):
                break
            x0, f0, x1, f1 = x1, f1, x2, intersection_function(x2, g)
            if abs(f1) < abs(intersection_function(best, g)):
                best = x1
        eta = float(best)
        cp, cm = curve_point(eta, p), curve_point(-eta, p)
        scale = 1.0 + float(np.linalg.norm(cp))
        roots.append(
            SelfIntersection(
                eta=eta,
                residual=float(abs(intersection_function(eta, p.gamma0))),
                coincidence=float(np.linalg.norm(cp - cm)) / scale,
                axis_offset=abs(float(cp[0])) / scale,
            )
        )
    return roots
