"""Surfaces in R^3: screw-motion and Bonnet charts, fundamental forms, and checks.

All chart evaluators broadcast over array-valued parameters, so a whole grid
is one call. Vectors live on the last axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from screwmin.curve2d import A, curve_jet, eta_of_s, rotation, s_of_eta
from screwmin.params import ScrewParams, derive_constants


@dataclass(frozen=True)
class ChartJet:
    """Position with first and second partials along the chart parameters (u, v).

    ``d1 = (x_u, x_v)``, ``d2 = (x_uu, x_uv, x_vv)``; ``source`` is
    ``"analytic"`` or ``"fd(h)"``.
    """

    position: np.ndarray
    d1: tuple[np.ndarray, np.ndarray]
    d2: tuple[np.ndarray, np.ndarray, np.ndarray]
    source: str = "analytic"

    def max_deviation(self, other: "ChartJet") -> float:
        pairs = [(self.position, other.position), *zip(self.d1, other.d1), *zip(self.d2, other.d2)]
        return max(float(np.max(np.abs(a - b))) for a, b in pairs)


def _vec(*components):
    return np.stack(np.broadcast_arrays(*components), -1)


def bonnet_chart_jet(u, v, a: float, b: float) -> ChartJet:
    """Bonnet's isothermal chart: ``(R(v) (a sinh u, b cosh u), a v + b u)``.

    ``a = 0`` is the catenoid, ``b = 0`` the helicoid.
    """
    if a == 0 and b == 0:
        raise ValueError("(a, b) = (0, 0) is degenerate")
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    sh, ch, cv, sv = np.sinh(u), np.cosh(u), np.cos(v), np.sin(v)
    zero = np.zeros_like(u)
    x = _vec(a * sh * cv - b * ch * sv, a * sh * sv + b * ch * cv, a * v + b * u)
    xu = _vec(a * ch * cv - b * sh * sv, a * ch * sv + b * sh * cv, b + zero)
    xv = _vec(-a * sh * sv - b * ch * cv, a * sh * cv - b * ch * sv, a + zero)
    xuu = _vec(a * sh * cv - b * ch * sv, a * sh * sv + b * ch * cv, zero)
    xuv = _vec(-a * ch * sv - b * sh * cv, a * ch * cv - b * sh * sv, zero)
    xvv = _vec(-a * sh * cv + b * ch * sv, -a * sh * sv - b * ch * cv, zero)
    return ChartJet(x, (xu, xv), (xuu, xuv, xvv))


def screw_chart_jet(t, eta, p: ScrewParams) -> ChartJet:
    """Screw motion of the generating curve: ``(R(omega t) c(eta), t)``."""
    t, eta = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(eta, dtype=float))
    w = p.omega
    R = rotation(w * t)
    c, dc, ddc = curve_jet(eta, p)

    def rot(x):
        return np.einsum("...ij,...j->...i", R, x)

    def lift(x2, z=0.0):
        return np.concatenate([x2, np.broadcast_to(z, x2.shape[:-1])[..., None]], -1)

    Rc, Rdc = rot(c), rot(dc)
    x = lift(Rc, t)
    xt = lift(w * (Rc @ A.T), 1.0)
    xe = lift(Rdc)
    xtt = lift(-w * w * Rc)
    xte = lift(w * (Rdc @ A.T))
    xee = lift(rot(ddc))
    return ChartJet(x, (xt, xe), (xtt, xte, xee))


def bonnet_to_screw(u, v, a: float, b: float):
    """Screw-chart coordinates ``(t, eta)`` of the Bonnet point ``(u, v)``."""
    return a * np.asarray(v) + b * np.asarray(u), np.asarray(u, dtype=float)


def sphere_chart_jet(lon, colat, radius: float = 1.0) -> ChartJet:
    """Round sphere chart, ordered so that the standard normal points inward (H = +1/radius)."""
    lon, colat = np.broadcast_arrays(np.asarray(lon, dtype=float), np.asarray(colat, dtype=float))
    cp, sp, ct, st = np.cos(lon), np.sin(lon), np.cos(colat), np.sin(colat)
    zero = np.zeros_like(lon)
    R = radius
    x = R * _vec(st * cp, st * sp, ct)
    xl = R * _vec(-st * sp, st * cp, zero)
    xc = R * _vec(ct * cp, ct * sp, -st)
    xll = R * _vec(-st * cp, -st * sp, zero)
    xlc = R * _vec(-ct * sp, ct * cp, zero)
    xcc = -x
    return ChartJet(x, (xl, xc), (xll, xlc, xcc))


def fd_jet(position_fn, u, v, h=None, richardson: bool = False) -> ChartJet:
    """Central-difference jet of ``position_fn(u, v)``.

    Default step ``1e-4 * (1 + |coordinate|)`` per coordinate. With
    ``richardson`` the (h, h/2) pair is extrapolated to O(h^4).
    """
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    hu = 1e-4 * (1 + np.abs(u)) if h is None else np.full_like(u, h)
    hv = 1e-4 * (1 + np.abs(v)) if h is None else np.full_like(v, h)

    def once(hu, hv):
        hu_, hv_ = hu[..., None], hv[..., None]
        f = position_fn
        x0 = f(u, v)
        fpu, fmu = f(u + hu, v), f(u - hu, v)
        fpv, fmv = f(u, v + hv), f(u, v - hv)
        xu = (fpu - fmu) / (2 * hu_)
        xv = (fpv - fmv) / (2 * hv_)
        xuu = (fpu - 2 * x0 + fmu) / hu_**2
        xvv = (fpv - 2 * x0 + fmv) / hv_**2
        xuv = (f(u + hu, v + hv) - f(u + hu, v - hv) - f(u - hu, v + hv) + f(u - hu, v - hv)) / (
            4 * hu_ * hv_
        )
        return x0, (xu, xv), (xuu, xuv, xvv)

    x0, d1, d2 = once(hu, hv)
    if richardson:
        _, e1, e2 = once(hu / 2, hv / 2)
        d1 = tuple((4 * b - a) / 3 for a, b in zip(d1, e1))
        d2 = tuple((4 * b - a) / 3 for a, b in zip(d2, e2))
    label = "fd(default)" if h is None else f"fd({h:g})"
    return ChartJet(x0, d1, d2, label + ("+richardson" if richardson else ""))


def position_of(jet_fn):
    """Wrap a jet evaluator as a plain position evaluator."""
    return lambda u, v: jet_fn(u, v).position


class DegeneratePointError(ValueError):
    def __init__(self, det):
        super().__init__(f"degenerate chart point: EG - F^2 = {det}")
        self.det = det


@dataclass(frozen=True)
class FundamentalForms:
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    H: np.ndarray
    normal: np.ndarray


def fundamental_forms(jet: ChartJet, min_det: float = 1e-14) -> FundamentalForms:
    """First and second fundamental forms and the mean curvature.

    The normal is ``x_u x x_v`` normalized; ``H = (EN - 2FM + GL) / (2(EG - F^2))``,
    positive where the surface bends toward the normal.
    """
    xu, xv = jet.d1
    xuu, xuv, xvv = jet.d2
    E = np.sum(xu * xu, -1)
    F = np.sum(xu * xv, -1)
    G = np.sum(xv * xv, -1)
    det = E * G - F * F
    if np.any(det <= min_det):
        raise DegeneratePointError(float(np.min(det)))
    n = np.cross(xu, xv)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    L = np.sum(n * xuu, -1)
    M = np.sum(n * xuv, -1)
    N = np.sum(n * xvv, -1)
    H = (E * N - 2 * F * M + G * L) / (2 * det)
    return FundamentalForms(E, F, G, L, M, N, H, n)


@dataclass(frozen=True)
class IsothermalResidual:
    cross: float  # x_u . x_v
    diff: float  # x_u^2 - x_v^2
    conformal: float  # x_u^2 - (a^2 + b^2) cosh^2 u


def isothermal_residual(u, v, a: float, b: float) -> IsothermalResidual:
    jet = bonnet_chart_jet(u, v, a, b)
    xu, xv = jet.d1
    uu = np.sum(xu * xu, -1)
    return IsothermalResidual(
        np.sum(xu * xv, -1), uu - np.sum(xv * xv, -1), uu - (a * a + b * b) * np.cosh(u) ** 2
    )


def laplacian_residual(chart, point, h: float):
    """Five-point estimate of ``(d_u^2 + d_v^2) x`` at ``point`` for a position evaluator."""
    if not 1e-6 <= h <= 1e-2:
        raise ValueError("h must lie in [1e-6, 1e-2]")
    u, v = point
    x0 = np.asarray(chart(u, v))
    return (chart(u + h, v) + chart(u - h, v) + chart(u, v + h) + chart(u, v - h) - 4 * x0) / h**2


# -- Weierstrass data --------------------------------------------------------


def weierstrass_phi(w, a: float, b: float):
    """Holomorphic null data ``c (cosh w, -i sinh w, -i)`` with ``c = a + ib``."""
    c = complex(a, b)
    w = np.asarray(w, dtype=complex)
    return c * np.stack(np.broadcast_arrays(np.cosh(w), -1j * np.sinh(w), -1j + 0 * w), -1)


def weierstrass_reconstruct(w0, w1, a: float, b: float, steps: int = 64, path=None):
    """``Re`` of the integral of the Weierstrass data from ``w0`` to ``w1``.

    Gauss-Legendre with ``steps`` nodes on each straight segment. ``path``
    optionally lists intermediate vertices of a polyline.
    """
    if steps < 16:
        raise ValueError("steps must be at least 16")
    nodes, weights = np.polynomial.legendre.leggauss(steps)
    verts = [complex(w0), *(complex(z) for z in (path or [])), complex(w1)]
    total = np.zeros(3, dtype=complex)
    for za, zb in zip(verts[:-1], verts[1:]):
        half = (zb - za) / 2
        w = za + half * (nodes + 1)
        total += half * np.sum(weights[:, None] * weierstrass_phi(w, a, b), 0)
    return total.real


def bonnet_difference(w0, w1, a: float, b: float):
    p1 = bonnet_chart_jet(complex(w1).real, complex(w1).imag, a, b).position
    p0 = bonnet_chart_jet(complex(w0).real, complex(w0).imag, a, b).position
    return p1 - p0


# -- screw-chart identities --------------------------------------------------


def screw_metric_arclength(t, s, p: ScrewParams):
    """Metric ``(g_tt, g_ts, g_ss)`` of the screw chart in the (t, s) parametrization."""
    eta = eta_of_s(s, p)
    jet = screw_chart_jet(t, eta, p)
    xt, xe = jet.d1
    deta_ds = derive_constants(p).mu / np.cosh(eta)
    xs = xe * deta_ds[..., None]
    return np.sum(xt * xt, -1), np.sum(xt * xs, -1), np.sum(xs * xs, -1)


def conservation_gamma0(t, eta, p: ScrewParams):
    """The conserved quantity from the screw chart metric.

    ``omega r sin(phi) / sqrt(1 + omega^2 r^2 cos^2 phi)`` equals
    ``g_ts / sqrt(det g)`` in the (t, s) chart; it should be ``gamma0``
    everywhere.
    """
    s = s_of_eta(eta, p)
    gtt, gts, gss = screw_metric_arclength(t, s, p)
    r2 = (gtt - 1.0) / p.omega**2
    if np.any(r2 == 0):
        raise ValueError("conserved quantity undefined where r = 0")
    return gts / np.sqrt(gtt * gss - gts * gts)


def screw_normal_direction(t, eta, p: ScrewParams):
    """Unit vector along ``(A R c', -omega c . c')``; ``c'`` is any tangent of the curve."""
    c, dc, _ = curve_jet(eta, p)
    R = rotation(p.omega * np.asarray(t, dtype=float))
    ARdc = np.einsum("...ij,...j->...i", R, dc) @ A.T
    n = np.concatenate([ARdc, (-p.omega * np.sum(c * dc, -1))[..., None]], -1)
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def minimality_scalar_residual(eta, p: ScrewParams):
    """``omega^2 r sin(phi) - (1 + r^2 omega^2) kappa`` along the generating curve."""
    from screwmin.curve2d import curvature_of

    c, dc, _ = curve_jet(eta, p)
    sgn = math.copysign(1.0, derive_constants(p).mu)
    r_sin = sgn * (c[..., 0] * dc[..., 1] - c[..., 1] * dc[..., 0]) / np.linalg.norm(dc, axis=-1)
    r2 = np.sum(c * c, -1)
    kappa = curvature_of(s_of_eta(eta, p), p)
    return p.omega**2 * r_sin - (1 + r2 * p.omega**2) * kappa


# -- linear-combination ansatz ----------------------------------------------

P = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA3 = np.diag([1.0, -1.0])


def z_tensor(mats) -> np.ndarray:
    """Orthogonality tensor of the two-matrix ansatz, symmetrized in (i, j) and (k, l)."""
    T = sum(np.einsum("ik,jl->ijkl", X @ P, A @ X) for X in mats)
    return 0.25 * (T + T.transpose(1, 0, 2, 3) + T.transpose(0, 1, 3, 2) + T.transpose(1, 0, 3, 2))


def contracted_condition_term(X) -> np.ndarray:
    """One matrix's contribution to the trace (j = k) of 4 Z."""
    return X @ P @ A @ X + np.trace(X @ P) * (A @ X) + X @ P * np.trace(A @ X) + A @ X @ X @ P


@dataclass(frozen=True)
class XYConditionReport:
    residual: float  # || Z - ab delta sigma3 ||_F
    contracted_residual: float  # || sum of traced terms - 4 ab sigma3 ||_F
    x_term: np.ndarray
    y_term: np.ndarray


def xy_condition_residual(X, Y, a: float, b: float) -> XYConditionReport:
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    Z = z_tensor([X, Y])
    target = a * b * np.einsum("ij,kl->ijkl", np.eye(2), SIGMA3)
    xt, yt = contracted_condition_term(X), contracted_condition_term(Y)
    return XYConditionReport(
        float(np.linalg.norm(Z - target)),
        float(np.linalg.norm(xt + yt - 4 * a * b * SIGMA3)),
        xt,
        yt,
    )


def bonnet_matrices(a: float, b: float):
    """The pair of matrices reproducing the Bonnet chart in the linear-combination ansatz."""
    return np.array([[0.0, a], [-b, 0.0]]), np.array([[b, 0.0], [0.0, a]])


def ansatz_position(mats, u, v, a: float, b: float):
    """Surface point of the ansatz ``x_alpha = (cos v, sin v) X_alpha (cosh u, sinh u)``."""
    cv = np.array([math.cos(v), math.sin(v)])
    hu = np.array([math.cosh(u), math.sinh(u)])
    return np.array([cv @ X @ hu for X in mats] + [a * v + b * u])


# -- mesh export -------------------------------------------------------------


@dataclass
class Mesh:
    vertices: np.ndarray  # (nu * nv, 3), row-major in u then v
    faces: np.ndarray  # (2 (nu-1)(nv-1), 3), zero-based
    mean_curvature_abs: np.ndarray
    shape: tuple[int, int]
    degenerate: list[int] = field(default_factory=list)


def export_mesh(chart, u_range, v_range, nu: int, nv: int) -> Mesh:
    """Sample a jet evaluator ``chart(u, v) -> ChartJet`` on a triangulated grid.

    Each quad (i, j) is split along its (i, j)-(i+1, j+1) diagonal. Zero-area
    triangles are listed in ``degenerate`` but kept.
    """
    if nu < 2 or nv < 2:
        raise ValueError("need at least 2 samples per direction")
    bounds = [*u_range, *v_range]
    if not all(math.isfinite(x) for x in bounds):
        raise ValueError("ranges must be finite")
    U, V = np.meshgrid(np.linspace(*u_range, nu), np.linspace(*v_range, nv), indexing="ij")
    jet = chart(U, V)
    verts = jet.position.reshape(-1, 3)
    try:
        H = np.abs(fundamental_forms(jet).H).reshape(-1)
    except DegeneratePointError:
        H = np.full(nu * nv, np.nan)
    idx = np.arange(nu * nv).reshape(nu, nv)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    faces = np.stack([np.stack([a, b, c], -1), np.stack([a, c, d], -1)], 1).reshape(-1, 3)
    tri = verts[faces]
    area = 0.5 * np.linalg.norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=-1)
    degenerate = np.flatnonzero(area <= 1e-300).tolist()
    return Mesh(verts, faces, H, (nu, nv), degenerate)

