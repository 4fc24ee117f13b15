"""Screw motions of hypersurfaces in arbitrary dimension, by finite differences.

A hypersurface ``u(phi) = r(phi) e(phi)`` in R^N (``e`` on the unit sphere) is
moved by ``exp(Omega t)`` with ``Omega`` antisymmetric. Everything here is
evaluated with central differences on the angle charts; no closed-form
derivatives are assumed, so the same code checks every family.

Conventions: ``e_a = e^T Omega d_a e``; indices are raised with the inverse of
the sphere metric ``gbar_ab = d_a e . d_b e``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_H = 1e-4
DEFAULT_MARGIN = 0.1
MAX_CONDITION = 1e8


# -- charts ------------------------------------------------------------------


def sphere_chart(angles) -> np.ndarray:
    """Hyperspherical chart of the unit M-sphere in R^(M+1), M = len(angles).

    Angles ``(theta_1, ..., theta_{M-1}, phi)``; the last two components are
    ``sin(theta_1)...sin(theta_{M-1}) (cos phi, sin phi)`` and the earlier ones
    ``..., sin(theta_1) cos(theta_2), cos(theta_1)`` from the top down. For
    M = 3 this is ``(s1 s2 c3, s1 s2 s3, s1 c2, c1)``.
    """
    angles = np.asarray(angles, dtype=float)
    M = angles.shape[-1]
    out = []
    prod = np.ones(angles.shape[:-1])
    for i in range(M - 1):
        out.append(prod * np.cos(angles[..., i]))
        prod = prod * np.sin(angles[..., i])
    phi = angles[..., M - 1]
    out += [prod * np.sin(phi), prod * np.cos(phi)]
    return np.stack(out[::-1], -1)


def sphere_metric_exact(angles) -> np.ndarray:
    """``diag(1, sin^2 theta_1, sin^2 theta_1 sin^2 theta_2, ...)`` for :func:`sphere_chart`."""
    angles = np.asarray(angles, dtype=float)
    diag, prod = [], 1.0
    for th in angles:
        diag.append(prod)
        prod = prod * math.sin(th) ** 2
    return np.diag(diag)


def clifford_embedding(k: int, angles) -> np.ndarray:
    """``(m1, m2) / sqrt(2)`` with ``m1, m2`` hyperspherical charts of S^k."""
    angles = np.asarray(angles, dtype=float)
    if k < 1 or angles.shape[-1] != 2 * k:
        raise ValueError(f"clifford_embedding(k={k}) needs 2k angles")
    m1 = sphere_chart(angles[..., :k])
    m2 = sphere_chart(angles[..., k:])
    return np.concatenate([m1, m2], -1) / math.sqrt(2.0)


@dataclass(frozen=True)
class SphereEmbedding:
    """Map from ``dim`` angles to a unit vector, with chart bounds.

    Points within ``margin`` of a bound are rejected by :meth:`check`. Periodic
    directions get infinite bounds.
    """

    dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    margin: float = DEFAULT_MARGIN
    name: str = ""

    def __call__(self, angles):
        return self.evaluator(np.asarray(angles, dtype=float))

    def check(self, angles, h: float = 0.0):
        angles = np.asarray(angles, dtype=float)
        if angles.shape != (self.dim,):
            raise ValueError(f"{self.name}: expected {self.dim} angles, got shape {angles.shape}")
        lo = np.asarray(self.lower) + self.margin
        hi = np.asarray(self.upper) - self.margin
        if np.any(angles - 4 * h < lo) or np.any(angles + 4 * h > hi):
            raise ValueError(f"{self.name}: angles {angles.tolist()} too close to a chart singularity")
        return angles

    def interior_grid(self, n: int, h: float, periodic_span=(0.0, 2 * math.pi)):
        """``n`` points per direction, clear of every bound by ``margin + 10h``.

        That leaves room for the nested stencils (reach ``8h``) used by the
        flux and Hessian routines.
        """
        axes = []
        for lo, hi in zip(self.lower, self.upper):
            lo = periodic_span[0] if math.isinf(lo) else lo + self.margin + 10 * h
            hi = periodic_span[1] if math.isinf(hi) else hi - self.margin - 10 * h
            axes.append(np.linspace(lo, hi, n))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], -1)


def round_sphere(M: int, margin: float = DEFAULT_MARGIN) -> SphereEmbedding:
    inf = math.inf
    return SphereEmbedding(
        M, sphere_chart, (0.0,) * (M - 1) + (-inf,), (math.pi,) * (M - 1) + (inf,), margin, f"S^{M}"
    )


def clifford_sphere(k: int, extra_angle: bool = False, margin: float = DEFAULT_MARGIN) -> SphereEmbedding:
    """Clifford-type embedding of S^k x S^k into S^(2k+1).

    With ``extra_angle`` a trailing angle (on which nothing depends) is
    appended, giving the M = 2k+1 parameter space of the screw-moved cone.
    """
    inf = math.inf
    lower = ((0.0,) * (k - 1) + (-inf,)) * 2
    upper = ((math.pi,) * (k - 1) + (inf,)) * 2
    if extra_angle:
        return SphereEmbedding(
            2 * k + 1,
            lambda a: clifford_embedding(k, a[..., : 2 * k]),
            lower + (-inf,),
            upper + (inf,),
            margin,
            f"clifford({k})+r",
        )
    return SphereEmbedding(2 * k, lambda a: clifford_embedding(k, a), lower, upper, margin, f"clifford({k})")


# -- antisymmetric generator -------------------------------------------------


@dataclass(frozen=True)
class OmegaMatrix:
    """Antisymmetric N x N matrix stored as its strict upper triangle (row-major)."""

    n: int
    upper: tuple[float, ...]

    @classmethod
    def from_matrix(cls, M) -> "OmegaMatrix":
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("Omega must be square")
        if np.any(M + M.T != 0):
            raise ValueError("Omega must be exactly antisymmetric")
        iu = np.triu_indices(M.shape[0], 1)
        return cls(M.shape[0], tuple(float(x) for x in M[iu]))

    @property
    def matrix(self) -> np.ndarray:
        M = np.zeros((self.n, self.n))
        M[np.triu_indices(self.n, 1)] = self.upper
        return M - M.T


PLANE_ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


def block_omega(B) -> OmegaMatrix:
    """``((0, B), (-B^T, 0))``."""
    B = np.asarray(B, dtype=float)
    m, n = B.shape
    M = np.zeros((m + n, m + n))
    M[:m, m:] = B
    M[m:, :m] = -B.T
    return OmegaMatrix.from_matrix(M)


def paired_rotation_omega(pairs: int, rate: float = 1.0) -> OmegaMatrix:
    """Block diagonal ``rate * diag(A, ..., A)`` with ``A`` the plane rotation generator."""
    M = np.zeros((2 * pairs, 2 * pairs))
    for i in range(pairs):
        M[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = rate * PLANE_ROTATION
    return OmegaMatrix.from_matrix(M)


# -- finite-difference primitives ---------------------------------------------


def fd_gradient(f, x, h: float) -> np.ndarray:
    """Central differences of ``f`` at ``x``; result indexed ``[a, ...]``."""
    x = np.asarray(x, dtype=float)
    rows = []
    for a in range(x.size):
        dx = np.zeros_like(x)
        dx[a] = h
        rows.append((np.asarray(f(x + dx)) - np.asarray(f(x - dx))) / (2 * h))
    return np.stack(rows, 0)


def fd_hessian(f, x, h: float) -> np.ndarray:
    """Second partials of a scalar ``f``; symmetric by construction."""
    x = np.asarray(x, dtype=float)
    n = x.size
    H = np.empty((n, n))
    f0 = float(f(x))
    E = np.eye(n) * h
    for a in range(n):
        H[a, a] = (float(f(x + E[a])) - 2 * f0 + float(f(x - E[a]))) / h**2
        for b in range(a + 1, n):
            H[a, b] = H[b, a] = (
                float(f(x + E[a] + E[b]))
                - float(f(x + E[a] - E[b]))
                - float(f(x - E[a] + E[b]))
                + float(f(x - E[a] - E[b]))
            ) / (4 * h * h)
    return H


class SingularMetricError(ValueError):
    def __init__(self, angles, condition):
        super().__init__(f"metric condition number {condition:.3g} at angles {list(angles)}")
        self.angles = angles
        self.condition = condition


@dataclass(frozen=True)
class MetricData:
    g: np.ndarray
    inverse: np.ndarray
    sqrt_det: float
    condition: float


def _metric_from_jacobian(J, angles) -> MetricData:
    g = J @ J.T
    cond = float(np.linalg.cond(g))
    if not math.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularMetricError(angles, cond)
    return MetricData(g, np.linalg.inv(g), math.sqrt(np.linalg.det(g)), cond)


def induced_metric(emb: SphereEmbedding, angles, h: float = DEFAULT_H) -> MetricData:
    """``gbar_ab = d_a e . d_b e`` by central differences of the evaluator."""
    angles = emb.check(angles, h)
    return _metric_from_jacobian(fd_gradient(emb, angles, h), angles)


# -- fields on the sphere chart ----------------------------------------------


def e_covector(emb: SphereEmbedding, omega: OmegaMatrix, angles, h: float = DEFAULT_H) -> np.ndarray:
    """``e_a = e^T Omega d_a e``."""
    angles = np.asarray(angles, dtype=float)
    e = emb(angles)
    J = fd_gradient(emb, angles, h)
    return J @ (omega.matrix.T @ e)


@dataclass(frozen=True)
class FieldPoint:
    angles: np.ndarray
    r: float
    v: np.ndarray  # d_a ln r
    e: np.ndarray  # e_a
    q: float
    e_dot_v: float
    e_sq: float


def field_point(emb, r_field, omega: OmegaMatrix, angles, h: float = DEFAULT_H) -> FieldPoint:
    angles = emb.check(angles, h)
    met = induced_metric(emb, angles, h)
    r = float(r_field(angles))
    v = fd_gradient(lambda x: math.log(r_field(x)), angles, h)
    ea = e_covector(emb, omega, angles, h)
    gi = met.inverse
    return FieldPoint(
        angles,
        r,
        v,
        ea,
        math.sqrt(1.0 + v @ gi @ v),
        float(ea @ gi @ v),
        float(ea @ gi @ ea),
    )


class InvalidConfigurationError(ValueError):
    pass


def _shape_flux(emb, r_field, Om, x, h):
    def u(y):
        return float(r_field(y)) * np.asarray(emb(y))

    U = u(x)
    J = fd_gradient(u, x, h)
    met = _metric_from_jacobian(J, x)
    ua = -(J @ (Om.T @ U))  # u_a = -u^T Omega d_a u
    p2 = 1.0 - U @ Om @ Om @ U - ua @ met.inverse @ ua
    if p2 <= 0:
        raise InvalidConfigurationError(f"p^2 = {p2} <= 0 at {list(x)}")
    return met.sqrt_det * (met.inverse @ ua) / math.sqrt(p2)


def shape_flux_residual(emb, r_field, omega: OmegaMatrix, angles, h: float = DEFAULT_H) -> float:
    """Divergence ``d_a(sqrt(g) g^ab u_b / p)`` of the screw-motion shape equation.

    ``g_ab`` is the full metric of ``u = r e``. Inner derivatives are taken at
    each stencil point, the outer divergence at the centre.
    """
    x = emb.check(angles, 2 * h)
    Om = omega.matrix
    total = 0.0
    for a in range(x.size):
        dx = np.zeros_like(x)
        dx[a] = h
        fp = _shape_flux(emb, r_field, Om, x + dx, h)[a]
        fm = _shape_flux(emb, r_field, Om, x - dx, h)[a]
        total += (fp - fm) / (2 * h)
    return total


def laplace_beltrami(emb: SphereEmbedding, field, angles, h: float = DEFAULT_H) -> np.ndarray:
    """``(1/sqrt(gbar)) d_a(sqrt(gbar) gbar^ab d_b f)`` for scalar- or vector-valued ``f``."""
    x = emb.check(angles, 2 * h)

    def flux(y):
        met = _metric_from_jacobian(fd_gradient(emb, y, h), y)
        df = fd_gradient(field, y, h)
        return met.sqrt_det * np.tensordot(met.inverse, df, axes=(1, 0))

    total = 0.0
    for a in range(x.size):
        dx = np.zeros_like(x)
        dx[a] = h
        total = total + (flux(x + dx)[a] - flux(x - dx)[a]) / (2 * h)
    return total / induced_metric(emb, x, h).sqrt_det


def e_divergence(emb: SphereEmbedding, omega: OmegaMatrix, angles, h: float = DEFAULT_H) -> float:
    """``nabla^a e_a`` as ``(1/sqrt(gbar)) d_a(sqrt(gbar) gbar^ab e_b)``."""
    x = emb.check(angles, 2 * h)

    def flux(y):
        met = _metric_from_jacobian(fd_gradient(emb, y, h), y)
        return met.sqrt_det * met.inverse @ e_covector(emb, omega, y, h)

    total = 0.0
    for a in range(x.size):
        dx = np.zeros_like(x)
        dx[a] = h
        total += (flux(x + dx)[a] - flux(x - dx)[a]) / (2 * h)
    return total / induced_metric(emb, x, h).sqrt_det


def christoffel_symbols(emb: SphereEmbedding, angles, h: float = DEFAULT_H) -> np.ndarray:
    """``Gamma^c_ab`` from central differences of the FD metric; indexed ``[c, a, b]``."""
    x = emb.check(angles, 2 * h)
    met = induced_metric(emb, x, h)
    dg = fd_gradient(lambda y: _metric_from_jacobian(fd_gradient(emb, y, h), y).g, x, h)  # [c, a, b]
    # Gamma_{d,ab} = 1/2 (d_a g_bd + d_b g_ad - d_d g_ab)
    gam_low = 0.5 * (dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg)
    return np.einsum("cd,dab->cab", met.inverse, gam_low)


def covariant_hessian(emb: SphereEmbedding, f, angles, h: float = DEFAULT_H) -> np.ndarray:
    """``nabla_a nabla_b f = d_a d_b f - Gamma^c_ab d_c f``, symmetrized."""
    x = emb.check(angles, 2 * h)
    Hf = fd_hessian(f, x, h)
    df = fd_gradient(f, x, h)
    out = Hf - np.einsum("cab,c->ab", christoffel_symbols(emb, x, h), df)
    return 0.5 * (out + out.T)


# -- Clifford family -----------------------------------------------------------


def clifford_omega(k: int, scale: float = 1.0, perturb: float = 0.0) -> OmegaMatrix:
    """Block generator with ``B = -scale * 1``; ``perturb`` is added to ``B[0, 0]``."""
    B = -scale * np.eye(k + 1)
    B[0, 0] += perturb
    return block_omega(B)


def _clifford_e_sq(k, Om, angles, h):
    emb = clifford_sphere(k)
    met = _metric_from_jacobian(fd_gradient(emb, angles, h), angles)
    J = fd_gradient(emb, angles, h)
    ea = J @ (Om.T @ emb(angles))
    return float(ea @ met.inverse @ ea)


def e_squared_identity(k: int, omega: OmegaMatrix, angles, h: float = DEFAULT_H) -> tuple[float, float]:
    """``(e_a gbar^ab e_b`` by finite differences, ``1 - (m1 . m2)^2)``.

    The closed form holds for ``B = -1``.
    """
    emb = clifford_sphere(k)
    x = emb.check(angles, h)
    m1, m2 = sphere_chart(x[:k]), sphere_chart(x[k:])
    return _clifford_e_sq(k, omega.matrix, x, h), float(1.0 - (m1 @ m2) ** 2)


def null_condition_residual(k: int, omega: OmegaMatrix, angles, h: float = DEFAULT_H) -> float:
    """``e^a d_a (e^2)`` on the Clifford embedding, ``d_a e^2`` by central differences."""
    emb = clifford_sphere(k)
    x = emb.check(angles, 2 * h)
    Om = omega.matrix
    met = induced_metric(emb, x, h)
    ea = e_covector(emb, omega, x, h)
    grad = fd_gradient(lambda y: _clifford_e_sq(k, Om, y, h), x, h)
    return float((met.inverse @ ea) @ grad)


def clifford_cone_radius(angles) -> float:
    """``r = phi^M``, the last angle, for the screw-moved Clifford cone."""
    return float(np.asarray(angles)[-1])


def clifford_block_offdiagonal(k: int, angles, h: float = DEFAULT_H) -> float:
    """Largest entry of the off-diagonal (m1, m2) blocks of the Clifford metric."""
    met = induced_metric(clifford_sphere(k), angles, h)
    return float(np.max(np.abs(met.g[:k, k:])))


# -- products of spheres -------------------------------------------------------


@dataclass(frozen=True)
class SphereProductReport:
    residual: float  # q(nu - (m1 B m2)^2) - p(mu - (m1 B m2)^2)
    projection_residual: float  # same condition from tangential projections with FD metrics
    lhs: float
    rhs: float


def sphere_product_residual(p: int, q: int, B, theta, phi, h: float = DEFAULT_H) -> SphereProductReport:
    """Minimality condition for the screw-moved product ``S^p x S^q`` with ``Omega' = Omega'' = 0``."""
    B = np.asarray(B, dtype=float)
    if B.shape != (p + 1, q + 1):
        raise ValueError(f"B must be {(p + 1, q + 1)}, got {B.shape}")
    theta, phi = np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    m1, m2 = sphere_chart(theta), sphere_chart(phi)
    bil = float(m1 @ B @ m2)
    nu = float(m1 @ B @ B.T @ m1)
    mu = float(m2 @ B.T @ B @ m2)
    lhs, rhs = q * (nu - bil**2), p * (mu - bil**2)

    J1, J2 = fd_gradient(sphere_chart, theta, h), fd_gradient(sphere_chart, phi, h)
    g1 = _metric_from_jacobian(J1, theta).inverse
    g2 = _metric_from_jacobian(J2, phi).inverse
    t2 = J2 @ (B.T @ m1)  # m1 B d_a m2
    t1 = J1 @ (B @ m2)  # m2 B^T d_a m1
    proj = q * float(t2 @ g2 @ t2) - p * float(t1 @ g1 @ t1)
    return SphereProductReport(lhs - rhs, proj, lhs, rhs)


def sphere_product_embedding(p: int, q: int, angles, minimal_radii: bool = False) -> np.ndarray:
    """Product of two round spheres inside the unit sphere; ``angles`` = (p angles, q angles).

    The default ``(sqrt(q) m1, sqrt(p) m2) / sqrt(p + q)`` is the form the
    sphere-product condition is derived for. ``minimal_radii`` swaps the
    weights to ``(sqrt(p) m1, sqrt(q) m2) / sqrt(p + q)``, which is the product
    that is minimal in the sphere for every (p, q); the two agree when p = q.
    """
    angles = np.asarray(angles, dtype=float)
    m1, m2 = sphere_chart(angles[..., :p]), sphere_chart(angles[..., p:])
    w1, w2 = (p, q) if minimal_radii else (q, p)
    return np.concatenate([math.sqrt(w1) * m1, math.sqrt(w2) * m2], -1) / math.sqrt(p + q)


def _product_normal(p, q, angles, minimal_radii):
    m1, m2 = sphere_chart(angles[:p]), sphere_chart(angles[p:])
    w1, w2 = (q, p) if minimal_radii else (p, q)
    return np.concatenate([math.sqrt(w1) * m1, -math.sqrt(w2) * m2]) / math.sqrt(p + q)


def sphere_product_sphere(p: int, q: int, minimal_radii: bool = False, margin: float = DEFAULT_MARGIN):
    inf = math.inf
    lower = (0.0,) * (p - 1) + (-inf,) + (0.0,) * (q - 1) + (-inf,)
    upper = (math.pi,) * (p - 1) + (inf,) + (math.pi,) * (q - 1) + (inf,)
    return SphereEmbedding(
        p + q,
        lambda a: sphere_product_embedding(p, q, a, minimal_radii),
        lower,
        upper,
        margin,
        f"S^{p}xS^{q}",
    )


def sphere_product_second_form(
    p: int, q: int, angles, h: float = DEFAULT_H, minimal_radii: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """``n . d_ab m`` by FD, and its closed form ``sqrt(pq)/(p+q) diag(-gbar', gbar'')``.

    The closed form is the same for both choices of radii.
    """
    angles = np.asarray(angles, dtype=float)
    n = _product_normal(p, q, angles, minimal_radii)
    M = p + q
    hf = fd_hessian(lambda y: n @ sphere_product_embedding(p, q, y, minimal_radii), angles, h)
    expected = np.zeros((M, M))
    expected[:p, :p] = -sphere_metric_exact(angles[:p])
    expected[p:, p:] = sphere_metric_exact(angles[p:])
    return hf, math.sqrt(p * q) / (p + q) * expected


def sphere_product_null_form(
    p: int, q: int, B, angles, h: float = DEFAULT_H, minimal_radii: bool = False
) -> float:
    """``e^a e^b h_ab`` for ``Omega = ((0, B), (-B^T, 0))``, entirely by finite differences.

    This is the quantity whose vanishing the sphere-product condition encodes;
    it does not rely on any of the algebra leading to the closed form.
    """
    B = np.asarray(B, dtype=float)
    emb = sphere_product_sphere(p, q, minimal_radii)
    x = emb.check(angles, h)
    omega = block_omega(B)
    eu = induced_metric(emb, x, h).inverse @ e_covector(emb, omega, x, h)
    hf, _ = sphere_product_second_form(p, q, x, h, minimal_radii)
    return float(eu @ hf @ eu)


# -- the mixed example (e . v = 0) ---------------------------------------------


def mixed_example_radius(d: float, k_sep: float):
    """``r = d^2 (sin theta_1 sin theta_2)^k``, independent of theta_3."""
    return lambda x: d * d * (math.sin(x[0]) * math.sin(x[1])) ** k_sep


def mixed_example_listed_components(angles) -> np.ndarray:
    """The e_a components as commonly listed for this chart (opposite overall sign to e^T Omega d e)."""
    t1, t2, _ = angles
    return np.array(
        [
            -math.cos(t2),
            math.sin(t1) * math.cos(t1) * math.sin(t2),
            math.sin(t1) ** 2 * math.sin(t2) ** 2,
        ]
    )


def minimality_expression(emb, r_field, omega: OmegaMatrix, angles, h: float = DEFAULT_H) -> float:
    """Full minimality condition for ``e . v = 0`` configurations.

    ``Lap r - M r - v^2 r / q^2 - (v^a v^b / q^2) H_ab + r^2 e^a e^b H_ab
    + r^3 v^a d_a e . Omega^2 e`` with ``H_ab`` the covariant Hessian of r.
    """
    x = emb.check(angles, 2 * h)
    M = x.size
    met = induced_metric(emb, x, h)
    gi = met.inverse
    Hr = covariant_hessian(emb, r_field, x, h)
    r = float(r_field(x))
    v = fd_gradient(lambda y: math.log(r_field(y)), x, h)
    vu = gi @ v
    v2 = float(v @ vu)
    q2 = 1.0 + v2
    eu = gi @ e_covector(emb, omega, x, h)
    Om = omega.matrix
    J = fd_gradient(emb, x, h)
    last = r**3 * float(vu @ (J @ (Om @ Om @ emb(x))))
    return (
        float(np.sum(gi * Hr))
        - M * r
        - v2 * r / q2
        - float(vu @ Hr @ vu) / q2
        + r * r * float(eu @ Hr @ eu)
        + last
    )


@dataclass(frozen=True)
class MixedExampleReport:
    e_components: np.ndarray
    e_component_error: float  # vs the listed closed forms, up to the overall sign
    e_dot_v: float
    e_grad_r: float  # e^a d_a r
    e_divergence: float
    minimality: float
    minimality_half_step: float

    @property
    def minimality_change(self) -> float:
        return abs(self.minimality - self.minimality_half_step)


def mixed_example_check(d: float, k_sep: float, angles, h: float = DEFAULT_H) -> MixedExampleReport:
    """Screw motion in R^4 with ``Omega = diag(A, A)`` and the separable ``e . v = 0`` radius."""
    emb = round_sphere(3)
    x = emb.check(angles, 2 * h)
    if math.sin(x[0]) * math.sin(x[1]) < math.sin(emb.margin) ** 2:
        raise ValueError("too close to sin(theta_1) sin(theta_2) = 0")
    omega = paired_rotation_omega(2)
    r_field = mixed_example_radius(d, k_sep)
    fp = field_point(emb, r_field, omega, x, h)
    met = induced_metric(emb, x, h)
    grad_r = fd_gradient(r_field, x, h)
    listed = mixed_example_listed_components(x)
    return MixedExampleReport(
        e_components=fp.e,
        e_component_error=float(np.max(np.abs(fp.e + listed))),
        e_dot_v=fp.e_dot_v,
        e_grad_r=float((met.inverse @ fp.e) @ grad_r),
        e_divergence=e_divergence(emb, omega, x, h),
        minimality=minimality_expression(emb, r_field, omega, x, h),
        minimality_half_step=minimality_expression(emb, r_field, omega, x, h / 2),
    )


def self_convergence_ratio(fn, h: float) -> float:
    """Ratio ``|F(h) - F(h/2)| / |F(h/2) - F(h/4)|``; about 4 for a second-order scheme."""
    f1, f2, f4 = (np.asarray(fn(h / k), dtype=float) for k in (1, 2, 4))
    num = float(np.max(np.abs(f1 - f2)))
    den = float(np.max(np.abs(f2 - f4)))
    if den == 0.0:
        return math.inf if num > 0 else math.nan
    return num / den
