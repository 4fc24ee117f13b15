"""Verification suites and their JSON residual reports.

Every check is tagged with the identity it exercises and a category:

* ``expected-zero``: passes when ``max_residual <= tolerance``;
* ``expected-nonzero``: a negative control, meant to *fail* the same test;
* ``reported``: a value recorded for inspection, never gating.

A suite passes when every expected-zero check passes and every
expected-nonzero check fails.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from screwmin import __version__
from screwmin import curve2d as c2
from screwmin import highdim as hd
from screwmin import surface3d as s3
from screwmin.params import ScrewParams, derive_constants, params_from_ab

SCHEMA = 1
SUITES = ("curve", "surface", "highdim", "all")
CATEGORIES = ("expected-zero", "expected-nonzero", "reported")


@dataclass(frozen=True)
class SuiteParams:
    """Everything needed to rerun a suite. ``a``/``b`` override gamma0/omega for surfaces."""

    gamma0: float = 1.0
    omega: float = 1.0
    a: float | None = None
    b: float | None = None
    p: int = 1
    q: int = 2
    seed: int = 0
    h: float = hd.DEFAULT_H

    def screw(self) -> ScrewParams:
        return ScrewParams(self.gamma0, self.omega)

    def bonnet_ab(self) -> tuple[float, float]:
        if self.a is not None or self.b is not None:
            if self.a is None or self.b is None:
                raise ValueError("give both --a and --b")
            if self.a == 0 and self.b == 0:
                raise ValueError("a and b cannot both vanish")
            return float(self.a), float(self.b)
        c = derive_constants(self.screw())
        return c.a, c.b


@dataclass(frozen=True)
class Check:
    name: str
    identity: str
    max_residual: float
    tolerance: float | None
    passed: bool
    grid: str
    category: str = "expected-zero"

    @property
    def as_expected(self) -> bool:
        if self.category == "expected-zero":
            return self.passed
        if self.category == "expected-nonzero":
            return not self.passed
        return True


def make_check(name, identity, residual, tolerance, grid, category="expected-zero") -> Check:
    if category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}")
    residual = float(residual)
    passed = True if tolerance is None else bool(residual <= tolerance)
    return Check(name, identity, residual, tolerance, passed, grid, category)


@dataclass
class ResidualReport:
    suite: str
    params: dict
    checks: list[Check] = field(default_factory=list)
    seed: int = 0
    h: float = hd.DEFAULT_H
    version: str = __version__
    schema: int = SCHEMA

    @property
    def passed(self) -> bool:
        return all(c.as_expected for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.as_expected]

    def to_json(self, indent: int | None = 2) -> str:
        d = asdict(self)
        return json.dumps(d, indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ResidualReport":
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        d["checks"] = [Check(**c) for c in d["checks"]]
        return cls(**d)

    def summary_lines(self) -> list[str]:
        out = []
        for c in self.checks:
            tag = "ok" if c.as_expected else "UNEXPECTED"
            state = "PASS" if c.passed else "FAIL"
            tol = "-" if c.tolerance is None else f"{c.tolerance:.1e}"
            out.append(
                f"{tag:10s} {state} {c.category:16s} {c.name:32s} "
                f"res={c.max_residual:.3e} tol={tol} [{c.identity}] ({c.grid})"
            )
        return out


# -- curve -------------------------------------------------------------------


def _curve_checks(sp: SuiteParams) -> list[Check]:
    p = sp.screw()
    if p.gamma0 == 0:
        raise ValueError("the curve suite needs gamma0 != 0 (the helicoid generator is a line)")
    c = derive_constants(p)
    checks = []

    etas = np.linspace(-5, 5, 500)
    worst = 0.0
    for eta in etas:
        s = float(c2.s_of_eta(eta, p))
        d1, d2 = c2.s_derivatives(s, p)
        worst = max(worst, c2.shape_residuals(c2.sample(s, p), d1, d2, p).max_abs())
    checks.append(make_check("shape_identities", "shape equation, conformal constancy, linear ODE",
                             worst, 1e-10, "500 pts, eta in [-5,5]"))

    circle_r = 2 * abs(p.gamma0 / p.omega)
    res = c2.circle_residuals(circle_r, p).shape_invariant
    checks.append(make_check("circle_control", "shape equation on a circle", abs(res), 0.1,
                             f"circle r={circle_r:.17g}", "expected-nonzero"))

    s = np.linspace(-10, 10, 1000)
    checks.append(make_check("curvature_hyperbola", "kappa0^2 rho^2 - mu^2 s^2 = 1",
                             np.max(np.abs(c2.hyperbola_residual(s, p))), 1e-12,
                             "1000 pts, s in [-10,10]"))

    chain = c2.radial_chain_residuals(np.linspace(-10, 10, 201), p)
    checks.append(make_check("radial_chain", "r r' = beta s and its derivatives",
                             max(float(np.max(np.abs(x))) for x in chain), 1e-10,
                             "201 pts, s in [-10,10]"))

    ode = c2.integrate_shape_ode(p, 10.0, rtol=1e-10)
    rel = np.abs(ode.r - c2.radius_of(ode.s, p)) / (1 + ode.r)
    checks.append(make_check("ode_vs_closed_form", "radial ODE vs radius formula",
                             np.max(rel), 1e-8, f"{len(ode.s)} RK steps, s in [0,10]"))
    checks.append(make_check("ode_first_integral", "first integral = 1/(1+gamma0^2)",
                             np.ptp(ode.first_integral), 1e-9, "RK steps"))

    grid = np.linspace(-5, 5, 101)
    quad = c2.curve_by_quadrature(grid, p)
    checks.append(make_check("quadrature_curve", "polar-angle quadrature vs closed form",
                             quad.max_deviation, 1e-8, "101 pts, s in [-5,5]"))
    checks.append(make_check("quadrature_rotation", "rigid rotation between the two routes",
                             abs(quad.rotation), None, "fitted angle", "reported"))

    roots = c2.self_intersections(p, 3)
    checks.append(make_check("intersection_residual", "gamma0 tan(gamma0 eta) + tanh eta = 0",
                             max(r.residual for r in roots), 1e-12, "first 3 roots"))
    checks.append(make_check("intersection_coincidence", "c(eta) = c(-eta)",
                             max(r.coincidence for r in roots), 1e-10, "first 3 roots"))
    checks.append(make_check("intersection_axis", "crossing on the symmetry axis",
                             max(r.axis_offset for r in roots), 1e-10, "first 3 roots"))

    eps_q, g_q = c2.conserved_ratios(np.linspace(-4, 4, 101), p)
    checks.append(make_check("conserved_ratios", "conserved angular quantities",
                             max(np.max(np.abs(eps_q - c.epsilon)), np.max(np.abs(g_q - p.gamma0))),
                             1e-12, "101 pts, eta in [-4,4]"))
    return checks


# -- surface -----------------------------------------------------------------


def _surface_checks(sp: SuiteParams) -> list[Check]:
    a, b = sp.bonnet_ab()
    checks = []
    U, V = np.meshgrid(np.linspace(-2, 2, 100), np.linspace(0, 2 * math.pi, 100), indexing="ij")
    ff = s3.fundamental_forms(s3.bonnet_chart_jet(U, V, a, b))
    checks.append(make_check("mean_curvature", "H = 0", np.max(np.abs(ff.H)), 1e-10,
                             "100x100, u in [-2,2], v in [0,2pi]"))

    iso = s3.isothermal_residual(U, V, a, b)
    scale = np.max(np.abs(ff.E))
    iso_max = max(np.max(np.abs(iso.cross)), np.max(np.abs(iso.diff))) / scale
    checks.append(make_check("isothermal", "x_u.x_v = 0, |x_u| = |x_v|", iso_max, 1e-12, "100x100"))

    chart = lambda u, v: s3.bonnet_chart_jet(u, v, a, b).position  # noqa: E731
    pt = (0.4, 0.7)
    l1 = np.linalg.norm(s3.laplacian_residual(chart, pt, 1e-2))
    l2 = np.linalg.norm(s3.laplacian_residual(chart, pt, 5e-3))
    ratio = l1 / l2 if l2 > 0 else math.inf
    checks.append(make_check("laplacian_order", "FD Laplacian error ratio under h -> h/2 (4 expected)",
                             abs(ratio - 4.0), 0.5, "h = 1e-2, 5e-3 at (0.4, 0.7)"))

    w0, w1 = complex(-0.5, 0.3), complex(1.2, 2.0)
    checks.append(make_check("weierstrass", "holomorphic data reproduces the chart",
                             np.max(np.abs(s3.weierstrass_reconstruct(w0, w1, a, b)
                                           - s3.bonnet_difference(w0, w1, a, b))), 1e-10, "64 Gauss nodes"))

    X, Y = s3.bonnet_matrices(a, b)
    rep = s3.xy_condition_residual(X, Y, a, b)
    checks.append(make_check("matrix_ansatz", "orthogonality tensor condition",
                             max(rep.residual, rep.contracted_residual), 1e-13, "exact"))

    if a != 0:
        p = params_from_ab(a, b)
        t, eta = np.meshgrid(np.linspace(0, 2 * math.pi / abs(p.omega), 40),
                             np.linspace(-3, 3, 40), indexing="ij")
        if p.gamma0 == 0:
            eta = np.where(eta == 0, 1e-3, eta)
        g0 = s3.conservation_gamma0(t, eta, p)
        checks.append(make_check("conserved_gamma0", "g_ts / sqrt(det g) = gamma0",
                                 np.max(np.abs(g0 - p.gamma0)), 1e-12, "40x40 screw chart"))
        u, v = U[::10, ::10], V[::10, ::10]
        tt, ee = s3.bonnet_to_screw(u, v, a, b)
        diff = np.max(np.abs(s3.bonnet_chart_jet(u, v, a, b).position
                             - s3.screw_chart_jet(tt, ee, p).position))
        checks.append(make_check("bonnet_equals_screw", "Bonnet chart = screw chart",
                                 diff, 1e-12, "10x10"))

    sph = s3.fundamental_forms(s3.sphere_chart_jet(np.array([0.3]), np.array([math.pi / 2])))
    checks.append(make_check("sphere_control", "H = 0 on a unit sphere", abs(sph.H[0]), 1e-10,
                             "equator", "expected-nonzero"))
    return checks


# -- highdim -----------------------------------------------------------------


def _highdim_checks(sp: SuiteParams) -> list[Check]:
    h = sp.h
    rng = np.random.default_rng(sp.seed)
    checks = []

    x = np.array([0.7, 1.1])
    err = np.max(np.abs(hd.induced_metric(hd.round_sphere(2), x, h).g - hd.sphere_metric_exact(x)))
    checks.append(make_check("fd_metric", "FD induced metric vs exact", err, 1e-7, "S^2 point"))

    for k in (1, 2):
        om = hd.clifford_omega(k)
        pts = [rng.uniform(0.3, math.pi - 0.3, 2 * k) for _ in range(20)]
        e2 = max(abs(np.subtract(*hd.e_squared_identity(k, om, a, h))) for a in pts)
        nul = max(abs(hd.null_condition_residual(k, om, a, h)) for a in pts)
        checks.append(make_check(f"clifford_e_squared_k{k}", "e^2 = 1 - (m1.m2)^2", e2, 1e-6, "20 pts"))
        checks.append(make_check(f"clifford_null_k{k}", "e^a d_a e^2 = 0", nul, 1e-6, "20 pts"))
        ratio = hd.self_convergence_ratio(lambda hh: hd.e_covector(hd.clifford_sphere(k), om, pts[0], hh), 1e-2)
        checks.append(make_check(f"clifford_order_k{k}", "FD self-convergence ratio (4 expected)",
                                 abs(ratio - 4.0), 0.5, "h = 1e-2, 5e-3, 2.5e-3"))
        pert = hd.clifford_omega(k, perturb=0.3)
        checks.append(make_check(f"clifford_null_perturbed_k{k}", "e^a d_a e^2 with broken B",
                                 max(abs(hd.null_condition_residual(k, pert, a, h)) for a in pts),
                                 1e-3, "20 pts", "expected-nonzero"))

    p1 = ScrewParams(1.0, 1.0)
    rf = lambda y: c2.radius_of_polar_angle(y[0], p1)[0]  # noqa: E731
    om1 = hd.OmegaMatrix.from_matrix(c2.A)
    flux = max(abs(hd.shape_flux_residual(hd.round_sphere(1), rf, om1, [phi], h))
               for phi in np.linspace(-2.5, 2.5, 11))
    checks.append(make_check("flux_plane_curve", "shape flux on the planar solution", flux, 1e-6,
                             "11 angles"))
    cone = hd.clifford_sphere(1, extra_angle=True)
    flux = max(abs(hd.shape_flux_residual(cone, hd.clifford_cone_radius, hd.clifford_omega(1), a, h))
               for a in cone.interior_grid(3, h, periodic_span=(0.4, 2.4)))
    checks.append(make_check("flux_clifford_cone", "shape flux on r = last angle", flux, 1e-6,
                             "3^3 interior grid"))
    W = rng.normal(size=(4, 4))
    torus = hd.clifford_sphere(1)
    flux = max(abs(hd.shape_flux_residual(torus, lambda y: 1.0, hd.OmegaMatrix.from_matrix(W - W.T), a, h))
               for a in torus.interior_grid(3, h))
    checks.append(make_check("flux_constant_control", "shape flux with r = const, generic Omega",
                             flux, 1e-3, "3^2 grid on the Clifford torus", "expected-nonzero"))

    for M in (1, 2, 3):
        emb = hd.round_sphere(M)
        a = np.array([1.1, 0.8, 0.6][:M])
        err = np.max(np.abs(hd.laplace_beltrami(emb, emb, a, h) + M * emb(a)))
        checks.append(make_check(f"laplacian_eigen_M{M}", "Laplace-Beltrami e = -M e", err, 1e-5, "1 pt"))

    p, q = sp.p, sp.q
    theta = rng.uniform(0.2, math.pi - 0.2, p)
    phi = rng.uniform(0.2, math.pi - 0.2, q)
    if p == q:
        Q, R = np.linalg.qr(rng.normal(size=(p + 1, q + 1)))
        B = 1.7 * Q * np.sign(np.diag(R))
        rep = hd.sphere_product_residual(p, q, B, theta, phi, h)
        checks.append(make_check("sphere_product", "sphere-product condition, orthogonal B",
                                 abs(rep.residual), 1e-12, f"p=q={p}"))
    else:
        B = rng.uniform(-1, 1, (p + 1, q + 1))
        rep = hd.sphere_product_residual(p, q, B, theta, phi, h)
        checks.append(make_check("sphere_product", "sphere-product condition, random B",
                                 abs(rep.residual), 1e-3, f"p={p}, q={q}", "expected-nonzero"))
    checks.append(make_check("sphere_product_projection", "closed form vs tangential projection",
                             abs(rep.residual - rep.projection_residual), 1e-6, f"p={p}, q={q}"))

    mix = hd.mixed_example_check(1.0, 2.0, [math.pi / 3, math.pi / 4, 0.5], h)
    checks.append(make_check("mixed_components", "listed e_a components", mix.e_component_error, 1e-6,
                             "(pi/3, pi/4, 0.5)"))
    checks.append(make_check("mixed_e_grad_r", "e^a d_a r = 0", abs(mix.e_grad_r), 1e-6, "1 pt"))
    checks.append(make_check("mixed_e_divergence", "div e = 0", abs(mix.e_divergence), 1e-6, "1 pt"))
    checks.append(make_check("mixed_minimality", "minimality expression (value only)",
                             abs(mix.minimality), None, "1 pt", "reported"))
    return checks


_RUNNERS = {"curve": _curve_checks, "surface": _surface_checks, "highdim": _highdim_checks}


def run_suite(suite: str, params: SuiteParams | None = None) -> ResidualReport:
    """Run one suite (or ``all``) and collect its checks."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    sp = params or SuiteParams()
    names = ("curve", "surface", "highdim") if suite == "all" else (suite,)
    # validate everything before computing anything
    if "curve" in names:
        if sp.screw().gamma0 == 0:
            raise ValueError("the curve suite needs gamma0 != 0")
    if "surface" in names:
        sp.bonnet_ab()
    if "highdim" in names and (sp.p < 1 or sp.q < 1):
        raise ValueError("p and q must be positive")
    report = ResidualReport(suite=suite, params=asdict(sp), seed=sp.seed, h=sp.h)
    for n in names:
        for c in _RUNNERS[n](sp):
            if suite == "all":
                c = Check(f"{n}.{c.name}", *(getattr(c, f) for f in
                          ("identity", "max_residual", "tolerance", "passed", "grid", "category")))
            report.checks.append(c)
    return report
