"""Parameter algebra of the screw-motion family.

A surface of the family is fixed by the conserved quantity ``gamma0`` and the
angular rate ``omega`` of the screw motion. Everything else (the curvature
scale ``kappa0``, the hyperbolic rate ``mu``, the Bonnet coefficients ``a`` and
``b``) follows algebraically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

REL_TOL = 1e-12
ABS_TOL = 1e-14


def close(x: float, y: float, rel: float = REL_TOL, abs_: float = ABS_TOL) -> bool:
    return math.isclose(x, y, rel_tol=rel, abs_tol=abs_)


@dataclass(frozen=True)
class ScrewParams:
    """Conserved quantity ``gamma0`` and screw rate ``omega`` (radians per unit height)."""

    gamma0: float
    omega: float

    def __post_init__(self):
        if not math.isfinite(self.gamma0) or not math.isfinite(self.omega):
            raise ValueError(f"non-finite parameters: {self}")
        if self.omega == 0:
            raise ValueError("omega must be nonzero")
        if self.gamma0 != 0 and (self.gamma0 > 0) != (self.omega > 0):
            raise ValueError(
                f"gamma0={self.gamma0} and omega={self.omega} must carry the same sign"
            )

    @property
    def is_helicoid(self) -> bool:
        return self.gamma0 == 0


@dataclass(frozen=True)
class DerivedConstants:
    epsilon: float
    gamma_sq: float | None
    beta: float
    kappa0: float
    mu: float
    a: float
    b: float


def derive_constants(p: ScrewParams) -> DerivedConstants:
    g, w = p.gamma0, p.omega
    beta = 1.0 / (1.0 + g * g)
    epsilon = g / math.sqrt(1.0 + g * g)
    gamma_sq = None if g == 0 else (1.0 + g * g) / (g * g)
    kappa0 = g * w * beta
    mu = beta * w
    # mu**2 + kappa0**2 == beta * omega**2, so a = 1/omega and b = -gamma0/omega
    denom = mu * mu + kappa0 * kappa0
    a = mu / denom
    b = -kappa0 / denom
    return DerivedConstants(epsilon, gamma_sq, beta, kappa0, mu, a, b)


def params_from_ab(a: float, b: float) -> ScrewParams:
    """Invert the Bonnet coefficients back to ``(gamma0, omega)``.

    The catenoid ``a == 0`` has no screw-motion description with finite
    ``omega``; build it through :func:`screwmin.surface3d.bonnet_chart_jet`
    instead.
    """
    if a == 0:
        raise ValueError(
            "a = 0 (catenoid) has no screw parametrization; use the Bonnet chart "
            "surface3d.bonnet_chart_jet(u, v, a=0, b=...) directly"
        )
    return ScrewParams(gamma0=-b / a, omega=1.0 / a)


def check_constants(p: ScrewParams, c: DerivedConstants, rel: float = 1e-14) -> dict[str, float]:
    """Relative residuals of every relation tying ``c`` to ``p``."""

    def rdiff(x, y):
        return abs(x - y) / max(abs(x), abs(y), ABS_TOL)

    g, w = p.gamma0, p.omega
    out = {
        "beta": rdiff(c.beta, 1.0 / (1.0 + g * g)),
        "epsilon": rdiff(c.epsilon, g / math.sqrt(1.0 + g * g)),
        "kappa0": rdiff(c.kappa0, g * w * c.beta) if g else abs(c.kappa0),
        "mu": rdiff(c.mu, c.beta * w),
        "a_omega": rdiff(c.a * w, 1.0),
        "omega": rdiff(w, (c.mu**2 + c.kappa0**2) / c.mu),
    }
    if g:
        out["gamma_sq"] = rdiff(c.gamma_sq, 1.0 / c.epsilon**2)
        out["b_omega"] = rdiff(c.b * w, -c.kappa0 / c.mu)
    else:
        out["b"] = abs(c.b)
    return out
