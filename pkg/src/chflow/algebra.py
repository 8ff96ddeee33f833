"""Lie-algebra layer: inner product, inertia operator, ad, ad^T and B.

An algebra element is a triple U = (u, rho, alpha): velocity field, density
field and a real constant.  The metric is

    <U1, U2> = int u1*A*u2 + kappa * int rho1*rho2
               - 1/2 * int (alpha2*u1 + alpha1*u2) + 1/2 * alpha1*alpha2

with A = (1 - D^2)^s.  ad^T is computed through its defining relation
<ad(U1,U2), U3> = <U2, ad^T(U1,U3)>: assemble the dual element the pairing
produces, then invert the inertia operator.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateMetricError
from .spectral import (SpectralField, apply_power, circle_integral,
                       dealiased_product, derivative, _symbol_values)


@dataclass(frozen=True)
class MetricParams:
    """kappa >= 0 weights the density block; s >= 1 is the inertia exponent."""

    kappa: float
    s: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ConfigError(f"kappa must satisfy kappa >= 0, got {self.kappa}")
        if self.s < 1:
            raise ConfigError(f"s must satisfy s >= 1, got {self.s}")


@dataclass(frozen=True)
class AlgebraElement:
    """A point (u, rho, alpha) of the Lie algebra."""

    u: SpectralField
    rho: SpectralField
    alpha: float

    def __post_init__(self):
        self.u._require_same_grid(self.rho)

    @property
    def grid(self):
        return self.u.grid

    @classmethod
    def zero(cls, grid):
        return cls(SpectralField.zero(grid), SpectralField.zero(grid), 0.0)

    def is_finite(self):
        return self.u.is_finite() and self.rho.is_finite() and np.isfinite(self.alpha)

    def __add__(self, other):
        return AlgebraElement(self.u + other.u, self.rho + other.rho,
                              self.alpha + other.alpha)

    def __sub__(self, other):
        return AlgebraElement(self.u - other.u, self.rho - other.rho,
                              self.alpha - other.alpha)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return AlgebraElement(self.u * scalar, self.rho * scalar,
                              self.alpha * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraElement(-self.u, -self.rho, -self.alpha)


@dataclass(frozen=True)
class DualElement:
    """Momentum-side triple (f, g, h), the image of the inertia operator."""

    f: SpectralField
    g: SpectralField
    h: float

    def __post_init__(self):
        self.f._require_same_grid(self.g)


def _l2_pairing(f, g):
    # int f*g evaluated in coefficient space; exact for the interpolants
    c1, c2 = f.coeffs, g.coeffs
    return float(np.sum(c1.real * c2.real + c1.imag * c2.imag))


def _weighted_pairing(f, g, s):
    # int f * A g with A = (1 - D^2)^s, evaluated in coefficient space
    w = _symbol_values(f.grid.n, float(s))
    c1, c2 = f.coeffs, g.coeffs
    return float(np.sum(w * (c1.real * c2.real + c1.imag * c2.imag)))


def inner_product(U1, U2, p):
    """The metric pairing <U1, U2>; symmetric in its arguments."""
    U1.u._require_same_grid(U2.u)
    value = _weighted_pairing(U1.u, U2.u, p.s)
    if p.kappa != 0.0:
        value += p.kappa * _l2_pairing(U1.rho, U2.rho)
    value -= 0.5 * (U2.alpha * circle_integral(U1.u)
                    + U1.alpha * circle_integral(U2.u))
    value += 0.5 * U1.alpha * U2.alpha
    return value


def metric_norm_sq(U, p):
    """Squared metric norm <U, U>; positive definite for kappa >= 0."""
    return inner_product(U, U, p)


def inertia_apply(U, p):
    """Map a velocity-side triple to its momentum: (Au - alpha/2, kappa*rho, (alpha - int u)/2)."""
    f = apply_power(U.u, p.s) - SpectralField.constant(U.grid, 0.5 * U.alpha)
    g = U.rho * p.kappa
    h = 0.5 * (U.alpha - circle_integral(U.u))
    return DualElement(f, g, h)


def inertia_invert(F, p):
    """Solve inertia_apply(U) = F for U; requires kappa > 0.

    Using A^{-1} 1 = 1 and mean preservation of A^{-1}, the solution is
    u = A^{-1} f + (2h + int f) * 1, rho = g / kappa, alpha = 4h + 2 int f.
    """
    if p.kappa <= 0:
        raise DegenerateMetricError(
            "inertia operator is not invertible for kappa = 0 (density block degenerates)"
        )
    mean_f = circle_integral(F.f)
    u = apply_power(F.f, -p.s) + SpectralField.constant(F.f.grid, 2.0 * F.h + mean_f)
    rho = F.g * (1.0 / p.kappa)
    alpha = 4.0 * F.h + 2.0 * mean_f
    return AlgebraElement(u, rho, alpha)


def ad(U1, U2):
    """Adjoint action: (u1_x u2 - u1 u2_x, rho1_x u2 - rho2_x u1, 0)."""
    U1.u._require_same_grid(U2.u)
    u1x = derivative(U1.u)
    u2x = derivative(U2.u)
    w = dealiased_product(u1x, U2.u) - dealiased_product(U1.u, u2x)
    sigma = (dealiased_product(derivative(U1.rho), U2.u)
             - dealiased_product(derivative(U2.rho), U1.u))
    return AlgebraElement(w, sigma, 0.0)


def ad_transpose(U1, U3, p):
    """Metric adjoint of ad, via the defining relation and inertia inversion.

    The pairing <ad(U1, .), U3> reads off the dual element
    f = u1_x*A u3 + (u1*A u3)_x + kappa*rho1_x*rho3 - alpha3*u1_x,
    g = kappa*(u1*rho3)_x, h = 0; ad^T(U1, U3) = inertia_invert((f, g, 0)).
    """
    U1.u._require_same_grid(U3.u)
    u1x = derivative(U1.u)
    au3 = apply_power(U3.u, p.s)
    f = (dealiased_product(u1x, au3)
         + derivative(dealiased_product(U1.u, au3))
         - u1x * U3.alpha)
    if p.kappa != 0.0:
        f = f + dealiased_product(derivative(U1.rho), U3.rho) * p.kappa
    g = derivative(dealiased_product(U1.u, U3.rho)) * p.kappa
    return inertia_invert(DualElement(f, g, 0.0), p)


def bilinear_B(U1, U2, p):
    """Symmetrized quadratic term B(U1, U2) = (ad^T(U1,U2) + ad^T(U2,U1)) / 2."""
    return (ad_transpose(U1, U2, p) + ad_transpose(U2, U1, p)) * 0.5
