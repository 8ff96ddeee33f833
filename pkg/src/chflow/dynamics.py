"""Evolution right-hand sides: momentum form, geodesic form, and the flow map.

The momentum form evolves m = A u:

    m_t   = alpha*u_x - a*u_x*m - u*m_x - kappa*rho*rho_x
    rho_t = -u*rho_x - (a-1)*u_x*rho
    alpha_t = 0

For a = 2 this is the Arnold-Euler equation U_t = -B(U, U) of the metric in
:mod:`chflow.algebra`; `rhs_geodesic` implements the closed-form diagonal of
that equation and serves as an independent cross-check of `rhs_direct`.
Every quadratic product is individually dealiased before summation.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import AlgebraElement, MetricParams
from .errors import ConfigError, EvaluationError
from .spectral import (SpectralField, apply_power, dealiased_product,
                       derivative, interpolate)


@dataclass(frozen=True)
class ModelParams:
    """Family parameter a, density coupling kappa, vorticity constant alpha, inertia exponent s."""

    a: float
    kappa: float
    alpha: float
    s: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ConfigError(f"kappa must satisfy kappa >= 0, got {self.kappa}")
        if self.s < 1:
            raise ConfigError(f"s must satisfy s >= 1, got {self.s}")
        if self.a == 1:
            warnings.warn(
                "a = 1 is outside the model family: the density equation "
                "degenerates to pure transport", UserWarning, stacklevel=2)

    def metric(self):
        return MetricParams(self.kappa, self.s)


@dataclass(frozen=True)
class FlowMap:
    """Lagrangian marker positions phi(xi) = xi + d(xi) over the initial grid labels."""

    displacement: SpectralField

    @property
    def grid(self):
        return self.displacement.grid

    @classmethod
    def identity(cls, grid):
        return cls(SpectralField.zero(grid))

    def position_samples(self):
        """phi evaluated at the grid labels (not wrapped; displacement accumulates)."""
        return self.grid.points + self.displacement.samples

    def stretch_samples(self):
        """phi_x = 1 + d_xi at the grid labels, by spectral differentiation."""
        return 1.0 + derivative(self.displacement).samples

    def shifted(self, coeff, ddot):
        return FlowMap(SpectralField.from_samples(
            self.grid, self.displacement.samples + coeff * ddot))


@dataclass(frozen=True)
class State:
    """Instantaneous solver state: algebra element, time, optional flow map."""

    U: AlgebraElement
    t: float
    flow: Optional[FlowMap] = None


@dataclass(frozen=True)
class StateDeriv:
    """Time derivative of a state: dU plus flow displacement velocity samples."""

    dU: AlgebraElement
    dflow: Optional[np.ndarray] = None


def _require_finite(U):
    if not U.is_finite():
        raise EvaluationError("non-finite values in evolution state")


def rhs_direct(st, p):
    """Momentum-form right-hand side for general a; returns (du, drho, 0)."""
    U = st.U
    _require_finite(U)
    u, rho = U.u, U.rho
    m = apply_power(u, p.s)
    ux = derivative(u)
    mx = derivative(m)
    rhox = derivative(rho)
    mdot = (ux * p.alpha
            - dealiased_product(ux, m) * p.a
            - dealiased_product(u, mx))
    if p.kappa != 0.0:
        mdot = mdot - dealiased_product(rho, rhox) * p.kappa
    du = apply_power(mdot, -p.s)
    drho = (-dealiased_product(u, rhox)
            - dealiased_product(ux, rho) * (p.a - 1.0))
    return AlgebraElement(du, drho, 0.0)


def rhs_geodesic(st, p):
    """Geodesic-form right-hand side -B(U, U), valid for a = 2 and kappa >= 0.

    Uses the closed-form diagonal
        du   = -A^{-1}[u_x*Au + (u*Au)_x - alpha*u_x + kappa*rho*rho_x]
        drho = -(u*rho)_x
    which needs no inertia inversion and therefore also covers kappa = 0.
    """
    if p.a != 2:
        raise ConfigError(f"geodesic form requires a = 2, got a = {p.a}")
    U = st.U
    _require_finite(U)
    u, rho = U.u, U.rho
    au = apply_power(u, p.s)
    ux = derivative(u)
    w = (dealiased_product(ux, au)
         + derivative(dealiased_product(u, au))
         - ux * p.alpha)
    if p.kappa != 0.0:
        w = w + dealiased_product(rho, derivative(rho)) * p.kappa
    du = -apply_power(w, -p.s)
    drho = -derivative(dealiased_product(u, rho))
    return AlgebraElement(du, drho, 0.0)


def rhs_flowmap(flow, u):
    """Displacement velocity d_t(xi_j) = u(xi_j + d(xi_j))."""
    return interpolate(u, flow.position_samples())


def coupled_rhs(st, p):
    """Stacked derivative of the full state; the alpha component is always 0."""
    dU = rhs_direct(st, p)
    dflow = rhs_flowmap(st.flow, st.U.u) if st.flow is not None else None
    return StateDeriv(dU, dflow)
