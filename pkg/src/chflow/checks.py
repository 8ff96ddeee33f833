"""Operator-identity and property suite: the self-test behind `chflow check`.

Every check returns a CheckResult with the measured worst defect and its
tolerance.  Relative defects are scaled by 1 + the largest participating
magnitude, which keeps the checks meaningful near zero fields.  The suite is
deterministic: all randomness flows from one seed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (AlgebraElement, MetricParams, ad, ad_transpose,
                      bilinear_B, inertia_apply, inertia_invert, inner_product,
                      metric_norm_sq)
from .diagnostics import apriori_check
from .dynamics import ModelParams, State, rhs_direct, rhs_geodesic
from .spectral import (PeriodicGrid, SpectralField, apply_power,
                       circle_integral, dealiased_product, derivative,
                       multiplier_symbol, sup_norm, to_physical, to_spectral)

DEFAULT_SEED = 42


@dataclass
class CheckResult:
    name: str
    defect: float
    tolerance: float

    @property
    def passed(self):
        return self.defect <= self.tolerance


def random_smooth_field(grid, rng, kmax=10, decay=0.8, mean_scale=1.0):
    """Random real field with exponentially decaying spectrum |c_k| ~ e^(-decay*k)."""
    c = np.zeros(grid.n, dtype=complex)
    c[0] = mean_scale * rng.standard_normal()
    kmax = min(kmax, grid.n // 2 - 1)
    for k in range(1, kmax + 1):
        z = (rng.standard_normal() + 1j * rng.standard_normal()) * math.exp(-decay * k)
        c[k] = z
        c[-k % grid.n] = np.conj(z)
    return SpectralField.from_coeffs(grid, c)


def random_algebra_element(grid, rng, kmax=10, decay=0.8, alpha_scale=1.0):
    return AlgebraElement(random_smooth_field(grid, rng, kmax, decay),
                          random_smooth_field(grid, rng, kmax, decay),
                          alpha_scale * rng.standard_normal())


def weighted_pairing_defect(f, g, symbol_values, right_symbol_values=None):
    """|int (Lf) g - int f (Mg)| over 1 + the pairing scale.

    M defaults to L, which is the self-adjointness identity proper.  Passing
    a perturbed left symbol models an inconsistent-operator bug (e.g. a
    symbol-cache collision) and must trip the check: that is the negative
    control proving the check has teeth.
    """
    if right_symbol_values is None:
        right_symbol_values = symbol_values
    lf = np.fft.ifft(f.coeffs * symbol_values).real * f.grid.n
    mg = np.fft.ifft(g.coeffs * right_symbol_values).real * g.grid.n
    lhs = float(np.mean(lf * g.samples))
    rhs = float(np.mean(f.samples * mg))
    return abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs)))


def check_constant_fixed_point(n=64, s_values=(1.0, 1.5, 2.0, 2.5)):
    """A applied to the constant 1 returns 1, for every exponent."""
    grid = PeriodicGrid(n)
    one = SpectralField.from_samples(grid, np.ones(n))
    defect = max(float(np.abs(apply_power(one, s).samples - 1.0).max())
                 for s in list(s_values) + [-s for s in s_values])
    return CheckResult("A1 = 1", defect, 1e-13)


def check_commutation(n=64, s_values=(1.0, 1.5, 2.0, 2.5), n_fields=200,
                      seed=DEFAULT_SEED):
    """[A, D] = 0: both operator orders agree relative to their common scale."""
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        f = random_smooth_field(grid, rng, kmax=16, decay=0.9)
        for s in s_values:
            one = apply_power(derivative(f), s)
            two = derivative(apply_power(f, s))
            scale = 1.0 + max(sup_norm(one), sup_norm(two))
            worst = max(worst, sup_norm(one - two) / scale)
    return CheckResult("[A, D] = 0", worst, 1e-10)


def check_self_adjointness(n=64, s_values=(1.0, 1.5, 2.0, 2.5), n_fields=200,
                           seed=DEFAULT_SEED):
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        f = random_smooth_field(grid, rng, kmax=16, decay=0.7)
        g = random_smooth_field(grid, rng, kmax=16, decay=0.7)
        for s in s_values:
            worst = max(worst,
                        weighted_pairing_defect(f, g, multiplier_symbol(grid, s).values))
    return CheckResult("A self-adjoint", worst, 1e-10)


def check_mean_preservation(n=64, s_values=(1.0, 1.5, 2.0, 2.5), n_fields=200,
                            seed=DEFAULT_SEED):
    """int A^{-1} w = int w (absolute defect; O(1) fields)."""
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        w = random_smooth_field(grid, rng, kmax=16, decay=0.5)
        for s in s_values:
            worst = max(worst, abs(circle_integral(apply_power(w, -s))
                                   - circle_integral(w)))
    return CheckResult("int A^-1 w = int w", worst, 1e-12)


def check_norm_domination(n=64, s_values=(1.0, 1.5, 2.0, 2.5), n_fields=200,
                          seed=DEFAULT_SEED):
    """int u^2 <= int u A u (+1e-12): the L2 norm never exceeds the H^s norm."""
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        u = random_smooth_field(grid, rng, kmax=16, decay=0.5)
        l2 = circle_integral(SpectralField.from_samples(grid, u.samples * u.samples))
        for s in s_values:
            au = apply_power(u, s)
            hs = circle_integral(SpectralField.from_samples(grid, u.samples * au.samples))
            worst = max(worst, l2 - hs)
    return CheckResult("int u^2 <= int u A u", worst, 1e-12)


def check_transform_roundtrip(n=64, n_fields=50, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        samples = rng.standard_normal(n)
        back = to_physical(to_spectral(samples))
        scale = 1.0 + float(np.abs(samples).max())
        worst = max(worst, float(np.abs(back - samples).max()) / scale)
    return CheckResult("transform round-trip", worst, 1e-12)


def check_inertia_roundtrip(n=64, s_values=(1.0, 1.5, 2.0), kappas=(0.5, 1.0, 4.0),
                            n_fields=50, seed=DEFAULT_SEED):
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        U = random_algebra_element(grid, rng)
        for s in s_values:
            for kappa in kappas:
                p = MetricParams(kappa, s)
                back = inertia_invert(inertia_apply(U, p), p)
                scale = 1.0 + max(sup_norm(U.u), sup_norm(U.rho), abs(U.alpha))
                worst = max(worst, sup_norm(back.u - U.u) / scale,
                            sup_norm(back.rho - U.rho) / scale,
                            abs(back.alpha - U.alpha) / scale)
    return CheckResult("inertia round-trip", worst, 1e-10)


def check_positive_definiteness(n=64, n_fields=1000, seed=DEFAULT_SEED):
    """<U, U> > 0 for nonzero U across kappa in {0, 1, 10}, alpha in [-5, 5]."""
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    smallest = math.inf
    for _ in range(n_fields):
        U = AlgebraElement(random_smooth_field(grid, rng),
                           random_smooth_field(grid, rng),
                           rng.uniform(-5.0, 5.0))
        for kappa in (0.0, 1.0, 10.0):
            smallest = min(smallest, metric_norm_sq(U, MetricParams(kappa, 1.5)))
    return CheckResult("metric positive definite", max(0.0, -smallest), 0.0)


def check_apriori(n=64, n_fields=1000, seed=DEFAULT_SEED):
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        U = random_algebra_element(grid, rng, alpha_scale=2.0)
        for kappa in (0.0, 1.0, 5.0):
            result = apriori_check(U, ModelParams(2.0, kappa, U.alpha, 1.5))
            worst = min(worst, result.slack)
    return CheckResult("a-priori inequality", max(0.0, -worst), 1e-10)


def check_pairing_antisymmetry(n=64, s_values=(1.0, 1.5, 2.0), n_fields=100,
                               seed=DEFAULT_SEED):
    """int u1_x A u3 = -int A u1 u3_x."""
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        u1 = random_smooth_field(grid, rng)
        u3 = random_smooth_field(grid, rng)
        for s in s_values:
            lhs = circle_integral(dealiased_product(derivative(u1), apply_power(u3, s)))
            rhs = -circle_integral(dealiased_product(apply_power(u1, s), derivative(u3)))
            worst = max(worst, abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs))))
    return CheckResult("pairing antisymmetry", worst, 1e-10)


def adjoint_identity_defect(U1, U2, U3, p):
    """|<ad(U1,U2), U3> - <U2, ad^T(U1,U3)>| over 1 + the pairing scale."""
    lhs = inner_product(ad(U1, U2), U3, p)
    rhs = inner_product(U2, ad_transpose(U1, U3, p), p)
    return abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs)))


def check_adjoint_identity(n=64, kappas=(0.5, 1.0, 4.0), s_values=(1.0, 1.5, 2.0),
                           n_triples=100, seed=DEFAULT_SEED):
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_triples):
        U1 = random_algebra_element(grid, rng)
        U2 = random_algebra_element(grid, rng)
        U3 = random_algebra_element(grid, rng)
        for kappa in kappas:
            for s in s_values:
                worst = max(worst, adjoint_identity_defect(U1, U2, U3,
                                                           MetricParams(kappa, s)))
    return CheckResult("adjoint identity", worst, 1e-9)


def rhs_equivalence_defect(U, p):
    """Relative difference between the momentum-form and geodesic-form RHS."""
    st = State(U, 0.0)
    one = rhs_direct(st, p)
    two = rhs_geodesic(st, p)
    scale = 1.0 + max(sup_norm(one.u), sup_norm(one.rho),
                      sup_norm(two.u), sup_norm(two.rho))
    return max(sup_norm(one.u - two.u), sup_norm(one.rho - two.rho)) / scale


def check_rhs_equivalence(n=64, s_values=(1.0, 1.5, 2.0), kappas=(0.0, 1.0),
                          n_states=100, seed=DEFAULT_SEED):
    """Momentum form at a = 2 agrees with the geodesic form -B(U, U)."""
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        U = random_algebra_element(grid, rng)
        for s in s_values:
            for kappa in kappas:
                p = ModelParams(2.0, kappa, U.alpha, s)
                worst = max(worst, rhs_equivalence_defect(U, p))
    return CheckResult("direct/geodesic RHS equivalence", worst, 1e-9)


def check_geodesic_matches_B(n=64, s_values=(1.0, 1.5, 2.0), n_states=25,
                             seed=DEFAULT_SEED):
    """rhs_geodesic equals -B(U, U) when the inertia operator is invertible."""
    grid = PeriodicGrid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        U = random_algebra_element(grid, rng)
        for s in s_values:
            p = ModelParams(2.0, 1.0, U.alpha, s)
            lhs = rhs_geodesic(State(U, 0.0), p)
            rhs = -bilinear_B(U, U, p.metric())
            scale = 1.0 + max(sup_norm(lhs.u), sup_norm(lhs.rho))
            worst = max(worst, sup_norm(lhs.u - rhs.u) / scale,
                        sup_norm(lhs.rho - rhs.rho) / scale,
                        abs(lhs.alpha - rhs.alpha) / scale)
    return CheckResult("geodesic RHS = -B(U, U)", worst, 1e-10)


def run_all(seed=DEFAULT_SEED):
    """The full identity/property suite with the default desk-scale sizes."""
    return [
        check_constant_fixed_point(),
        check_commutation(seed=seed),
        check_self_adjointness(seed=seed),
        check_mean_preservation(seed=seed),
        check_norm_domination(seed=seed),
        check_transform_roundtrip(seed=seed),
        check_inertia_roundtrip(seed=seed),
        check_positive_definiteness(seed=seed),
        check_apriori(seed=seed),
        check_pairing_antisymmetry(seed=seed),
        check_adjoint_identity(seed=seed),
        check_rhs_equivalence(seed=seed),
        check_geodesic_matches_B(seed=seed),
    ]
