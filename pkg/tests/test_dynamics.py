import math

import numpy as np
import pytest

from chflow import (AlgebraElement, ConfigError, EvaluationError, FlowMap,
                    ModelParams, PeriodicGrid, SpectralField, State,
                    circle_integral, coupled_rhs, derivative,
                    dealiased_product, rhs_direct, rhs_flowmap, rhs_geodesic,
                    sup_norm)
from chflow.checks import random_algebra_element, rhs_equivalence_defect

TWO_PI = 2.0 * math.pi


@pytest.fixture
def grid():
    return PeriodicGrid(64)


def test_model_params_validation():
    with pytest.raises(ConfigError):
        ModelParams(a=2.0, kappa=-1.0, alpha=0.0, s=1.0)
    with pytest.raises(ConfigError):
        ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=0.5)


def test_a_equals_one_warns():
    with pytest.warns(UserWarning):
        ModelParams(a=1.0, kappa=1.0, alpha=0.0, s=2.0)


def test_rhs_zero_state(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.5)
    d = rhs_direct(State(AlgebraElement.zero(grid), 0.0), p)
    assert sup_norm(d.u) == 0.0
    assert sup_norm(d.rho) == 0.0
    assert d.alpha == 0.0


def test_rhs_single_mode_oracle(grid):
    # u = cos(2 pi x), rho = 0, a = 2, s = 1:
    #   m = (1 + 4 pi^2) cos, m_dot = 3 pi (1 + 4 pi^2) sin(4 pi x),
    #   u_dot = m_dot scaled by the inverse mode-2 symbol
    p = ModelParams(a=2.0, kappa=0.0, alpha=0.0, s=1.0)
    x = grid.points
    U = AlgebraElement(SpectralField.from_samples(grid, np.cos(TWO_PI * x)),
                       SpectralField.zero(grid), 0.0)
    d = rhs_direct(State(U, 0.0), p)
    expected = (3 * math.pi * (1 + 4 * math.pi ** 2) / (1 + 16 * math.pi ** 2)
                * np.sin(2 * TWO_PI * x))
    np.testing.assert_allclose(d.u.samples, expected, atol=1e-12)
    assert sup_norm(d.rho) == 0.0


def test_rhs_constant_density_oracle(grid):
    # rho constant: rho_dot = -(a-1) u_x rho = 2 pi c sin(2 pi x) for a = 2
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.0)
    c = 1.3
    x = grid.points
    U = AlgebraElement(SpectralField.from_samples(grid, np.cos(TWO_PI * x)),
                       SpectralField.constant(grid, c), 0.0)
    d = rhs_direct(State(U, 0.0), p)
    np.testing.assert_allclose(d.rho.samples, TWO_PI * c * np.sin(TWO_PI * x),
                               atol=1e-12)


def test_constants_are_fixed_points(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=2.0)
    U = AlgebraElement(SpectralField.constant(grid, 0.8),
                       SpectralField.zero(grid), 0.0)
    d = rhs_geodesic(State(U, 0.0), p)
    assert sup_norm(d.u) < 1e-14
    assert sup_norm(d.rho) == 0.0


def test_nonfinite_input_rejected(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.0)
    bad = np.zeros(grid.n)
    bad[3] = np.nan
    U = AlgebraElement(SpectralField(grid, bad, np.fft.fft(bad) / grid.n),
                       SpectralField.zero(grid), 0.0)
    with pytest.raises(EvaluationError):
        rhs_direct(State(U, 0.0), p)


def test_geodesic_requires_a_two(grid):
    p = ModelParams(a=3.0, kappa=1.0, alpha=0.0, s=1.5)
    with pytest.raises(ConfigError):
        rhs_geodesic(State(AlgebraElement.zero(grid), 0.0), p)


@pytest.mark.parametrize("s", [1.0, 1.5, 2.0])
@pytest.mark.parametrize("kappa", [0.0, 1.0])
def test_formulation_equivalence(grid, s, kappa):
    rng = np.random.default_rng(17)
    for _ in range(10):
        U = random_algebra_element(grid, rng)
        p = ModelParams(a=2.0, kappa=kappa, alpha=U.alpha, s=s)
        assert rhs_equivalence_defect(U, p) <= 1e-9


def test_density_rhs_is_total_derivative_at_a_two(grid):
    # -u rho_x - u_x rho = -(u rho)_x
    rng = np.random.default_rng(18)
    U = random_algebra_element(grid, rng)
    p = ModelParams(a=2.0, kappa=1.0, alpha=U.alpha, s=1.5)
    d = rhs_direct(State(U, 0.0), p)
    expected = -derivative(dealiased_product(U.u, U.rho))
    assert sup_norm(d.rho - expected) <= 1e-10 * (1 + sup_norm(d.rho))


def test_mean_velocity_generator(grid):
    # int u_dot = 0 for a = 2
    rng = np.random.default_rng(19)
    for _ in range(10):
        U = random_algebra_element(grid, rng)
        p = ModelParams(a=2.0, kappa=1.0, alpha=U.alpha, s=1.5)
        d = rhs_direct(State(U, 0.0), p)
        assert abs(circle_integral(d.u)) <= 1e-10


def test_flowmap_rhs_zero_velocity(grid):
    flow = FlowMap.identity(grid)
    assert np.abs(rhs_flowmap(flow, SpectralField.zero(grid))).max() == 0.0


def test_flowmap_rhs_uniform_translation(grid):
    flow = FlowMap.identity(grid)
    d = rhs_flowmap(flow, SpectralField.constant(grid, 0.7))
    np.testing.assert_allclose(d, 0.7, atol=1e-13)


def test_flowmap_rhs_identity_composition(grid):
    u = SpectralField.from_samples(grid, np.sin(TWO_PI * grid.points))
    d = rhs_flowmap(FlowMap.identity(grid), u)
    np.testing.assert_allclose(d, np.sin(TWO_PI * grid.points), atol=1e-12)


def test_coupled_rhs_zero_state_with_flow(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.0)
    st = State(AlgebraElement.zero(grid), 0.0, FlowMap.identity(grid))
    d = coupled_rhs(st, p)
    assert sup_norm(d.dU.u) == 0.0
    assert np.abs(d.dflow).max() == 0.0


def test_coupled_rhs_without_flow(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.0)
    d = coupled_rhs(State(AlgebraElement.zero(grid), 0.0), p)
    assert d.dflow is None


def test_alpha_derivative_exactly_zero(grid):
    rng = np.random.default_rng(20)
    for _ in range(5):
        U = random_algebra_element(grid, rng)
        p = ModelParams(a=2.7, kappa=0.5, alpha=U.alpha, s=1.5)
        d = coupled_rhs(State(U, 0.0), p)
        assert d.dU.alpha == 0.0
