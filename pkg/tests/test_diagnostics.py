import math

import numpy as np
import pytest

from chflow import (AlgebraElement, ConfigError, FlowMap, ModelParams,
                    PeriodicGrid, SpectralField, State, StepperConfig,
                    Termination, Trajectory, advance, apriori_check,
                    build_report, lagrangian_invariant, mean_velocity_drift,
                    metric_norm_drift, rho_positivity, sobolev_ladder,
                    stretch_bound)
from chflow.config import initial_state, resolve_config

TWO_PI = 2.0 * math.pi


@pytest.fixture
def grid():
    return PeriodicGrid(64)


def small_run(a=2.0, kappa=1.0, t_end=0.2, flow=True, rho_amp=0.3, u_amp=0.2, n=64):
    grid = PeriodicGrid(n)
    x = grid.points
    U = AlgebraElement(
        SpectralField.from_samples(grid, u_amp * np.cos(TWO_PI * x)),
        SpectralField.from_samples(grid, 2.0 + rho_amp * np.sin(TWO_PI * x)),
        0.0)
    p = ModelParams(a=a, kappa=kappa, alpha=0.0, s=2.0)
    st0 = State(U, 0.0, FlowMap.identity(grid) if flow else None)
    return advance(st0, p, StepperConfig(dt=2e-3, t_end=t_end, sample_every=10)), p


def test_metric_drift_zero_state(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.5)
    traj = advance(State(AlgebraElement.zero(grid), 0.0), p,
                   StepperConfig(dt=0.05, t_end=0.2))
    drift = metric_norm_drift(traj, p)
    assert np.all(drift == 0.0)


def test_metric_drift_conserved_at_a_two():
    traj, p = small_run(flow=False)
    assert metric_norm_drift(traj, p).max() <= 1e-10


def test_metric_drift_reported_for_other_a():
    traj, p = small_run(a=3.0, flow=False)
    drift = metric_norm_drift(traj, p)
    assert drift.max() > 1e-8     # genuinely not conserved away from a = 2
    assert np.isfinite(drift).all()


def test_mean_velocity_drift(grid):
    traj, p = small_run(flow=False)
    assert mean_velocity_drift(traj, p).max() <= 1e-12


def test_lagrangian_invariant_requires_flow():
    traj, p = small_run(flow=False)
    with pytest.raises(ConfigError):
        lagrangian_invariant(traj, p)


def test_lagrangian_invariant_initial_sample_zero():
    traj, p = small_run()
    dev = lagrangian_invariant(traj, p)
    assert dev[0] == 0.0
    assert dev.max() <= 1e-9


def test_lagrangian_invariant_zero_density(grid):
    # rho identically zero is transported to zero: the deviation vanishes
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=2.0)
    U = AlgebraElement(
        SpectralField.from_samples(grid, 0.3 * np.cos(TWO_PI * grid.points)),
        SpectralField.zero(grid), 0.0)
    traj = advance(State(U, 0.0, FlowMap.identity(grid)), p,
                   StepperConfig(dt=2e-3, t_end=0.2, sample_every=10))
    dev = lagrangian_invariant(traj, p)
    assert dev.max() == 0.0


def test_rho_positivity_series():
    traj, p = small_run(flow=False)
    mins = rho_positivity(traj)
    assert np.all(mins > 0.0)


def test_rho_zero_is_transported_to_zero(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=2.0)
    U = AlgebraElement(
        SpectralField.from_samples(grid, 0.3 * np.cos(TWO_PI * grid.points)),
        SpectralField.zero(grid), 0.0)
    traj = advance(State(U, 0.0), p, StepperConfig(dt=2e-3, t_end=0.2))
    assert np.abs(rho_positivity(traj)).max() == 0.0


def test_stretch_bound_initial_ratio_one():
    traj, _ = small_run()
    sb = stretch_bound(traj)
    assert sb.ratios[0] == 1.0
    assert not sb.degenerate
    assert np.all(sb.ratios <= 1.001)


def test_stretch_bound_zero_velocity(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.5)
    U = AlgebraElement(SpectralField.zero(grid),
                       SpectralField.constant(grid, 1.0), 0.0)
    traj = advance(State(U, 0.0, FlowMap.identity(grid)), p,
                   StepperConfig(dt=0.05, t_end=0.25, sample_every=1))
    sb = stretch_bound(traj)
    np.testing.assert_allclose(sb.gammas, 1.0, atol=1e-13)
    np.testing.assert_allclose(sb.ratios, 1.0, atol=1e-13)


def test_stretch_bound_flags_degenerate_flow(grid):
    # a displacement with d_xi < -1 somewhere is not orientation preserving
    d = SpectralField.from_samples(
        grid, -np.sin(TWO_PI * grid.points) / math.pi)
    U = AlgebraElement.zero(grid)
    st = State(U, 0.0, FlowMap(d))
    traj = Trajectory([0.0], [st], Termination("completed", 0.0))
    sb = stretch_bound(traj)
    assert sb.degenerate


def test_sobolev_ladder_zero(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.0)
    assert sobolev_ladder(AlgebraElement.zero(grid), p, 0) == 0.0


def test_sobolev_ladder_single_mode(grid):
    # u = cos(2 pi x), s = 1, k = 0: ||A u||_{L2}^2 = (1 + 4 pi^2)^2 / 2
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.0)
    U = AlgebraElement(
        SpectralField.from_samples(grid, np.cos(TWO_PI * grid.points)),
        SpectralField.zero(grid), 0.0)
    expected = (1 + 4 * math.pi ** 2) ** 2 / 2
    assert abs(sobolev_ladder(U, p, 0) - expected) <= 1e-10 * expected


def test_sobolev_ladder_rejects_negative_order(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.0)
    with pytest.raises(ConfigError):
        sobolev_ladder(AlgebraElement.zero(grid), p, -1)


def test_apriori_pure_alpha(grid):
    p = ModelParams(a=2.0, kappa=1.0, alpha=1.5, s=1.0)
    U = AlgebraElement(SpectralField.zero(grid), SpectralField.zero(grid), 1.5)
    res = apriori_check(U, p)
    assert res.ok
    assert abs(res.slack - 1.5 ** 2) < 1e-13    # ||U||^2 = a^2/2 plus a^2/2


def test_apriori_constant_velocity(grid):
    # U = (1, 0, 0): lhs = 3/4, rhs = 1, slack = 1/4
    p = ModelParams(a=2.0, kappa=1.0, alpha=0.0, s=1.5)
    U = AlgebraElement(SpectralField.constant(grid, 1.0),
                       SpectralField.zero(grid), 0.0)
    res = apriori_check(U, p)
    assert res.ok
    assert abs(res.slack - 0.25) < 1e-13


def test_build_report_assembles_everything():
    traj, p = small_run()
    report = build_report(traj, p)
    for key in ("metric_norm_sq", "metric_drift", "mean_u", "min_rho", "sup_ux",
                "min_ux", "tail_fraction", "ladder_k0", "ladder_k1",
                "lagrangian_dev", "stretch_ratio", "apriori_slack"):
        assert key in report.series, key
    assert report.passes["metric_conservation"]
    assert report.passes["lagrangian_invariant"]
    assert report.passes["stretch_bound"]
    assert report.passes["rho_positivity"]
    assert report.passes["apriori"]
    assert report.all_passed
    # every reported value is finite
    for series in report.series.values():
        assert np.isfinite(series).all()
    # the trajectory carries the series after reporting
    assert traj.series is report.series


def test_build_report_is_pure():
    traj, p = small_run(flow=False)
    r1 = build_report(traj, p)
    r2 = build_report(traj, p)
    for key in r1.series:
        np.testing.assert_array_equal(r1.series[key], r2.series[key])


def test_preset_report_no_flow_keys():
    cfg = resolve_config({"preset": "global_s2",
                          "stepper": {"dt": 5e-3, "t_end": 0.1}})
    traj = advance(initial_state(cfg), cfg.model, cfg.stepper, cfg.thresholds)
    report = build_report(traj, cfg.model)
    assert "lagrangian_dev" not in report.series
    assert "stretch_ratio" not in report.series
    assert "rho_positivity" not in report.passes   # rho_0 is identically zero
