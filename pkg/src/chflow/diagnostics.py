"""Trajectory monitors for every conserved or bounded quantity of the model.

All monitors are pure functions of a trajectory (plus model parameters), so
recomputation reproduces identical values.  Quantities proved constant are
reported as relative drifts; proved bounds are reported as slack or as a
bound-violation ratio.
"""

import math
from dataclasses import dataclass

import numpy as np

from .algebra import metric_norm_sq
from .errors import ConfigError, EvaluationError
from .spectral import (apply_power, circle_integral, derivative, interpolate,
                       oversampled_samples, sobolev_norm_sq, sup_norm)
from .stepping import tail_energy_fraction

#: floor for relative-drift denominators (zero-state runs)
DRIFT_FLOOR = 1e-14


def metric_norm_drift(traj, p):
    """Relative drift of the squared metric norm; conserved exactly when a = 2."""
    values = [metric_norm_sq(st.U, p.metric()) for st in traj.states]
    base = max(abs(values[0]), DRIFT_FLOOR)
    return np.array([abs(v - values[0]) / base for v in values])


def mean_velocity_drift(traj, p):
    """Absolute drift of the velocity mean; a conserved quantity for a = 2."""
    means = [circle_integral(st.U.u) for st in traj.states]
    return np.array([abs(v - means[0]) for v in means])


def lagrangian_invariant(traj, p):
    """Deviation of (rho o phi) * phi_x^(a-1) from its initial value, per sample.

    Requires the flow map; rho o phi is evaluated by off-grid interpolation
    and phi_x spectrally from the displacement.
    """
    if traj.states[0].flow is None:
        raise ConfigError("lagrangian invariant requires the flow map to be enabled")
    first = traj.states[0]
    ref = _transported_density(first, p)
    out = []
    for st in traj.states:
        out.append(float(np.abs(_transported_density(st, p) - ref).max()))
    return np.array(out)


def _transported_density(st, p):
    stretch = st.flow.stretch_samples()
    if stretch.min() <= 0.0:
        raise EvaluationError("flow map lost orientation: phi_x <= 0")
    rho_at_markers = interpolate(st.U.rho, st.flow.position_samples())
    return rho_at_markers * np.power(stretch, p.a - 1.0)


def rho_positivity(traj):
    """Minimum of rho on the oversampled grid, per sample."""
    return np.array([float(oversampled_samples(st.U.rho).min())
                     for st in traj.states])


@dataclass
class StretchBoundResult:
    """gamma(t) = max 1/phi_x against the Gronwall envelope gamma(0)*exp(K t)."""

    gammas: np.ndarray
    bounds: np.ndarray
    ratios: np.ndarray
    degenerate: bool = False   # phi_x <= 0 encountered: diffeomorphism lost


def stretch_bound(traj):
    """Check gamma(t) <= gamma(0) * exp(K(t) * t) with K the running max of ||u_x||_inf."""
    if traj.states[0].flow is None:
        raise ConfigError("stretch bound requires the flow map to be enabled")
    t0 = traj.times[0]
    gammas, bounds = [], []
    running_k = 0.0
    degenerate = False
    for t, st in zip(traj.times, traj.states):
        stretch = st.flow.stretch_samples()
        if stretch.min() <= 0.0:
            degenerate = True
            break
        running_k = max(running_k, sup_norm(derivative(st.U.u)))
        gammas.append(float((1.0 / stretch).max()))
        bounds.append(gammas[0] * math.exp(running_k * (t - t0)))
    gammas = np.array(gammas)
    bounds = np.array(bounds)
    return StretchBoundResult(gammas, bounds, gammas / bounds, degenerate)


def sobolev_ladder(U, p, k):
    """The ladder quantity ||A u||_{H^k}^2 + ||rho||_{H^(k+1)}^2.

    Integer-order norms use the same 4*pi^2-scaled symbol family as the
    inertia operator.  Meaningful while k + 2s stays safely inside the
    dealiased band (heuristic; the monitor reports, it does not extrapolate).
    """
    if k < 0:
        raise ConfigError(f"ladder order must be a nonnegative integer, got {k}")
    m = apply_power(U.u, p.s)
    return sobolev_norm_sq(m, float(k)) + sobolev_norm_sq(U.rho, float(k + 1))


@dataclass
class AprioriResult:
    ok: bool
    slack: float


def apriori_check(U, p):
    """Verify 3/4*||u||_{H^s}^2 + kappa*||rho||_{L2}^2 <= ||U||_A^2 + alpha^2/2.

    Returns the slack (right side minus left side); the check passes when the
    slack is no more negative than 1e-10 times the participating scale.
    """
    mp = p.metric()
    lhs = 0.75 * sobolev_norm_sq(U.u, mp.s) + mp.kappa * sobolev_norm_sq(U.rho, 0.0)
    rhs = metric_norm_sq(U, mp) + 0.5 * U.alpha ** 2
    slack = rhs - lhs
    scale = 1.0 + max(abs(lhs), abs(rhs))
    return AprioriResult(slack >= -1e-10 * scale, slack)


@dataclass(frozen=True)
class DiagnosticTolerances:
    """Run-level pass/fail thresholds for the conserved/bounded monitors."""

    metric_drift: float = 1e-6
    mean_drift: float = 1e-8
    lagrangian: float = 1e-6      # scaled by (1 + ||rho_0||_inf)
    stretch_ratio: float = 1.001
    apriori_scale: float = 1e-10


@dataclass
class DiagnosticReport:
    """Per-sample series, run-level extremes, and pass/fail verdicts."""

    series: dict
    extremes: dict
    passes: dict
    tolerances: DiagnosticTolerances

    @property
    def all_passed(self):
        return all(self.passes.values())


def state_scalars(st, p):
    """Cheap per-state scalars shared by the sampler and the CSV writer."""
    mp = p.metric()
    return {
        "metric_norm_sq": metric_norm_sq(st.U, mp),
        "mean_u": circle_integral(st.U.u),
        "min_rho": float(oversampled_samples(st.U.rho).min()),
        "sup_ux": sup_norm(derivative(st.U.u)),
        "min_ux": float(oversampled_samples(derivative(st.U.u)).min()),
        "tail_fraction": tail_energy_fraction(st.U.u),
        "ladder_k0": sobolev_ladder(st.U, p, 0),
        "ladder_k1": sobolev_ladder(st.U, p, 1),
    }


def build_report(traj, p, tolerances=None):
    """Assemble every applicable monitor for a trajectory into one report.

    Conservation verdicts are only asserted for a = 2; flow-map monitors only
    when the flow map was carried; rho positivity only when min rho_0 > 0.
    Everything else is reported without a verdict.
    """
    if tolerances is None:
        tolerances = DiagnosticTolerances()
    series = {"t": np.array(traj.times)}
    per_state = [state_scalars(st, p) for st in traj.states]
    for key in per_state[0]:
        series[key] = np.array([row[key] for row in per_state])

    series["metric_drift"] = metric_norm_drift(traj, p)
    series["mean_u_drift"] = mean_velocity_drift(traj, p)

    has_flow = traj.states[0].flow is not None
    if has_flow:
        # computed defensively: stop at orientation loss instead of raising,
        # so reports for degenerate runs still carry the healthy prefix
        ref = None
        devs = []
        for st in traj.states:
            if st.flow.stretch_samples().min() <= 0.0:
                break
            transported = _transported_density(st, p)
            if ref is None:
                ref = transported
            devs.append(float(np.abs(transported - ref).max()))
        series["lagrangian_dev"] = np.array(devs)
        sb = stretch_bound(traj)
        series["stretch_ratio"] = sb.ratios

    apriori = [apriori_check(st.U, p) for st in traj.states]
    series["apriori_slack"] = np.array([r.slack for r in apriori])

    extremes = {
        "max_metric_drift": float(series["metric_drift"].max()),
        "max_mean_u_drift": float(series["mean_u_drift"].max()),
        "min_rho": float(series["min_rho"].min()),
        "max_sup_ux": float(series["sup_ux"].max()),
        "min_ux": float(series["min_ux"].min()),
        "max_tail_fraction": float(series["tail_fraction"].max()),
        "max_ladder_k0": float(series["ladder_k0"].max()),
        "max_ladder_k1": float(series["ladder_k1"].max()),
        "min_apriori_slack": float(series["apriori_slack"].min()),
    }
    if has_flow:
        extremes["max_lagrangian_dev"] = float(series["lagrangian_dev"].max())
        extremes["max_stretch_ratio"] = float(series["stretch_ratio"].max())
        extremes["flow_degenerate"] = sb.degenerate

    passes = {"apriori": all(r.ok for r in apriori)}
    if p.a == 2:
        passes["metric_conservation"] = (
            extremes["max_metric_drift"] <= tolerances.metric_drift)
        passes["mean_velocity_conservation"] = (
            extremes["max_mean_u_drift"] <= tolerances.mean_drift)
    if has_flow:
        rho0_sup = sup_norm(traj.states[0].U.rho)
        passes["lagrangian_invariant"] = (
            extremes["max_lagrangian_dev"]
            <= tolerances.lagrangian * (1.0 + rho0_sup))
        passes["stretch_bound"] = (
            not sb.degenerate
            and extremes["max_stretch_ratio"] <= tolerances.stretch_ratio)
    if float(oversampled_samples(traj.states[0].U.rho).min()) > 0.0:
        passes["rho_positivity"] = extremes["min_rho"] > 0.0

    traj.series = series
    return DiagnosticReport(series, extremes, passes, tolerances)
