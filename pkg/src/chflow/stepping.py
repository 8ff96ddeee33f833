"""Fixed-step RK4 advancement with blow-up detection and order probes."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import State, StateDeriv, coupled_rhs
from .errors import ConfigError, EvaluationError
from .spectral import derivative, oversampled_samples, sup_norm, _dealias_keep_mask


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    t_end: float
    sample_every: int = 10

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError(f"dt must satisfy dt > 0, got {self.dt}")
        if self.t_end < self.dt:
            raise ConfigError(f"t_end must satisfy t_end >= dt, got {self.t_end}")
        if self.sample_every < 1:
            raise ConfigError(
                f"sample_every must be a positive integer, got {self.sample_every}")


@dataclass(frozen=True)
class BlowupThresholds:
    """Halting criteria: slope breaking, spectral-tail resolution loss, finiteness.

    The tail criterion guards against unresolved states entering the stepper;
    the slope criterion is the wave-breaking detector.  Finiteness is always
    checked.
    """

    slope_limit: float = 1e3
    tail_fraction_limit: float = 0.1

    def __post_init__(self):
        if self.slope_limit <= 0:
            raise ConfigError("slope_limit must be positive")
        if not 0 < self.tail_fraction_limit < 1:
            raise ConfigError("tail_fraction_limit must lie in (0, 1)")


@dataclass(frozen=True)
class Termination:
    status: str                  # "completed" | "blowup"
    time: float
    reason: Optional[str] = None  # "slope" | "tail" | "nonfinite" for blowup

    def as_dict(self):
        return {"status": self.status, "time": self.time, "reason": self.reason}


@dataclass
class Trajectory:
    """Sampled run: strictly increasing times, finite states, termination record."""

    times: list
    states: list
    termination: Termination
    series: dict = field(default_factory=dict)

    @property
    def completed(self):
        return self.termination.status == "completed"


def _shift_state(st, coeff, deriv):
    flow = st.flow
    if flow is not None and deriv.dflow is not None:
        flow = flow.shifted(coeff, deriv.dflow)
    return State(st.U + deriv.dU * coeff, st.t + coeff, flow)


def rk4_step(rhs, st, dt, p):
    """One classical Runge-Kutta step of the coupled state.

    alpha is unchanged bit-exactly since every stage derivative carries
    alpha_t = 0.  A non-finite intermediate surfaces as EvaluationError,
    which `advance` converts into a blow-up record.
    """
    k1 = rhs(st, p)
    k2 = rhs(_shift_state(st, 0.5 * dt, k1), p)
    k3 = rhs(_shift_state(st, 0.5 * dt, k2), p)
    k4 = rhs(_shift_state(st, dt, k3), p)
    dU = (k1.dU + (k2.dU + k3.dU) * 2.0 + k4.dU) * (dt / 6.0)
    flow = st.flow
    if flow is not None and k1.dflow is not None:
        dd = (k1.dflow + 2.0 * (k2.dflow + k3.dflow) + k4.dflow) * (dt / 6.0)
        flow = flow.shifted(1.0, dd)
    return State(st.U + dU, st.t + dt, flow)


def tail_energy_fraction(u):
    """Fraction of the L2 energy of u carried by modes |k| > n/3."""
    c = u.coeffs
    energy = c.real ** 2 + c.imag ** 2
    total = float(energy.sum())
    if total == 0.0:
        return 0.0
    tail = float(energy[~_dealias_keep_mask(u.grid.n)].sum())
    return tail / total


def min_slope(u):
    """Minimum of u_x over the oversampled grid."""
    return float(oversampled_samples(derivative(u)).min())


def detect_blowup(st, thresholds):
    """Return the triggered criterion name, or None for a healthy state."""
    U = st.U
    if not U.is_finite():
        return "nonfinite"
    if st.flow is not None and not st.flow.displacement.is_finite():
        return "nonfinite"
    if min_slope(U.u) < -thresholds.slope_limit:
        return "slope"
    if tail_energy_fraction(U.u) > thresholds.tail_fraction_limit:
        return "tail"
    return None


def advance(st0, p, cfg, thresholds=None, rhs=coupled_rhs, sample_hook=None):
    """Step from st0 until t_end or blow-up, sampling every `sample_every` steps.

    Blow-up is recorded in the termination, never raised; every emitted
    sample is finite.  Deterministic for fixed inputs.
    """
    if thresholds is None:
        thresholds = BlowupThresholds()
    if st0.U.alpha != p.alpha:
        raise ConfigError(
            f"state alpha {st0.U.alpha} does not match model alpha {p.alpha}")

    times, states, series = [], [], {}

    def record(st):
        times.append(st.t)
        states.append(st)
        if sample_hook is not None:
            sample_hook(st)

    reason = detect_blowup(st0, thresholds)
    if reason != "nonfinite":
        record(st0)
    if reason is not None:
        return Trajectory(times, states, Termination("blowup", st0.t, reason), series)

    n_steps = max(1, int(round(cfg.t_end / cfg.dt)))
    if not math.isclose(n_steps * cfg.dt, cfg.t_end, rel_tol=1e-9):
        n_steps = int(math.ceil(cfg.t_end / cfg.dt - 1e-9))

    st = st0
    for i in range(1, n_steps + 1):
        try:
            st = rk4_step(rhs, st, cfg.dt, p)
        except EvaluationError:
            return Trajectory(times, states,
                              Termination("blowup", st.t + cfg.dt, "nonfinite"),
                              series)
        reason = detect_blowup(st, thresholds)
        if reason == "nonfinite":
            return Trajectory(times, states,
                              Termination("blowup", st.t, reason), series)
        if reason is not None or i % cfg.sample_every == 0 or i == n_steps:
            record(st)
        if reason is not None:
            return Trajectory(times, states,
                              Termination("blowup", st.t, reason), series)
    return Trajectory(times, states, Termination("completed", st.t), series)


@dataclass
class OrderProbeResult:
    dts: list
    errors: list
    pair_orders: list
    order: Optional[float]
    conclusive: bool
    note: str = ""


def _state_distance(a, b):
    return max(sup_norm(a.U.u - b.U.u), sup_norm(a.U.rho - b.U.rho))


def order_probe(preset, dt_list, t_end=1.0):
    """Measure the integrator's temporal convergence order on a smooth preset.

    Runs the preset at each step size to the same horizon, measures final-state
    errors against the finest-dt member, and estimates the order from
    successive step-size pairs.  Non-monotone errors yield an inconclusive
    report rather than an order.
    """
    from .config import resolve_config, initial_state  # deferred: avoids import cycle

    if len(dt_list) < 3:
        raise ConfigError("order probe needs at least 3 step sizes")
    dts = sorted((float(dt) for dt in dt_list), reverse=True)
    for dt in dts:
        if abs(round(t_end / dt) * dt - t_end) > 1e-9 * t_end:
            raise ConfigError(f"t_end = {t_end} is not an integer multiple of dt = {dt}")

    cfg = resolve_config(preset if isinstance(preset, dict) else {"preset": preset})
    finals = []
    for dt in dts:
        st0 = initial_state(cfg, with_flow=False)
        stepper = StepperConfig(dt=dt, t_end=t_end, sample_every=10 ** 9)
        traj = advance(st0, cfg.model, stepper, cfg.thresholds)
        if not traj.completed:
            return OrderProbeResult(dts, [], [], None, False,
                                    f"run at dt={dt} terminated: {traj.termination.reason}")
        finals.append(traj.states[-1])

    reference = finals[-1]
    errors = [_state_distance(st, reference) for st in finals[:-1]]
    if any(e <= 0 for e in errors) or any(errors[i] <= errors[i + 1]
                                          for i in range(len(errors) - 1)):
        return OrderProbeResult(dts, errors, [], None, False,
                                "errors are not strictly decreasing")
    pair_orders = [
        math.log(errors[i] / errors[i + 1]) / math.log(dts[i] / dts[i + 1])
        for i in range(len(errors) - 1)
    ]
    return OrderProbeResult(dts, errors, pair_orders,
                            float(np.mean(pair_orders)), True)
