"""chflow: pseudospectral two-component Camassa-Holm solver and verifier.

The package is organized in layers:

- :mod:`chflow.spectral`: periodic grid, transforms, Fourier-multiplier operators
- :mod:`chflow.algebra`: metric, inertia operator, ad / ad^T / B
- :mod:`chflow.dynamics`: momentum-form and geodesic-form right-hand sides
- :mod:`chflow.stepping`: RK4 advancement, blow-up detection, order probes
- :mod:`chflow.diagnostics`: conservation / invariant / bound monitors
- :mod:`chflow.checks`: the operator-identity self-test suite
- :mod:`chflow.config` / :mod:`chflow.cli`: configs, presets, command line
"""

__version__ = "0.1.0"

from .errors import ChflowError, ConfigError, DegenerateMetricError, EvaluationError
from .spectral import (PeriodicGrid, SpectralField, MultiplierSymbol,
                       multiplier_symbol, to_spectral, to_physical, derivative,
                       apply_power, sobolev_norm_sq, circle_integral,
                       dealiased_product, interpolate, sup_norm,
                       oversampled_samples)
from .algebra import (AlgebraElement, DualElement, MetricParams, inner_product,
                      metric_norm_sq, inertia_apply, inertia_invert, ad,
                      ad_transpose, bilinear_B)
from .dynamics import (ModelParams, State, FlowMap, StateDeriv, rhs_direct,
                       rhs_geodesic, rhs_flowmap, coupled_rhs)
from .stepping import (StepperConfig, BlowupThresholds, Termination,
                       Trajectory, rk4_step, advance, detect_blowup,
                       order_probe, OrderProbeResult, tail_energy_fraction,
                       min_slope)
from .diagnostics import (metric_norm_drift, mean_velocity_drift,
                          lagrangian_invariant, rho_positivity, stretch_bound,
                          sobolev_ladder, apriori_check, AprioriResult,
                          StretchBoundResult, DiagnosticReport,
                          DiagnosticTolerances, build_report, state_scalars)
from .config import (SimulationConfig, PRESETS, parse_config, resolve_config,
                     build_initial_condition, initial_state)
from .cli import run_simulate, run_check, run_sweep, main
