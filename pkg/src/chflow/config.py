"""Run configuration: JSON parsing, named presets, initial-condition assembly."""

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import AlgebraElement
from .dynamics import FlowMap, ModelParams, State
from .errors import ConfigError
from .spectral import PeriodicGrid, SpectralField, to_spectral, to_physical, _dealias_keep_mask
from .stepping import BlowupThresholds, StepperConfig

TWO_PI = 2.0 * math.pi

#: shipped initial-value problems; a config may name one via {"preset": name}
#: and override any section on top of it
PRESETS = {
    # single-mode velocity with the H^1 metric: breaks in finite time.
    # On the dealiased band the discrete system is conservative, so breaking
    # saturates near the band-limited slope ceiling (~36 at n = 256) instead
    # of diverging; the preset therefore ships a slope limit of 30, just
    # under 5x the initial max slope 2*pi, which the globally smooth s = 2
    # twin never approaches.
    "ch_breaking": {
        "grid": {"n": 256},
        "model": {"a": 2.0, "kappa": 0.0, "alpha": 0.0, "s": 1.0},
        "initial": {"kind": "single_mode", "target": "u",
                    "amplitude": 1.0, "wavenumber": 1},
        "stepper": {"dt": 1e-3, "t_end": 20.0, "sample_every": 10},
        "thresholds": {"slope_limit": 30.0},
        "flow_map": False,
    },
    # identical data under the s = 2 metric: globally smooth
    "global_s2": {
        "grid": {"n": 256},
        "model": {"a": 2.0, "kappa": 0.0, "alpha": 0.0, "s": 2.0},
        "initial": {"kind": "single_mode", "target": "u",
                    "amplitude": 1.0, "wavenumber": 1},
        "stepper": {"dt": 5e-4, "t_end": 10.0, "sample_every": 20},
        "thresholds": {"slope_limit": 30.0},
        "flow_map": False,
    },
    # two-component smooth run with strictly positive density and flow map.
    # The velocity amplitude 0.15 keeps the marker-compression rate (= sup
    # |u0_x|) small enough that the transported density stays inside the
    # dealiased band across the shipped horizons; at s = 2 the inertia
    # operator damps the kappa*rho*rho_x pressure response ~1600-fold, so
    # larger amplitudes compress the density below grid scale within t ~ 1.
    "twocomp_smooth": {
        "grid": {"n": 256},
        "model": {"a": 2.0, "kappa": 1.0, "alpha": 0.0, "s": 2.0},
        "initial": {"kind": "fourier_list",
                    "u": [[1, 0.075, 0.0]],
                    "rho": [[0, 2.0, 0.0], [1, 0.0, -0.25]]},
        "stepper": {"dt": 1e-3, "t_end": 5.0, "sample_every": 10},
        "flow_map": True,
    },
}

_TOP_KEYS = {"preset", "grid", "model", "stepper", "thresholds", "initial",
             "flow_map", "output", "sweep"}
_GRID_KEYS = {"n"}
_MODEL_KEYS = {"a", "kappa", "alpha", "s"}
_STEPPER_KEYS = {"dt", "t_end", "sample_every"}
_THRESHOLD_KEYS = {"slope_limit", "tail_fraction_limit"}
_OUTPUT_KEYS = {"dir", "snapshot_every"}
_SWEEP_KEYS = {"s", "a", "kappa", "alpha"}


@dataclass
class SimulationConfig:
    n: int
    model: ModelParams
    stepper: StepperConfig
    thresholds: BlowupThresholds
    initial: list
    flow_map: bool
    out_dir: str
    snapshot_every: int
    sweep: Optional[dict] = None

    def to_dict(self):
        """Fully-defaulted echo of the configuration actually used."""
        d = {
            "grid": {"n": self.n},
            "model": {"a": self.model.a, "kappa": self.model.kappa,
                      "alpha": self.model.alpha, "s": self.model.s},
            "stepper": {"dt": self.stepper.dt, "t_end": self.stepper.t_end,
                        "sample_every": self.stepper.sample_every},
            "thresholds": {"slope_limit": self.thresholds.slope_limit,
                           "tail_fraction_limit": self.thresholds.tail_fraction_limit},
            "initial": self.initial,
            "flow_map": self.flow_map,
            "output": {"dir": self.out_dir, "snapshot_every": self.snapshot_every},
        }
        if self.sweep is not None:
            d["sweep"] = self.sweep
        return d


def _reject_unknown(mapping, allowed, where):
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(unknown)}")


def _merge(base, override):
    out = dict(base)
    for key, value in override.items():
        if key in out and isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def resolve_config(raw):
    """Validate a raw config mapping and fill defaults; raises ConfigError."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "config")
    if "preset" in raw:
        name = raw["preset"]
        if name not in PRESETS:
            raise ConfigError(
                f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
        merged = _merge(PRESETS[name], {k: v for k, v in raw.items() if k != "preset"})
        return resolve_config(merged)

    grid = dict(raw.get("grid", {}))
    _reject_unknown(grid, _GRID_KEYS, "grid")
    n = int(grid.get("n", 256))
    if n < 8 or n % 2 != 0:
        raise ConfigError(f"n must be even and >= 8, got {n}")

    if "model" not in raw:
        raise ConfigError("config requires a 'model' section (or a 'preset')")
    model_raw = dict(raw["model"])
    _reject_unknown(model_raw, _MODEL_KEYS, "model")
    for key in _MODEL_KEYS:
        if key not in model_raw:
            raise ConfigError(f"model.{key} is required")
    model = ModelParams(a=float(model_raw["a"]), kappa=float(model_raw["kappa"]),
                        alpha=float(model_raw["alpha"]), s=float(model_raw["s"]))

    stepper_raw = dict(raw.get("stepper", {}))
    _reject_unknown(stepper_raw, _STEPPER_KEYS, "stepper")
    stepper = StepperConfig(dt=float(stepper_raw.get("dt", 1e-3)),
                            t_end=float(stepper_raw.get("t_end", 1.0)),
                            sample_every=int(stepper_raw.get("sample_every", 10)))

    thr_raw = dict(raw.get("thresholds", {}))
    _reject_unknown(thr_raw, _THRESHOLD_KEYS, "thresholds")
    thresholds = BlowupThresholds(
        slope_limit=float(thr_raw.get("slope_limit", 1e3)),
        tail_fraction_limit=float(thr_raw.get("tail_fraction_limit", 0.1)))

    initial = _normalize_initial(raw.get("initial"), n)

    output_raw = dict(raw.get("output", {}))
    _reject_unknown(output_raw, _OUTPUT_KEYS, "output")
    out_dir = str(output_raw.get("dir", "."))
    snapshot_every = int(output_raw.get("snapshot_every", 0))
    if snapshot_every < 0:
        raise ConfigError("output.snapshot_every must be >= 0")

    sweep = None
    if "sweep" in raw:
        sweep_raw = dict(raw["sweep"])
        _reject_unknown(sweep_raw, _SWEEP_KEYS, "sweep")
        sweep = {key: [float(v) for v in values]
                 for key, values in sweep_raw.items()}

    return SimulationConfig(n=n, model=model, stepper=stepper,
                            thresholds=thresholds, initial=initial,
                            flow_map=bool(raw.get("flow_map", False)),
                            out_dir=out_dir, snapshot_every=snapshot_every,
                            sweep=sweep)


def parse_config(text):
    """Parse a JSON configuration document into a validated SimulationConfig."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    return resolve_config(raw)


_COMPONENT_KEYS = {
    "single_mode": {"kind", "target", "amplitude", "wavenumber", "phase",
                    "offset_u", "offset_rho"},
    "fourier_list": {"kind", "u", "rho", "offset_u", "offset_rho"},
    "gaussian_bump": {"kind", "target", "center", "width", "amplitude",
                      "offset_u", "offset_rho"},
}


def _normalize_initial(initial, n):
    """Normalize the initial section to a validated list of component specs."""
    if initial is None:
        return []
    specs = initial if isinstance(initial, list) else [initial]
    kmax = n / 3.0
    out = []
    for i, spec in enumerate(specs):
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ConfigError(f"initial[{i}] must be an object with a 'kind'")
        kind = spec["kind"]
        if kind not in _COMPONENT_KEYS:
            raise ConfigError(
                f"initial[{i}].kind must be one of "
                f"{sorted(_COMPONENT_KEYS)}, got {kind!r}")
        _reject_unknown(spec, _COMPONENT_KEYS[kind], f"initial[{i}]")
        spec = dict(spec)
        if kind == "single_mode":
            target = spec.setdefault("target", "u")
            if target not in ("u", "rho"):
                raise ConfigError(f"initial[{i}].target must be 'u' or 'rho'")
            wavenumber = int(spec.setdefault("wavenumber", 1))
            if wavenumber < 0 or wavenumber > kmax:
                raise ConfigError(
                    f"initial[{i}].wavenumber {wavenumber} lies outside the "
                    f"dealiasing band |k| <= n/3 = {kmax:.1f}")
            spec.setdefault("amplitude", 1.0)
            spec.setdefault("phase", 0.0)
        elif kind == "fourier_list":
            for key in ("u", "rho"):
                entries = spec.setdefault(key, [])
                for entry in entries:
                    if len(entry) != 3:
                        raise ConfigError(
                            f"initial[{i}].{key} entries must be [k, re, im]")
                    k = int(entry[0])
                    if k < 0 or k > kmax:
                        raise ConfigError(
                            f"initial[{i}].{key} wavenumber {k} lies outside "
                            f"the dealiasing band |k| <= n/3 = {kmax:.1f}")
                    if k == 0 and float(entry[2]) != 0.0:
                        raise ConfigError(
                            f"initial[{i}].{key}: the k = 0 coefficient must be real")
        else:
            target = spec.setdefault("target", "u")
            if target not in ("u", "rho"):
                raise ConfigError(f"initial[{i}].target must be 'u' or 'rho'")
            width = float(spec.setdefault("width", 0.05))
            if width <= 0:
                raise ConfigError(f"initial[{i}].width must be positive")
            spec.setdefault("center", 0.5)
            spec.setdefault("amplitude", 1.0)
        spec.setdefault("offset_u", 0.0)
        spec.setdefault("offset_rho", 0.0)
        out.append(spec)
    return out


def build_initial_condition(initial, grid, alpha=0.0):
    """Assemble the initial algebra element from normalized component specs.

    Deterministic: fields are built mode-by-mode (trigonometric evaluation)
    or, for bumps, periodized then truncated to the dealiasing band.
    """
    initial = _normalize_initial(initial, grid.n)
    x = grid.points
    u = np.zeros(grid.n)
    rho = np.zeros(grid.n)
    for spec in initial:
        if spec["kind"] == "single_mode":
            wave = (spec["amplitude"]
                    * np.cos(TWO_PI * spec["wavenumber"] * x + spec["phase"]))
            if spec["target"] == "u":
                u = u + wave
            else:
                rho = rho + wave
        elif spec["kind"] == "fourier_list":
            for target, entries in (("u", spec["u"]), ("rho", spec["rho"])):
                acc = np.zeros(grid.n)
                for k, re, im in entries:
                    k, re, im = int(k), float(re), float(im)
                    if k == 0:
                        acc = acc + re
                    else:
                        # c_k = re + i*im together with its conjugate partner
                        acc = acc + 2.0 * (re * np.cos(TWO_PI * k * x)
                                           - im * np.sin(TWO_PI * k * x))
                if target == "u":
                    u = u + acc
                else:
                    rho = rho + acc
        else:
            bump = _periodized_gaussian(grid, spec["center"], spec["width"],
                                        spec["amplitude"])
            if spec["target"] == "u":
                u = u + bump
            else:
                rho = rho + bump
        u = u + spec["offset_u"]
        rho = rho + spec["offset_rho"]
    return AlgebraElement(SpectralField.from_samples(grid, u),
                          SpectralField.from_samples(grid, rho),
                          float(alpha))


def _periodized_gaussian(grid, center, width, amplitude):
    x = grid.points
    values = np.zeros(grid.n)
    reach = max(3, int(math.ceil(6.0 * width)))
    for m in range(-reach, reach + 1):
        values += np.exp(-0.5 * ((x - center - m) / width) ** 2)
    c = to_spectral(amplitude * values)
    c *= _dealias_keep_mask(grid.n)   # band-limit: part of the bump's definition
    return to_physical(c)


def initial_state(cfg, with_flow=None):
    """Materialize the t = 0 state (fields, alpha, optional identity flow map)."""
    grid = PeriodicGrid(cfg.n)
    U0 = build_initial_condition(cfg.initial, grid, alpha=cfg.model.alpha)
    use_flow = cfg.flow_map if with_flow is None else with_flow
    flow = FlowMap.identity(grid) if use_flow else None
    return State(U0, 0.0, flow)
