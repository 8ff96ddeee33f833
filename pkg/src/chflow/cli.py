"""Command-line front end: simulate / check / sweep.

Exit codes: 0 success, 1 configuration or operational error, 2 detected
blow-up (a mathematically meaningful outcome, not a failure).  Output files
use shortest round-trip decimal formatting and are byte-deterministic for a
given configuration.
"""

import argparse
import itertools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import SimulationConfig, initial_state, parse_config, resolve_config
from .checks import run_all
from .diagnostics import build_report
from .dynamics import ModelParams
from .errors import ChflowError, ConfigError
from .spectral import apply_power
from .stepping import advance


def _fmt(value):
    return repr(float(value))


def _write_trajectory_csv(path, traj, report):
    columns = ["t", "metric_norm_sq", "metric_drift", "mean_u", "min_rho",
               "sup_ux", "min_ux", "lagrangian_dev", "stretch_ratio",
               "ladder_k0", "ladder_k1", "tail_fraction"]
    series = report.series
    lines = [",".join(columns)]
    for i in range(len(traj.times)):
        row = []
        for name in columns:
            values = series.get(name)
            if values is None or i >= len(values):
                row.append("")     # monitor not available (no flow map / truncated)
            else:
                row.append(_fmt(values[i]))
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _write_snapshots(out_dir, traj, cfg):
    if cfg.snapshot_every <= 0:
        return
    steps = [int(round(t / cfg.stepper.dt)) for t in traj.times]
    for step, st in zip(steps, traj.states):
        if step % cfg.snapshot_every != 0:
            continue
        m = apply_power(st.U.u, cfg.model.s)
        lines = ["x,u,rho,m"]
        grid = st.U.grid
        for j in range(grid.n):
            lines.append(",".join([_fmt(grid.points[j]), _fmt(st.U.u.samples[j]),
                                   _fmt(st.U.rho.samples[j]), _fmt(m.samples[j])]))
        (out_dir / f"fields_{step:06d}.csv").write_text("\n".join(lines) + "\n")


def _summary_payload(cfg, traj, report):
    return {
        "engine": {"name": "chflow", "version": __version__},
        "config": cfg.to_dict(),
        "termination": traj.termination.as_dict(),
        "extremes": report.extremes,
        "passes": report.passes,
    }


def run_simulate(cfg, out_dir=None):
    """Run one simulation; writes trajectory.csv, summary.json and snapshots.

    Returns 0 on completion, 2 on detected blow-up.
    """
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    st0 = initial_state(cfg)
    traj = advance(st0, cfg.model, cfg.stepper, cfg.thresholds)
    report = build_report(traj, cfg.model)

    out.mkdir(parents=True, exist_ok=True)
    _write_trajectory_csv(out / "trajectory.csv", traj, report)
    _write_snapshots(out, traj, cfg)
    payload = _summary_payload(cfg, traj, report)
    (out / "summary.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0 if traj.completed else 2


def run_check(stream=None):
    """Run the operator-identity and property suite; 0 iff everything passes."""
    stream = stream if stream is not None else sys.stdout
    results = run_all()
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        verdict = "PASS" if r.passed else "FAIL"
        all_ok &= r.passed
        stream.write(f"{r.name:<{width}}  defect {r.defect:9.3e}  "
                     f"tol {r.tolerance:9.3e}  {verdict}\n")
    stream.write("all checks passed\n" if all_ok else "CHECK FAILURES\n")
    return 0 if all_ok else 1


def _sweep_cells(cfg):
    if not cfg.sweep:
        raise ConfigError("sweep requires a non-empty 'sweep' section")
    base = {"s": cfg.model.s, "a": cfg.model.a,
            "kappa": cfg.model.kappa, "alpha": cfg.model.alpha}
    axes = {}
    for key in ("s", "a", "kappa", "alpha"):
        values = cfg.sweep.get(key, [base[key]])
        if not values:
            raise ConfigError(f"sweep.{key} is an empty list")
        axes[key] = values
    cells = [dict(zip(axes, combo)) for combo in itertools.product(*axes.values())]
    if not cells:
        raise ConfigError("sweep grid is empty")
    return cells


def _run_cell(cfg, cell):
    params = {"s": cell["s"], "a": cell["a"],
              "kappa": cell["kappa"], "alpha": cell["alpha"]}
    try:
        model = ModelParams(a=cell["a"], kappa=cell["kappa"],
                            alpha=cell["alpha"], s=cell["s"])
        cell_cfg = replace(cfg, model=model, sweep=None)
        traj = advance(initial_state(cell_cfg), model, cell_cfg.stepper,
                       cell_cfg.thresholds)
        report = build_report(traj, model)
        return {
            "params": params,
            "termination": traj.termination.as_dict(),
            "t_star": traj.termination.time,
            "max_metric_drift": report.extremes["max_metric_drift"],
            "max_sup_ux": report.extremes["max_sup_ux"],
        }
    except ChflowError as exc:
        return {"params": params, "error": str(exc)}


def run_sweep(cfg, out_dir=None, jobs=1):
    """Run the parameter-grid sweep; one JSONL line per cell, in grid order."""
    cells = _sweep_cells(cfg)
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda cell: _run_cell(cfg, cell), cells))
    else:
        rows = [_run_cell(cfg, cell) for cell in cells]
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.jsonl", "w") as fh:   # single serialized writer
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return 0


def _load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="chflow",
        description="Pseudospectral two-component Camassa-Holm solver and verifier")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one simulation from a JSON config")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=None, help="output directory")

    sub.add_parser("check", help="run the operator-identity and property suite")

    p_sweep = sub.add_parser("sweep", help="run a parameter-grid sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", default=None, help="output directory")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return run_simulate(_load_config(args.config), out_dir=args.out)
        if args.command == "check":
            return run_check()
        return run_sweep(_load_config(args.config), out_dir=args.out,
                         jobs=args.jobs)
    except ChflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
