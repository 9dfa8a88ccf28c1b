"""Experiment orchestration: analysis documents, runs, reproduction, sweeps.

This module glues the library together for the command line: it turns a
configuration into an analysis document (equilibria, stability classes,
weight window, global verdict), runs the configured simulation with its
monitors, reproduces the built-in reference sets with explicit
computed-versus-reported comparisons, and emits CSV/JSON artifacts.

All floats in CSV files are written with 17 significant digits so that
parsing them back reproduces the exact binary values.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import tables
from .config import ExperimentConfig, config_to_dict, parse_profile
from .equilibria import basic_reproduction_number, find_endemic
from .lyapunov import (
    DISEASE_FREE,
    ENDEMIC,
    LyapunovSeries,
    MonotonicityReport,
    disease_free_functional,
    endemic_functional,
    monotonicity_check,
)
from .ode import OdeTrajectory, RegionReport, integrate_ode, invariant_region_check
from .pde import (
    BoundednessReport,
    Field1D,
    PdeSnapshot,
    boundedness_check,
    integrate_pde,
)
from .stability import NeumannSpectrum, stability_report, theta_window
from .tables import (
    EQUILIBRIUM_TOL,
    ODE_CONVERGENCE_TOL,
    PDE_CONVERGENCE_TOL,
    R0_TOL,
    THETA_HI_TOL,
    THETA_LO_TOL,
    ReferenceSet,
)

WORKERS_ENV = "SISRD_WORKERS"

VERDICT_ENDEMIC = "E* globally asymptotically stable (Thm G2)"
VERDICT_DISEASE_FREE = "E0 globally asymptotically stable (Thm G1)"
VERDICT_LOCAL_ONLY = "E0 locally stable; Thm G1 condition not met"


def worker_count() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        try:
            count = int(value)
            if count > 0:
                return count
        except ValueError:
            pass
    return os.cpu_count() or 1


def _fmt(value) -> str:
    return "" if value is None else format(float(value), ".17g")


# ---------------------------------------------------------------------------
# Analysis documents.

def analyze(config: ExperimentConfig) -> dict:
    """Equilibria, stability classes, weight window and global verdict.

    Deterministic: identical configurations produce identical documents.
    """
    params, spec = config.params, config.incidence
    r0 = basic_reproduction_number(params, spec)
    report = stability_report(params, spec, spectrum=NeumannSpectrum.interval(config.L))
    endemic = find_endemic(params, spec)
    window = report.theta_window

    if r0 > 1.0:
        verdict = VERDICT_ENDEMIC
    elif window is not None:
        verdict = VERDICT_DISEASE_FREE
    else:
        verdict = VERDICT_LOCAL_ONLY

    return {
        "R0": float(r0),
        "disease_free": [float(params.Lambda / params.mu), 0.0],
        "endemic": [float(endemic[0]), float(endemic[1])] if endemic else None,
        "ode_stability": {
            "disease_free": report.ode_disease_free,
            "endemic": report.ode_endemic,
        },
        "pde_stability": {
            "disease_free": report.pde_disease_free,
            "endemic": report.pde_endemic,
        },
        "theta_window": [float(window[0]), float(window[1])] if window else None,
        "verdict": verdict,
    }


def analysis_json(config: ExperimentConfig) -> str:
    return json.dumps(analyze(config), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# Running one configured simulation with monitors.

@dataclass(frozen=True)
class SimulationResult:
    config: ExperimentConfig
    analysis: dict
    trajectory: Optional[OdeTrajectory]
    snapshots: Optional[list[PdeSnapshot]]
    lyapunov_series: Optional[LyapunovSeries]
    lyapunov_skipped: Optional[str]
    theta_used: Optional[float]
    region_report: Optional[RegionReport]
    bounds_report: Optional[BoundednessReport]
    monotonicity: Optional[MonotonicityReport]
    predicted_attractor: tuple[float, float]
    final_distance: float
    converged: bool

    @property
    def monitors_passed(self) -> bool:
        checks = [
            report.passed
            for report in (self.region_report, self.bounds_report, self.monotonicity)
            if report is not None
        ]
        return all(checks)


def initial_field(L: float, n: int, value: Union[float, str]) -> Field1D:
    if isinstance(value, str):
        return Field1D.from_callable(L, n, parse_profile(value))
    return Field1D.constant(L, n, float(value))


def _monitor_theta(config: ExperimentConfig) -> Optional[float]:
    """Weight used by the disease-free monitor: the window's lower end.

    The lower end has the strongest slack in the slope condition while
    keeping the gradient form positive; configurations may override it
    with an explicit number.
    """
    if config.monitors.theta != "auto":
        return float(config.monitors.theta)
    try:
        window = theta_window(config.params, config.incidence)
    except ValueError:
        return None
    return window[0] if window else None


def run_simulation(config: ExperimentConfig, accelerate: bool = True) -> SimulationResult:
    """Integrate the configured system and evaluate every requested monitor."""
    params, spec = config.params, config.incidence
    analysis = analyze(config)
    r0 = analysis["R0"]
    endemic = analysis["endemic"]
    predicted = tuple(endemic) if r0 > 1.0 else tuple(analysis["disease_free"])

    trajectory = None
    snapshots = None
    region = None
    bounds = None

    if config.mode == "ode":
        trajectory = integrate_ode(
            params, spec, float(config.u0), float(config.v0),
            t_end=config.t_end, dt=config.dt or 1e-3, stride=config.stride,
        )
        if config.monitors.invariant_region:
            region = invariant_region_check(trajectory, params)
        distances = np.maximum(
            np.abs(trajectory.u - predicted[0]), np.abs(trajectory.v - predicted[1])
        )
        final_distance = float(distances[-1])
        tail = max(1, len(trajectory) // 10)
        converged = bool(np.all(distances[-tail:] < ODE_CONVERGENCE_TOL))
        times, states_u, states_v = trajectory.t, trajectory.u, trajectory.v
        states_are_fields = False
    else:
        u0 = initial_field(config.L, config.n, config.u0)
        v0 = initial_field(config.L, config.n, config.v0)
        snapshots = integrate_pde(
            params, spec, u0, v0,
            t_end=config.t_end, snapshot_every=config.snapshot_every,
            dt=config.dt, accelerate=accelerate,
        )
        if config.monitors.boundedness:
            bounds = boundedness_check(snapshots, params, u0, v0)
        last = snapshots[-1]
        final_distance = float(
            max(
                np.max(np.abs(last.u.values - predicted[0])),
                np.max(np.abs(last.v.values - predicted[1])),
            )
        )
        converged = final_distance < PDE_CONVERGENCE_TOL
        times = np.array([snap.t for snap in snapshots])
        states_u = [snap.u for snap in snapshots]
        states_v = [snap.v for snap in snapshots]
        states_are_fields = True

    series = None
    skipped = None
    theta_used = None
    monotone = None
    if config.monitors.lyapunov:
        try:
            if r0 > 1.0:
                values = [
                    endemic_functional(u if states_are_fields else float(u),
                                       v if states_are_fields else float(v), predicted)
                    for u, v in zip(states_u, states_v)
                ]
                series = LyapunovSeries(times, np.array(values), ENDEMIC)
            else:
                theta_used = _monitor_theta(config)
                if theta_used is None:
                    skipped = "weight window is empty; the disease-free certificate does not apply"
                else:
                    values = [
                        disease_free_functional(u if states_are_fields else float(u),
                                                v if states_are_fields else float(v),
                                                params, theta_used)
                        for u, v in zip(states_u, states_v)
                    ]
                    series = LyapunovSeries(times, np.array(values), DISEASE_FREE, theta=theta_used)
        except ValueError as exc:
            skipped = f"not applicable: {exc}"
        if series is not None:
            monotone = monotonicity_check(series)

    return SimulationResult(
        config=config,
        analysis=analysis,
        trajectory=trajectory,
        snapshots=snapshots,
        lyapunov_series=series,
        lyapunov_skipped=skipped,
        theta_used=theta_used,
        region_report=region,
        bounds_report=bounds,
        monotonicity=monotone,
        predicted_attractor=predicted,
        final_distance=final_distance,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# CSV / JSON artifacts.

def write_ode_csv(path, trajectory: OdeTrajectory, series: Optional[LyapunovSeries]) -> None:
    """Trajectory schema: t,u,v,N,V_theta,V_endemic (blank when not applicable)."""
    theta_col = series.values if (series is not None and series.kind == DISEASE_FREE) else None
    endemic_col = series.values if (series is not None and series.kind == ENDEMIC) else None
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,u,v,N,V_theta,V_endemic\n")
        for i in range(len(trajectory)):
            row = [
                _fmt(trajectory.t[i]),
                _fmt(trajectory.u[i]),
                _fmt(trajectory.v[i]),
                _fmt(trajectory.u[i] + trajectory.v[i]),
                _fmt(theta_col[i]) if theta_col is not None else "",
                _fmt(endemic_col[i]) if endemic_col is not None else "",
            ]
            fh.write(",".join(row) + "\n")


def write_pde_csv(path, snapshots: Sequence[PdeSnapshot]) -> None:
    """Snapshot schema (long format): t,x,u,v."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,x,u,v\n")
        for snap in snapshots:
            x = snap.u.x
            for i in range(snap.u.n):
                fh.write(
                    f"{_fmt(snap.t)},{_fmt(x[i])},{_fmt(snap.u.values[i])},{_fmt(snap.v.values[i])}\n"
                )


def read_csv(path) -> dict[str, list]:
    """Parse a CSV written by this module; floats round-trip exactly."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        columns = {name: [] for name in header}
        for line in fh:
            cells = line.rstrip("\n").split(",")
            for name, cell in zip(header, cells):
                columns[name].append(float(cell) if cell else None)
    return columns


def _monitor_documents(result: SimulationResult) -> dict:
    docs = {}
    if result.region_report is not None:
        docs["invariant_region"] = asdict(result.region_report)
    if result.bounds_report is not None:
        docs["boundedness"] = asdict(result.bounds_report)
    if result.monotonicity is not None:
        lyap = asdict(result.monotonicity)
        lyap["kind"] = result.lyapunov_series.kind
        if result.theta_used is not None:
            lyap["theta"] = result.theta_used
        docs["lyapunov"] = lyap
    elif result.lyapunov_skipped is not None:
        docs["lyapunov"] = {"skipped": True, "reason": result.lyapunov_skipped}
    return docs


def summary_document(result: SimulationResult) -> dict:
    return {
        "config": config_to_dict(result.config),
        "analysis": result.analysis,
        "simulation": {
            "mode": result.config.mode,
            "t_end": result.config.t_end,
            "predicted_attractor": list(result.predicted_attractor),
            "final_distance": result.final_distance,
            "converged": bool(result.converged),
        },
        "monitors": _monitor_documents(result),
    }


def write_summary(path, document: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_artifacts(result: SimulationResult, out_dir, prefix: str) -> dict[str, str]:
    """Write trajectory/snapshot CSV plus the summary JSON; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    if result.trajectory is not None:
        csv_path = out / f"{prefix}_trajectory.csv"
        write_ode_csv(csv_path, result.trajectory, result.lyapunov_series)
        paths["trajectory"] = str(csv_path)
    if result.snapshots is not None:
        csv_path = out / f"{prefix}_snapshots.csv"
        write_pde_csv(csv_path, result.snapshots)
        paths["snapshots"] = str(csv_path)
    summary_path = out / f"{prefix}_summary.json"
    paths["summary"] = str(summary_path)
    return paths


# ---------------------------------------------------------------------------
# Reproducing the built-in reference sets.

def config_for_set(row: ReferenceSet) -> ExperimentConfig:
    if row.mode == tables.ODE:
        return ExperimentConfig(
            params=row.params,
            incidence=row.incidence,
            mode="ode",
            u0=row.u0,
            v0=row.v0,
            t_end=tables.ODE_T_END,
            dt=tables.ODE_DT,
            label=row.label,
        )
    return ExperimentConfig(
        params=row.params,
        incidence=row.incidence,
        mode="pde",
        u0=row.u0,
        v0=row.v0,
        L=tables.DOMAIN_LENGTH,
        n=tables.GRID_POINTS,
        t_end=tables.PDE_T_END,
        dt=None,
        snapshot_every=tables.SNAPSHOT_EVERY,
        label=row.label,
    )


def _comparison(quantity, computed, expected, tol, note=None, annotated=False) -> dict:
    if annotated:
        passed = True
    elif isinstance(computed, (list, tuple)):
        passed = all(abs(c - e) <= tol for c, e in zip(computed, expected))
    else:
        passed = abs(computed - expected) <= tol
    return {
        "quantity": quantity,
        "computed": list(computed) if isinstance(computed, (list, tuple)) else float(computed),
        "expected": list(expected) if isinstance(expected, (list, tuple)) else float(expected),
        "tolerance": float(tol),
        "passed": bool(passed),
        "annotated": bool(annotated),
        "note": note,
    }


def compare_to_reported(row: ReferenceSet, result: SimulationResult) -> list[dict]:
    """Computed-versus-reported comparisons for one reference row."""
    analysis = result.analysis
    comps = [
        _comparison("R0", analysis["R0"], row.reported_R0, R0_TOL,
                    note=row.notes[0] if row.notes and row.table == 1 else None),
    ]
    if row.attractor == "endemic":
        comps.append(
            _comparison("endemic_equilibrium", analysis["endemic"], list(row.reported_point),
                        EQUILIBRIUM_TOL)
        )
    else:
        comps.append(
            _comparison("disease_free_equilibrium", analysis["disease_free"],
                        list(row.reported_point), 1e-9)
        )
    if row.reported_theta is not None:
        window = analysis["theta_window"]
        if window is None:
            comps.append(_comparison("theta_lower", float("nan"), row.reported_theta[0], 0.0,
                                     note="window empty"))
        else:
            comps.append(
                _comparison("theta_lower", window[0], row.reported_theta[0], THETA_LO_TOL)
            )
            note = None
            annotated = False
            if row.theta_upper_annotated:
                annotated = True
                note = (
                    f"documented discrepancy: computed {window[1]!r} vs reported "
                    f"{row.reported_theta[1]!r} (difference "
                    f"{abs(window[1] - row.reported_theta[1]):.2e})"
                )
            comps.append(
                _comparison("theta_upper", window[1], row.reported_theta[1], THETA_HI_TOL,
                            note=note, annotated=annotated)
            )
    conv_tol = ODE_CONVERGENCE_TOL if row.mode == tables.ODE else PDE_CONVERGENCE_TOL
    comps.append(
        _comparison("final_distance_to_attractor", result.final_distance, 0.0, conv_tol)
    )
    return comps


@dataclass(frozen=True)
class ReproduceResult:
    row: ReferenceSet
    result: SimulationResult
    comparisons: list[dict]
    artifact_paths: dict[str, str]

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.comparisons) and self.result.monitors_passed


def reproduce(table: int, key: str, out_dir, accelerate: bool = True) -> ReproduceResult:
    """Run one reference set and write its artifacts and comparisons."""
    row = tables.get_set(table, key)
    result = run_simulation(config_for_set(row), accelerate=accelerate)
    comparisons = compare_to_reported(row, result)
    paths = write_artifacts(result, out_dir, prefix=row.label)
    document = summary_document(result)
    document["reference"] = {
        "table": row.table,
        "set": row.key,
        "reported_R0": row.reported_R0,
        "reported_point": list(row.reported_point),
        "reported_theta": list(row.reported_theta) if row.reported_theta else None,
        "notes": list(row.notes),
    }
    document["comparison"] = comparisons
    write_summary(paths["summary"], document)
    return ReproduceResult(row, result, comparisons, paths)


def reproduce_many(rows: Sequence[ReferenceSet], out_dir, workers: Optional[int] = None,
                   accelerate: bool = True) -> list[ReproduceResult]:
    """Reproduce several sets concurrently; results keep the input order."""
    workers = workers or worker_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(
            pool.map(lambda row: reproduce(row.table, row.key, out_dir, accelerate), rows)
        )


# ---------------------------------------------------------------------------
# Parameter sweeps.

SWEEPABLE_PARAMS = ("Lambda", "mu", "lam", "sigma", "d1", "d2")


def _config_with_value(config: ExperimentConfig, name: str, value: float) -> ExperimentConfig:
    if name in SWEEPABLE_PARAMS:
        return config.with_params(replace(config.params, **{name: float(value)}))
    if hasattr(config.incidence, name) and name in ("alpha", "k"):
        return replace(config, incidence=replace(config.incidence, **{name: float(value)}))
    raise ValueError(
        f"invalid parameter name {name!r}; expected one of {SWEEPABLE_PARAMS} "
        "or an incidence coefficient (alpha, k)"
    )


def _sweep_row(config: ExperimentConfig, name: str, value: float) -> dict:
    analysis = analyze(_config_with_value(config, name, value))
    endemic = analysis["endemic"]
    window = analysis["theta_window"]
    return {
        "param": name,
        "value": float(value),
        "R0": analysis["R0"],
        "E0_u": analysis["disease_free"][0],
        "E0_v": 0.0,
        "endemic_u": endemic[0] if endemic else None,
        "endemic_v": endemic[1] if endemic else None,
        "ode_disease_free": analysis["ode_stability"]["disease_free"],
        "ode_endemic": analysis["ode_stability"]["endemic"],
        "theta_lo": window[0] if window else None,
        "theta_hi": window[1] if window else None,
        "verdict": analysis["verdict"],
    }


def sweep(config: ExperimentConfig, name: str, values: Sequence[float],
          workers: Optional[int] = None) -> list[dict]:
    """Analyze the model at each parameter value; rows keep the input order."""
    for value in values:
        if not np.isfinite(value):
            raise ValueError(f"sweep values must be finite, got {value}")
    _config_with_value(config, name, values[0] if len(values) else 1.0)  # validate name
    workers = workers or worker_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda value: _sweep_row(config, name, value), values))


SWEEP_COLUMNS = (
    "param", "value", "R0", "E0_u", "E0_v", "endemic_u", "endemic_v",
    "ode_disease_free", "ode_endemic", "theta_lo", "theta_hi", "verdict",
)


def write_sweep_csv(path, rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            cells = []
            for col in SWEEP_COLUMNS:
                value = row.get(col)
                if value is None:
                    cells.append("")
                elif isinstance(value, str):
                    cells.append(value)
                else:
                    cells.append(_fmt(value))
            fh.write(",".join(cells) + "\n")
