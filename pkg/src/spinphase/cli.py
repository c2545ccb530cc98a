"""Command-line experiment runner.

Usage:

    spinphase run <scenario> --config params.toml [--seed N] [--out data.csv]

Scenarios compose the library modules into the standard sweeps and
reports; parameters come from a TOML or JSON config file (or defaults),
results go to CSV or JSON, and every written data file is accompanied by
a ``<file>.manifest.json`` recording the effective configuration, seed,
library version and wall time.  The same config and seed always produce
byte-identical data files.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .classical import (
    ANGULAR_SHAPE_ARGMAX,
    ANGULAR_SHAPE_MAX,
    angular_shape,
    circular_phase,
    compare_averaging_conventions,
    derive_seed,
    ensemble_average,
    ensemble_mean_prediction,
    recover_noise_strength,
    z_only_shift,
)
from .dynamics import (
    EvolutionConfig,
    berry_phase_numeric,
    noisy_spin_path,
    noisy_spin_reference,
    precessing_spin_path,
    precessing_spin_reference,
    two_spin_path,
    two_spin_reference,
)
from .errors import ConfigError, SpinPhaseError
from .frames import curve_from_field, solid_angle_phase
from .noise import NoiseStatistics, field_from_noise, sample_noise
from .operators import sho_system, two_spin_system
from .quantum import (
    angular_momentum_composite,
    build_hamiltonian,
    exact_lm_scenario,
    p_minus_lm,
    p_minus_perturbative,
    schmidt,
    spin_phase_from_schmidt,
    spin_phase_perturbative,
    total_system_phase,
    tracked_eigenstate,
)

TWO_PI = 2.0 * np.pi

SCHEMA_VERSION = 1

_REQUIRED = object()


@dataclass
class ScenarioResult:
    """Tabular scenario output plus scenario-level scalars."""

    columns: list
    rows: list
    summary: dict


def _param(params: dict, key: str, cast, default=_REQUIRED):
    if key not in params:
        if default is _REQUIRED:
            raise ConfigError(f"missing required parameter '{key}'")
        return default
    try:
        return cast(params[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for parameter '{key}': {exc}") from exc


def _float_list(value) -> list:
    if not isinstance(value, (list, tuple)):
        raise ValueError("expected a list of numbers")
    return [float(v) for v in value]


def _theta0_values(params: dict, default=None) -> list:
    if "theta0_grid" in params:
        values = _param(params, "theta0_grid", _float_list)
    elif "theta0" in params:
        values = [_param(params, "theta0", float)]
    elif "theta0_points" in params:
        start = _param(params, "theta0_start", float)
        stop = _param(params, "theta0_stop", float)
        points = _param(params, "theta0_points", int)
        if points < 1:
            raise ConfigError("theta0_points must be positive")
        values = np.linspace(start, stop, points).tolist()
    elif default is not None:
        values = [float(v) for v in default]
    else:
        raise ConfigError(
            "specify theta0, theta0_grid, or theta0_start/stop/points"
        )
    for v in values:
        if not 0.0 < v < np.pi:
            raise ConfigError(f"theta0 value {v} outside the open interval (0, pi)")
    return values


def _require_seed(seed, scenario: str) -> int:
    if seed is None:
        raise ConfigError(
            f"scenario '{scenario}' draws random noise; provide a seed via "
            "--seed or the config file"
        )
    return int(seed)


# ---------------------------------------------------------------------------
# Scenario implementations.  Each returns a ScenarioResult.


def _run_classical_sweep(params: dict, seed) -> ScenarioResult:
    seed = _require_seed(seed, "classical-sweep")
    thetas = _theta0_values(params)
    epsilon = _param(params, "epsilon", float)
    sigma = _param(params, "sigma", float, 1.0)
    k_max = _param(params, "k_max", int, 8)
    mode = _param(params, "mode", str, "isotropic3")
    n_realizations = _param(params, "n_realizations", int)
    n_phi = _param(params, "n_phi", int, 1024)
    rows = []
    for i, theta0 in enumerate(thetas):
        stats = NoiseStatistics(
            sigma=sigma, k_max=k_max, mode=mode, seed=derive_seed(seed, i)
        )
        res = ensemble_average(theta0, epsilon, stats, n_realizations, n_phi=n_phi)
        rows.append(
            [
                theta0,
                circular_phase(theta0),
                res.mean_phase,
                res.std_error,
                res.breakdown["first"],
                res.breakdown["second"],
                ensemble_mean_prediction(theta0, epsilon, stats),
                res.mean_sigma_z,
            ]
        )
    return ScenarioResult(
        columns=[
            "theta0",
            "phase_circular",
            "mean_phase",
            "std_error",
            "mean_first_order",
            "mean_second_order",
            "predicted_mean",
            "mean_sigma_z",
        ],
        rows=rows,
        summary={
            "epsilon": epsilon,
            "sigma": sigma,
            "k_max": k_max,
            "mode": mode,
            "n_realizations": n_realizations,
        },
    )


def _run_z_only(params: dict, seed) -> ScenarioResult:
    amplitude = _param(params, "noise_amplitude", float, None)
    if amplitude is not None:
        omega_larmor = _param(params, "omega_larmor", float)
        epsilon = 2.0 * amplitude / omega_larmor
        sigma = 1.0
    else:
        epsilon = _param(params, "epsilon", float)
        sigma = _param(params, "sigma", float, 1.0)
    thetas = _theta0_values(params, default=np.linspace(0.06, 1.53, 25))
    k_max = _param(params, "k_max", int, 8)
    n_realizations = _param(params, "n_realizations", int, 0)
    n_phi = _param(params, "n_phi", int, 1024)
    if n_realizations:
        seed = _require_seed(seed, "z-only-noise")
    rows = []
    for i, theta0 in enumerate(thetas):
        delta_analytic = z_only_shift(theta0, epsilon, sigma**2)
        delta_mc = se = None
        if n_realizations:
            stats = NoiseStatistics(
                sigma=sigma, k_max=k_max, mode="z_only", seed=derive_seed(seed, i)
            )
            res = ensemble_average(
                theta0, epsilon, stats, n_realizations, n_phi=n_phi
            )
            delta_mc = circular_phase(theta0) - res.mean_phase
            se = res.std_error
        rows.append(
            [theta0, float(angular_shape(theta0)), delta_analytic, delta_mc, se]
        )
    deltas = [row[2] for row in rows]
    peak = thetas[int(np.argmax(deltas))] if deltas else None
    return ScenarioResult(
        columns=[
            "theta0",
            "angular_shape",
            "delta_phi_analytic",
            "delta_phi_mc",
            "delta_phi_mc_std_error",
        ],
        rows=rows,
        summary={
            "epsilon": epsilon,
            "sigma": sigma,
            "grid_peak_theta0": peak,
            "shape_argmax": ANGULAR_SHAPE_ARGMAX,
            "shape_max": ANGULAR_SHAPE_MAX,
            "n_realizations": n_realizations,
        },
    )


def _run_noise_recovery(params: dict, seed) -> ScenarioResult:
    delta_phi_max = _param(params, "delta_phi_max", float)
    omega_larmor = _param(params, "omega_larmor", float)
    recovered = recover_noise_strength(delta_phi_max, omega_larmor)
    n_realizations = _param(params, "n_realizations", int, 0)
    round_trip = rel_error = None
    if n_realizations:
        seed = _require_seed(seed, "noise-recovery")
        theta0 = _param(
            params, "theta0", float, float(np.arccos(1.0 / np.sqrt(3.0)))
        )
        k_max = _param(params, "k_max", int, 8)
        n_phi = _param(params, "n_phi", int, 1024)
        epsilon = 2.0 * recovered / omega_larmor
        stats = NoiseStatistics(
            sigma=1.0, k_max=k_max, mode="z_only", seed=derive_seed(seed, 0)
        )
        res = ensemble_average(theta0, epsilon, stats, n_realizations, n_phi=n_phi)
        delta_mc = circular_phase(theta0) - res.mean_phase
        round_trip = recover_noise_strength(max(delta_mc, 0.0), omega_larmor)
        rel_error = abs(round_trip - recovered) / recovered if recovered else None
    return ScenarioResult(
        columns=[
            "delta_phi_max",
            "omega_larmor",
            "recovered_amplitude",
            "round_trip_amplitude",
            "round_trip_rel_error",
        ],
        rows=[[delta_phi_max, omega_larmor, recovered, round_trip, rel_error]],
        summary={"n_realizations": n_realizations},
    )


def _run_aperiodic_check(params: dict, seed) -> ScenarioResult:
    seed = _require_seed(seed, "aperiodic-check")
    theta0 = _param(params, "theta0", float, np.pi / 4)
    epsilon = _param(params, "epsilon", float, 0.05)
    sigma = _param(params, "sigma", float, 1.0)
    k_max = _param(params, "k_max", int, 8)
    n_turns = _param(params, "n_turns", int, 8)
    n_aperiodic = _param(params, "n_aperiodic", int, 1600)
    n_periodic = _param(params, "n_periodic", int, 400)
    n_phi = _param(params, "n_phi", int, 512)
    stats_a = NoiseStatistics(
        sigma=sigma, k_max=k_max, periodic=False, seed=derive_seed(seed, 0)
    )
    res_a = ensemble_average(theta0, epsilon, stats_a, n_aperiodic, n_phi=n_phi)
    stats_p = NoiseStatistics(
        sigma=sigma,
        k_max=k_max,
        n_turns=n_turns,
        seed=derive_seed(seed, 1),
    )
    res_p = ensemble_average(
        theta0, epsilon, stats_p, n_periodic, n_phi=n_phi, n_turns=n_turns
    )
    mean_per_turn = res_p.mean_phase / n_turns
    se_per_turn = res_p.std_error / n_turns
    difference = abs(res_a.mean_phase - mean_per_turn)
    combined = math.sqrt(res_a.std_error**2 + se_per_turn**2)
    row = [
        theta0,
        epsilon,
        n_turns,
        res_a.mean_phase,
        res_a.std_error,
        mean_per_turn,
        se_per_turn,
        difference,
        combined,
        int(difference <= 2.0 * combined),
    ]
    return ScenarioResult(
        columns=[
            "theta0",
            "epsilon",
            "n_turns",
            "mean_aperiodic",
            "se_aperiodic",
            "mean_per_turn",
            "se_per_turn",
            "abs_difference",
            "combined_se",
            "consistent",
        ],
        rows=[row],
        summary={
            "sigma": sigma,
            "k_max": k_max,
            "n_aperiodic": n_aperiodic,
            "n_periodic": n_periodic,
        },
    )


def _run_quantum_sho(params: dict, seed) -> ScenarioResult:
    epsilon = _param(params, "epsilon", float, 0.05)
    theta0 = _param(params, "theta0", float, np.pi / 4)
    n_max = _param(params, "n_max", int, 3)
    if n_max < 2:
        raise ConfigError("n_max must be at least 2 for exact second moments")
    system = sho_system(epsilon, n_max)
    report = spin_phase_perturbative(system, theta0)
    moments = p_minus_perturbative(system)
    tilt = 2.0 * moments.p_minus / np.tan(theta0)
    row = [
        epsilon,
        theta0,
        n_max,
        moments.fluctuation / epsilon**2,
        moments.commutator / epsilon**2,
        moments.p_minus,
        report.phi_classical,
        report.phi_correction,
        report.phi_total,
        tilt,
        float(np.degrees(tilt)),
    ]
    return ScenarioResult(
        columns=[
            "epsilon",
            "theta0",
            "n_max",
            "quadrature_moment",
            "commutator_moment",
            "p_minus",
            "phi_classical",
            "phi_correction",
            "phi_total",
            "theta_shift_rad",
            "theta_shift_deg",
        ],
        rows=[row],
        summary={"breakdown": dict(report.breakdown)},
    )


def _run_quantum_two_spin(params: dict, seed) -> ScenarioResult:
    theta0 = _param(params, "theta0", float, np.pi / 4)
    lam = _param(params, "lambda", float, 1.0)
    b0 = _param(params, "b0", float, 1.0)
    with_dynamics = _param(params, "with_dynamics", bool, True)
    omega_ratio = _param(params, "omega_ratio", float, 1e-2)
    steps_per_turn = _param(params, "steps_per_turn", int, 4096)
    system = two_spin_system()
    moments = p_minus_perturbative(system)
    eigenvalues = np.linalg.eigvalsh(build_hamiltonian(system, lam))
    analytic = total_system_phase(0.5, theta0)
    numeric = error = bound = None
    if with_dynamics:
        static = np.linalg.eigvalsh(two_spin_path(theta0, 1.0, b0, lam)(0.0))
        gaps = np.diff(static)
        gap = float(np.min(gaps[gaps > 1e-12]))
        omega = omega_ratio * gap
        path = two_spin_path(theta0, omega, b0, lam)
        config = EvolutionConfig(
            hamiltonian=path,
            omega=omega,
            dt=TWO_PI / omega / steps_per_turn,
            reference=two_spin_reference(theta0, omega),
            adiabaticity=omega_ratio,
        )
        result = berry_phase_numeric(config)
        numeric = result.geometric_phase
        error = abs(numeric - analytic)
        bound = 5.0 * omega_ratio
    row = [
        theta0,
        lam,
        moments.p_minus,
        moments.fluctuation,
        moments.commutator,
        analytic,
        numeric,
        error,
        bound,
    ]
    return ScenarioResult(
        columns=[
            "theta0",
            "lambda",
            "p_minus",
            "fluctuation_term",
            "commutator_term",
            "total_phase_analytic",
            "total_phase_numeric",
            "abs_error",
            "error_bound",
        ],
        rows=[row],
        summary={
            "eigenvalues": [float(v) for v in eigenvalues],
            "b0": b0,
            "omega_ratio": omega_ratio,
        },
    )


def _run_quantum_angular_momentum(params: dict, seed) -> ScenarioResult:
    pairs = params.get("pairs")
    if not isinstance(pairs, (list, tuple)) or not pairs:
        raise ConfigError("provide 'pairs' as a nonempty list of [l, m] entries")
    lam = _param(params, "lambda", float, 1.0)
    theta0 = _param(params, "theta0", float, np.pi / 4)
    e_scale = _param(params, "e_scale", float, 0.0)
    rows = []
    for entry in pairs:
        try:
            l, m = (float(v) for v in entry)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad (l, m) pair {entry!r}: {exc}") from exc
        system, h, reference = angular_momentum_composite(l, m, lam, e_scale)
        state = tracked_eigenstate(h, reference)
        decomposition = schmidt(state)
        energy = float(
            np.vdot(state.amplitudes, h @ state.amplitudes).real
        )
        p_closed = (l - m) / (2.0 * l + 1.0)
        p_pert = p_minus_lm(l, m) if m != 0 else None
        phi_spin = spin_phase_from_schmidt(decomposition.p_minus, theta0).phi_total
        rows.append(
            [l, m, decomposition.p_minus, p_closed, p_pert, phi_spin, energy]
        )
    return ScenarioResult(
        columns=[
            "l",
            "m",
            "p_minus_schmidt",
            "p_minus_exact",
            "p_minus_perturbative",
            "phi_spin",
            "energy",
        ],
        rows=rows,
        summary={"lambda": lam, "theta0": theta0, "e_scale": e_scale},
    )


def _run_exact_vs_pert(params: dict, seed) -> ScenarioResult:
    m_values = _param(params, "m_values", _float_list, [10.0, 20.0, 40.0, 80.0])
    k = _param(params, "k", int, 1)
    lam = _param(params, "lambda", float, 1.0)
    theta0 = _param(params, "theta0", float, np.pi / 4)
    rows = []
    diffs = []
    for m in m_values:
        result = exact_lm_scenario(m + k, m, lam, theta0)
        diff = abs(result.phi_exact - result.phi_perturbative)
        diffs.append(diff)
        rows.append(
            [
                m,
                m + k,
                result.p_minus_exact,
                result.p_minus_perturbative,
                result.phi_exact,
                result.phi_perturbative,
                diff,
            ]
        )
    slope = None
    if len(m_values) >= 2 and all(d > 0 for d in diffs):
        slope = float(
            np.polyfit(np.log(np.asarray(m_values)), np.log(np.asarray(diffs)), 1)[0]
        )
    return ScenarioResult(
        columns=[
            "m",
            "l",
            "p_minus_exact",
            "p_minus_perturbative",
            "phi_exact",
            "phi_perturbative",
            "abs_phi_difference",
        ],
        rows=rows,
        summary={"k": k, "lambda": lam, "theta0": theta0, "loglog_slope": slope},
    )


def _run_dynamics_check(params: dict, seed) -> ScenarioResult:
    thetas = _theta0_values(
        params, default=[np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2]
    )
    omega_ratio = _param(params, "omega_ratio", float, 1e-3)
    omega_larmor = _param(params, "omega_larmor", float, 1.0)
    steps_per_turn = _param(params, "steps_per_turn", int, 8192)
    epsilon = _param(params, "epsilon", float, 0.0)
    sigma = _param(params, "sigma", float, 1.0)
    k_max = _param(params, "k_max", int, 8)
    if epsilon:
        seed = _require_seed(seed, "dynamics-check")
    omega = omega_ratio * omega_larmor
    rows = []
    for i, theta0 in enumerate(thetas):
        if epsilon:
            stats = NoiseStatistics(
                sigma=sigma, k_max=k_max, seed=derive_seed(seed, i)
            )
            realization = sample_noise(stats)
            grid = np.linspace(0.0, TWO_PI, 4097)
            samples = field_from_noise(theta0, epsilon, realization, grid)
            oracle = solid_angle_phase(curve_from_field(samples))
            path = noisy_spin_path(theta0, epsilon, realization, omega, omega_larmor)
            family = noisy_spin_reference(theta0, epsilon, realization, omega)
        else:
            oracle = circular_phase(theta0)
            path = precessing_spin_path(theta0, omega, omega_larmor)
            family = precessing_spin_reference(theta0, omega)
        config = EvolutionConfig(
            hamiltonian=path,
            omega=omega,
            dt=TWO_PI / omega / steps_per_turn,
            reference=family,
            adiabaticity=omega_ratio,
        )
        result = berry_phase_numeric(config)
        rows.append(
            [
                theta0,
                epsilon,
                oracle,
                result.geometric_phase,
                abs(result.geometric_phase - oracle),
                5.0 * omega_ratio,
                result.final_overlap,
            ]
        )
    return ScenarioResult(
        columns=[
            "theta0",
            "epsilon",
            "reference_phase",
            "numeric_phase",
            "abs_error",
            "error_bound",
            "final_overlap",
        ],
        rows=rows,
        summary={
            "omega_ratio": omega_ratio,
            "omega_larmor": omega_larmor,
            "steps_per_turn": steps_per_turn,
        },
    )


SCENARIOS = {
    "classical-sweep": _run_classical_sweep,
    "z-only-noise": _run_z_only,
    "noise-recovery": _run_noise_recovery,
    "aperiodic-check": _run_aperiodic_check,
    "quantum-sho": _run_quantum_sho,
    "quantum-two-spin": _run_quantum_two_spin,
    "quantum-angular-momentum": _run_quantum_angular_momentum,
    "exact-vs-pert": _run_exact_vs_pert,
    "dynamics-check": _run_dynamics_check,
}


# ---------------------------------------------------------------------------
# Config loading and output writing.


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = p.read_text(encoding="utf-8")
    suffix = p.suffix.lower()
    try:
        if suffix == ".json":
            parsed = json.loads(text)
        elif suffix == ".toml":
            parsed = tomllib.loads(text)
        else:
            try:
                parsed = tomllib.loads(text)
            except tomllib.TOMLDecodeError:
                parsed = json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"could not parse config file {path}: {exc}") from exc
    if not isinstance(parsed, dict):
        raise ConfigError("config file must contain a table of parameters")
    return parsed


def _clean(value):
    """nan/inf become None so both CSV and JSON stay portable."""
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _format_cell(value) -> str:
    value = _clean(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _clean_tree(value):
    if isinstance(value, dict):
        return {k: _clean_tree(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean_tree(v) for v in value]
    return _clean(value)


def _json_payload(scenario: str, result: ScenarioResult) -> dict:
    return {
        "scenario": scenario,
        "schema_version": SCHEMA_VERSION,
        "columns": result.columns,
        "rows": [[_clean(v) for v in row] for row in result.rows],
        "summary": _clean_tree(result.summary),
    }


def _write_output(path: str, fmt: str, scenario: str, result: ScenarioResult):
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(result.columns)
            for row in result.rows:
                writer.writerow([_format_cell(v) for v in row])
    elif fmt == "json":
        payload = _json_payload(scenario, result)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise ConfigError(f"unknown output format '{fmt}'")


def _write_manifest(out_path: str, scenario: str, config_echo: dict, seed,
                    fmt: str, wall_time: float):
    manifest = {
        "scenario": scenario,
        "config": _clean_tree(config_echo),
        "seed": seed,
        "format": fmt,
        "output": str(out_path),
        "library_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "wall_time_s": wall_time,
    }
    manifest_path = Path(str(out_path) + ".manifest.json")
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _resolve_format(fmt, out) -> str:
    if fmt:
        return fmt
    if out and str(out).lower().endswith(".csv"):
        return "csv"
    return "json"


# ---------------------------------------------------------------------------
# Entry points.


def _cmd_run(args) -> int:
    params = _load_config(args.config) if args.config else {}
    output_section = params.pop("output", {})
    if not isinstance(output_section, dict):
        raise ConfigError("the 'output' section must be a table")
    seed = args.seed if args.seed is not None else params.get("seed")
    if seed is not None:
        seed = int(seed)
        params["seed"] = seed
    runner = SCENARIOS[args.scenario]
    start = time.perf_counter()
    result = runner(dict(params), seed)
    wall_time = time.perf_counter() - start
    out = args.out or output_section.get("path")
    fmt = _resolve_format(args.fmt or output_section.get("format"), out)
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format '{fmt}'")
    if out:
        _write_output(out, fmt, args.scenario, result)
        _write_manifest(out, args.scenario, params, seed, fmt, wall_time)
    else:
        json.dump(_json_payload(args.scenario, result), sys.stdout,
                  indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _cmd_diagnose(args) -> int:
    stats = NoiseStatistics(
        sigma=args.sigma,
        k_max=args.k_max,
        mode=args.mode,
        seed=derive_seed(args.seed, 0),
    )
    report = compare_averaging_conventions(
        args.theta0, args.epsilon, stats, args.n_realizations
    )
    report = _clean_tree(report)
    lines = [
        f"theta0 = {args.theta0}, epsilon = {args.epsilon}, mode = {args.mode}, "
        f"N = {args.n_realizations}",
        f"shift from averaging cos(theta):  {report['delta_direct']:.6e}",
        f"shift from averaging theta first: {report['delta_angle_first']:.6e}",
    ]
    ratio = report["fitted_amplitude_ratio"]
    if ratio is not None:
        lines.append(f"fitted-amplitude ratio:          {ratio:.4f}")
        lines.append(
            f"expected for z-only noise:       "
            f"{report['expected_ratio_z_only']:.4f}"
        )
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinphase",
        description="Geometric-phase experiments for a driven spin 1/2.",
    )
    parser.add_argument(
        "--version", action="version", version=f"spinphase {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser(
        "run", help="execute a scenario and write its data table"
    )
    run_parser.add_argument("scenario", choices=sorted(SCENARIOS))
    run_parser.add_argument("--config", help="TOML or JSON parameter file")
    run_parser.add_argument(
        "--seed", type=int, help="master seed (overrides the config value)"
    )
    run_parser.add_argument("--out", help="output data file path")
    run_parser.add_argument(
        "--format", dest="fmt", choices=["csv", "json"],
        help="output format (default: by file extension, else json)",
    )
    run_parser.set_defaults(func=_cmd_run)

    diag_parser = sub.add_parser(
        "diagnose-averaging",
        help="contrast averaging cos(theta) with averaging theta first",
    )
    diag_parser.add_argument("--theta0", type=float, default=0.955)
    diag_parser.add_argument("--epsilon", type=float, default=0.05)
    diag_parser.add_argument("--sigma", type=float, default=1.0)
    diag_parser.add_argument("--k-max", type=int, default=8)
    diag_parser.add_argument(
        "--mode", choices=["isotropic3", "z_only"], default="z_only"
    )
    diag_parser.add_argument("--n-realizations", type=int, default=2000)
    diag_parser.add_argument("--seed", type=int, required=True)
    diag_parser.add_argument("--out", help="optional JSON report path")
    diag_parser.set_defaults(func=_cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpinPhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
