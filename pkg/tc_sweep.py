"""Tavis-Cummings crossover sweeps.

Exact manifold diagonalisation, variational mean field, scaling law and
density-matrix tomography, each written as a reproducible CSV: a commented
``# key = value`` header echoing the configuration, one column-header row,
then data. Undefined values are empty fields.

Usage:
    uv run tc_sweep.py exact --emitters 1000 --detuning 3
    uv run tc_sweep.py variational --rho-min -0.5 --rho-max 2.5 --rho-steps 301
    uv run tc_sweep.py scaling --emitters 10 --omega-a-grid=-4,-2,0,2,4
    uv run tc_sweep.py tomography --nu-list 500,1000,1250,3000
    uv run tc_sweep.py plot exact_N1000.csv --figure fig5

Configuration:
    Place a .tc.toml in the working directory (or any parent), or pass
    --config PATH. Top-level keys only; every key is also a CLI flag:

        n_emitters = 1000
        detuning = 3.0
        rho_steps = 301
        omega_a_grid = [-4.0, -2.0, 0.0, 2.0, 4.0]

Exit codes: 0 success, 1 I/O or schema failure, 2 configuration error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import tomllib
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import pandas as pd

from eigensolver import ConvergenceError
from model_core import (
    DEFAULT_ORACLE_CAP,
    ModelParams,
    OracleCapError,
    dense_excitation_operator,
    dense_hamiltonian,
    manifold_basis,
    product_index,
)
from observables import (
    DEFAULT_JUMP_THRESHOLD,
    GroundState,
    ObservableRecord,
    StatisticsCrossing,
    coherence_crossing,
    collapse_spread,
    density_matrix_elements,
    coherence_weight,
    excitation_density,
    find_statistics_crossing,
    ground_state,
    observable_record,
    population_inversion,
    scaled_inversion,
)
from variational import VariationalSolution, solve_variational, stationarity_residual

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

MODES = ("exact", "variational", "scaling", "tomography")
TOMOGRAPHY_DENSITIES = (0.0, 0.5, 0.75, 2.5)
ORACLE_RTOL = 1e-10


class ConfigError(ValueError):
    """Invalid, unknown or inconsistent configuration value."""


# ── Configuration ──────────────────────────────────────────────────
@dataclass(frozen=True, slots=True)
class SweepConfig:
    mode: str
    n_emitters: int
    detuning: float
    coupling: float
    omega_c: float
    nu_min: int
    nu_max: int | None  # None: 3N
    rho_min: float
    rho_max: float
    rho_steps: int
    omega_a_grid: tuple[float, ...]
    rho_set: tuple[float, ...]
    nu_list: tuple[int, ...] | None  # None: manifolds of TOMOGRAPHY_DENSITIES
    eta: float
    epsilon: float
    out: Path | None
    threads: int
    oracle_cap: int
    jump_threshold: float

    @property
    def params(self) -> ModelParams:
        return ModelParams.from_detuning(
            self.n_emitters, self.detuning, g=self.coupling, omega_c=self.omega_c
        )

    @property
    def nu_upper(self) -> int:
        return 3 * self.n_emitters if self.nu_max is None else self.nu_max

    @property
    def output_path(self) -> Path:
        if self.out is not None:
            return self.out
        return Path(f"{self.mode}_N{self.n_emitters}.csv")


DEFAULT_CONFIG = SweepConfig(
    mode="exact",
    n_emitters=1000,
    detuning=3.0,
    coupling=1.0,
    omega_c=1.0,
    nu_min=0,
    nu_max=None,
    rho_min=-0.5,
    rho_max=2.5,
    rho_steps=301,
    omega_a_grid=tuple(-4.0 + 0.25 * i for i in range(33)),
    rho_set=(-0.4, -0.2, 0.0, 0.2, 0.4, 0.6),
    nu_list=None,
    eta=0.0,
    epsilon=0.0,
    out=None,
    threads=1,
    oracle_cap=DEFAULT_ORACLE_CAP,
    jump_threshold=DEFAULT_JUMP_THRESHOLD,
)

CONFIG_KEYS = frozenset(f.name for f in dataclasses.fields(SweepConfig))
# run-environment keys left out of the CSV header so outputs stay comparable
_UNECHOED = frozenset({"out", "threads"})


def _find_config(start: Path) -> Path | None:
    """Walk up from *start* looking for .tc.toml."""
    current = start if start.is_dir() else start.parent
    for directory in (current, *current.parents):
        candidate = directory / ".tc.toml"
        if candidate.is_file():
            return candidate
    return None


def _coerce(key: str, value: Any) -> Any:
    try:
        match key:
            case "omega_a_grid" | "rho_set":
                return tuple(float(v) for v in value)
            case "nu_list":
                return None if value is None else tuple(int(v) for v in value)
            case "out":
                return None if value is None else Path(value)
            case "mode":
                return str(value)
            case "n_emitters" | "nu_min" | "rho_steps" | "threads" | "oracle_cap":
                if isinstance(value, bool) or int(value) != value:
                    raise ValueError(f"expected an integer, got {value!r}")
                return int(value)
            case "nu_max":
                return None if value is None else _coerce("nu_min", value)
            case _:
                if isinstance(value, bool):
                    raise ValueError(f"expected a number, got {value!r}")
                return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for {key}: {exc}") from exc


def load_config(path: Path | None = None, start: Path | None = None) -> dict[str, Any]:
    """Overrides from a TOML file: *path* if given, else .tc.toml found from *start*."""
    if path is None:
        path = _find_config(start or Path.cwd())
        if path is None:
            return {}
    try:
        with path.open("rb") as f:
            raw = tomllib.load(f)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {', '.join(unknown)}")
    logger.debug("loaded %d keys from %s", len(raw), path)
    return {key: _coerce(key, value) for key, value in raw.items()}


def build_config(*layers: dict[str, Any]) -> SweepConfig:
    """DEFAULT_CONFIG overridden by each layer in turn, then validated."""
    merged: dict[str, Any] = {}
    for layer in layers:
        merged.update({k: _coerce(k, v) for k, v in layer.items()})
    unknown = sorted(set(merged) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration keys {', '.join(unknown)}")
    config = dataclasses.replace(DEFAULT_CONFIG, **merged)
    validate_config(config)
    return config


def validate_config(config: SweepConfig) -> None:
    problems: list[str] = []
    if config.mode not in MODES:
        problems.append(f"mode must be one of {', '.join(MODES)}, got {config.mode!r}")
    if config.n_emitters < 1:
        problems.append(f"n_emitters must be >= 1, got {config.n_emitters}")
    if not config.coupling > 0:
        problems.append(f"coupling must be > 0, got {config.coupling}")
    if config.nu_min < 0:
        problems.append(f"nu_min must be >= 0, got {config.nu_min}")
    if config.nu_upper < config.nu_min:
        problems.append(f"nu_max {config.nu_upper} is below nu_min {config.nu_min}")
    if not config.rho_min < config.rho_max:
        problems.append(f"rho_min {config.rho_min} must be below rho_max {config.rho_max}")
    if config.rho_min < -0.5:
        problems.append(f"rho_min must be >= -0.5, got {config.rho_min}")
    if config.rho_steps < 2:
        problems.append(f"rho_steps must be >= 2, got {config.rho_steps}")
    if not config.omega_a_grid:
        problems.append("omega_a_grid is empty")
    if not config.rho_set:
        problems.append("rho_set is empty")
    elif min(config.rho_set) < -0.5:
        problems.append(f"rho_set values must be >= -0.5, got {min(config.rho_set)}")
    if config.nu_list is not None and (not config.nu_list or min(config.nu_list) < 0):
        problems.append("nu_list must be non-empty with entries >= 0")
    if config.threads < 1:
        problems.append(f"threads must be >= 1, got {config.threads}")
    if config.oracle_cap < 1:
        problems.append(f"oracle_cap must be >= 1, got {config.oracle_cap}")
    if not config.jump_threshold > 0:
        problems.append(f"jump_threshold must be > 0, got {config.jump_threshold}")
    if problems:
        raise ConfigError("; ".join(problems))


# ── Worker pool ────────────────────────────────────────────────────
def _parallel_map(fn: Callable[[T], R], tasks: Sequence[T], threads: int) -> list[R]:
    """Ordered map; a process pool when threads > 1."""
    if threads == 1 or len(tasks) < 2:
        return [fn(task) for task in tasks]
    with Pool(processes=min(threads, len(tasks))) as pool:
        return pool.map(fn, tasks)


def _solve_manifold(task: tuple[ModelParams, int]) -> GroundState:
    params, nu = task
    return ground_state(params, nu)


def _solve_density(task: tuple[ModelParams, float, float, float]) -> VariationalSolution:
    params, rho, eta, epsilon = task
    return solve_variational(params, rho, eta=eta, epsilon=epsilon)


def _nearest_manifold(params: ModelParams, rho_ex: float) -> int:
    return max(0, int(round(params.j + params.n_emitters * rho_ex)))


# ── Sweeps ─────────────────────────────────────────────────────────
@dataclass(frozen=True, slots=True)
class ExactSweep:
    records: tuple[ObservableRecord, ...]
    light_crossings: tuple[StatisticsCrossing, ...]
    matter_crossings: tuple[StatisticsCrossing, ...]


@dataclass(frozen=True, slots=True)
class ScalingPoint:
    omega_a: float
    rho_target: float
    nu: int
    rho_ex: float
    jz_mean: float
    jz_scaled: float | None
    jz_scaled_mean_field: float | None = None


@dataclass(frozen=True, slots=True)
class TomographyBlock:
    nu: int
    rho_ex: float
    coherence: float
    state: GroundState


def oracle_check(
    params: ModelParams, states: Iterable[GroundState], n_ph_max: int, oracle_cap: int
) -> None:
    """Compare manifold ground energies with the dense full-space Hamiltonian."""
    h = dense_hamiltonian(params, n_ph_max, oracle_cap)
    n_ex = np.diag(dense_excitation_operator(params, n_ph_max, oracle_cap))
    for state in states:
        if state.nu > n_ph_max:
            continue
        sector = np.flatnonzero(np.isclose(n_ex, state.nu))
        expected = [product_index(params, n_ph_max, label) for label in state.basis.labels]
        if sorted(expected) != sorted(sector.tolist()):
            raise ConvergenceError(f"manifold {state.nu} labels do not match the dense sector")
        e0 = float(np.linalg.eigvalsh(h[np.ix_(sector, sector)])[0])
        if abs(e0 - state.energy) > ORACLE_RTOL * max(1.0, abs(e0)):
            raise ConvergenceError(
                f"nu={state.nu}: tridiagonal energy {state.energy!r} != dense {e0!r}"
            )
    logger.debug("dense oracle agrees up to nu=%d", n_ph_max)


def compute_exact_sweep(config: SweepConfig) -> ExactSweep:
    params = config.params
    nus = list(range(config.nu_min, config.nu_upper + 2))
    logger.debug("exact sweep: N=%d, nu %d..%d", params.n_emitters, nus[0], nus[-2])
    states = _parallel_map(_solve_manifold, [(params, nu) for nu in nus], config.threads)

    n_ph_max = config.nu_upper + 1
    try:
        oracle_check(params, states, n_ph_max, config.oracle_cap)
    except OracleCapError:
        logger.debug("dense oracle skipped: above cap %d", config.oracle_cap)

    records = tuple(
        observable_record(state, following.energy)
        for state, following in zip(states[:-1], states[1:])
    )
    return ExactSweep(
        records=records,
        light_crossings=tuple(find_statistics_crossing(records, "light", config.jump_threshold)),
        matter_crossings=tuple(find_statistics_crossing(records, "matter", config.jump_threshold)),
    )


def compute_variational_sweep(config: SweepConfig) -> list[VariationalSolution]:
    params = config.params
    grid = np.linspace(config.rho_min, config.rho_max, config.rho_steps)
    tasks = [(params, float(rho), config.eta, config.epsilon) for rho in grid]
    return _parallel_map(_solve_density, tasks, config.threads)


def _mean_field_scaled(params: ModelParams, rho_ex: float) -> float | None:
    """Scaled inversion of the product-state solution, (1 − cos θ) / (2(ρ_ex + ½))."""
    denominator = rho_ex + 0.5
    if denominator <= 0.0:
        return None
    solution = solve_variational(params, rho_ex)
    return (solution.jz_per_emitter + 0.5) / denominator


def compute_scaling_sweep(config: SweepConfig) -> list[ScalingPoint]:
    tasks: list[tuple[ModelParams, int]] = []
    targets: list[tuple[float, float]] = []
    for omega_a in config.omega_a_grid:
        params = ModelParams(
            omega_c=config.omega_c, omega_a=omega_a, g=config.coupling, n_emitters=config.n_emitters
        )
        for rho in config.rho_set:
            tasks.append((params, _nearest_manifold(params, rho)))
            targets.append((omega_a, rho))

    states = _parallel_map(_solve_manifold, tasks, config.threads)
    points = []
    for (omega_a, rho), state in zip(targets, states):
        jz = population_inversion(state)
        rho_ex = excitation_density(state.params, state.nu)
        points.append(ScalingPoint(
            omega_a=omega_a,
            rho_target=rho,
            nu=state.nu,
            rho_ex=rho_ex,
            jz_mean=jz,
            jz_scaled=scaled_inversion(jz, state.params, state.nu),
            jz_scaled_mean_field=_mean_field_scaled(state.params, rho_ex),
        ))
    return points


def scaling_spread(points: Iterable[ScalingPoint]) -> float:
    """Spread of the exact scaled inversion across densities, worst ω_a."""
    curves: dict[float, list[float | None]] = {}
    for p in points:
        curves.setdefault(p.omega_a, []).append(p.jz_scaled)
    return collapse_spread(curves)


def mean_field_deviation(points: Iterable[ScalingPoint]) -> float:
    """Largest |exact − mean field| scaled inversion over the grid."""
    gaps = [
        abs(p.jz_scaled - p.jz_scaled_mean_field)
        for p in points
        if p.jz_scaled is not None and p.jz_scaled_mean_field is not None
    ]
    return max(gaps, default=0.0)


def tomography_manifolds(config: SweepConfig) -> tuple[int, ...]:
    if config.nu_list is not None:
        return config.nu_list
    params = config.params
    return tuple(_nearest_manifold(params, rho) for rho in TOMOGRAPHY_DENSITIES)


def compute_tomography(config: SweepConfig, nu_list: Sequence[int] | None = None) -> list[TomographyBlock]:
    params = config.params
    nus = list(nu_list) if nu_list is not None else list(tomography_manifolds(config))
    states = _parallel_map(_solve_manifold, [(params, nu) for nu in nus], config.threads)
    return [
        TomographyBlock(
            nu=state.nu,
            rho_ex=excitation_density(params, state.nu),
            coherence=coherence_weight(state),
            state=state,
        )
        for state in states
    ]


# ── CSV output ─────────────────────────────────────────────────────
def _fmt(value: Any) -> str:
    """Shortest round-trip text; empty for undefined."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _header_lines(config: SweepConfig, mode: str) -> list[str]:
    lines = [f"# tc-crossover {mode} sweep"]
    for field in dataclasses.fields(SweepConfig):
        if field.name in _UNECHOED:
            continue
        value = getattr(config, field.name)
        if field.name == "mode":
            value = mode
        elif isinstance(value, tuple):
            value = ",".join(_fmt(v) for v in value)
        lines.append(f"# {field.name} = {_fmt(value)}")
    return lines


def write_csv(
    path: Path,
    header: Sequence[str],
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    footer: Sequence[str] = (),
) -> Path:
    frame = pd.DataFrame([[_fmt(v) for v in row] for row in rows], columns=list(columns), dtype=str)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        for line in header:
            f.write(line + "\n")
        frame.to_csv(f, index=False, lineterminator="\n")
        for line in footer:
            f.write(line + "\n")
    logger.debug("wrote %d rows to %s", len(frame), path)
    return path


EXACT_COLUMNS = (
    "nu", "rho_ex", "energy", "mu", "mu_scaled",
    "jz_mean", "jz_abs", "jz_scaled",
    "light_mean", "light_variance", "light_skewness", "light_kurtosis",
    "matter_mean", "matter_variance", "matter_skewness", "matter_kurtosis",
    "g2", "lin_entropy", "purity", "coherence",
    "poisson_skewness", "poisson_kurtosis", "light_regime", "matter_regime",
)

VARIATIONAL_COLUMNS = (
    "rho_ex", "alpha", "mu_scaled", "theta", "phi", "jz_per_emitter",
    "mu", "mbar", "energy", "constraint_residual", "stationarity_residual", "tied_branches",
)

SCALING_COLUMNS = (
    "omega_a", "rho_target", "nu", "rho_ex", "jz_mean", "jz_scaled", "jz_scaled_mean_field",
)

TOMOGRAPHY_COLUMNS = ("nu", "rho_ex", "row_m", "row_n", "col_m", "col_n", "value")


def _exact_row(r: ObservableRecord) -> list[Any]:
    light, matter = r.light_moments, r.matter_moments
    return [
        r.nu, r.rho_ex, r.energy, r.mu, r.mu_scaled,
        r.jz_mean, r.jz_abs, r.jz_scaled,
        light.mean, light.variance, light.skewness, light.kurtosis,
        matter.mean, matter.variance, matter.skewness, matter.kurtosis,
        r.g2, r.lin_entropy, r.purity, r.coherence,
        r.poisson_ref[0], r.poisson_ref[1], r.light_regime.value, r.matter_regime.value,
    ]


def _crossing_footer(sweep: ExactSweep) -> list[str]:
    lines = []
    for name, crossings in (("light", sweep.light_crossings), ("matter", sweep.matter_crossings)):
        for c in crossings:
            kind = "discontinuous" if c.discontinuous else "smooth"
            lines.append(
                f"# crossing = {name},{kind},{_fmt(c.rho_ex)},{_fmt(c.rho_left)},{_fmt(c.rho_right)}"
            )
        main = coherence_crossing(crossings)
        lines.append(f"# {name}_crossing = {_fmt(main.rho_ex if main else None)}")
    return lines


def run_exact_sweep(config: SweepConfig) -> Path:
    sweep = compute_exact_sweep(config)
    path = write_csv(
        config.output_path,
        _header_lines(config, "exact"),
        EXACT_COLUMNS,
        (_exact_row(r) for r in sweep.records),
        _crossing_footer(sweep),
    )
    print_exact_report(config, sweep, path)
    return path


def run_variational_sweep(config: SweepConfig) -> Path:
    solutions = compute_variational_sweep(config)
    rows = [
        [
            s.rho_ex, s.amplitude, s.mu_scaled, s.theta, s.phi, s.jz_per_emitter,
            s.mu, s.mbar_value, s.energy, s.constraint_residual,
            stationarity_residual(s), len(s.alternatives),
        ]
        for s in solutions
    ]
    path = write_csv(config.output_path, _header_lines(config, "variational"), VARIATIONAL_COLUMNS, rows)
    print_variational_report(config, solutions, path)
    return path


def run_scaling_sweep(config: SweepConfig) -> Path:
    points = compute_scaling_sweep(config)
    rows = [
        [p.omega_a, p.rho_target, p.nu, p.rho_ex, p.jz_mean, p.jz_scaled, p.jz_scaled_mean_field]
        for p in points
    ]
    spread = scaling_spread(points)
    deviation = mean_field_deviation(points)
    path = write_csv(
        config.output_path,
        _header_lines(config, "scaling"),
        SCALING_COLUMNS,
        rows,
        [f"# collapse_spread = {_fmt(spread)}", f"# mean_field_deviation = {_fmt(deviation)}"],
    )
    print_scaling_report(config, points, spread, deviation, path)
    return path


def run_tomography(config: SweepConfig, nu_list: Sequence[int] | None = None) -> Path:
    blocks = compute_tomography(config, nu_list)
    rows = (
        [b.nu, b.rho_ex, e.row.m, e.row.n_ph, e.col.m, e.col.n_ph, e.value]
        for b in blocks
        for e in density_matrix_elements(b.state)
    )
    footer = [f"# coherence = {b.nu},{_fmt(b.coherence)}" for b in blocks]
    path = write_csv(
        config.output_path, _header_lines(config, "tomography"), TOMOGRAPHY_COLUMNS, rows, footer
    )
    print_tomography_report(config, blocks, path)
    return path


# ── Terminal output ────────────────────────────────────────────────
def _banner(title: str, config: SweepConfig) -> None:
    print("=" * 60)
    print(f"        TAVIS-CUMMINGS {title}")
    print("=" * 60)
    print(f"  N = {config.n_emitters}   Δ = {config.detuning:g}   g = {config.coupling:g}"
          f"   ω_c = {config.omega_c:g}")
    print("-" * 60)


def print_exact_report(config: SweepConfig, sweep: ExactSweep, path: Path) -> None:
    _banner("EXACT SWEEP", config)
    records = sweep.records
    print(f"  Manifolds       : ν = {records[0].nu} … {records[-1].nu} ({len(records)} rows)")
    peak = max(records, key=lambda r: r.lin_entropy)
    print(f"  Max entropy     : {peak.lin_entropy:.4f} at ρ_ex = {peak.rho_ex:.4f}")
    for name, crossings in (("Light", sweep.light_crossings), ("Matter", sweep.matter_crossings)):
        print(f"  {name} crossings{' ' * (7 - len(name))}:")
        if not crossings:
            print("    -> none")
        for c in crossings:
            kind = "discontinuous" if c.discontinuous else "smooth"
            print(f"    -> ρ_ex = {c.rho_ex:.6f} ({kind})")
    print("-" * 60)
    print(f"  CSV written to {path}")
    print("=" * 60)


def print_variational_report(
    config: SweepConfig, solutions: Sequence[VariationalSolution], path: Path
) -> None:
    _banner("VARIATIONAL SWEEP", config)
    worst = max(s.constraint_residual for s in solutions)
    tied = sum(1 for s in solutions if s.alternatives)
    print(f"  Densities       : {solutions[0].rho_ex:g} … {solutions[-1].rho_ex:g} ({len(solutions)} rows)")
    print(f"  Max residual    : {worst:.2e}")
    print(f"  Tied branches   : {tied}")
    print("-" * 60)
    print(f"  CSV written to {path}")
    print("=" * 60)


def print_scaling_report(
    config: SweepConfig,
    points: Sequence[ScalingPoint],
    spread: float,
    deviation: float,
    path: Path,
) -> None:
    _banner("SCALING LAW", config)
    print(f"  ω_a values      : {len(config.omega_a_grid)}")
    print(f"  ρ_ex set        : {', '.join(f'{r:g}' for r in config.rho_set)}")
    print(f"  Collapse spread : {spread:.4e}")
    print(f"  Mean-field gap  : {deviation:.4e}")
    print("-" * 60)
    print(f"  CSV written to {path}")
    print("=" * 60)


def print_tomography_report(
    config: SweepConfig, blocks: Sequence[TomographyBlock], path: Path
) -> None:
    _banner("TOMOGRAPHY", config)
    header = f"  {'ν':>6} {'ρ_ex':>10} {'D':>6} {'coherence':>12}"
    print(header)
    for b in blocks:
        dim = manifold_basis(config.params, b.nu).dim
        print(f"  {b.nu:>6} {b.rho_ex:>10.4f} {dim:>6} {b.coherence:>12.4f}")
    print("-" * 60)
    print(f"  CSV written to {path}")
    print("=" * 60)


# ── CLI ────────────────────────────────────────────────────────────
def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {exc}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {exc}") from exc


_FLAG_KEYS = {
    "emitters": "n_emitters",
    "detuning": "detuning",
    "coupling": "coupling",
    "omega_c": "omega_c",
    "nu_min": "nu_min",
    "nu_max": "nu_max",
    "rho_min": "rho_min",
    "rho_max": "rho_max",
    "rho_steps": "rho_steps",
    "omega_a_grid": "omega_a_grid",
    "rho_set": "rho_set",
    "nu_list": "nu_list",
    "eta": "eta",
    "epsilon": "epsilon",
    "out": "out",
    "threads": "threads",
    "oracle_cap": "oracle_cap",
    "jump_threshold": "jump_threshold",
}


def parse_args(argv: list[str]) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="TOML configuration file")
    common.add_argument("--emitters", type=int, help="number of emitters N")
    common.add_argument("--detuning", type=float, help="Δ = ω_c − ω_a")
    common.add_argument("--coupling", type=float, help="collective coupling g")
    common.add_argument("--omega-c", type=float, help="cavity frequency ω_c")
    common.add_argument("--nu-min", type=int)
    common.add_argument("--nu-max", type=int)
    common.add_argument("--rho-min", type=float)
    common.add_argument("--rho-max", type=float)
    common.add_argument("--rho-steps", type=int)
    common.add_argument("--omega-a-grid", type=_float_list, help="comma-separated ω_a values")
    common.add_argument("--rho-set", type=_float_list, help="comma-separated ρ_ex values")
    common.add_argument("--nu-list", type=_int_list, help="comma-separated manifolds")
    common.add_argument("--eta", type=float)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--out", "-o", type=Path, help="CSV output path")
    common.add_argument("--threads", type=int, help="worker processes (1 = serial)")
    common.add_argument("--oracle-cap", type=int)
    common.add_argument("--jump-threshold", type=float)
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="tc_sweep",
        description="Tavis-Cummings crossover sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in MODES:
        sub.add_parser(mode, parents=[common], help=f"{mode} sweep to CSV")
    plot = sub.add_parser("plot", help="render a figure from a sweep CSV")
    plot.add_argument("csv", type=Path, help="sweep CSV")
    plot.add_argument("--figure", required=True, help="figure id (fig3, fig4, fig5, fig6, fig6m, fig7, tomo)")
    plot.add_argument("--out", "-o", type=Path, default=None, help="output path stem")
    plot.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    return parser.parse_args(argv[1:])


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    flags = {
        key: getattr(args, attr)
        for attr, key in _FLAG_KEYS.items()
        if getattr(args, attr, None) is not None
    }
    return build_config(load_config(args.config), {"mode": args.command}, flags)


RUNNERS: dict[str, Callable[[SweepConfig], Path]] = {
    "exact": run_exact_sweep,
    "variational": run_variational_sweep,
    "scaling": run_scaling_sweep,
    "tomography": run_tomography,
}


def main(argv: list[str]) -> None:
    args = parse_args(argv)
    configure_logging(args.verbose)

    try:
        if args.command == "plot":
            from generate_figures import render_plots

            for written in render_plots(args.csv, args.figure, args.out):
                print(f"Figure written to {written}")
        else:
            RUNNERS[args.command](config_from_args(args))
    except ConfigError as exc:
        print(f"Configuration error: {exc}", file=sys.stderr)
        sys.exit(2)
    except ConvergenceError as exc:
        print(f"Numerical failure: {exc}", file=sys.stderr)
        sys.exit(3)
    except (OSError, ValueError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main(sys.argv)
