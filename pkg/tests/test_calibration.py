"""N = 1000 calibration runs at Δ = 3 (deselected by default; run with -m slow)."""
from __future__ import annotations

import numpy as np
import pytest

from observables import ObservableRecord, coherence_crossing, ground_state, purity_pair
from tc_sweep import (
    ExactSweep,
    ScalingPoint,
    build_config,
    compute_exact_sweep,
    compute_scaling_sweep,
    compute_variational_sweep,
    mean_field_deviation,
    scaling_spread,
)
from variational import stationarity_residual

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def sweep() -> ExactSweep:
    return compute_exact_sweep(build_config({"n_emitters": 1000, "detuning": 3.0, "threads": 4}))


def _at(records: tuple[ObservableRecord, ...], rho: float) -> ObservableRecord:
    return min(records, key=lambda r: abs(r.rho_ex - rho))


def test_conservation_suite(sweep: ExactSweep) -> None:
    assert len(sweep.records) == 3001
    for r in sweep.records:
        assert r.light_moments.mean + r.jz_mean + 500 == pytest.approx(r.nu, abs=1e-9)
        lam3, lam4 = r.light_moments.skewness, r.light_moments.kurtosis
        if lam3 is not None:
            assert lam4 >= 1 + lam3 ** 2 - 1e-9


def test_purity_symmetry_sampled() -> None:
    params = build_config({"n_emitters": 1000}).params
    for nu in (1, 250, 500, 999, 1000, 1001, 2000, 3000):
        state = ground_state(params, nu)
        rho_a, rho_c = purity_pair(state)
        assert rho_a == pytest.approx(rho_c, abs=1e-14)
        assert float(np.sum(state.coeffs ** 2)) == pytest.approx(1.0, abs=1e-12)


def test_statistics_crossings(sweep: ExactSweep) -> None:
    light = coherence_crossing(sweep.light_crossings)
    matter = coherence_crossing(sweep.matter_crossings)
    assert light is not None and matter is not None
    assert 0.047 <= light.rho_ex <= 0.067
    assert 0.037 <= matter.rho_ex <= 0.057
    assert matter.rho_ex < light.rho_ex
    # converged N = 1000 values
    assert light.rho_ex == pytest.approx(0.05726, abs=1e-4)
    assert 0.056 <= matter.rho_ex <= 0.057


def test_saturation_jump_in_light_statistics(sweep: ExactSweep) -> None:
    jumps = [c for c in sweep.light_crossings if c.discontinuous]
    assert any(c.rho_left == pytest.approx(0.5) and c.rho_ex == pytest.approx(0.501) for c in jumps)
    below = _at(sweep.records, 0.5)
    above = _at(sweep.records, 0.501)
    assert below.light_moments.variance - below.light_moments.mean == pytest.approx(0.029, abs=2e-3)
    assert above.light_moments.variance - above.light_moments.mean == pytest.approx(-0.942, abs=2e-3)


def test_matter_stays_sub_poissonian_past_saturation(sweep: ExactSweep) -> None:
    late = [r for r in sweep.records if r.rho_ex >= 1.0]
    assert late
    for r in late:
        assert r.matter_moments.variance < r.matter_moments.mean
        assert r.matter_moments.variance < r.jz_abs


def test_g2_profile(sweep: ExactSweep) -> None:
    before = [r.g2 for r in sweep.records if r.rho_ex <= 0.5 and r.g2 is not None]
    assert before[0] == 0.0
    assert all(b >= a - 1e-12 for a, b in zip(before, before[1:]))
    assert 1.8 <= before[-1] <= 2.2
    assert before[-1] == pytest.approx(1.996, abs=2e-3)

    window = [r for r in sweep.records if 0.45 <= r.rho_ex <= 0.55]
    assert any(a.g2 > 1.0 > b.g2 for a, b in zip(window, window[1:]))

    late = [r.g2 for r in sweep.records if r.rho_ex >= 2.0]
    assert all(0.9 < g < 1.0 for g in late)


def test_entropy_profile(sweep: ExactSweep) -> None:
    empty_cavity = _at(sweep.records, 0.5).lin_entropy
    assert _at(sweep.records, 0.0).lin_entropy == pytest.approx(0.948, abs=2e-3)
    assert empty_cavity == pytest.approx(0.255, abs=2e-3)
    assert empty_cavity < _at(sweep.records, 0.45).lin_entropy
    assert empty_cavity < _at(sweep.records, 0.55).lin_entropy
    assert empty_cavity < _at(sweep.records, 0.0).lin_entropy
    assert all(r.lin_entropy > 0.95 for r in sweep.records if r.rho_ex >= 2.0)


SCALING_RHO_SET = [-0.2, 0.0, 0.2, 0.4, 0.6]


@pytest.fixture(scope="module")
def scaling_points() -> dict[int, list[ScalingPoint]]:
    return {
        n: compute_scaling_sweep(build_config({"n_emitters": n, "rho_set": SCALING_RHO_SET}))
        for n in (10, 1000)
    }


def test_scaling_collapse_onto_mean_field(scaling_points: dict[int, list[ScalingPoint]]) -> None:
    large = mean_field_deviation(scaling_points[1000])
    small = mean_field_deviation(scaling_points[10])
    assert large * 5 <= small


def test_scaled_inversion_spread_is_intensive(scaling_points: dict[int, list[ScalingPoint]]) -> None:
    # the scaled inversion is the matter share of ν, which depends on ρ_ex at any N
    assert scaling_spread(scaling_points[1000]) == pytest.approx(0.175, abs=5e-3)
    assert scaling_spread(scaling_points[10]) == pytest.approx(0.167, abs=5e-3)


def test_variational_grid_residuals() -> None:
    solutions = compute_variational_sweep(build_config({"mode": "variational", "n_emitters": 1000}))
    assert len(solutions) == 301
    for s in solutions:
        assert s.constraint_residual < 1e-8
        assert stationarity_residual(s) < 1e-4
    crossover = min(solutions, key=lambda s: abs(s.rho_ex - 0.5))
    assert crossover.amplitude < 1e-3 * np.sqrt(1000)
    assert crossover.jz_per_emitter > 0.499
