from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import LinAlgError, eigh_tridiagonal

import eigensolver
from eigensolver import (
    ConvergenceError,
    all_eigenvalues,
    gershgorin_interval,
    ground_eigenpair,
    residual_norm,
    sturm_count,
)
from model_core import ModelParams, TridiagonalBlock, hamiltonian_block


def _random_block(dim: int, seed: int) -> TridiagonalBlock:
    rng = np.random.default_rng(seed)
    return TridiagonalBlock(
        diag=rng.normal(size=dim),
        offdiag=rng.uniform(0.1, 2.0, size=dim - 1),
        nu=dim - 1,
        params=ModelParams(omega_c=1.0, omega_a=1.0, g=1.0, n_emitters=dim),
    )


def test_one_dimensional_block() -> None:
    params = ModelParams(omega_c=1.0, omega_a=-2.0, g=1.0, n_emitters=4)
    pair = ground_eigenpair(hamiltonian_block(params, 0))
    assert pair.value == pytest.approx(4.0)
    assert list(pair.vector) == [1.0]


def test_two_level_analytic_pair() -> None:
    params = ModelParams(omega_c=1.0, omega_a=1.0, g=1.0, n_emitters=1)
    pair = ground_eigenpair(hamiltonian_block(params, 1))
    assert pair.value == pytest.approx(-0.5, abs=1e-14)
    assert pair.vector == pytest.approx(np.array([1.0, -1.0]) / np.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_matches_dense_diagonalisation(seed: int) -> None:
    block = _random_block(60, seed)
    values, vectors = np.linalg.eigh(block.to_dense())
    pair = ground_eigenpair(block)
    assert pair.value == pytest.approx(values[0], abs=1e-10)
    reference = vectors[:, 0] * np.sign(vectors[:, 0] @ pair.vector)
    assert pair.vector == pytest.approx(reference, abs=1e-8)
    assert pair.vector[np.flatnonzero(pair.vector)[0]] > 0


def test_sign_convention_on_localised_state() -> None:
    # ground state sits at the far end; v[0] is tiny but nonzero
    dim = 40
    block = TridiagonalBlock(
        diag=np.linspace(20.0, 0.0, dim),
        offdiag=np.full(dim - 1, 0.3),
        nu=dim - 1,
        params=ModelParams(omega_c=1.0, omega_a=1.0, g=1.0, n_emitters=dim),
    )
    pair = ground_eigenpair(block)
    assert abs(pair.vector[0]) < 1e-12
    assert pair.vector[np.flatnonzero(pair.vector)[0]] > 0


def test_leading_submatrix_interlaces() -> None:
    block = _random_block(30, 13)
    sub = TridiagonalBlock(
        diag=block.diag[:-1], offdiag=block.offdiag[:-1], nu=block.nu - 1, params=block.params
    )
    full = all_eigenvalues(block)
    inner = all_eigenvalues(sub)
    assert np.all(full[:-1] < inner)
    assert np.all(inner < full[1:])


@pytest.mark.parametrize("nu", [0, 5, 40, 120])
def test_sturm_count_brackets_ground_value(nu: int) -> None:
    block = hamiltonian_block(ModelParams.from_detuning(60, 3.0), nu)
    pair = ground_eigenpair(block)
    lo, hi = gershgorin_interval(block.diag, block.offdiag)
    eps = 1e-8 * max(1.0, abs(lo), abs(hi))
    assert sturm_count(block.diag, block.offdiag, pair.value - eps) == 0
    assert sturm_count(block.diag, block.offdiag, pair.value + eps) >= 1


@pytest.mark.parametrize("nu", [3, 24, 49])
def test_eigenbasis_orthonormal_on_physical_blocks(nu: int) -> None:
    block = hamiltonian_block(ModelParams.from_detuning(49, 3.0), nu)
    assert block.dim <= 50
    _, vectors = eigh_tridiagonal(block.diag, block.offdiag)
    assert vectors.T @ vectors == pytest.approx(np.eye(block.dim), abs=1e-8)
    ground = ground_eigenpair(block).vector
    overlaps = vectors[:, 1:].T @ ground
    assert np.max(np.abs(overlaps)) < 1e-8


def test_vector_is_normalised_with_small_residual() -> None:
    block = hamiltonian_block(ModelParams.from_detuning(200, 3.0), 250)
    pair = ground_eigenpair(block)
    assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-12)
    assert residual_norm(block, pair) < 1e-10 * max(1.0, abs(pair.value))


def test_sturm_count_agrees_with_spectrum() -> None:
    block = _random_block(25, 7)
    spectrum = np.linalg.eigvalsh(block.to_dense())
    for x in np.linspace(spectrum[0] - 1, spectrum[-1] + 1, 17):
        assert sturm_count(block.diag, block.offdiag, x) == int(np.sum(spectrum < x))


def test_gershgorin_interval_encloses_spectrum() -> None:
    block = _random_block(30, 3)
    lo, hi = gershgorin_interval(block.diag, block.offdiag)
    spectrum = np.linalg.eigvalsh(block.to_dense())
    assert lo <= spectrum[0]
    assert spectrum[-1] <= hi


def test_all_eigenvalues_sorted_and_exact() -> None:
    block = _random_block(20, 11)
    assert all_eigenvalues(block) == pytest.approx(np.linalg.eigvalsh(block.to_dense()), abs=1e-10)


def test_reduced_block_rejected() -> None:
    block = _random_block(5, 0)
    reduced = TridiagonalBlock(
        diag=block.diag, offdiag=np.array([1.0, 0.0, 1.0, 1.0]), nu=4, params=block.params
    )
    with pytest.raises(ValueError):
        ground_eigenpair(reduced)


def _lapack_failure(*args, **kwargs):
    raise LinAlgError("forced failure")


def test_fallback_used_when_lapack_fails(monkeypatch: pytest.MonkeyPatch) -> None:
    block = _random_block(40, 5)
    expected = np.linalg.eigvalsh(block.to_dense())[0]
    monkeypatch.setattr(eigensolver, "eigh_tridiagonal", _lapack_failure)
    pair = ground_eigenpair(block)
    assert pair.value == pytest.approx(expected, abs=1e-10)
    assert residual_norm(block, pair) < 1e-9


def test_convergence_error_after_retries(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(eigensolver, "eigh_tridiagonal", _lapack_failure)
    monkeypatch.setattr(eigensolver, "solve_banded", _lapack_failure)
    with pytest.raises(ConvergenceError):
        ground_eigenpair(_random_block(10, 2))
