"""Tavis-Cummings model: parameters, excitation-manifold bases and blocks.

    H_TC = ω_c a†a + ω_a J_z + (g/√N)(a† J_− + a J_+)

commutes with N_ex = J_z + a†a + J, so the Hamiltonian splits into one
real symmetric tridiagonal block per excitation number ν. States inside a
manifold are ordered by decreasing photon number:

    k-th state = |M = −J + k, n = ν − k⟩,   k = 0 … min(ν, 2J)

M is half-integer for odd N; labels are stored as twice-M integers.

A dense full-space Hamiltonian on a truncated photon space is provided as a
testing oracle only (guarded by an allocation cap).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP = 4096


class OracleCapError(ValueError):
    """Dense oracle requested above the configured dimension cap."""


# ── Parameters ─────────────────────────────────────────────────────
@dataclass(frozen=True, slots=True)
class ModelParams:
    """Physical constants of one Tavis-Cummings system.

    ``omega_a`` is stored; the detuning Δ = ω_c − ω_a is derived.
    Energies are in units of g unless stated otherwise.
    """
    omega_c: float
    omega_a: float
    g: float
    n_emitters: int

    def __post_init__(self) -> None:
        if isinstance(self.n_emitters, bool) or int(self.n_emitters) != self.n_emitters:
            raise ValueError(f"n_emitters must be an integer, got {self.n_emitters!r}")
        if self.n_emitters < 1:
            raise ValueError(f"n_emitters must be >= 1, got {self.n_emitters}")
        if not self.g > 0:
            raise ValueError(f"coupling g must be > 0, got {self.g}")
        object.__setattr__(self, "n_emitters", int(self.n_emitters))

    @classmethod
    def from_detuning(
        cls,
        n_emitters: int,
        detuning: float,
        g: float = 1.0,
        omega_c: float = 1.0,
    ) -> ModelParams:
        return cls(omega_c=omega_c, omega_a=omega_c - detuning, g=g, n_emitters=n_emitters)

    @property
    def detuning(self) -> float:
        return self.omega_c - self.omega_a

    @property
    def twice_j(self) -> int:
        return self.n_emitters

    @property
    def j(self) -> float:
        return self.n_emitters / 2


# ── Manifold basis ─────────────────────────────────────────────────
class BasisLabel(NamedTuple):
    twice_m: int
    n_ph: int

    @property
    def m(self) -> float:
        return self.twice_m / 2


@dataclass(frozen=True, slots=True)
class ManifoldBasis:
    """Ordered basis of the excitation manifold ν (decreasing photon number)."""
    nu: int
    twice_j: int

    @property
    def dim(self) -> int:
        return min(self.nu, self.twice_j) + 1

    @property
    def matter_excitations(self) -> np.ndarray:
        """M_k + J, the number of excited emitters in state k."""
        return np.arange(self.dim, dtype=np.int64)

    @property
    def twice_m(self) -> np.ndarray:
        return 2 * self.matter_excitations - self.twice_j

    @property
    def m_values(self) -> np.ndarray:
        return self.twice_m / 2

    @property
    def photon_numbers(self) -> np.ndarray:
        return self.nu - self.matter_excitations

    @property
    def labels(self) -> tuple[BasisLabel, ...]:
        return tuple(
            BasisLabel(int(tm), int(n))
            for tm, n in zip(self.twice_m, self.photon_numbers)
        )

    @property
    def states(self) -> tuple[tuple[float, int], ...]:
        """(M, n_ph) pairs in block order."""
        return tuple((label.m, label.n_ph) for label in self.labels)


def manifold_basis(params: ModelParams, nu: int) -> ManifoldBasis:
    """Basis of the ν manifold; D = min(ν, 2J) + 1 states."""
    if nu < 0:
        raise ValueError(f"excitation number must be >= 0, got {nu}")
    return ManifoldBasis(nu=int(nu), twice_j=params.twice_j)


# ── Hamiltonian blocks ─────────────────────────────────────────────
@dataclass(frozen=True, slots=True, eq=False)
class TridiagonalBlock:
    """H_TC restricted to one manifold, in ManifoldBasis order."""
    diag: np.ndarray
    offdiag: np.ndarray
    nu: int
    params: ModelParams

    @property
    def dim(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.offdiag, 1)
            + np.diag(self.offdiag, -1)
        )


def _ladder_factor(twice_j: int, twice_m: np.ndarray) -> np.ndarray:
    """√(J(J+1) − M(M+1)) evaluated exactly from twice-J / twice-M integers."""
    # J(J+1) − M(M+1) = (J − M)(J + M + 1) = (2J − 2M)(2J + 2M + 2) / 4
    return np.sqrt((twice_j - twice_m) * (twice_j + twice_m + 2) / 4.0)


def hamiltonian_block(params: ModelParams, nu: int) -> TridiagonalBlock:
    basis = manifold_basis(params, nu)
    n_ph = basis.photon_numbers
    twice_m = basis.twice_m

    diag = params.omega_c * n_ph + params.omega_a * (twice_m / 2)
    coupling = params.g / np.sqrt(params.n_emitters)
    offdiag = (
        coupling
        * np.sqrt(n_ph[:-1].astype(float))
        * _ladder_factor(params.twice_j, twice_m[:-1])
    )
    return TridiagonalBlock(
        diag=diag.astype(float),
        offdiag=offdiag.astype(float),
        nu=basis.nu,
        params=params,
    )


# ── Dense oracle ───────────────────────────────────────────────────
def collective_operators(twice_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(J_z, J_+, J_−) on |M⟩, M = −J … J (increasing)."""
    twice_m = np.arange(-twice_j, twice_j + 1, 2)
    jz = np.diag(twice_m / 2.0)
    raise_elems = _ladder_factor(twice_j, twice_m[:-1])
    jp = np.diag(raise_elems, -1)
    return jz, jp, jp.T.copy()


def _oracle_dimension(params: ModelParams, n_ph_max: int, oracle_cap: int) -> int:
    if n_ph_max < 0:
        raise ValueError(f"photon truncation must be >= 0, got {n_ph_max}")
    dim = (params.twice_j + 1) * (n_ph_max + 1)
    if dim > oracle_cap:
        raise OracleCapError(
            f"dense oracle dimension {dim} exceeds cap {oracle_cap} "
            f"(N={params.n_emitters}, n_ph_max={n_ph_max})"
        )
    return dim


def product_index(params: ModelParams, n_ph_max: int, label: BasisLabel) -> int:
    """Row of |M, n⟩ in the dense space (matter-major, photon-minor)."""
    m_index = (label.twice_m + params.twice_j) // 2
    return m_index * (n_ph_max + 1) + label.n_ph


def dense_hamiltonian(
    params: ModelParams,
    n_ph_max: int,
    oracle_cap: int = DEFAULT_ORACLE_CAP,
) -> np.ndarray:
    """Full H_TC on {|M⟩} ⊗ {|0⟩ … |n_ph_max⟩}."""
    dim = _oracle_dimension(params, n_ph_max, oracle_cap)
    logger.debug("building dense oracle of dimension %d", dim)

    jz, jp, jm = collective_operators(params.twice_j)
    a = np.diag(np.sqrt(np.arange(1, n_ph_max + 1, dtype=float)), 1)
    num = a.T @ a
    eye_m = np.eye(params.twice_j + 1)
    eye_c = np.eye(n_ph_max + 1)

    coupling = params.g / np.sqrt(params.n_emitters)
    return (
        params.omega_c * np.kron(eye_m, num)
        + params.omega_a * np.kron(jz, eye_c)
        + coupling * (np.kron(jm, a.T) + np.kron(jp, a))
    )


def dense_excitation_operator(
    params: ModelParams,
    n_ph_max: int,
    oracle_cap: int = DEFAULT_ORACLE_CAP,
) -> np.ndarray:
    """N_ex = J_z + a†a + J on the oracle space."""
    _oracle_dimension(params, n_ph_max, oracle_cap)
    jz, _, _ = collective_operators(params.twice_j)
    num = np.diag(np.arange(n_ph_max + 1, dtype=float))
    eye_m = np.eye(params.twice_j + 1)
    eye_c = np.eye(n_ph_max + 1)
    return np.kron(jz + params.j * eye_m, eye_c) + np.kron(eye_m, num)
