"""Physical observables of manifold ground states.

Each manifold basis state |M_k, n_k⟩ has a distinct emitter label and a
distinct photon number, so the ground state is already in Schmidt form and
both reduced density matrices are diagonal with entries c_k². Everything
below is computed from the coefficient vector and the basis labels.

Undefined quantities (g²(0) of an empty cavity, skewness/kurtosis of a
single-point distribution, the scaled inversion at ρ_ex = −½) are returned
as ``None``, never as NaN.
"""
from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from eigensolver import ground_eigenpair
from model_core import BasisLabel, ManifoldBasis, ModelParams, hamiltonian_block, manifold_basis

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
POISSON_RTOL = 1e-9
DEFAULT_JUMP_THRESHOLD = 0.1


class MissingManifoldError(KeyError):
    """A neighbouring manifold energy needed for μ is absent."""


class StatisticsRegime(Enum):
    SUB = "sub"
    SUPER = "super"
    POISSONIAN = "poissonian"


class Subsystem(Enum):
    LIGHT = "light"
    MATTER = "matter"


# ── Data structures ────────────────────────────────────────────────
@dataclass(frozen=True, slots=True, eq=False)
class GroundState:
    nu: int
    params: ModelParams
    energy: float
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        basis = manifold_basis(self.params, self.nu)
        if len(self.coeffs) != basis.dim:
            raise ValueError(
                f"coefficient vector has length {len(self.coeffs)}, manifold {self.nu} has {basis.dim}"
            )
        norm = float(np.sum(self.coeffs ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"ground state is not normalised (sum c^2 = {norm!r})")

    @property
    def basis(self) -> ManifoldBasis:
        return manifold_basis(self.params, self.nu)

    @property
    def weights(self) -> np.ndarray:
        return self.coeffs ** 2


@dataclass(frozen=True, slots=True)
class Moments:
    """Mean, variance, standardised skewness and kurtosis."""
    mean: float
    variance: float
    skewness: float | None
    kurtosis: float | None


@dataclass(frozen=True, slots=True)
class DensityMatrixElement:
    row: BasisLabel
    col: BasisLabel
    value: float


@dataclass(frozen=True, slots=True)
class ObservableRecord:
    nu: int
    n_emitters: int
    rho_ex: float
    energy: float
    mu: float
    mu_scaled: float
    jz_mean: float
    jz_scaled: float | None
    light_moments: Moments
    matter_moments: Moments
    g2: float | None
    lin_entropy: float
    purity: float
    coherence: float
    poisson_ref: tuple[float | None, float | None]
    light_regime: StatisticsRegime
    matter_regime: StatisticsRegime

    @property
    def jz_abs(self) -> float:
        return abs(self.jz_mean)

    @property
    def jz_per_emitter(self) -> float:
        return self.jz_mean / self.n_emitters


@dataclass(frozen=True, slots=True)
class StatisticsCrossing:
    rho_ex: float
    discontinuous: bool
    rho_left: float
    rho_right: float


# ── Ground states ──────────────────────────────────────────────────
def ground_state(params: ModelParams, nu: int) -> GroundState:
    """Diagonalise the ν block and keep its lowest eigenpair."""
    pair = ground_eigenpair(hamiltonian_block(params, nu))
    return GroundState(nu=int(nu), params=params, energy=pair.value, coeffs=pair.vector)


# ── Scalar observables ─────────────────────────────────────────────
def excitation_density(params: ModelParams, nu: int) -> float:
    """ρ_ex = (ν − J)/N."""
    return (nu - params.j) / params.n_emitters


def chemical_potential(e0_curve: Mapping[int, float], nu: int) -> float:
    """μ_ν = E⁰_{ν+1} − E⁰_ν."""
    missing = [k for k in (nu, nu + 1) if k not in e0_curve]
    if missing:
        raise MissingManifoldError(f"chemical potential at nu={nu} needs energies for {missing}")
    return e0_curve[nu + 1] - e0_curve[nu]


def population_inversion(state: GroundState) -> float:
    """⟨J_z⟩ = Σ c_k² M_k."""
    return float(state.weights @ state.basis.m_values)


def _moments(weights: np.ndarray, values: np.ndarray) -> Moments:
    values = values.astype(float)
    mean = float(weights @ values)
    central = values - mean
    # central form; ⟨n²⟩ − ⟨n⟩² cancels badly at large n
    variance = float(weights @ central ** 2)
    if variance <= 0.0:
        return Moments(mean=mean, variance=0.0, skewness=None, kurtosis=None)
    skewness = float(weights @ central ** 3) / variance ** 1.5
    kurtosis = float(weights @ central ** 4) / variance ** 2
    return Moments(mean=mean, variance=variance, skewness=skewness, kurtosis=kurtosis)


def photon_moments(state: GroundState) -> Moments:
    """(λ₁, λ₂, λ₃, λ₄) of the photon-number distribution."""
    return _moments(state.weights, state.basis.photon_numbers)


def matter_moments(state: GroundState) -> Moments:
    """Moments of the excited-emitter count M + J; ⟨J_z⟩ itself comes from population_inversion."""
    return _moments(state.weights, state.basis.matter_excitations)


def g2_zero(state: GroundState) -> float | None:
    """⟨a†a†aa⟩ / ⟨a†a⟩²."""
    n = state.basis.photon_numbers.astype(float)
    mean = float(state.weights @ n)
    if mean == 0.0:
        return None
    return float(state.weights @ (n * (n - 1.0))) / mean ** 2


def linear_entropy(state: GroundState) -> float:
    """Dimension-normalised linear entropy of either reduced state."""
    dim = len(state.coeffs)
    if dim == 1:
        return 0.0
    purity = float(np.sum(state.weights ** 2))
    return min(1.0, max(0.0, dim / (dim - 1) * (1.0 - purity)))


def purity_pair(state: GroundState) -> tuple[float, float]:
    """(Tr ρ_A², Tr ρ_C²) from explicit partial traces over the labels."""
    basis = state.basis
    rho_a = np.bincount(basis.matter_excitations, weights=state.weights)
    rho_c = np.bincount(basis.photon_numbers - basis.photon_numbers.min(), weights=state.weights)
    return float(np.sum(rho_a ** 2)), float(np.sum(rho_c ** 2))


def coherence_weight(state: GroundState) -> float:
    """l1 coherence Σ_{j≠k} |c_j c_k| of ρ_T in the manifold basis."""
    total = float(np.sum(np.abs(state.coeffs))) ** 2
    return max(0.0, total - float(np.sum(state.weights)))


def density_matrix_elements(state: GroundState) -> list[DensityMatrixElement]:
    """Every entry c_j c_k of |E⁰⟩⟨E⁰| with its row/column labels."""
    labels = state.basis.labels
    outer = np.outer(state.coeffs, state.coeffs)
    return [
        DensityMatrixElement(row=labels[j], col=labels[k], value=float(outer[j, k]))
        for j in range(len(labels))
        for k in range(len(labels))
    ]


def poisson_reference(mean: float) -> tuple[float | None, float | None]:
    """Skewness 1/√λ₁ and kurtosis 3 + 1/λ₁ of a Poisson law with mean λ₁."""
    if mean <= 0.0:
        return None, None
    return 1.0 / np.sqrt(mean), 3.0 + 1.0 / mean


def classify_statistics(mean: float, variance: float) -> StatisticsRegime:
    if abs(variance - mean) <= POISSON_RTOL * max(abs(mean), abs(variance)):
        return StatisticsRegime.POISSONIAN
    return StatisticsRegime.SUB if variance < mean else StatisticsRegime.SUPER


def scaled_inversion(jz_mean: float, params: ModelParams, nu: int) -> float | None:
    """(⟨J_z⟩/N + ½) / (ρ_ex + ½); undefined at ρ_ex = −½."""
    rho_ex = excitation_density(params, nu)
    denominator = rho_ex + 0.5
    if denominator <= 0.0:
        return None
    return (jz_mean / params.n_emitters + 0.5) / denominator


# ── Records and sweeps ─────────────────────────────────────────────
def observable_record(state: GroundState, next_energy: float) -> ObservableRecord:
    """All observables of one manifold; μ uses the ν+1 ground energy."""
    params = state.params
    mu = chemical_potential({state.nu: state.energy, state.nu + 1: next_energy}, state.nu)
    jz = population_inversion(state)
    light = photon_moments(state)
    matter = matter_moments(state)
    purity_a, _ = purity_pair(state)
    return ObservableRecord(
        nu=state.nu,
        n_emitters=params.n_emitters,
        rho_ex=excitation_density(params, state.nu),
        energy=state.energy,
        mu=mu,
        mu_scaled=(mu - params.omega_c) / params.g,
        jz_mean=jz,
        jz_scaled=scaled_inversion(jz, params, state.nu),
        light_moments=light,
        matter_moments=matter,
        g2=g2_zero(state),
        lin_entropy=linear_entropy(state),
        purity=purity_a,
        coherence=coherence_weight(state),
        poisson_ref=poisson_reference(light.mean),
        light_regime=classify_statistics(light.mean, light.variance),
        matter_regime=classify_statistics(abs(jz), matter.variance),
    )


def statistics_reference(record: ObservableRecord, subsystem: Subsystem) -> tuple[float, float]:
    """(Poisson reference, λ₂) compared for one subsystem.

    Light compares λ₂ with λ₁. Matter compares λ₂ᵐ with |⟨J_z⟩|, the
    magnitude of the population inversion.
    """
    if subsystem is Subsystem.LIGHT:
        return record.light_moments.mean, record.light_moments.variance
    return record.jz_abs, record.matter_moments.variance


def _straddles_saturation(nu_left: int, nu_right: int, n_emitters: int) -> bool:
    return nu_left <= n_emitters < nu_right


def find_statistics_crossing(
    sweep: Sequence[ObservableRecord],
    subsystem: Subsystem | str,
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
) -> list[StatisticsCrossing]:
    """ρ_ex where λ₂ minus the Poisson reference changes sign between adjacent manifolds.

    Records whose distribution is sharp (λ₂ = 0, e.g. the empty manifold) or
    sits exactly on the Poisson line carry no sign and are skipped; a sign
    change across them is interpolated between the nearest signed neighbours.
    A sign change is reported as a discontinuity at the right-hand density
    when both sides sit farther than ``jump_threshold`` times the larger
    reference (floored at 1) from the Poisson line, or when the pair
    straddles matter saturation ν = 2J.
    """
    if not sweep:
        raise ValueError("cannot locate statistics crossings in an empty sweep")
    subsystem = Subsystem(subsystem)

    signed = []
    for r in sweep:
        reference, variance = statistics_reference(r, subsystem)
        gap = variance - reference
        if variance > 0.0 and gap != 0.0:
            signed.append((r.rho_ex, r.nu, r.n_emitters, reference, gap))

    crossings: list[StatisticsCrossing] = []
    for left_row, right_row in zip(signed, signed[1:]):
        rho_l, nu_l, n_emitters, ref_l, left = left_row
        rho_r, nu_r, _, ref_r, right = right_row
        if left * right > 0.0:
            continue
        scale = max(ref_l, ref_r, 1.0)
        if (
            min(abs(left), abs(right)) > jump_threshold * scale
            or _straddles_saturation(nu_l, nu_r, n_emitters)
        ):
            crossings.append(StatisticsCrossing(rho_r, True, rho_l, rho_r))
        else:
            t = left / (left - right)
            crossings.append(StatisticsCrossing(rho_l + t * (rho_r - rho_l), False, rho_l, rho_r))

    logger.debug("%s crossings: %s", subsystem.value, [c.rho_ex for c in crossings])
    return crossings


def coherence_crossing(
    crossings: Sequence[StatisticsCrossing], saturation: float = 0.5
) -> StatisticsCrossing | None:
    """Last smooth crossing below the saturation density, if any."""
    below = [c for c in crossings if not c.discontinuous and c.rho_ex < saturation]
    return below[-1] if below else None


def collapse_spread(curves: Mapping[float, Iterable[float | None]]) -> float:
    """Largest spread (max − min) of the scaled inversion across densities at fixed ω_a."""
    spread = 0.0
    for values in curves.values():
        defined = [v for v in values if v is not None]
        if len(defined) > 1:
            spread = max(spread, max(defined) - min(defined))
    return spread
