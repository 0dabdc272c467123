"""Variational mean field: coherent cavity field ⊗ atomic coherent state.

Trial state |α⟩ ⊗ |θ, φ⟩ with |θ, φ⟩ = exp(ζ J_+ − ζ* J_−)|−J⟩, ζ = (θ/2) e^{iφ}.
At fixed chemical potential μ the quantity minimised is

    M̄ = (ω_c−μ)α² − (ω_a−μ)J cos θ − μJ
        + [g√(2J)(1+η)α + ε√(8J³)] sin θ cos φ

and μ is adjusted until the excitation density

    ρ_ex = α²/N − cos θ / 2

meets the target. Without drive (ε = 0) φ = 0, so the optimal α comes out
≤ 0. With ε > 0 the minimum sits on φ = π (ε < 0: φ = 0) away from the
poles. ``VariationalSolution.amplitude`` reports |α|.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.stats import binom

from eigensolver import ConvergenceError
from model_core import ModelParams

logger = logging.getLogger(__name__)

THETA_GRID = 2049
TIE_TOL = 1e-12
CONSTRAINT_TOL = 1e-8
BRACKET_EXPANSIONS = 4
FD_STEP = 1e-5


class DomainError(ValueError):
    """Angle or target density outside the physical domain."""


class NoBracketError(ConvergenceError):
    """No μ interval brackets the requested density."""


# ── Bloch states ───────────────────────────────────────────────────
@dataclass(frozen=True, slots=True, eq=False)
class BlochState:
    theta: float
    phi: float
    twice_j: int
    coeffs: np.ndarray  # over |M⟩, M = −J … J

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def jz_mean(self) -> float:
        m = np.arange(self.twice_j + 1) - self.j
        return float(np.abs(self.coeffs) ** 2 @ m)


def _check_theta(theta: float) -> None:
    if not 0.0 <= theta <= np.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta!r}")


def _twice(j: float) -> int:
    twice_j = int(round(2 * j))
    if twice_j < 0 or abs(twice_j - 2 * j) > 1e-12:
        raise DomainError(f"J must be a non-negative half-integer, got {j!r}")
    return twice_j


def bloch_state(j: float, theta: float, phi: float) -> BlochState:
    """Atomic coherent state |θ, φ⟩ on the Dicke ladder of spin J.

    |c_M| = √binom(2J, J+M) sin^{J+M}(θ/2) cos^{J−M}(θ/2), phase e^{i(J+M)φ}.
    """
    _check_theta(theta)
    twice_j = _twice(j)
    k = np.arange(twice_j + 1)
    p = np.sin(theta / 2) ** 2
    amplitudes = np.sqrt(binom.pmf(k, twice_j, p))
    coeffs = amplitudes * np.exp(1j * k * phi)
    return BlochState(theta=float(theta), phi=float(phi), twice_j=twice_j, coeffs=coeffs)


def expansion_coefficient(psi: np.ndarray, theta: float, phi: float) -> complex:
    """C(θ, φ) = √(4π/(2J+1)) ⟨θ, φ|Ψ⟩ for a Dicke-basis vector Ψ."""
    twice_j = len(psi) - 1
    state = bloch_state(twice_j / 2, theta, phi)
    return complex(np.sqrt(4 * np.pi / (twice_j + 1)) * np.vdot(state.coeffs, psi))


def sphere_quadrature_norm(psi: np.ndarray) -> float:
    """((2J+1)/4π) ∫ dΩ |⟨θ, φ|Ψ⟩|², which equals ⟨Ψ|Ψ⟩ by completeness."""
    twice_j = len(psi) - 1
    nodes, weights = np.polynomial.legendre.leggauss(twice_j + 2)
    n_phi = 2 * twice_j + 2
    phis = 2 * np.pi * np.arange(n_phi) / n_phi

    total = 0.0
    for cos_theta, w in zip(nodes, weights):
        theta = float(np.arccos(np.clip(cos_theta, -1.0, 1.0)))
        for phi in phis:
            overlap = np.vdot(bloch_state(twice_j / 2, theta, phi).coeffs, psi)
            total += w * abs(overlap) ** 2
    return float((twice_j + 1) / (4 * np.pi) * total * (2 * np.pi / n_phi))


# ── Energy functional ──────────────────────────────────────────────
def _couplings(params: ModelParams, eta: float, epsilon: float) -> tuple[float, float]:
    j = params.j
    return params.g * np.sqrt(2 * j) * (1 + eta), epsilon * np.sqrt(8 * j ** 3)


def _mbar_sc(
    alpha: float, sin_t: float, cos_t: float, cos_p: float,
    mu: float, params: ModelParams, eta: float, epsilon: float,
) -> float:
    big_g, big_b = _couplings(params, eta, epsilon)
    j = params.j
    return (
        (params.omega_c - mu) * alpha ** 2
        - (params.omega_a - mu) * j * cos_t
        - mu * j
        + (big_g * alpha + big_b) * sin_t * cos_p
    )


def mbar(
    alpha: float,
    theta: float,
    phi: float,
    mu: float,
    params: ModelParams,
    eta: float = 0.0,
    epsilon: float = 0.0,
) -> float:
    """⟨H − μ N_ex⟩ in the trial state (α real)."""
    return float(_mbar_sc(alpha, np.sin(theta), np.cos(theta), np.cos(phi), mu, params, eta, epsilon))


def mbar_gradient(
    alpha: float,
    theta: float,
    phi: float,
    mu: float,
    params: ModelParams,
    eta: float = 0.0,
    epsilon: float = 0.0,
) -> np.ndarray:
    """(∂M̄/∂α, ∂M̄/∂θ, ∂M̄/∂φ)."""
    big_g, big_b = _couplings(params, eta, epsilon)
    j = params.j
    drive = big_g * alpha + big_b
    return np.array([
        2 * (params.omega_c - mu) * alpha + big_g * np.sin(theta) * np.cos(phi),
        (params.omega_a - mu) * j * np.sin(theta) + drive * np.cos(theta) * np.cos(phi),
        -drive * np.sin(theta) * np.sin(phi),
    ])


def constraint_density(alpha: float, theta: float, params: ModelParams) -> float:
    """ρ_ex = α²/N − cos θ / 2 (−½ for the empty system)."""
    return float(alpha ** 2 / params.n_emitters - np.cos(theta) / 2)


# ── Solver ─────────────────────────────────────────────────────────
@dataclass(frozen=True, slots=True)
class _Stationary:
    mbar_value: float
    alpha: float
    theta: float
    phi: float = 0.0


@dataclass(frozen=True, slots=True)
class VariationalSolution:
    params: ModelParams
    alpha: float
    theta: float
    phi: float
    mu: float
    rho_ex: float
    mbar_value: float
    eta: float = 0.0
    epsilon: float = 0.0
    alternatives: tuple[tuple[float, float], ...] = ()  # tied (alpha, theta) branches

    @property
    def amplitude(self) -> float:
        return abs(self.alpha)

    @property
    def jz_per_emitter(self) -> float:
        return float(-np.cos(self.theta) / 2)

    @property
    def mu_scaled(self) -> float:
        return (self.mu - self.params.omega_c) / self.params.g

    @property
    def realised_density(self) -> float:
        return constraint_density(self.alpha, self.theta, self.params)

    @property
    def constraint_residual(self) -> float:
        return abs(self.realised_density - self.rho_ex)

    @property
    def energy(self) -> float:
        """⟨H⟩ = M̄ + μ N (ρ_ex + ½)."""
        return self.mbar_value + self.mu * self.params.n_emitters * (self.realised_density + 0.5)


def _stationary_points(
    mu: float, params: ModelParams, eta: float, epsilon: float
) -> list[_Stationary]:
    """Candidates at fixed μ, lowest M̄ first (ties: smallest |α| first).

    α is eliminated through ∂M̄/∂α = 0, α = −G p sin θ / (2(ω_c − μ)) with
    p = cos φ, leaving a one-dimensional problem in θ whose interior extrema
    are bracketed on a grid and refined with brentq. A nonzero drive B picks
    the branch p = −sign(B), the only one that lowers M̄, and leaves the
    poles non-stationary; without drive both poles are kept.
    """
    x = params.omega_c - mu
    y = params.omega_a - mu
    j = params.j
    big_g, big_b = _couplings(params, eta, epsilon)
    big_a = big_g ** 2 / (4 * x)
    p, phi = (-1.0, np.pi) if big_b > 0 else (1.0, 0.0)

    def dfdtheta(theta: float | np.ndarray) -> float | np.ndarray:
        s, c = np.sin(theta), np.cos(theta)
        return -2 * big_a * s * c + big_b * p * c + y * j * s

    roots: list[tuple[float, float, float]] = []
    if big_b == 0.0:
        roots += [(0.0, 0.0, 1.0), (np.pi, 0.0, -1.0)]
    interior: list[float] = []
    grid = np.linspace(0.0, np.pi, THETA_GRID)
    slope = dfdtheta(grid)
    for i in range(1, THETA_GRID - 1):
        if slope[i] == 0.0:
            interior.append(float(grid[i]))
    for i in np.flatnonzero(slope[:-1] * slope[1:] < 0):
        interior.append(brentq(dfdtheta, grid[i], grid[i + 1], xtol=1e-15))
    roots += [(t, np.sin(t), np.cos(t)) for t in interior]

    candidates = []
    for theta, s, c in roots:
        alpha = -big_g * p * s / (2 * x)
        value = _mbar_sc(alpha, s, c, p, mu, params, eta, epsilon)
        candidates.append(_Stationary(float(value), float(alpha), float(theta), phi))
    if not candidates:
        raise ConvergenceError(f"no stationary point of the reduced energy at mu={mu}")
    candidates.sort(key=lambda q: (q.mbar_value, abs(q.alpha)))
    return candidates


def _minimiser(
    mu: float, params: ModelParams, eta: float, epsilon: float
) -> tuple[_Stationary, tuple[_Stationary, ...]]:
    """Global minimum of M̄ at fixed μ plus any distinct branch tied with it."""
    points = _stationary_points(mu, params, eta, epsilon)
    floor = points[0].mbar_value
    scale = max(1.0, abs(floor))
    tied: list[_Stationary] = []
    for p in sorted(
        (p for p in points if p.mbar_value - floor <= TIE_TOL * scale),
        key=lambda p: abs(p.alpha),
    ):
        if all(abs(p.alpha - q.alpha) > 1e-9 or abs(p.theta - q.theta) > 1e-9 for q in tied):
            tied.append(p)
    return tied[0], tuple(tied[1:])


def _density_at(mu: float, params: ModelParams, eta: float, epsilon: float) -> float:
    best, _ = _minimiser(mu, params, eta, epsilon)
    return constraint_density(best.alpha, best.theta, params)


def _lower_polariton(params: ModelParams, eta: float) -> float:
    half_sum = (params.omega_c + params.omega_a) / 2
    return half_sum - np.sqrt(params.detuning ** 2 / 4 + (params.g * (1 + eta)) ** 2)


def _bracket(
    params: ModelParams, target: float, eta: float, epsilon: float
) -> tuple[float, float]:
    g = params.g
    for k in range(BRACKET_EXPANSIONS + 1):
        lo = min(params.omega_a, params.omega_c) - 5 * g * 2 ** k
        hi = params.omega_c - g * 10.0 ** (-2 * (k + 1))
        f_lo = _density_at(lo, params, eta, epsilon) - target
        f_hi = _density_at(hi, params, eta, epsilon) - target
        if f_lo <= 0.0 <= f_hi:
            return lo, hi
        logger.debug("mu bracket [%g, %g] misses rho=%g (expansion %d)", lo, hi, target, k)
    raise NoBracketError(
        f"no chemical-potential bracket for rho_ex={target} after {BRACKET_EXPANSIONS} expansions"
    )


def solve_variational(
    params: ModelParams,
    target_rho_ex: float,
    eta: float = 0.0,
    epsilon: float = 0.0,
) -> VariationalSolution:
    """Minimise M̄ subject to the density constraint.

    Raises ConvergenceError when the converged μ misses the target density
    by more than CONSTRAINT_TOL.
    """
    if target_rho_ex < -0.5:
        raise DomainError(f"target rho_ex must be >= -0.5, got {target_rho_ex}")

    if target_rho_ex == -0.5:
        mu = float(_lower_polariton(params, eta))
        return VariationalSolution(
            params=params, alpha=0.0, theta=0.0, phi=0.0, mu=mu, rho_ex=-0.5,
            mbar_value=mbar(0.0, 0.0, 0.0, mu, params, eta, epsilon),
            eta=eta, epsilon=epsilon,
        )

    lo, hi = _bracket(params, target_rho_ex, eta, epsilon)
    mu = brentq(
        lambda m: _density_at(m, params, eta, epsilon) - target_rho_ex,
        lo, hi, xtol=1e-14, maxiter=400,
    )
    best, tied = _minimiser(mu, params, eta, epsilon)
    solution = VariationalSolution(
        params=params,
        alpha=best.alpha,
        theta=best.theta,
        phi=best.phi,
        mu=float(mu),
        rho_ex=float(target_rho_ex),
        mbar_value=best.mbar_value,
        eta=eta,
        epsilon=epsilon,
        alternatives=tuple((p.alpha, p.theta) for p in tied),
    )
    if solution.constraint_residual > CONSTRAINT_TOL:
        raise ConvergenceError(
            f"density constraint missed by {solution.constraint_residual:.3e} "
            f"at rho_ex={target_rho_ex} (mu={mu})"
        )
    return solution


def stationarity_residual(solution: VariationalSolution, step: float = FD_STEP) -> float:
    """Central-difference ‖∇_(α,θ) M̄‖ at the solution, relative to max(1, |M̄|)."""
    def at(alpha: float, theta: float) -> float:
        return mbar(
            alpha, theta, solution.phi, solution.mu, solution.params,
            solution.eta, solution.epsilon,
        )

    a, t = solution.alpha, solution.theta
    d_alpha = (at(a + step, t) - at(a - step, t)) / (2 * step)
    d_theta = (at(a, t + step) - at(a, t - step)) / (2 * step)
    return float(np.hypot(d_alpha, d_theta) / max(1.0, abs(solution.mbar_value)))
