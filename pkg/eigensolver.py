"""Lowest eigenpair of real symmetric tridiagonal blocks.

The ground eigenvalue is located by Sturm-sequence bisection and its vector
by inverse iteration (LAPACK ``stebz`` + ``stein`` through
``scipy.linalg.eigh_tridiagonal``). If the returned pair misses the residual
bound, the eigenvalue is re-bracketed by a Sturm-count bisection and the
vector recomputed by inverse iteration from deterministically perturbed
shifts before giving up.

Blocks built by ``model_core`` are unreduced (every off-diagonal entry > 0),
so their eigenvalues are simple.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, solve_banded

from model_core import TridiagonalBlock

logger = logging.getLogger(__name__)

BISECTION_RTOL = 1e-14
RESIDUAL_RTOL = 1e-10
MAX_RETRIES = 3
INVERSE_ITERATIONS = 8
SHIFT_NOISE = 1e-8
NOISE_SEED = 20240917


class ConvergenceError(RuntimeError):
    """Eigenpair could not be converged within the retry budget."""


@dataclass(frozen=True, slots=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray


# ── Sturm sequences ────────────────────────────────────────────────
def gershgorin_interval(diag: np.ndarray, offdiag: np.ndarray) -> tuple[float, float]:
    """Interval enclosing every eigenvalue of the tridiagonal matrix."""
    radius = np.zeros_like(diag, dtype=float)
    if len(offdiag):
        radius[:-1] += np.abs(offdiag)
        radius[1:] += np.abs(offdiag)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def sturm_count(diag: np.ndarray, offdiag: np.ndarray, x: float) -> int:
    """Number of eigenvalues strictly below ``x``."""
    tiny = np.finfo(float).tiny
    count = 0
    q = diag[0] - x
    for i in range(len(diag)):
        if i > 0:
            q = diag[i] - x - offdiag[i - 1] ** 2 / q
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
    return count


def residual_norm(block: TridiagonalBlock, pair: EigenPair) -> float:
    """‖T v − E v‖₂."""
    v = pair.vector
    tv = block.diag * v
    if block.dim > 1:
        tv[:-1] += block.offdiag * v[1:]
        tv[1:] += block.offdiag * v[:-1]
    return float(np.linalg.norm(tv - pair.value * v))


# ── Helpers ────────────────────────────────────────────────────────
def _check_unreduced(block: TridiagonalBlock) -> None:
    if block.dim < 1:
        raise ValueError("empty tridiagonal block")
    if len(block.offdiag) != block.dim - 1:
        raise ValueError(
            f"off-diagonal length {len(block.offdiag)} does not match dimension {block.dim}"
        )
    if block.dim > 1 and not np.all(block.offdiag > 0):
        raise ValueError("block is reduced: off-diagonal entries must be strictly positive")


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    """Unit norm, first nonzero entry positive."""
    vector = vector / np.linalg.norm(vector)
    nonzero = np.flatnonzero(vector)
    if vector[nonzero[0]] < 0:
        vector = -vector
    return vector


def _residual_ok(block: TridiagonalBlock, pair: EigenPair) -> bool:
    return residual_norm(block, pair) <= RESIDUAL_RTOL * max(1.0, abs(pair.value))


def _shifted_inverse_iteration(
    block: TridiagonalBlock, shift: float, start: np.ndarray
) -> EigenPair:
    n = block.dim
    banded = np.zeros((3, n))
    banded[0, 1:] = block.offdiag
    banded[1, :] = block.diag - shift
    banded[2, :-1] = block.offdiag

    v = start / np.linalg.norm(start)
    for _ in range(INVERSE_ITERATIONS):
        w = solve_banded((1, 1), banded, v)
        v = w / np.linalg.norm(w)
    tv = block.diag * v
    tv[:-1] += block.offdiag * v[1:]
    tv[1:] += block.offdiag * v[:-1]
    return EigenPair(value=float(v @ tv), vector=_fix_sign(v))


def _bisect_lowest(block: TridiagonalBlock) -> float:
    """Lowest eigenvalue by Sturm-count bisection on the Gershgorin interval."""
    lo, hi = gershgorin_interval(block.diag, block.offdiag)
    tol = BISECTION_RTOL * max(1.0, abs(lo), abs(hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sturm_count(block.diag, block.offdiag, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _fallback(block: TridiagonalBlock) -> EigenPair:
    """Bisection estimate refined by inverse iteration, perturbing the shift on failure."""
    rng = np.random.default_rng(NOISE_SEED)
    start = np.ones(block.dim) / np.sqrt(block.dim)
    estimate = _bisect_lowest(block)
    lo, hi = gershgorin_interval(block.diag, block.offdiag)
    scale = max(1.0, abs(lo), abs(hi))
    shift = estimate
    for attempt in range(MAX_RETRIES):
        try:
            pair = _shifted_inverse_iteration(block, shift, start)
        except (LinAlgError, ValueError):
            pair = None
        if pair is not None and _residual_ok(block, pair):
            logger.debug("fallback converged on attempt %d (nu=%d)", attempt + 1, block.nu)
            return pair
        shift = estimate - SHIFT_NOISE * scale * (1.0 + rng.random())
    raise ConvergenceError(
        f"inverse iteration did not converge for nu={block.nu} "
        f"after {MAX_RETRIES} attempts"
    )


# ── Public API ─────────────────────────────────────────────────────
def ground_eigenpair(block: TridiagonalBlock) -> EigenPair:
    """Minimal eigenvalue of the block and its unit eigenvector."""
    _check_unreduced(block)
    if block.dim == 1:
        return EigenPair(value=float(block.diag[0]), vector=np.ones(1))

    lo, hi = gershgorin_interval(block.diag, block.offdiag)
    tol = BISECTION_RTOL * max(1.0, abs(lo), abs(hi))
    try:
        values, vectors = eigh_tridiagonal(
            block.diag,
            block.offdiag,
            select="i",
            select_range=(0, 0),
            lapack_driver="stebz",
            tol=tol,
        )
    except LinAlgError as exc:
        logger.warning("LAPACK eigensolve failed for nu=%d (%s); using fallback", block.nu, exc)
        return _fallback(block)

    pair = EigenPair(value=float(values[0]), vector=_fix_sign(vectors[:, 0]))
    if not _residual_ok(block, pair):
        logger.warning(
            "residual %.3e above bound for nu=%d; using fallback",
            residual_norm(block, pair), block.nu,
        )
        return _fallback(block)
    return pair


def all_eigenvalues(block: TridiagonalBlock) -> np.ndarray:
    """Full spectrum in ascending order (Sturm bisection)."""
    _check_unreduced(block)
    if block.dim == 1:
        return np.array([float(block.diag[0])])
    return eigh_tridiagonal(
        block.diag,
        block.offdiag,
        eigvals_only=True,
        lapack_driver="stebz",
    )
