"""Stability and semistability of square matrices, decided without eigenvalues.

A matrix B is stable (Hurwitz) iff the Lyapunov equation B X + X B^T = -I has
a symmetric positive-definite solution, which a Cholesky factorization
certifies. The spectral abscissa (max real part of the eigenvalues) is found
by bisecting on the shift s, using the fact that B - s I is stable exactly
when s exceeds the abscissa; Gershgorin row bounds bracket the search.

Semistability ("no eigenvalue with positive real part") is decided up to a
tolerance band: exact imaginary-axis eigenvalues are not decidable in
floating point, so |abscissa| <= tol is reported as semistable-not-stable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import matkit
from .errors import (
    DimensionError,
    NotPositiveDefiniteError,
    SingularMatrixError,
    TooLargeError,
)

DEFAULT_TOL = 1e-9
DEFAULT_SUBSET_BUDGET = 2**14


class Classification(str, Enum):
    STABLE = "Stable"
    SEMISTABLE_NOT_STABLE = "SemistableNotStable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class StabilityReport:
    """Three-way classification with the abscissa estimate and certificate.

    `spectral_abscissa` is a bisection estimate accurate to `tol` (it is an
    upper BOUND, not an estimate, for fast-path submatrix entries; see
    `screen_principal_submatrices`). `certificate`, present iff Stable, is a
    symmetric positive-definite X with B X + X B^T = -I.
    """

    classification: Classification
    spectral_abscissa: float
    tol: float
    certificate: np.ndarray | None = None


@dataclass(frozen=True)
class SubmatrixScreen:
    """Classification of principal submatrices, keyed by removed index sets."""

    entries: tuple[tuple[frozenset[int], StabilityReport], ...]
    all_proper_principal_submatrices_stable: bool
    fast_path: bool = False


def lyapunov_unit_solution(b: np.ndarray) -> np.ndarray:
    """Solve B X + X B^T = -I via the Kronecker-vectorized dense system.

    Raises SingularMatrixError when some eigenvalue pair of B sums to zero.
    The returned X is explicitly symmetrized.
    """
    n = b.shape[0]
    ident = np.eye(n)
    k = matkit.kron(ident, b) + matkit.kron(b, ident)
    x = matkit.solve_linear(k, -ident.ravel()).reshape(n, n)
    return 0.5 * (x + x.T)


def is_stable(b) -> tuple[bool, np.ndarray | None]:
    """Decide stability of B; on success also return the Lyapunov certificate.

    True iff B X + X B^T = -I is solvable with positive-definite X. A
    singular Kronecker system already implies B is not stable.
    """
    a = matkit.as_matrix(b, name="B")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"B must be square, got {a.shape}")
    try:
        x = lyapunov_unit_solution(a)
    except SingularMatrixError:
        return False, None
    try:
        matkit.cholesky(x)
    except NotPositiveDefiniteError:
        return False, None
    return True, x


def gershgorin_real_bounds(b: np.ndarray) -> tuple[float, float]:
    """Bounds on the real parts of the eigenvalues from Gershgorin rows."""
    d = np.diag(b)
    radii = np.sum(np.abs(b), axis=1) - np.abs(d)
    return float(np.min(d - radii)), float(np.max(d + radii))


def spectral_abscissa(b, tol: float = DEFAULT_TOL) -> float:
    """Max real part of the eigenvalues of B, to within +- tol, by bisection.

    B - s I is stable iff s > abscissa, so each stability test halves the
    Gershgorin bracket.
    """
    a = matkit.as_matrix(b, name="B")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"B must be square, got {a.shape}")
    if tol <= 0:
        raise DimensionError("tol must be positive")
    lo, hi = gershgorin_real_bounds(a)
    hi += 1.0  # strictly above the abscissa, so B - hi I is stable
    ident = np.eye(a.shape[0])
    iterations = 0
    while hi - lo > tol and iterations < 200:
        mid = 0.5 * (lo + hi)
        if is_stable(a - mid * ident)[0]:
            hi = mid
        else:
            lo = mid
        iterations += 1
    return 0.5 * (lo + hi)


def classify(b, tol: float = DEFAULT_TOL) -> StabilityReport:
    """Three-way stability classification of B.

    Stable when the abscissa estimate is below -tol (with certificate),
    Unstable above +tol, and SemistableNotStable inside the band.
    """
    a = matkit.as_matrix(b, name="B")
    abscissa = spectral_abscissa(a, tol)
    if abscissa < -tol:
        _, certificate = is_stable(a)
        return StabilityReport(Classification.STABLE, abscissa, tol, certificate)
    if abscissa > tol:
        return StabilityReport(Classification.UNSTABLE, abscissa, tol)
    return StabilityReport(Classification.SEMISTABLE_NOT_STABLE, abscissa, tol)


def _is_symmetric(a: np.ndarray) -> bool:
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    return float(np.max(np.abs(a - a.T))) <= 1e-9 * scale if a.size else True


def screen_principal_submatrices(
    b,
    max_size_removed: int | None = None,
    budget: int = DEFAULT_SUBSET_BUDGET,
    tol: float = DEFAULT_TOL,
    use_fast_path: bool = True,
) -> SubmatrixScreen:
    """Classify the principal submatrices of B.

    Enumerates removal sets of size 0..max_size_removed (default p-1, i.e.
    every proper principal submatrix); raises TooLargeError when the count
    exceeds `budget`. Entries are ordered by removal-set size, then
    lexicographically, so output is deterministic.

    Symmetric fast path: a symmetric stable matrix has only stable principal
    submatrices (eigenvalue interlacing), so when B is symmetric and stable
    all entries are marked Stable without per-submatrix bisection; their
    reported abscissa is then the parent's abscissa, which interlacing makes
    a valid upper bound.
    """
    a = matkit.as_matrix(b, name="B")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"B must be square, got {a.shape}")
    p = a.shape[0]
    max_removed = p - 1 if max_size_removed is None else min(max_size_removed, p - 1)
    if max_removed < 0:
        raise DimensionError("max_size_removed must be nonnegative")
    total = sum(math.comb(p, k) for k in range(max_removed + 1))
    if total > budget:
        raise TooLargeError(
            f"{total} removal sets exceed the budget of {budget}; "
            "restrict max_size_removed"
        )
    removal_sets = [
        frozenset(combo)
        for k in range(max_removed + 1)
        for combo in itertools.combinations(range(1, p + 1), k)
    ]

    base = classify(a, tol)
    if use_fast_path and _is_symmetric(a) and base.classification is Classification.STABLE:
        entries = [(frozenset(), base)]
        bound = StabilityReport(
            Classification.STABLE, base.spectral_abscissa, tol, None
        )
        entries.extend((rm, bound) for rm in removal_sets[1:])
        return SubmatrixScreen(tuple(entries), True, fast_path=True)

    entries = [(frozenset(), base)]
    for rm in removal_sets[1:]:
        sub = matkit.principal_submatrix(a, rm)
        entries.append((rm, classify(sub, tol)))
    all_proper = all(
        rep.classification is Classification.STABLE
        for rm, rep in entries
        if rm
    )
    return SubmatrixScreen(tuple(entries), all_proper, fast_path=False)


def verify_diagonal_certificate(b, diag) -> bool:
    """Check that D = diag(diag) is positive and B D + D B^T is negative definite.

    The definiteness test is a Cholesky factorization of -(B D + D B^T).
    """
    a = matkit.as_matrix(b, name="B")
    d = matkit.as_vector(diag, a.shape[0], "diag")
    if np.any(d <= 0.0):
        return False
    m = a * d[None, :]          # B D for diagonal D
    s = -(m + m.T)
    try:
        matkit.cholesky(s)
    except NotPositiveDefiniteError:
        return False
    return True


def _definiteness_score(a: np.ndarray, d: np.ndarray) -> float:
    """Smallest Cholesky pivot of -(B D + D B^T); negative means a violation.

    Used as the search objective: the first failing pivot measures how far
    the candidate is from yielding a negative-definite B D + D B^T.
    """
    m = a * d[None, :]
    s = -(m + m.T)
    s = 0.5 * (s + s.T)
    n = s.shape[0]
    low = np.zeros_like(s)
    worst = np.inf
    for j in range(n):
        piv = s[j, j] - low[j, :j] @ low[j, :j]
        if piv <= 0.0:
            return float(piv)
        worst = min(worst, float(piv))
        low[j, j] = np.sqrt(piv)
        if j + 1 < n:
            low[j + 1:, j] = (s[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return worst


def diagonal_lyapunov_certificate(
    b, budget: int = 10_000, seed: int = 0
) -> np.ndarray | None:
    """Search for a positive diagonal D with B D + D B^T negative definite.

    Heuristic: random restarts over log-diagonal entries followed by
    coordinate-wise multiplicative refinement, maximizing the smallest
    Cholesky pivot of -(B D + D B^T); at most `budget` score evaluations.
    A candidate is returned (as the diagonal vector) only after
    `verify_diagonal_certificate` passes exactly. Returning None proves
    nothing: the search is deterministic for a given (seed, budget) but
    incomplete.
    """
    a = matkit.as_matrix(b, name="B")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"B must be square, got {a.shape}")
    if budget < 1:
        raise DimensionError("budget must be >= 1")
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    evaluations = 0
    factors = (2.0, 0.5, 1.25, 0.8)

    while evaluations < budget:
        log_d = rng.uniform(-2.0, 2.0, size=n)
        d = np.exp(log_d)
        score = _definiteness_score(a, d)
        evaluations += 1
        if score > 0.0 and verify_diagonal_certificate(a, d):
            return d
        improving = True
        while improving and evaluations < budget:
            improving = False
            for i in range(n):
                for f in factors:
                    if evaluations >= budget:
                        break
                    trial = d.copy()
                    trial[i] *= f
                    trial_score = _definiteness_score(a, trial)
                    evaluations += 1
                    if trial_score > score:
                        d, score = trial, trial_score
                        improving = True
                        if score > 0.0 and verify_diagonal_certificate(a, d):
                            return d
    return None
