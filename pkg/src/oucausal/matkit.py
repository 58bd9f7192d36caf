"""Dense real linear-algebra kernel.

All operations work on plain float64 numpy arrays and are pure functions.
Factorizations use scale-aware pivot thresholds, n * 2**-52 * max|entry|,
so singularity and definiteness decisions do not change under rescaling.
Matrices here are tiny (state dimension up to a few dozen), hence the
unblocked algorithms.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionError,
    EmptyResultError,
    NonFiniteError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    SingularMatrixError,
)

_EPS = 2.0**-52

# Degree-13 Pade numerator coefficients for expm, constant term first.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)


def as_matrix(value, rows: int | None = None, cols: int | None = None,
              name: str = "matrix") -> np.ndarray:
    """Validate `value` as a finite float64 matrix and return a copy.

    Raises DimensionError on shape problems and NonFiniteError on NaN/Inf.
    """
    try:
        m = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"{name}: not a rectangular numeric array ({exc})")
    if m.ndim != 2:
        raise DimensionError(f"{name}: expected 2 dimensions, got shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise DimensionError(f"{name}: expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise DimensionError(f"{name}: expected {cols} columns, got {m.shape[1]}")
    if m.size and not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name}: contains non-finite entries")
    return m


def as_vector(value, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Validate `value` as a finite float64 vector and return a copy."""
    try:
        v = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"{name}: not a numeric array ({exc})")
    if v.ndim != 1:
        raise DimensionError(f"{name}: expected 1 dimension, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"{name}: expected length {dim}, got {v.shape[0]}")
    if v.size and not np.all(np.isfinite(v)):
        raise NonFiniteError(f"{name}: contains non-finite entries")
    return v


def _require_square(m: np.ndarray, name: str) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name}: expected a square matrix, got {m.shape}")


def norm_inf(m: np.ndarray) -> float:
    """Max absolute row sum (the infinity operator norm)."""
    if m.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(m), axis=1)))


def norm_one(m: np.ndarray) -> float:
    """Max absolute column sum (the 1 operator norm)."""
    if m.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(m), axis=0)))


def _lu_decompose(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """LU with partial pivoting. Returns (packed LU, row permutation).

    Raises SingularMatrixError when a pivot magnitude is <= n * eps * max|a|.
    """
    n = a.shape[0]
    lu = a.copy()
    perm = np.arange(n)
    limit = n * _EPS * (float(np.max(np.abs(a))) if a.size else 0.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= limit:
            raise SingularMatrixError(
                f"pivot {abs(lu[p, k]):.3e} at column {k + 1} is below the "
                f"threshold {limit:.3e}; matrix is singular at working precision"
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm


def solve_linear(m, rhs) -> np.ndarray:
    """Solve M X = rhs by LU with partial pivoting.

    `rhs` may be a vector (length n) or a matrix (n x k); the result has the
    same shape. Raises SingularMatrixError when a pivot falls below
    n * 2**-52 * max|M|.
    """
    a = as_matrix(m, name="M")
    _require_square(a, "M")
    n = a.shape[0]
    try:
        b = np.array(rhs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"rhs: not a rectangular numeric array ({exc})")
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b.reshape(n, 1) if b.shape[0] == n else b
    if b.ndim != 2 or b.shape[0] != n:
        raise DimensionError(f"rhs: expected {n} rows, got shape {b.shape}")
    if b.size and not np.all(np.isfinite(b)):
        raise NonFiniteError("rhs: contains non-finite entries")
    lu, perm = _lu_decompose(a)
    x = b[perm].copy()
    for k in range(n):                      # forward substitution, unit lower
        x[k + 1:] -= lu[k + 1:, k:k + 1] * x[k]
    for k in range(n - 1, -1, -1):          # back substitution
        x[k] /= lu[k, k]
        x[:k] -= lu[:k, k:k + 1] * x[k]
    return x[:, 0] if vector_rhs else x


def expm(m) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a degree-13 Pade core.

    The squaring count is s = max(0, ceil(log2(norm1(M))) + 1), which brings
    the scaled 1-norm below 1/2; at that norm the Pade-13 approximant is
    accurate to machine precision.
    """
    a = as_matrix(m, name="M")
    _require_square(a, "M")
    n = a.shape[0]
    nrm = norm_one(a)
    s = 0 if nrm == 0.0 else max(0, int(np.ceil(np.log2(nrm))) + 1)
    a = a / (2.0**s)
    ident = np.eye(n)
    b = _PADE13
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    r = solve_linear(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r


def cholesky(m) -> np.ndarray:
    """Lower-triangular L with L L^T = M for symmetric positive-definite M.

    The input must be symmetric within 1e-9 relative (else NotSymmetricError);
    it is explicitly symmetrized before factoring. A pivot <= n * 2**-52 *
    max|M| raises NotPositiveDefiniteError.
    """
    a = as_matrix(m, name="M")
    _require_square(a, "M")
    n = a.shape[0]
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > 1e-9 * scale:
        raise NotSymmetricError(
            f"asymmetry {asym:.3e} exceeds 1e-9 relative to max entry {scale:.3e}"
        )
    a = 0.5 * (a + a.T)
    limit = n * _EPS * scale
    low = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - low[j, :j] @ low[j, :j]
        if d <= limit:
            raise NotPositiveDefiniteError(
                f"pivot {d:.3e} at step {j + 1} is below the threshold {limit:.3e}"
            )
        low[j, j] = np.sqrt(d)
        if j + 1 < n:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return low


def rank(m, tol: float | None = None) -> int:
    """Numerical rank by row reduction with partial pivoting.

    A pivot counts toward the rank when its magnitude exceeds `tol`
    (default max(rows, cols) * 2**-52 * max|M|).
    """
    a = as_matrix(m, name="M")
    nr, nc = a.shape
    if tol is None:
        tol = max(nr, nc) * _EPS * (float(np.max(np.abs(a))) if a.size else 0.0)
    elif tol < 0:
        raise DimensionError("tol must be nonnegative")
    a = a.copy()
    r = 0
    for col in range(nc):
        if r == nr:
            break
        p = r + int(np.argmax(np.abs(a[r:, col])))
        if abs(a[p, col]) <= tol:
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r + 1:, col:] -= np.outer(a[r + 1:, col] / a[r, col], a[r, col:])
        r += 1
    return r


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices, (pm) x (qn) for p x q and m x n."""
    return np.kron(as_matrix(a, name="A"), as_matrix(b, name="B"))


def principal_submatrix(m, removed) -> np.ndarray:
    """Delete the listed rows and the identical columns (1-based indices).

    The order of the surviving indices is preserved. Removing every index
    raises EmptyResultError; an out-of-range index raises DimensionError.
    """
    a = as_matrix(m, name="M")
    _require_square(a, "M")
    n = a.shape[0]
    rm = set(int(i) for i in removed)
    for i in rm:
        if not 1 <= i <= n:
            raise DimensionError(f"removed index {i} outside 1..{n}")
    if len(rm) == n:
        raise EmptyResultError("removing every index leaves an empty matrix")
    keep = [i for i in range(n) if i + 1 not in rm]
    return a[np.ix_(keep, keep)]
