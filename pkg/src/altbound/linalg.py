"""Numeric kernels for small dense real matrices.

All public operations take validated matrices produced by :func:`as_matrix`:
2-D float64 arrays with finite entries, marked read-only. Desk-scale inputs
(entries O(1), dimensions up to ~8) are assumed throughout; comparisons
against theoretical bounds always use explicit tolerances.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import NonSquare, ShapeError, Singular

# a matrix is treated as singular when |det| <= DET_TOL_FACTOR * scale**n
DET_TOL_FACTOR = 1e-12

Matrix = np.ndarray
Vector = np.ndarray


class NormKind(Enum):
    """Operator norm selector.

    MAX_ROW is the norm induced by the vector norm max|x_i|, i.e. the
    maximum absolute row sum. EUCLIDEAN is the spectral norm (largest
    singular value).
    """

    MAX_ROW = "maxrow"
    EUCLIDEAN = "euclidean"


def as_matrix(data) -> Matrix:
    """Validate matrix data and return a read-only float64 copy.

    Raises ShapeError for non-rectangular input, empty input, or entries
    that are NaN or infinite.
    """
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"not a rectangular numeric array: {exc}") from exc
    if arr.ndim != 2 or arr.size == 0:
        raise ShapeError(f"expected a non-empty 2-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ShapeError("matrix entries must be finite")
    arr.setflags(write=False)
    return arr


def identity(n: int) -> Matrix:
    out = np.eye(n)
    out.setflags(write=False)
    return out


def ones_vector(dim: int) -> Vector:
    """The all-ones vector e of the requested dimension."""
    out = np.ones(dim)
    out.setflags(write=False)
    return out


def _require_square(m: Matrix) -> None:
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"expected square matrix, got shape {m.shape}")


def op_norm(m: Matrix, kind: NormKind = NormKind.MAX_ROW) -> float:
    """Operator norm of ``m`` for the chosen vector norm."""
    if kind is NormKind.MAX_ROW:
        return float(np.abs(m).sum(axis=1).max())
    return float(np.linalg.norm(m, 2))


def stack_op_norms(stack: np.ndarray, kind: NormKind) -> np.ndarray:
    """Operator norms of a stack of matrices, shape (count, rows, cols).

    MAX_ROW uses the same row-sum arithmetic as :func:`op_norm`. The
    Euclidean branch uses the closed-form top singular value for 2x2
    stacks and falls back to per-slice SVD otherwise.
    """
    if kind is NormKind.MAX_ROW:
        return np.abs(stack).sum(axis=2).max(axis=1)
    if stack.shape[1:] == (2, 2):
        sq = (stack * stack).sum(axis=(1, 2))
        det = stack[:, 0, 0] * stack[:, 1, 1] - stack[:, 0, 1] * stack[:, 1, 0]
        disc = np.maximum(sq * sq - 4.0 * det * det, 0.0)
        return np.sqrt((sq + np.sqrt(disc)) / 2.0)
    return np.array([np.linalg.norm(m, 2) for m in stack])


def determinant(m: Matrix) -> float:
    """Determinant; closed form up to 2x2, LU-based beyond."""
    _require_square(m)
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    if n == 2:
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    return float(np.linalg.det(m))


def singularity_tolerance(m: Matrix) -> float:
    """Determinant magnitude below which ``m`` counts as singular."""
    scale = float(np.abs(m).max())
    return DET_TOL_FACTOR * scale ** m.shape[0]


def inverse(m: Matrix) -> Matrix:
    """Matrix inverse. Raises Singular when |det| is within tolerance of 0."""
    _require_square(m)
    if abs(determinant(m)) <= singularity_tolerance(m):
        raise Singular(f"matrix is singular within tolerance (det={determinant(m):.3e})")
    out = np.linalg.inv(m)
    out.setflags(write=False)
    return out


def spectral_radius(m: Matrix) -> float:
    """Largest eigenvalue modulus.

    The 2x2 case is closed-form from the characteristic polynomial so that
    rotation-like matrices (complex eigenvalue pair) are handled exactly:
    when the discriminant is negative, |lambda|^2 equals the determinant.
    """
    _require_square(m)
    n = m.shape[0]
    if n == 1:
        return abs(float(m[0, 0]))
    if n == 2:
        tr = float(m[0, 0] + m[1, 1])
        det = determinant(m)
        disc = tr * tr - 4.0 * det
        if disc >= 0.0:
            root = math.sqrt(disc)
            return max(abs(tr + root), abs(tr - root)) / 2.0
        return math.sqrt(det)
    return float(np.abs(np.linalg.eigvals(m)).max())


def apply_to_ones(m: Matrix) -> Vector:
    """The vector M e, i.e. the row sums of ``m``.

    Computed with the same summation as the MAX_ROW branch of
    :func:`op_norm`, so for nonnegative matrices
    ``max(apply_to_ones(m)) == op_norm(m, MAX_ROW)`` holds exactly.
    """
    return m.sum(axis=1)
