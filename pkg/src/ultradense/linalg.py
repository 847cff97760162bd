"""Dense orthogonality primitives: SVD, nearest-orthogonal retraction and
seeded random orthogonal matrices.

All matrices are float64 numpy arrays and all functions are pure. The
matrices here stay small (a few hundred dimensions at most), so LAPACK's
dense SVD is the right tool; callers rely only on the factor invariants,
never on a particular decomposition algorithm.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegenerateMatrix, InvalidDimension, InvalidMatrix

# Singular values at or below this are treated as numerically zero.
RANK_TOL = 1e-12


class SvdResult(NamedTuple):
    """Factors of M = u @ diag(s) @ v.T with s non-negative, descending."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidMatrix(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix contains non-finite entries")
    return m


def svd(m) -> SvdResult:
    """Full singular value decomposition of a square matrix.

    Returns
    -------
    SvdResult
        u, s, v with ``m == u @ diag(s) @ v.T`` up to roundoff and u, v
        orthogonal. Sign/permutation ambiguity of the factors is not
        resolved; consumers must use only ambiguity-invariant products.
    """
    m = _as_square(m)
    u, s, vt = np.linalg.svd(m)
    return SvdResult(u=u, s=s, v=vt.T)


def nearest_orthogonal(m) -> np.ndarray:
    """Closest orthogonal matrix to ``m`` in the 2-norm and Frobenius norm.

    This is the polar factor u @ v.T of the SVD. Rank-deficient input is
    rejected rather than patched: a collapsed matrix mid-training means the
    transformation was destroyed and the run should abort.
    """
    u, s, v = svd(m)
    if s[-1] <= RANK_TOL:
        raise DegenerateMatrix(
            f"rank-deficient matrix (smallest singular value {s[-1]:.3e})"
        )
    return u @ v.T


def random_orthogonal(d: int, seed: int) -> np.ndarray:
    """Deterministic random orthogonal matrix for a given seed.

    Built as the nearest orthogonal matrix to a matrix of independent
    standard-normal entries, which makes the result Haar-ish distributed
    and reproducible.
    """
    if d < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    return nearest_orthogonal(rng.standard_normal((d, d)))


def is_orthogonal(m, tol: float) -> bool:
    """True iff ``||m.T @ m - I||_F <= tol``."""
    return orthogonality_error(m) <= tol


def orthogonality_error(m) -> float:
    """Frobenius distance of ``m.T @ m`` from the identity."""
    m = _as_square(m)
    return float(np.linalg.norm(m.T @ m - np.eye(m.shape[0])))
