"""Rank and row-space dimension arithmetic over small dense real matrices.

Every user information index value is an integer rank, so the whole package
funnels through :func:`numeric_rank`. Ranks are taken by singular-value
thresholding relative to the largest singular value.
"""

import numpy as np

from .errors import InputError

DEFAULT_TOL = 1e-9


def _as_matrix(m, name="matrix"):
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} has non-finite entries")
    return a


def _check_tol(tol):
    if not 0.0 < tol < 1.0:
        raise InputError(f"relative rank threshold must lie in (0, 1), got {tol}")


def numeric_rank(m, tol=DEFAULT_TOL):
    """Number of singular values above ``tol * sigma_max * max(rows, cols)``.

    Empty and all-zero matrices have rank 0.
    """
    _check_tol(tol)
    a = _as_matrix(m)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0] * max(a.shape)))


def _stack(blocks):
    mats = [_as_matrix(b, f"block {i}") for i, b in enumerate(blocks)]
    cols = {m.shape[1] for m in mats}
    if len(cols) > 1:
        raise InputError(f"blocks disagree on column count: {sorted(cols)}")
    return np.vstack(mats)


def stacked_row_space_dim(blocks, tol=DEFAULT_TOL):
    """Dimension of the sum of the blocks' row spaces."""
    if len(blocks) == 0:
        return 0
    return numeric_rank(_stack(blocks), tol)


def intersection_dim(m1, m2, tol=DEFAULT_TOL):
    """dim(row(m1) ∩ row(m2)), taken through the modular rank identity."""
    both = _stack([m1, m2])
    dim = numeric_rank(m1, tol) + numeric_rank(m2, tol) - numeric_rank(both, tol)
    return max(dim, 0)


def row_space_contains(container, candidate, tol=DEFAULT_TOL):
    """True iff every row of ``candidate`` lies in the row space of ``container``."""
    both = _stack([container, candidate])
    return numeric_rank(both, tol) == numeric_rank(container, tol)


def row_space_basis(m, tol=DEFAULT_TOL):
    """Orthonormal bases ``(basis, complement)`` of the row space of ``m`` and of
    its orthogonal complement, both stored as rows."""
    a = _as_matrix(m)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.zeros((0, n)), np.eye(n)
    r = numeric_rank(a, tol)
    _, _, vt = np.linalg.svd(a, full_matrices=True)
    return vt[:r].copy(), vt[r:].copy()
