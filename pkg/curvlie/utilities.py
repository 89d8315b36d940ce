"""Small dense linear-algebra helpers shared by the curvlie modules.

All rank and nullity decisions are taken against the largest singular value
of the matrix involved, so subspace dimensions do not depend on the overall
scale of the input.
"""
import logging

import numpy as np
import scipy.linalg as la

logger = logging.getLogger(__name__)


def max_abs(a):
    """Largest absolute entry of an array, 0.0 for an empty one."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def numerical_rank(m, tol):
    """Rank of `m` with singular values below tol * sigma_max treated as zero.

    Parameters
    ----------
    m: array : 2-d array, any shape.
    tol: float : relative threshold.

    Returns
    -------
    rank: int
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return 0
    s = la.svdvals(m)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def column_space(m, tol):
    """Orthonormal basis (as columns) of the range of `m`."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return np.zeros((m.shape[0], 0))
    rank = numerical_rank(m, tol)
    if rank == 0:
        return np.zeros((m.shape[0], 0))
    u, _, _ = la.svd(m, full_matrices=False)
    return u[:, :rank]


def null_space(m, tol, ncols=None):
    """Orthonormal basis (as columns) of the kernel of `m`.

    Parameters
    ----------
    m: array : 2-d array.
    tol: float : relative threshold passed to scipy as rcond.
    ncols: int : number of unknowns, needed when `m` has no rows.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0:
        n = ncols if ncols is not None else m.shape[-1]
        return np.eye(n)
    if not np.any(m):
        return np.eye(m.shape[1])
    return la.null_space(m, rcond=tol)


def orthogonal_complement(basis, ambient_dim, tol, gram=None):
    """Basis of the complement of span(basis) with respect to `gram`.

    The returned columns are orthonormal for the Euclidean inner product when
    `gram` is omitted; with a Gram matrix they are orthogonal to the input
    span under <x, y> = x^T gram y.
    """
    basis = np.asarray(basis, dtype=float).reshape(ambient_dim, -1)
    if basis.shape[1] == 0:
        return np.eye(ambient_dim)
    g = np.eye(ambient_dim) if gram is None else np.asarray(gram, dtype=float)
    return null_space((g @ basis).T, tol, ncols=ambient_dim)


def coordinates(basis, v):
    """Least-squares coordinates of `v` in the columns of `basis` plus the residual norm."""
    basis = np.asarray(basis, dtype=float)
    v = np.asarray(v, dtype=float)
    if basis.shape[1] == 0:
        return np.zeros((0,) + v.shape[1:]), float(np.linalg.norm(v))
    coeffs, _, _, _ = np.linalg.lstsq(basis, v, rcond=None)
    residual = float(np.linalg.norm(basis @ coeffs - v))
    return coeffs, residual


def sym(m):
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def skew(m):
    m = np.asarray(m, dtype=float)
    return 0.5 * (m - m.T)


def block_diag(*blocks):
    """Block-diagonal matrix, accepting scalars as 1x1 blocks."""
    return la.block_diag(*[np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks])


def rotation_block(a, b):
    """The 2x2 block [[a, -b], [b, a]] whose eigenvalues are a +/- ib."""
    return np.array([[a, -b], [b, a]], dtype=float)


def jordan_block(value, size):
    """Upper-triangular real Jordan block."""
    return value * np.eye(size) + np.eye(size, k=1)
