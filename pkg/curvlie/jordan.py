"""Real Jordan canonical form of small dense matrices.

Eigenvalues are clustered, block sizes are read off the ranks of powers of
(M - mu I), and the change of basis is taken from the near-kernel of the
Sylvester operator P -> MP - PJ.
"""
import logging
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np
import scipy.linalg as la

from curvlie.algebra_core import (DEFAULT_TOLERANCES, ComputationError, LieInputError, LinearMap,
                                  eigenvalues)
from curvlie.utilities import block_diag, jordan_block

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
MAX_JORDAN_DIM = 8
COMBINATION_TRIES = 16


@dataclass(frozen=True)
class JordanBlock:
    """One block of a real Jordan form.

    For a complex pair a +/- ib (b > 0) `size` counts the complex block, so the
    real block occupies 2 * size rows.
    """
    real: float
    imag: float
    size: int

    @property
    def is_complex(self):
        return self.imag > 0

    @property
    def real_dim(self):
        return 2 * self.size if self.is_complex else self.size

    def matrix(self):
        if not self.is_complex:
            return jordan_block(self.real, self.size)
        k = self.size
        rot = np.array([[self.real, -self.imag], [self.imag, self.real]])
        out = np.kron(np.eye(k), rot) + np.kron(np.eye(k, k=1), np.eye(2))
        return out

    def sort_key(self):
        return (self.real, self.imag, self.size)


class JordanForm(NamedTuple):
    j: LinearMap
    p: LinearMap
    blocks: List[JordanBlock]
    condition: float


def _cluster(values, threshold):
    """Single-linkage clusters of eigenvalues closer than `threshold`."""
    n = len(values)
    labels = list(range(n))

    def find(a):
        while labels[a] != a:
            labels[a] = labels[labels[a]]
            a = labels[a]
        return a

    for a in range(n):
        for b in range(a + 1, n):
            if abs(values[a] - values[b]) <= threshold:
                labels[find(a)] = find(b)
    groups = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(values[a])
    return [np.array(g) for g in groups.values()]


def _rank(m, reference, tol):
    s = la.svdvals(m)
    if s.size == 0 or reference == 0.0:
        return 0
    return int(np.sum(s > tol * reference))


def _block_sizes(m, mu, multiplicity, tol):
    """Sizes of the (complex) Jordan blocks of eigenvalue `mu`."""
    n = m.shape[0]
    dtype = complex if np.iscomplexobj(mu) and mu.imag != 0 else float
    nmat = m.astype(dtype) - mu * np.eye(n, dtype=dtype)
    sigma = max(1.0, float(la.svdvals(nmat)[0]))
    ranks = [n]
    power = np.eye(n, dtype=dtype)
    for k in range(1, multiplicity + 1):
        power = power @ nmat
        ranks.append(_rank(power, sigma ** k, tol.tol_struct))
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, multiplicity + 1)] + [0]
    sizes = []
    for k in range(1, multiplicity + 1):
        sizes.extend([k] * (at_least[k - 1] - at_least[k]))
    if sum(sizes) != multiplicity:
        logger.debug("ranks %s of (M - %s I) do not account for multiplicity %d",
                     ranks, mu, multiplicity)
        return None
    return sizes


def _group_blocks(m, group, threshold, floor, tol):
    """Blocks of one eigenvalue cluster, split more finely while the ranks disagree with its size."""
    mu = complex(np.mean(group))
    if abs(mu.imag) <= threshold:
        mu, imag = mu.real, 0.0
    elif mu.imag > 0:
        imag = mu.imag
    else:
        return []
    sizes = _block_sizes(m, mu, len(group), tol)
    if sizes is not None:
        return [JordanBlock(mu.real, imag, size) for size in sizes]
    finer = threshold * tol.tol_cluster
    if len(group) == 1 or finer < floor:
        raise ComputationError(f"inconsistent Jordan structure for eigenvalue {mu:.6g} "
                               f"with multiplicity {len(group)}")
    blocks = []
    for sub in _cluster(list(group), finer):
        blocks.extend(_group_blocks(m, sub, finer, floor, tol))
    return blocks


def jordan_blocks(m, tol=DEFAULT_TOLERANCES):
    """Real Jordan blocks of `m`, sorted by (real part, |imag|, size)."""
    m = m.m if isinstance(m, LinearMap) else np.asarray(m, dtype=float)
    if m.shape[0] > MAX_JORDAN_DIM:
        raise LieInputError(f"Jordan form supported up to dimension {MAX_JORDAN_DIM}")
    ev = eigenvalues(m)
    scale = max(1.0, float(np.max(np.abs(ev))))
    threshold = tol.tol_cluster * scale
    floor = tol.tol_struct * scale
    blocks = []
    for group in _cluster(list(ev), threshold):
        blocks.extend(_group_blocks(m, group, threshold, floor, tol))
    blocks.sort(key=JordanBlock.sort_key)
    if sum(b.real_dim for b in blocks) != m.shape[0]:
        raise ComputationError("unpaired complex eigenvalues in a real matrix")
    logger.debug("jordan blocks: %s", [(round(b.real, 6), round(b.imag, 6), b.size) for b in blocks])
    return blocks


def _centralizer_dim(blocks):
    """Dimension of the real centralizer of the Jordan matrix with these blocks."""
    total = 0
    keyed = {}
    for b in blocks:
        keyed.setdefault((b.real, b.imag), []).append(b)
    for group in keyed.values():
        inner = sum(min(a.size, b.size) for a in group for b in group)
        total += 2 * inner if group[0].is_complex else inner
    return total


def real_jordan_form(m, tol=DEFAULT_TOLERANCES, seed=0):
    """Real Jordan form J and change of basis P with P^-1 M P = J.

    Parameters
    ----------
    m: LinearMap or array : square real matrix, dimension <= 8.
    tol: ToleranceConfig : clustering and rank tolerances.
    seed: int : seed for the random combination of centralizer solutions.

    Returns
    -------
    JordanForm : (j, p, blocks, condition). A warning is logged when the
        condition number of p exceeds 1e12.
    """
    m = m.m if isinstance(m, LinearMap) else np.asarray(m, dtype=float)
    n = m.shape[0]
    blocks = jordan_blocks(m, tol)
    j = block_diag(*[b.matrix() for b in blocks])
    sylvester = np.kron(np.eye(n), m) - np.kron(j.T, np.eye(n))
    expected = _centralizer_dim(blocks)
    _, _, vh = la.svd(sylvester)
    kernel = vh[-expected:].T
    rng = np.random.default_rng(seed)
    best, best_cond = None, np.inf
    for _ in range(COMBINATION_TRIES):
        p = (kernel @ rng.standard_normal(expected)).reshape(n, n, order="F")
        cond = np.linalg.cond(p)
        if cond < best_cond:
            best, best_cond = p, cond
        if cond < 1e3:
            break
    p = best / np.max(np.abs(best))
    if best_cond > CONDITION_LIMIT:
        logger.warning("Jordan change of basis is ill-conditioned (condition number %.3g)", best_cond)
    residual = np.linalg.norm(m @ p - p @ j, 2)
    reference = max(1.0, np.linalg.norm(m, 2)) * np.linalg.norm(p, 2)
    if residual > tol.tol_struct * reference:
        raise ComputationError(f"Jordan decomposition residual {residual:.3g} too large")
    return JordanForm(LinearMap(j), LinearMap(p), blocks, float(best_cond))
