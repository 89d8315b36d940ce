"""Expanded Lie algebras n(D) and the strictly-negative-curvature test.

An expanded algebra adds one basis vector A_D to a nilpotent algebra n with
[A_D, X] = D(X).  A solvable algebra g carries a metric of strictly negative
sectional curvature iff its derived algebra has codimension one and some A
outside it acts on it with spectrum in the open right half plane.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from curvlie.algebra_core import (DEFAULT_TOLERANCES, LieAlgebra, LieInputError, LinearMap,
                                  PreconditionError, signed_real_parts)
from curvlie.geometry import MetricAlgebra
from curvlie.utilities import max_abs, orthogonal_complement

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ExpandedAlgebra:
    """n plus A_D; n keeps its basis as e_1..e_{n-1} and A_D is the last basis vector."""
    nil: LieAlgebra
    d: LinearMap
    total: LieAlgebra

    @property
    def dim(self):
        return self.total.dim


@dataclass(frozen=True, eq=False)
class SncVerdict:
    is_snc: bool
    codim_ok: bool
    witness_A: Optional[np.ndarray] = None
    eigen_real_parts: List[float] = field(default_factory=list)
    eigenvalues: List[complex] = field(default_factory=list)
    reason: str = ""


@dataclass(frozen=True, eq=False)
class OEquivWitness:
    """Data (g, x, lambda) with D1 = g^-1 ad(x) g + lambda g^-1 D2 g."""
    g: LinearMap
    x: np.ndarray
    lam: float

    def __post_init__(self):
        if not isinstance(self.g, LinearMap):
            object.__setattr__(self, "g", LinearMap(self.g))
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.lam == 0 or not np.isfinite(self.lam):
            raise LieInputError("O-equivalence scaling must be a non-zero finite number")


def expand(nil, d, tol=DEFAULT_TOLERANCES):
    """Build n(D).

    Parameters
    ----------
    nil: LieAlgebra : the algebra n.
    d: LinearMap : a derivation of n.

    Returns
    -------
    ExpandedAlgebra
    """
    d = d if isinstance(d, LinearMap) else LinearMap(d)
    if d.dim != nil.dim:
        raise LieInputError(f"derivation acts on dimension {d.dim}, algebra has {nil.dim}")
    if not nil.is_derivation(d, tol):
        raise PreconditionError(f"map is not a derivation (defect {nil.derivation_defect(d):.3g})")
    n = nil.dim
    c = np.zeros((n + 1, n + 1, n + 1))
    c[:n, :n, :n] = nil.c
    # [e_j, A_D] = -D(e_j); only i < j entries are stored
    c[:n, n, :n] = -d.m.T
    total = LieAlgebra(c, tol=tol)
    return ExpandedAlgebra(nil, d, total)


def expand_metric(nil, d, tol=DEFAULT_TOLERANCES):
    """n(D) with the inner product making the standard basis orthonormal."""
    return MetricAlgebra(expand(nil, d, tol).total)


def _restricted_ad(g, a, derived):
    """Matrix of ad(a) on the derived algebra in its own (orthonormal) basis."""
    w = derived.basis
    return w.T @ g.ad(a) @ w


def snc_test(g, a, tol=DEFAULT_TOLERANCES):
    """Test the negative-curvature criterion with a given A outside g'."""
    a = np.asarray(a, dtype=float)
    if a.shape != (g.dim,):
        raise LieInputError(f"witness of shape {a.shape} does not match dimension {g.dim}")
    derived = g.derived_subalgebra(tol)
    if not np.any(a) or (derived.dim > 0 and derived.contains(a, tol.tol_struct)):
        raise LieInputError("A must lie outside the derived algebra")
    if derived.dim != g.dim - 1:
        logger.debug("derived algebra has dimension %d in a %d-dim algebra", derived.dim, g.dim)
        return SncVerdict(False, False, a, [], [], "codimension")
    if not g.is_solvable(tol):
        return SncVerdict(False, True, a, [], [], "not solvable")
    restricted = _restricted_ad(g, a, derived)
    real_parts = signed_real_parts(restricted, tol)
    ev = np.linalg.eigvals(restricted)
    if np.all(real_parts < 0):
        logger.debug("all real parts negative; replacing A by -A")
        a = -a
        real_parts = -real_parts
        ev = -ev
    order = np.lexsort((ev.imag, ev.real))
    is_snc = bool(np.all(real_parts > 0))
    reason = "ok" if is_snc else "mixed spectrum"
    return SncVerdict(is_snc, True, a, sorted(float(r) for r in real_parts),
                      [complex(v) for v in ev[order]], reason)


def snc_test_auto(g, tol=DEFAULT_TOLERANCES):
    """Pick A spanning the metric orthogonal complement of g' and test with it."""
    alg = g.alg if isinstance(g, MetricAlgebra) else g
    gram = g.gram if isinstance(g, MetricAlgebra) else np.eye(alg.dim)
    derived = alg.derived_subalgebra(tol)
    if derived.dim != alg.dim - 1:
        return SncVerdict(False, False, None, [], [], "codimension")
    complement = orthogonal_complement(derived.basis, alg.dim, tol.tol_struct, gram)
    a = complement[:, 0]
    a = a / np.sqrt(a @ gram @ a)
    return snc_test(alg, a, tol)


def o_equivalence_check(nil, d1, d2, w, tol=DEFAULT_TOLERANCES):
    """True iff d1 = g^-1 ad(x) g + lambda g^-1 d2 g for the witness (g, x, lambda)."""
    d1 = d1.m if isinstance(d1, LinearMap) else np.asarray(d1, dtype=float)
    d2 = d2.m if isinstance(d2, LinearMap) else np.asarray(d2, dtype=float)
    if not nil.is_automorphism(w.g, tol):
        raise PreconditionError("witness map is not an automorphism")
    for d in (d1, d2):
        if not nil.is_derivation(d, tol):
            raise PreconditionError("O-equivalence is only defined between derivations")
    g = w.g.m
    rhs = np.linalg.solve(g, nil.ad(w.x) @ g) + w.lam * np.linalg.solve(g, d2 @ g)
    return max_abs(d1 - rhs) <= tol.tol_struct * max(1.0, max_abs(d1), max_abs(d2))


def inverse_witness(nil, w):
    """Witness for the reverse direction: (g^-1, -(1/lambda) g^-1 x, 1/lambda)."""
    g_inv = np.linalg.inv(w.g.m)
    return OEquivWitness(LinearMap(g_inv), -(1.0 / w.lam) * (g_inv @ w.x), 1.0 / w.lam)


def milnor_algebra(ell):
    """[x, y] = l(x) y - l(y) x, whose metric has constant curvature -|l|^2.

    Returns
    -------
    (LieAlgebra, expected_K)
    """
    ell = np.asarray(ell, dtype=float)
    n = ell.shape[0]
    if ell.ndim != 1 or n < 2:
        raise LieInputError("Milnor algebras need a linear form on a space of dimension >= 2")
    eye = np.eye(n)
    c = ell[:, None, None] * eye[None, :, :] - ell[None, :, None] * eye[:, None, :]
    return LieAlgebra(c), -float(ell @ ell)


def derived_witness_coordinates(g, a, tol=DEFAULT_TOLERANCES):
    """Coordinates of ad(a) restricted to g' in the orthonormal basis of g'."""
    derived = g.derived_subalgebra(tol)
    return derived, _restricted_ad(g, a, derived)


__all__ = ["ExpandedAlgebra", "SncVerdict", "OEquivWitness", "expand", "expand_metric", "snc_test",
           "snc_test_auto", "o_equivalence_check", "inverse_witness", "milnor_algebra",
           "derived_witness_coordinates"]
