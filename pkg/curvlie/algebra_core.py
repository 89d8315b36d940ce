"""Finite-dimensional real Lie algebras given by structure constants.

The bracket of basis vectors is [e_i, e_j] = sum_k c[i, j, k] e_k.  Only the
entries with i < j are read from the input; the rest of the array is
synthesized so antisymmetry holds exactly.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from curvlie.utilities import column_space, coordinates, max_abs, null_space

logger = logging.getLogger(__name__)

MAX_DIM = 8


class LieAlgebraError(Exception):
    """Base class for all curvlie errors."""


class LieInputError(LieAlgebraError):
    """Raised for malformed input: dimension mismatch, bad indices, broken Jacobi identity."""


class PreconditionError(LieAlgebraError):
    """Raised when an operation is called outside its domain."""


class IndeterminateError(LieAlgebraError):
    """Raised when a numerical decision falls inside a guard band.

    `candidates` lists the outcomes that could not be told apart.
    """

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = list(candidates or [])


class ComputationError(LieAlgebraError):
    """Raised for non-convergence and failed internal consistency checks."""


@dataclass(frozen=True)
class ToleranceConfig:
    tol_struct: float = 1e-9
    tol_eig: float = 1e-7
    tol_curv: float = 1e-9
    tol_cluster: float = 1e-3

    def __post_init__(self):
        for name in ("tol_struct", "tol_eig", "tol_curv", "tol_cluster"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise LieInputError(f"{name} must be strictly positive, got {value}")


DEFAULT_TOLERANCES = ToleranceConfig()


def _as_matrix(m, name="matrix"):
    m = np.array(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LieInputError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise LieInputError(f"{name} has non-finite entries")
    return m


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Square matrix acting on the underlying space; column j is the image of e_j."""
    m: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.m, "linear map")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def dim(self):
        return self.m.shape[0]

    def __matmul__(self, other):
        if isinstance(other, LinearMap):
            return LinearMap(self.m @ other.m)
        return self.m @ np.asarray(other, dtype=float)

    def inverse(self):
        return LinearMap(np.linalg.inv(self.m))

    def conjugate(self, p):
        """p^-1 M p for an invertible `p` (a LinearMap or an array)."""
        p = p.m if isinstance(p, LinearMap) else np.asarray(p, dtype=float)
        return LinearMap(np.linalg.solve(p, self.m @ p))

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^n held as a matrix whose columns are its basis."""
    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.array(self.basis, dtype=float).reshape(self.ambient_dim, -1)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self):
        return self.basis.shape[1]

    @classmethod
    def span(cls, vectors, ambient_dim, tol=DEFAULT_TOLERANCES.tol_struct):
        """Orthonormal basis of the span of the columns of `vectors`."""
        vectors = np.asarray(vectors, dtype=float).reshape(ambient_dim, -1)
        return cls(ambient_dim, column_space(vectors, tol))

    @classmethod
    def whole(cls, dim):
        return cls(dim, np.eye(dim))

    def contains(self, v, tol=DEFAULT_TOLERANCES.tol_struct):
        v = np.asarray(v, dtype=float)
        scale = max(1.0, float(np.linalg.norm(v)))
        _, residual = coordinates(self.basis, v)
        return residual <= tol * scale


class LieAlgebra:
    """Real Lie algebra of dimension <= 8 over a fixed basis.

    Parameters
    ----------
    constants: array : dim x dim x dim structure constants. Entries with i >= j are ignored.
    tol: ToleranceConfig : tolerances for the Jacobi check.
    validate: bool : when False the Jacobi identity is not enforced, so invalid
        constant sets can still be inspected with jacobi_defect().
    """

    def __init__(self, constants, tol=DEFAULT_TOLERANCES, validate=True):
        c = np.array(constants, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise LieInputError(f"structure constants must be a dim x dim x dim array, got {c.shape}")
        n = c.shape[0]
        if n < 1 or n > MAX_DIM:
            raise LieInputError(f"dimension must be between 1 and {MAX_DIM}, got {n}")
        if not np.all(np.isfinite(c)):
            raise LieInputError("structure constants have non-finite entries")
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        full = np.where(upper[:, :, None], c, 0.0)
        full = full - full.transpose(1, 0, 2)
        full.setflags(write=False)
        self._c = full
        if validate:
            defect = self.jacobi_defect()
            if defect > tol.tol_struct * self._scale() ** 2:
                raise LieInputError(f"structure constants violate the Jacobi identity (defect {defect:.3g})")

    @classmethod
    def from_brackets(cls, dim, brackets, tol=DEFAULT_TOLERANCES, validate=True):
        """Build from {(i, j): vector} with 0-based indices and i < j."""
        c = np.zeros((dim, dim, dim))
        for (i, j), vec in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise LieInputError(f"bracket index ({i}, {j}) out of range for dimension {dim}")
            if i == j:
                raise LieInputError(f"bracket [e_{i}, e_{i}] must vanish")
            vec = np.asarray(vec, dtype=float)
            if vec.shape != (dim,):
                raise LieInputError(f"bracket vector for ({i}, {j}) has shape {vec.shape}, expected ({dim},)")
            if i < j:
                c[i, j] = vec
            else:
                c[j, i] = -vec
        return cls(c, tol=tol, validate=validate)

    @classmethod
    def abelian(cls, dim):
        return cls(np.zeros((dim, dim, dim)))

    @property
    def c(self):
        return self._c

    @property
    def dim(self):
        return self._c.shape[0]

    def _scale(self):
        return max(1.0, max_abs(self._c))

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, nonzero_brackets={self.nonzero_brackets()})"

    def nonzero_brackets(self):
        n = self.dim
        return sum(1 for i in range(n) for j in range(i + 1, n) if np.any(self._c[i, j]))

    def _check_vector(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise LieInputError(f"vector of shape {x.shape} does not match algebra dimension {self.dim}")
        return x

    def bracket(self, x, y):
        x = self._check_vector(x)
        y = self._check_vector(y)
        return np.einsum("i,j,ijk->k", x, y, self._c)

    def ad(self, x):
        """Matrix of ad(x); column j is [x, e_j]."""
        x = self._check_vector(x)
        return np.einsum("i,ijk->kj", x, self._c)

    def jacobi_defect(self):
        """Max over basis triples of the norm of the cyclic Jacobi sum."""
        t = np.einsum("ijp,plm->ijlm", self._c, self._c)
        cyclic = t + np.einsum("jlim->ijlm", t) + np.einsum("lijm->ijlm", t)
        if cyclic.size == 0:
            return 0.0
        return float(np.max(np.linalg.norm(cyclic, axis=-1)))

    def is_abelian(self, tol=DEFAULT_TOLERANCES):
        return max_abs(self._c) <= tol.tol_struct

    def bracket_subspaces(self, a, b, tol=DEFAULT_TOLERANCES):
        """span{[u, v] : u in a, v in b}."""
        if a.dim == 0 or b.dim == 0:
            return Subspace(self.dim, np.zeros((self.dim, 0)))
        vecs = np.einsum("ia,jb,ijk->kab", a.basis, b.basis, self._c).reshape(self.dim, -1)
        if max_abs(vecs) <= tol.tol_struct * self._scale():
            return Subspace(self.dim, np.zeros((self.dim, 0)))
        return Subspace.span(vecs, self.dim, tol.tol_struct)

    def derived_subalgebra(self, tol=DEFAULT_TOLERANCES):
        whole = Subspace.whole(self.dim)
        return self.bracket_subspaces(whole, whole, tol)

    def lower_central_series(self, tol=DEFAULT_TOLERANCES):
        """g, [g, g], [g, [g, g]], ... until the dimension stops dropping."""
        whole = Subspace.whole(self.dim)
        series = [whole]
        while series[-1].dim > 0:
            nxt = self.bracket_subspaces(whole, series[-1], tol)
            if nxt.dim == series[-1].dim:
                break
            series.append(nxt)
        return series

    def derived_series(self, tol=DEFAULT_TOLERANCES):
        series = [Subspace.whole(self.dim)]
        while series[-1].dim > 0:
            nxt = self.bracket_subspaces(series[-1], series[-1], tol)
            if nxt.dim == series[-1].dim:
                break
            series.append(nxt)
        return series

    def is_nilpotent(self, tol=DEFAULT_TOLERANCES):
        return self.lower_central_series(tol)[-1].dim == 0

    def is_solvable(self, tol=DEFAULT_TOLERANCES):
        return self.derived_series(tol)[-1].dim == 0

    def nilpotency_class(self, tol=DEFAULT_TOLERANCES):
        series = self.lower_central_series(tol)
        if series[-1].dim != 0:
            raise PreconditionError("algebra is not nilpotent")
        return len(series) - 1

    def center(self, tol=DEFAULT_TOLERANCES):
        n = self.dim
        # row (k, m) of the system is the e_m component of [x, e_k]
        system = self._c.transpose(1, 2, 0).reshape(n * n, n)
        return Subspace(n, null_space(system, tol.tol_struct, ncols=n))

    def centralizer(self, s, tol=DEFAULT_TOLERANCES):
        """{x : [x, s] = 0}."""
        n = self.dim
        if s.dim == 0:
            return Subspace.whole(n)
        system = np.einsum("ijk,ja->aki", self._c, s.basis).reshape(-1, n)
        return Subspace(n, null_space(system, tol.tol_struct, ncols=n))

    def restrict(self, s, tol=DEFAULT_TOLERANCES):
        """Structure constants of a subalgebra in the coordinates of `s.basis`."""
        if s.ambient_dim != self.dim:
            raise LieInputError("subspace and algebra dimensions differ")
        k = s.dim
        if k == 0:
            raise LieInputError("cannot restrict to the zero subspace")
        w = s.basis
        brackets = np.einsum("ia,jb,ijk->kab", w, w, self._c).reshape(self.dim, k * k)
        coeffs, residual = coordinates(w, brackets)
        if residual > tol.tol_struct * self._scale() * max(1.0, max_abs(w)) ** 2:
            raise LieInputError(f"subspace is not closed under the bracket (residual {residual:.3g})")
        return LieAlgebra(coeffs.reshape(k, k, k).transpose(1, 2, 0), tol=tol, validate=False)

    def change_basis(self, p, tol=DEFAULT_TOLERANCES):
        """Constants in the basis f_a = sum_i p[i, a] e_i."""
        p = p.m if isinstance(p, LinearMap) else _as_matrix(p, "change of basis")
        if p.shape[0] != self.dim:
            raise LieInputError("change of basis does not match algebra dimension")
        if abs(np.linalg.det(p)) <= tol.tol_struct:
            raise LieInputError("change of basis is singular")
        images = np.einsum("ia,jb,ijk->kab", p, p, self._c).reshape(self.dim, -1)
        new = np.linalg.solve(p, images).reshape(self.dim, self.dim, self.dim).transpose(1, 2, 0)
        return LieAlgebra(new, tol=tol, validate=False)

    def derivation_defect(self, d):
        """max over basis pairs of |D[e_i, e_j] - [De_i, e_j] - [e_i, De_j]|."""
        d = self._check_map(d)
        c = self._c
        lhs = np.einsum("kp,ijp->ijk", d, c)
        rhs = np.einsum("qi,qjk->ijk", d, c) + np.einsum("qj,iqk->ijk", d, c)
        return max_abs(lhs - rhs)

    def is_derivation(self, d, tol=DEFAULT_TOLERANCES):
        d = self._check_map(d)
        return self.derivation_defect(d) <= tol.tol_struct * self._scale() * max(1.0, max_abs(d))

    def derivation_space(self, tol=DEFAULT_TOLERANCES):
        """Basis of the derivation algebra, as a list of LinearMap."""
        n = self.dim
        columns = []
        for p in range(n):
            for q in range(n):
                e = np.zeros((n, n))
                e[p, q] = 1.0
                columns.append(self._derivation_residual(e).ravel())
        system = np.stack(columns, axis=1)
        kernel = null_space(system, tol.tol_struct, ncols=n * n)
        logger.debug("derivation space of %d-dim algebra has dimension %d", n, kernel.shape[1])
        return [LinearMap(kernel[:, a].reshape(n, n)) for a in range(kernel.shape[1])]

    def _derivation_residual(self, d):
        c = self._c
        return (np.einsum("kp,ijp->ijk", d, c) - np.einsum("qi,qjk->ijk", d, c)
                - np.einsum("qj,iqk->ijk", d, c))

    def automorphism_defect(self, a):
        a = self._check_map(a)
        c = self._c
        lhs = np.einsum("kp,ijp->ijk", a, c)
        rhs = np.einsum("pi,qj,pqk->ijk", a, a, c)
        return max_abs(lhs - rhs)

    def is_automorphism(self, a, tol=DEFAULT_TOLERANCES):
        a = self._check_map(a)
        if abs(np.linalg.det(a)) <= tol.tol_struct:
            return False
        scale = self._scale() * max(1.0, max_abs(a)) ** 2
        return self.automorphism_defect(a) <= tol.tol_struct * scale

    def _check_map(self, d):
        d = d.m if isinstance(d, LinearMap) else _as_matrix(d)
        if d.shape != (self.dim, self.dim):
            raise LieInputError(f"map of shape {d.shape} does not act on a {self.dim}-dim algebra")
        return d

    def constants_close(self, other, tol=DEFAULT_TOLERANCES):
        return self.dim == other.dim and max_abs(self._c - other.c) <= tol.tol_struct * self._scale()


def eigenvalues(m):
    """All eigenvalues with multiplicity, sorted by (real part, imaginary part)."""
    m = m.m if isinstance(m, LinearMap) else _as_matrix(m)
    if m.shape[0] > MAX_DIM:
        raise LieInputError(f"eigenvalues supported up to dimension {MAX_DIM}")
    try:
        ev = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as e:
        raise ComputationError(f"eigenvalue iteration did not converge: {e}") from e
    if not np.all(np.isfinite(ev)):
        raise ComputationError("eigenvalue computation returned non-finite values")
    return ev[np.lexsort((ev.imag, ev.real))]


def signed_real_parts(m, tol=DEFAULT_TOLERANCES):
    """Real parts of the spectrum, refusing to decide the sign of any inside the guard band."""
    re = eigenvalues(m).real
    near_zero = re[np.abs(re) <= tol.tol_eig]
    if near_zero.size:
        raise IndeterminateError(
            f"eigenvalue real part {near_zero[0]:.3g} lies within the guard band {tol.tol_eig:g}",
            candidates=["positive", "non-positive"])
    return re


def in_delta_plus(alg, d, tol=DEFAULT_TOLERANCES):
    """True iff `d` is a derivation whose eigenvalues all have positive real part."""
    d = d.m if isinstance(d, LinearMap) else _as_matrix(d)
    if not alg.is_derivation(d, tol):
        raise PreconditionError(f"map is not a derivation (defect {alg.derivation_defect(d):.3g})")
    return bool(np.all(signed_real_parts(d, tol) > 0))


def a_equivalence_check(d1, d2, g, lam, tol=DEFAULT_TOLERANCES):
    """True iff d1 = lam * g^-1 d2 g, the abelian form of O-equivalence."""
    d1 = d1.m if isinstance(d1, LinearMap) else _as_matrix(d1)
    d2 = d2.m if isinstance(d2, LinearMap) else _as_matrix(d2)
    g = g.m if isinstance(g, LinearMap) else _as_matrix(g)
    if lam == 0:
        raise LieInputError("scaling factor must be non-zero")
    target = lam * np.linalg.solve(g, d2 @ g)
    return max_abs(d1 - target) <= tol.tol_struct * max(1.0, max_abs(d1))
