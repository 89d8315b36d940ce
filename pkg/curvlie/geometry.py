"""Curvature of left-invariant metrics on Lie groups, computed on the Lie algebra.

Every tensor is expressed in the orthonormal frame obtained from the working
basis by Gram-Schmidt, so with an identity Gram matrix the frame is the
working basis itself.  Conventions:

* connection: nabla_{e_i} e_j = sum_k gamma[i, j, k] e_k
* curvature:  R(e_i, e_j) e_k = sum_l riemann[i, j, k, l] e_l with
  R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X, Y]
* sectional:  K(X, Y) = <R(X, Y) Y, X> / |X ^ Y|^2
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, NamedTuple, Optional

import numpy as np
import scipy.linalg as la

from curvlie.algebra_core import (DEFAULT_TOLERANCES, ComputationError, LieAlgebra, LieInputError,
                                  PreconditionError, Subspace)
from curvlie.utilities import coordinates, max_abs, null_space, skew, sym

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 10000
DEFAULT_ASCENT_STEPS = 100
DEFAULT_STEP = 1e-2
SAMPLE_BATCH = 2048


class MetricAlgebra:
    """A Lie algebra together with an inner product on it.

    Parameters
    ----------
    alg: LieAlgebra : the algebra, in its working basis.
    gram: array : symmetric positive-definite matrix <e_i, e_j>; identity when omitted.
    tol: ToleranceConfig : tolerances for the symmetry and definiteness checks.
    """

    def __init__(self, alg, gram=None, tol=DEFAULT_TOLERANCES):
        n = alg.dim
        gram = np.eye(n) if gram is None else np.array(gram, dtype=float)
        if gram.shape != (n, n):
            raise LieInputError(f"Gram matrix of shape {gram.shape} does not match dimension {n}")
        if not np.all(np.isfinite(gram)):
            raise LieInputError("Gram matrix has non-finite entries")
        if max_abs(gram - gram.T) > tol.tol_struct * max(1.0, max_abs(gram)):
            raise LieInputError("Gram matrix is not symmetric")
        gram = sym(gram)
        if np.linalg.eigvalsh(gram)[0] <= tol.tol_struct:
            raise LieInputError("Gram matrix is not positive definite")
        gram.setflags(write=False)
        self.alg = alg
        self.gram = gram
        self.tol = tol

    def __repr__(self):
        return f"MetricAlgebra(dim={self.dim}, orthonormal={self.is_orthonormal})"

    @property
    def dim(self):
        return self.alg.dim

    @property
    def is_orthonormal(self):
        return max_abs(self.gram - np.eye(self.dim)) == 0.0

    @cached_property
    def frame(self):
        """Upper-triangular P whose columns are the Gram-Schmidt orthonormal frame."""
        if self.is_orthonormal:
            return np.eye(self.dim)
        lower = la.cholesky(self.gram, lower=True)
        return la.solve_triangular(lower, np.eye(self.dim), lower=True).T

    @cached_property
    def c(self):
        """Structure constants in the orthonormal frame."""
        if self.is_orthonormal:
            return self.alg.c
        return self.alg.change_basis(self.frame, self.tol).c

    @cached_property
    def u(self):
        c = self.c
        return 0.5 * (np.einsum("kji->ijk", c) + np.einsum("kij->ijk", c))

    @cached_property
    def gamma(self):
        return self.u + 0.5 * self.c

    @cached_property
    def riemann(self):
        gamma, c = self.gamma, self.c
        return (np.einsum("jkm,iml->ijkl", gamma, gamma)
                - np.einsum("ikm,jml->ijkl", gamma, gamma)
                - np.einsum("ijm,mkl->ijkl", c, gamma))

    def scale(self):
        """Size of the curvature entries, used to make tolerances relative."""
        return max(1.0, max_abs(self.c)) ** 2

    def to_frame(self, v):
        """Coordinates in the orthonormal frame of a vector given in the working basis."""
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.dim:
            raise LieInputError(f"vector of length {v.shape[0]} does not match dimension {self.dim}")
        if self.is_orthonormal:
            return v
        return la.solve_triangular(self.frame, v)

    def from_frame(self, v):
        return self.frame @ np.asarray(v, dtype=float)


class ConnectionTable(NamedTuple):
    """nabla_{e_i} e_j = sum_k gamma[i, j, k] e_k in the orthonormal frame."""
    gamma: np.ndarray
    frame: np.ndarray


class ConnectionDefects(NamedTuple):
    torsion: float
    metric: float


class RiemannDefects(NamedTuple):
    antisymmetry: float
    metric_antisymmetry: float
    bianchi: float


@dataclass(frozen=True, eq=False)
class HeintzeReport:
    """Outcome of the three-part decomposition test for a locally symmetric metric.

    `failed_at` is None on success, otherwise the first failing condition:
    "a" (decomposition), "b" (symmetric part / skew derivation) or "c" (J-maps).
    """
    passed: bool
    failed_at: Optional[str]
    lam: Optional[float]
    dim_a1: int
    dim_a2: int
    defects: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class NegativityScan:
    max_k: float
    plane: np.ndarray
    samples: int
    steps: int


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    u: np.ndarray
    gamma: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    einstein: Optional[float]
    symmetric_space: bool
    nabla_r_norm: float
    constant_curvature: Optional[float]
    label: Optional[str]
    frame: np.ndarray


def orthonormalize(g):
    """The same algebra expressed in its Gram-Schmidt orthonormal frame."""
    if g.is_orthonormal:
        return g
    return MetricAlgebra(LieAlgebra(g.c, tol=g.tol, validate=False), tol=g.tol)


def u_map(g, x, y):
    """U(x, y), defined by <U(x, y), z> = 1/2 <x, [z, y]> + 1/2 <y, [z, x]>.

    Works in the working basis of `g` with its Gram matrix, so no frame change
    is needed.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c, gram = g.alg.c, g.gram
    # rows k: [e_k, y] and [e_k, x]
    zy = np.einsum("kjm,j->km", c, y)
    zx = np.einsum("kjm,j->km", c, x)
    rhs = 0.5 * (zy @ gram @ x) + 0.5 * (zx @ gram @ y)
    return np.linalg.solve(gram, rhs)


def levi_civita(g):
    return ConnectionTable(g.gamma, g.frame)


def riemann(g):
    return g.riemann


def connection_checks(g):
    """Largest violation of torsion-freeness and of metric compatibility."""
    gamma = g.gamma
    torsion = max_abs(gamma - gamma.transpose(1, 0, 2) - g.c)
    metric = max_abs(gamma + gamma.transpose(0, 2, 1))
    return ConnectionDefects(torsion, metric)


def riemann_checks(g):
    r = g.riemann
    antisymmetry = max_abs(r + r.transpose(1, 0, 2, 3))
    metric_antisymmetry = max_abs(r + r.transpose(0, 1, 3, 2))
    bianchi = max_abs(r + np.einsum("jkil->ijkl", r) + np.einsum("kijl->ijkl", r))
    return RiemannDefects(antisymmetry, metric_antisymmetry, bianchi)


def _ricci_from_formula(g):
    """Ricci tensor assembled term by term from the structure constants and U."""
    u, c = g.u, g.c
    terms = (
        -np.einsum("abk,iik->ab", u, u),
        -0.5 * np.einsum("abm,mii->ab", c, c),
        np.einsum("ibk,iak->ab", u, u),
        -0.75 * np.einsum("iam,mbi->ab", c, c),
        -0.25 * np.einsum("iam,imb->ab", c, c),
        0.25 * np.einsum("ibm,mia->ab", c, c),
        0.25 * np.einsum("ibm,mai->ab", c, c),
        -0.75 * np.einsum("iam,ibm->ab", c, c),
    )
    return sum(terms)


def _ricci_from_riemann(g):
    return np.einsum("iabi->ab", g.riemann)


def ricci(g, tol=DEFAULT_TOLERANCES):
    """Ricci tensor in the orthonormal frame, cross-checked between two derivations.

    Raises
    ------
    ComputationError
        If the closed formula and the contraction of the curvature tensor
        disagree by more than tol_curv (relative to the size of the constants).
    """
    direct = _ricci_from_formula(g)
    contracted = _ricci_from_riemann(g)
    deviation = max_abs(direct - contracted)
    if deviation > tol.tol_curv * g.scale():
        raise ComputationError(f"Ricci tensor paths disagree by {deviation:.3g}")
    return sym(contracted)


def ricci_deviation(g):
    return max_abs(_ricci_from_formula(g) - _ricci_from_riemann(g))


def scalar_curvature(g, tol=DEFAULT_TOLERANCES):
    return float(np.trace(ricci(g, tol)))


def is_einstein(g, tol=DEFAULT_TOLERANCES):
    """The Einstein constant lambda with Ric = lambda <,>, or None."""
    ric = ricci(g, tol)
    lam = float(np.trace(ric)) / g.dim
    if max_abs(ric - lam * np.eye(g.dim)) <= tol.tol_curv * g.scale():
        return lam
    return None


def sectional(g, x, y, tol=DEFAULT_TOLERANCES):
    """Sectional curvature of the plane spanned by x and y (working-basis coordinates)."""
    xf, yf = g.to_frame(x), g.to_frame(y)
    area = (xf @ xf) * (yf @ yf) - (xf @ yf) ** 2
    if area <= tol.tol_struct * (xf @ xf) * (yf @ yf):
        raise LieInputError("sectional curvature needs two linearly independent vectors")
    return float(np.einsum("ijkl,i,j,k,l->", g.riemann, xf, yf, yf, xf)) / area


def nabla_r(g):
    """Covariant derivative of the curvature tensor and its largest component.

    Returns
    -------
    (array, norm) : array[w, i, j, k, p] is the e_p component of
        (nabla_{e_w} R)(e_i, e_j) e_k.
    """
    r, gamma = g.riemann, g.gamma
    dr = (np.einsum("ijkl,wlp->wijkp", r, gamma)
          - np.einsum("wim,mjkp->wijkp", gamma, r)
          - np.einsum("wjm,imkp->wijkp", gamma, r)
          - np.einsum("wkm,ijmp->wijkp", gamma, r))
    return dr, max_abs(dr)


def is_locally_symmetric(g, tol=DEFAULT_TOLERANCES):
    _, norm = nabla_r(g)
    return norm <= tol.tol_curv * g.scale() * max(1.0, max_abs(g.c))


def constant_curvature(g, tol=DEFAULT_TOLERANCES):
    """kappa with R(X, Y) Z = kappa (<Y, Z> X - <X, Z> Y), or None."""
    n = g.dim
    if n < 2:
        return None
    eye = np.eye(n)
    template = np.einsum("jk,il->ijkl", eye, eye) - np.einsum("ik,jl->ijkl", eye, eye)
    r = g.riemann
    kappa = float(np.sum(r * template) / np.sum(template * template))
    if max_abs(r - kappa * template) <= tol.tol_curv * g.scale():
        return kappa
    return None


def _derived_frame(g, tol):
    """Orthonormal bases of g', [g', g'], its complement in g', and the unit A0."""
    frame_alg = LieAlgebra(g.c, tol=tol, validate=False)
    n = g.dim
    derived = frame_alg.derived_subalgebra(tol)
    if derived.dim != n - 1:
        raise PreconditionError(f"derived algebra has codimension {n - derived.dim}, expected 1")
    a0 = null_space(derived.basis.T, tol.tol_struct, ncols=n)[:, 0]
    a2 = frame_alg.bracket_subspaces(derived, derived, tol)
    w = derived.basis
    if a2.dim:
        inner = null_space((w.T @ a2.basis).T, tol.tol_struct, ncols=w.shape[1])
        a1 = w @ inner
    else:
        a1 = w
    return frame_alg, derived, a0, a1, a2.basis


def heintze_check(g, tol=DEFAULT_TOLERANCES):
    """Test the decomposition criterion that characterizes nabla R = 0 for K < 0.

    (a) g' = a1 + a2 with a2 = [g', g'] and [g', a2] = 0;
    (b) the symmetric part of ad A0 on g' is lam on a1 and 2 lam on a2, and the
        skew part is a derivation of g';
    (c) the maps J_i defined by [X, Y] = 2 lam sum_i <X, J_i Y> Z_i satisfy
        J_i^2 = -1, anticommute, and J_i J_k X lies in span{J_j X}.
    """
    frame_alg, derived, a0, a1, a2 = _derived_frame(g, tol)
    k1, k2 = a1.shape[1], a2.shape[1]
    threshold = tol.tol_curv * g.scale()
    defects = {}

    def report(failed_at, lam=None):
        passed = failed_at is None
        logger.debug("heintze check: passed=%s failed_at=%s lam=%s", passed, failed_at, lam)
        return HeintzeReport(passed, failed_at, lam, k1, k2, defects)

    # (a)
    defects["a"] = max_abs(np.einsum("ia,jb,ijk->kab", derived.basis, a2, frame_alg.c)) if k2 else 0.0
    if defects["a"] > threshold:
        return report("a")

    # (b)
    basis = np.hstack([a1, a2])
    m = basis.T @ frame_alg.ad(a0) @ basis
    if np.trace(m) < 0:
        m = -m
    d0, s0 = sym(m), skew(m)
    diag = np.diag(d0)
    lam = float(np.mean(diag[:k1])) if k1 else 0.5 * float(np.mean(diag[k1:]))
    target = np.diag(np.concatenate([np.full(k1, lam), np.full(k2, 2.0 * lam)]))
    defects["b_symmetric"] = max_abs(d0 - target)
    inner_alg = frame_alg.restrict(Subspace(g.dim, basis), tol)
    defects["b_skew_derivation"] = inner_alg.derivation_defect(s0)
    if (lam <= threshold or defects["b_symmetric"] > threshold
            or defects["b_skew_derivation"] > threshold):
        return report("b", lam)

    # (c)
    if k2 == 0:
        defects.update(c_alpha=0.0, c_beta=0.0, c_gamma=0.0)
        return report(None, lam)
    js = np.einsum("ia,jb,ijk,kt->tab", a1, a1, frame_alg.c, a2) / (2.0 * lam)
    eye = np.eye(k1)
    defects["c_alpha"] = max(max_abs(j @ j + eye) for j in js)
    defects["c_beta"] = 0.0
    defects["c_gamma"] = 0.0
    for i in range(k2):
        for k in range(k2):
            if i == k:
                continue
            defects["c_beta"] = max(defects["c_beta"], max_abs(js[i] @ js[k] + js[k] @ js[i]))
            product = js[i] @ js[k]
            for a in range(k1):
                images = js[:, :, a].T
                _, residual = coordinates(images, product[:, a])
                defects["c_gamma"] = max(defects["c_gamma"], residual)
    if max(defects["c_alpha"], defects["c_beta"], defects["c_gamma"]) > threshold:
        return report("c", lam)
    return report(None, lam)


def symmetric_space_label(g, tol=DEFAULT_TOLERANCES):
    """'RH4', 'CH2' or 'RH5' for the negatively curved symmetric cases, else None."""
    if g.dim not in (4, 5) or not is_locally_symmetric(g, tol):
        return None
    kappa = constant_curvature(g, tol)
    if kappa is not None and kappa < 0:
        return f"RH{g.dim}"
    if g.dim == 4:
        _, _, _, _, a2 = _derived_frame(g, tol)
        if a2.shape[1] == 1:
            return "CH2"
    return None


def _plane_curvatures(r, frames):
    """Sectional curvature for a stack of (n, 2) frames, not necessarily orthonormal."""
    x, y = frames[..., 0], frames[..., 1]
    ry = np.einsum("ijkl,sj,sk->sil", r, y, y)
    num = np.einsum("sil,si,sl->s", ry, x, x)
    area = np.einsum("si,si->s", x, x) * np.einsum("si,si->s", y, y) - np.einsum("si,si->s", x, y) ** 2
    return num / area


def _orthonormal_frames(raw):
    q, _ = np.linalg.qr(raw)
    return q


def negativity_scan(g, samples=DEFAULT_SAMPLES, steps=DEFAULT_ASCENT_STEPS, seed=0,
                    step=DEFAULT_STEP):
    """Largest sectional curvature found over the Grassmannian of 2-planes.

    Dense random sampling followed by finite-difference ascent on orthonormal
    2-frames with backtracking.  The result is a lower bound on the true maximum.

    Parameters
    ----------
    g: MetricAlgebra : algebra of dimension >= 2.
    samples: int : number of random planes.
    steps: int : number of ascent steps from the best sample.
    seed: int : seed of the random stream.
    step: float : initial ascent step.

    Returns
    -------
    NegativityScan : max_k, and the maximizing plane as two working-basis columns.
    """
    n = g.dim
    if n < 2:
        raise LieInputError("sectional curvature needs dimension >= 2")
    r = g.riemann
    rng = np.random.default_rng(seed)
    best_k, best = -np.inf, None
    for start in range(0, max(samples, 1), SAMPLE_BATCH):
        count = min(SAMPLE_BATCH, max(samples, 1) - start)
        frames = _orthonormal_frames(rng.standard_normal((count, n, 2)))
        ks = _plane_curvatures(r, frames)
        idx = int(np.argmax(ks))
        if ks[idx] > best_k:
            best_k, best = float(ks[idx]), frames[idx]

    h = 1e-6
    shifts = np.eye(2 * n).reshape(2 * n, n, 2)
    taken = 0
    while taken < steps:
        plus = _plane_curvatures(r, best[None] + h * shifts)
        minus = _plane_curvatures(r, best[None] - h * shifts)
        grad = ((plus - minus) / (2 * h)).reshape(n, 2)
        grad -= best @ (best.T @ grad)
        if np.linalg.norm(grad) <= 1e-12:
            break
        t = step
        while t > 1e-10:
            candidate = _orthonormal_frames((best + t * grad)[None])[0]
            k = float(_plane_curvatures(r, candidate[None])[0])
            if k > best_k:
                best_k, best = k, candidate
                taken += 1
                break
            t *= 0.5
        else:
            break
    logger.debug("negativity scan: max K %.6g after %d samples, %d ascent steps", best_k, samples, taken)
    return NegativityScan(best_k, g.from_frame(best), samples, taken)


def curvature_report(g, tol=DEFAULT_TOLERANCES):
    ric = ricci(g, tol)
    _, norm = nabla_r(g)
    return CurvatureReport(
        u=g.u,
        gamma=g.gamma,
        riemann=g.riemann,
        ricci=ric,
        scalar=float(np.trace(ric)),
        einstein=is_einstein(g, tol),
        symmetric_space=is_locally_symmetric(g, tol),
        nabla_r_norm=norm,
        constant_curvature=constant_curvature(g, tol),
        label=symmetric_space_label(g, tol),
        frame=g.frame,
    )
