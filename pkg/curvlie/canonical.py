"""Classification of SNC-algebras of dimension 4 and 5 up to isomorphism.

The derived algebra is brought to its standard basis, the acting derivation is
normalized within its O-equivalence class (automorphisms, inner derivations
and positive scaling), and the result is read off as a catalog family.
Every step is recorded as a ChangeOfBasis so the final form can be checked
against the catalog algebra.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from curvlie.algebra_core import (DEFAULT_TOLERANCES, ComputationError, IndeterminateError,
                                  LieInputError, LinearMap, PreconditionError,
                                  signed_real_parts)
from curvlie.catalog import (ChangeOfBasis, catalog_instantiate, family_spec, make_form,
                             standard_nilpotent)
from curvlie.extension import snc_test_auto
from curvlie.geometry import MetricAlgebra
from curvlie.jordan import real_jordan_form
from curvlie.utilities import block_diag, max_abs

logger = logging.getLogger(__name__)


class CanonicalizationError(ComputationError):
    """Raised when a normalization step fails its own consistency check."""


@dataclass(frozen=True)
class NilpotentType:
    tag: str
    dim: int
    derived_dim: int
    nilpotency_class: int


NILPOTENT_TYPES = {
    (3, 0, 1): NilpotentType("A3", 3, 0, 1),
    (3, 1, 2): NilpotentType("H3", 3, 1, 2),
    (4, 0, 1): NilpotentType("A4", 4, 0, 1),
    (4, 2, 3): NilpotentType("B4", 4, 2, 3),
    (4, 1, 2): NilpotentType("C4", 4, 1, 2),
}


def _unit(n, row, col):
    """Matrix unit E_{row,col}, 1-based."""
    e = np.zeros((n, n))
    e[row - 1, col - 1] = 1.0
    return e


def _verify_tolerance(tol):
    return math.sqrt(tol.tol_struct)


def _is_zero(value, scale, tol, what, candidates):
    """Guard-banded zero test: True below tol_struct, False above sqrt(tol_struct)."""
    v = abs(value)
    s = max(scale, 1e-300)
    if v <= tol.tol_struct * s:
        return True
    if v >= math.sqrt(tol.tol_struct) * s:
        return False
    raise IndeterminateError(f"{what} = {value:.3g} is neither clearly zero nor clearly non-zero",
                             candidates=candidates)


def identify_nilpotent(nil, tol=DEFAULT_TOLERANCES):
    """Recognize a nilpotent algebra of dimension 3 or 4 and find its standard basis.

    Returns
    -------
    (NilpotentType, ChangeOfBasis) : the columns of the change of basis satisfy
        the standard relations of the type.
    """
    if nil.dim not in (3, 4):
        raise LieInputError(f"nilpotent algebras of dimension 3 or 4 only, got {nil.dim}")
    if not nil.is_nilpotent(tol):
        raise LieInputError("algebra is not nilpotent")
    derived = nil.derived_subalgebra(tol)
    key = (nil.dim, derived.dim, nil.nilpotency_class(tol))
    try:
        ntype = NILPOTENT_TYPES[key]
    except KeyError:
        raise LieInputError(f"no nilpotent type with (dim, dim n', class) = {key}") from None
    n = nil.dim
    if ntype.tag in ("A3", "A4"):
        p = np.eye(n)
    elif ntype.tag == "B4":
        p = _filiform_basis(nil, derived, tol)
    else:
        p = _heisenberg_basis(nil, tol)
    standard = standard_nilpotent(ntype.tag)
    found = nil.change_basis(p, tol)
    if max_abs(found.c - standard.c) > _verify_tolerance(tol) * max(1.0, max_abs(nil.c)):
        raise CanonicalizationError(f"no standard basis found for {ntype.tag}")
    logger.debug("nilpotent algebra identified as %s", ntype.tag)
    return ntype, ChangeOfBasis(LinearMap(p), "identify_nilpotent")


def _largest_bracket(nil):
    n = nil.dim
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    norms = [np.linalg.norm(nil.c[i, j]) for i, j in pairs]
    return pairs[int(np.argmax(norms))]


def _heisenberg_basis(nil, tol):
    """e1, e2 from the largest bracket, e_top = [e1, e2]; for C4 a central e3 completes it."""
    n = nil.dim
    i, j = _largest_bracket(nil)
    e1, e2 = np.eye(n)[i], np.eye(n)[j]
    top = nil.bracket(e1, e2)
    if n == 3:
        return np.column_stack([e1, e2, top])
    center = nil.center(tol).basis
    unit_top = top / np.linalg.norm(top)
    rest = center - np.outer(unit_top, unit_top @ center)
    e3 = center[:, int(np.argmax(np.linalg.norm(rest, axis=0)))]
    return np.column_stack([e1, e2, e3, top])


def _filiform_basis(nil, derived, tol):
    """e1 acts most strongly on n', e2 centralizes n' outside it, e3 = [e1, e2], e4 = [e1, e3]."""
    n = nil.dim
    w = derived.basis
    strength = [np.linalg.norm(nil.ad(np.eye(n)[k]) @ w) for k in range(n)]
    e1 = np.eye(n)[int(np.argmax(strength))]
    cent = nil.centralizer(derived, tol).basis
    outside = cent - w @ (w.T @ cent)
    e2 = cent[:, int(np.argmax(np.linalg.norm(outside, axis=0)))]
    e3 = nil.bracket(e1, e2)
    e4 = nil.bracket(e1, e3)
    return np.column_stack([e1, e2, e3, e4])


def automorphism_family(tag):
    """Generators G_k with I + sum y_k G_k an automorphism for every y.

    The abelian types return an empty list; there every invertible map is an
    automorphism and the Jordan form does the work.
    """
    if tag in ("A3", "A4"):
        return []
    if tag == "H3":
        return [_unit(3, 3, 1), _unit(3, 3, 2)]
    if tag == "B4":
        return [_unit(4, 2, 1), _unit(4, 3, 1), _unit(4, 3, 2) + _unit(4, 4, 3), _unit(4, 4, 1),
                _unit(4, 4, 2)]
    if tag == "C4":
        return [_unit(4, 3, 1), _unit(4, 3, 2), _unit(4, 4, 1), _unit(4, 4, 2), _unit(4, 4, 3)]
    raise LieInputError(f"unknown nilpotent type {tag!r}")


def solve_conjugator(d, target, generators, tol=DEFAULT_TOLERANCES):
    """Find A = I + sum y_k G_k with A D = target A.

    Parameters
    ----------
    d: array : the derivation to conjugate.
    target: array : the wanted derivation.
    generators: list : matrices G_k from automorphism_family().

    Returns
    -------
    LinearMap : A, so that target = A D A^-1.
    """
    d = np.asarray(d, dtype=float)
    target = np.asarray(target, dtype=float)
    n = d.shape[0]
    if generators:
        system = np.stack([(g @ d - target @ g).ravel() for g in generators], axis=1)
        y, _, _, _ = np.linalg.lstsq(system, (target - d).ravel(), rcond=None)
        a = np.eye(n) + sum(yk * g for yk, g in zip(y, generators))
    else:
        a = np.eye(n)
    residual = max_abs(a @ d - target @ a)
    scale = max(1.0, max_abs(d), max_abs(target)) * max(1.0, max_abs(a))
    if residual > _verify_tolerance(tol) * scale:
        raise CanonicalizationError(f"no automorphism in the family reaches the target "
                                    f"(residual {residual:.3g})")
    return LinearMap(a)


def _jordan_to(m, target, tol):
    """P with P^-1 m P = target, for matrices with the same real Jordan structure."""
    jm = real_jordan_form(m, tol)
    jt = real_jordan_form(target, tol)
    shape_m = [(b.is_complex, b.size) for b in jm.blocks]
    shape_t = [(b.is_complex, b.size) for b in jt.blocks]
    if shape_m != shape_t:
        raise CanonicalizationError(f"Jordan structures differ: {shape_m} and {shape_t}")
    return jm.p.m @ np.linalg.inv(jt.p.m)


def _finish(tag, values, d, steps, lam, nil_type, tol):
    """Compose the trail, check it against the catalog family and build the form."""
    n = d.shape[0]
    p = np.eye(n)
    for step in steps:
        p = p @ step.p.m
    nil = standard_nilpotent(nil_type)
    if not nil.is_abelian() and not nil.is_automorphism(p, _loosened(tol)):
        raise CanonicalizationError(f"normalization of {tag} left the automorphism group")
    expected = family_spec(tag).builder(*values)
    reached = lam * np.linalg.solve(p, d @ p)
    deviation = max_abs(reached - expected)
    if deviation > _verify_tolerance(tol) * max(1.0, max_abs(expected)):
        raise CanonicalizationError(f"normalized derivation misses {tag} by {deviation:.3g}")
    form = make_form(tag, *values, trail=list(steps), scale=float(lam))
    logger.debug("derivation normalized to %s", form.label())
    return form


def _loosened(tol):
    """Loosened tolerances for checks on composed, already normalized maps."""
    return type(tol)(tol_struct=_verify_tolerance(tol), tol_eig=tol.tol_eig,
                     tol_curv=tol.tol_curv, tol_cluster=tol.tol_cluster)


def _positive(d, tol):
    if not np.all(signed_real_parts(d, tol) > 0):
        raise PreconditionError("derivation has an eigenvalue with non-positive real part")


def canonicalize_abelian(d, dim, tol=DEFAULT_TOLERANCES):
    """Normal form of a positive derivation of the abelian algebra of dimension 3 or 4."""
    d = d.m if isinstance(d, LinearMap) else np.asarray(d, dtype=float)
    if dim not in (3, 4) or d.shape != (dim, dim):
        raise LieInputError(f"abelian normal forms exist for dimension 3 or 4, got {d.shape}")
    _positive(d, tol)
    blocks = real_jordan_form(d, tol).blocks
    reals = [b for b in blocks if not b.is_complex]
    cplx = [b for b in blocks if b.is_complex]
    pattern = tuple(sorted(("C" if b.is_complex else "R", b.size) for b in blocks))
    singles = sorted(b.real for b in reals if b.size == 1)

    if dim == 3:
        if pattern == (("R", 1),) * 3:
            lam = 1.0 / singles[-1]
            tag, values = "4A1", (singles[0] * lam, singles[1] * lam)
        elif pattern == (("R", 1), ("R", 2)):
            big = next(b for b in reals if b.size == 2)
            lam = 1.0 / big.real
            tag, values = "4A2", (singles[0] * lam,)
        elif pattern == (("R", 3),):
            lam, tag, values = 1.0 / reals[0].real, "4A3", ()
        elif pattern == (("C", 1), ("R", 1)):
            lam = 1.0 / singles[0]
            tag, values = "4A4", (cplx[0].real * lam, cplx[0].imag * lam)
        else:
            raise CanonicalizationError(f"unexpected Jordan pattern {pattern}")
    elif pattern == (("R", 1),) * 4:
        lam = 1.0 / singles[-1]
        tag, values = "5A1", tuple(v * lam for v in singles[:3])
    elif pattern == (("R", 1), ("R", 1), ("R", 2)):
        big = next(b for b in reals if b.size == 2)
        lam = 1.0 / big.real
        tag, values = "5A2", tuple(v * lam for v in singles)
    elif pattern == (("C", 1), ("R", 1), ("R", 1)):
        lam = 1.0 / cplx[0].real
        tag, values = "5A3", (singles[0] * lam, singles[1] * lam, cplx[0].imag * lam)
    elif pattern == (("R", 1), ("R", 3)):
        big = next(b for b in reals if b.size == 3)
        lam = 1.0 / big.real
        tag, values = "5A4", (singles[0] * lam,)
    elif pattern == (("R", 2), ("R", 2)):
        small, big = sorted(b.real for b in reals)
        lam = 1.0 / big
        tag, values = "5A5", (small * lam,)
    elif pattern == (("C", 1), ("R", 2)):
        lam = 1.0 / cplx[0].real
        tag, values = "5A6", (reals[0].real * lam, cplx[0].imag * lam)
    elif pattern == (("C", 1), ("C", 1)):
        first, second = cplx
        lam = 1.0 / second.real
        tag, values = family_spec("5A7").canonical(min(first.real * lam, 1.0), first.imag * lam,
                                                   second.imag * lam)
    elif pattern == (("R", 4),):
        lam, tag, values = 1.0 / reals[0].real, "5A8", ()
    elif pattern == (("C", 2),):
        lam = 1.0 / cplx[0].real
        tag, values = "5A9", (cplx[0].imag * lam, cplx[0].imag * lam)
    else:
        raise CanonicalizationError(f"unexpected Jordan pattern {pattern}")

    values = tuple(float(v) for v in values)
    target = family_spec(tag).builder(*values)
    p = _jordan_to(lam * d, target, tol)
    return _finish(tag, values, d, [ChangeOfBasis(LinearMap(p), "jordan")], lam, "A%d" % dim, tol)


def _require_derivation(nil, d, tol):
    if not nil.is_derivation(d, _loosened(tol)):
        raise PreconditionError(f"map is not a derivation of the standard algebra "
                                f"(defect {nil.derivation_defect(d):.3g})")


def canonicalize_heisenberg3(d, tol=DEFAULT_TOLERANCES):
    """Normal form 4B1, 4B2 or 4B3 of a positive derivation of H3 in its standard basis."""
    d = d.m if isinstance(d, LinearMap) else np.asarray(d, dtype=float)
    _require_derivation(standard_nilpotent("H3"), d, tol)
    _positive(d, tol)
    x = d[:2, :2]
    delta = np.linalg.det(x)
    # closed form with det = 1: kills De1, De2 components along e3
    a = np.eye(3)
    a[:2, :2] = x / math.sqrt(delta)
    a[2, :2] = d[2, :2] @ x / delta
    steps = [ChangeOfBasis(LinearMap(np.linalg.inv(a)), "split_center")]

    t = np.trace(x)
    lam = 1.0 / t
    blocks = real_jordan_form(lam * x, tol).blocks
    if blocks[0].is_complex:
        tag, values = "4B3", (blocks[0].imag,)
    elif blocks[0].size == 2:
        tag, values = "4B2", ()
    else:
        tag, values = "4B1", (min(blocks[0].real, 0.5),)
        if abs(values[0] - 0.5) <= tol.tol_struct:
            values = (0.5,)
    target = family_spec(tag).builder(*values)
    pm = _jordan_to(lam * x, target[:2, :2], tol)
    steps.append(ChangeOfBasis(LinearMap(block_diag(pm, np.linalg.det(pm))), "jordan"))
    return _finish(tag, values, d, steps, lam, "H3", tol)


def canonicalize_dim5_B(d, tol=DEFAULT_TOLERANCES):
    """Normal form 5B1 or 5B2 of a positive derivation of B4 in its standard basis.

    A derivation of B4 is lower triangular with diagonal
    (x11, x22, x11 + x22, 2 x11 + x22); only x11 = x22 allows a Jordan block.
    """
    d = d.m if isinstance(d, LinearMap) else np.asarray(d, dtype=float)
    _require_derivation(standard_nilpotent("B4"), d, tol)
    _positive(d, tol)
    scale = max_abs(d)
    x11, x22, x21 = d[0, 0], d[1, 1], d[1, 0]
    generators = automorphism_family("B4")
    if not _is_zero(x11 - x22, scale, tol, "x11 - x22", ["5B1", "5B2"]):
        target = np.diag([x11, x22, x11 + x22, 2 * x11 + x22])
        a = solve_conjugator(d, target, generators, tol)
        steps = [ChangeOfBasis(a.inverse(), "unipotent")]
        return _finish("5B1", (x22 / x11,), d, steps, 1.0 / x11, "B4", tol)
    mu = 0.5 * (x11 + x22)
    if _is_zero(x21, scale, tol, "x21", ["5B1", "5B2"]):
        target = np.diag([mu, mu, 2 * mu, 3 * mu])
        a = solve_conjugator(d, target, generators, tol)
        steps = [ChangeOfBasis(a.inverse(), "unipotent")]
        return _finish("5B1", (1.0,), d, steps, 1.0 / mu, "B4", tol)
    target = np.diag([mu, mu, 2 * mu, 3 * mu])
    target[1, 0] = x21
    a = solve_conjugator(d, target, generators, tol)
    s = x21 / mu
    steps = [ChangeOfBasis(a.inverse(), "unipotent"),
             ChangeOfBasis(LinearMap(np.diag([1.0, s, s, s])), "scale")]
    return _finish("5B2", (), d, steps, 1.0 / mu, "B4", tol)


_SWAP_C4 = np.array([[0.0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])


def canonicalize_dim5_C(d, tol=DEFAULT_TOLERANCES):
    """Normal form of a positive derivation of C4 = H3 + R in its standard basis.

    D acts on span{e1, e2} by a block h, on e3 by x33 with couplings into e3
    and e4, and on e4 by tr h.  The coupling into e3 survives only along
    eigenvectors of h with eigenvalue x33; x43 survives only when x33 = tr h.
    """
    d = d.m if isinstance(d, LinearMap) else np.asarray(d, dtype=float)
    _require_derivation(standard_nilpotent("C4"), d, tol)
    _positive(d, tol)
    scale = max_abs(d)
    jf = real_jordan_form(d[:2, :2], tol)
    ph = jf.p.m
    p1 = block_diag(ph, 1.0, np.linalg.det(ph))
    d1 = np.linalg.solve(p1, d @ p1)
    h = jf.j.m
    first = jf.blocks[0]
    kind = "rotation" if first.is_complex else ("jordan" if first.size == 2 else "diagonal")
    t = np.trace(h)
    x33, x43 = d1[2, 2], d1[3, 2]
    top = (_is_zero(x33 - t, scale, tol, "x33 - tr h", ["5C11", "5C12", "5C13", "5C1", "5C2", "5C3"])
           and not _is_zero(x43, scale, tol, "x43", ["5C11", "5C12", "5C13", "5C1", "5C2", "5C3"]))

    # which h-eigenvectors share the eigenvalue x33
    if top or kind == "rotation":
        shared = (False, False)
    elif kind == "jordan":
        shared = (_is_zero(h[0, 0] - x33, scale, tol, "mu - x33", ["5C2", "5C8"]), False)
    else:
        shared = tuple(_is_zero(h[k, k] - x33, scale, tol, "mu - x33", ["5C1", "5C4", "5C6"])
                       for k in range(2))
    coupling = np.where(shared, d1[2, :2], 0.0)
    target = _c4_target(h, x33, coupling, x43 if top else 0.0)
    a = solve_conjugator(d1, target, automorphism_family("C4"), tol)
    steps = [ChangeOfBasis(LinearMap(p1), "jordan_h"), ChangeOfBasis(a.inverse(), "unipotent")]
    reduced = target
    coupled = [shared[k] and not _is_zero(coupling[k], scale, tol, "coupling", ["5C1", "5C4", "5C6"])
               for k in range(2)]

    if top:
        if kind == "diagonal":
            lam = 1.0 / h[1, 1]
            tag, values = "5C11", (h[0, 0] * lam,)
        elif kind == "jordan":
            lam, tag, values = 1.0 / t, "5C12", ()
        else:
            lam = 1.0 / t
            tag, values = "5C13", (h[1, 0] * lam,)
    elif kind == "rotation":
        lam = 1.0 / h[0, 0]
        tag, values = "5C3", (h[1, 0] * lam, x33 * lam)
    elif kind == "jordan":
        lam = 1.0 / h[0, 0]
        if coupled[0]:
            tag, values = "5C8", ()
        else:
            tag, values = "5C2", (1.0 if shared[0] else x33 * lam,)
    elif h[0, 0] == h[1, 1]:
        lam = 1.0 / h[0, 0]
        if any(coupled):
            c = coupling
            pm = np.column_stack([c / (c @ c), [-c[1], c[0]]])
            pc = block_diag(pm, 1.0, np.linalg.det(pm))
            steps.append(ChangeOfBasis(LinearMap(pc), "rotate_coupling"))
            reduced = np.linalg.solve(pc, reduced @ pc)
            tag, values = "5C4", (1.0,)
        else:
            tag, values = "5C1", (1.0, 1.0 if shared[0] else x33 * lam)
    elif coupled[0]:
        lam = 1.0 / h[0, 0]
        tag, values = "5C4", (h[1, 1] * lam,)
    elif coupled[1]:
        lam = 1.0 / h[1, 1]
        tag, values = "5C6", (h[0, 0] * lam,)
    else:
        steps.append(ChangeOfBasis(LinearMap(_SWAP_C4), "swap"))
        reduced = np.linalg.solve(_SWAP_C4, reduced @ _SWAP_C4)
        lam = 1.0 / h[1, 1]
        tag, values = "5C1", (h[0, 0] * lam, x33 * lam)

    scaled = lam * reduced
    s1 = 1.0 / scaled[0, 1] if kind == "jordan" else 1.0
    if top:
        s2 = s1 / scaled[3, 2]
    elif tag in ("5C4", "5C8"):
        s2 = scaled[2, 0]
    elif tag == "5C6":
        s2 = s1 * scaled[2, 1]
    else:
        s2 = 1.0
    if s1 != 1.0 or s2 != 1.0:
        steps.append(ChangeOfBasis(LinearMap(np.diag([1.0, s1, s2, s1])), "scale"))
    values = tuple(float(v) for v in values)
    return _finish(tag, values, d, steps, lam, "C4", tol)


def _c4_target(h, x33, coupling, x43):
    target = np.zeros((4, 4))
    target[:2, :2] = h
    target[2, :2] = coupling
    target[2, 2] = x33
    target[3, 2] = x43
    target[3, 3] = np.trace(h)
    return target


_CANONICALIZERS = {
    "A3": lambda d, tol: canonicalize_abelian(d, 3, tol),
    "A4": lambda d, tol: canonicalize_abelian(d, 4, tol),
    "H3": canonicalize_heisenberg3,
    "B4": canonicalize_dim5_B,
    "C4": canonicalize_dim5_C,
}


def classify(g, tol=DEFAULT_TOLERANCES):
    """Isomorphism class of a 4- or 5-dimensional SNC-algebra.

    Parameters
    ----------
    g: LieAlgebra or MetricAlgebra : the algebra; a metric only affects which
        complement of g' supplies the acting element.

    Returns
    -------
    CanonicalForm : family, parameters and the trail of basis changes. The last
        trail entry is the basis of g in which its constants equal those of the
        catalog algebra.
    """
    metric = g if isinstance(g, MetricAlgebra) else MetricAlgebra(g, tol=tol)
    alg = metric.alg
    if alg.dim not in (4, 5):
        raise LieInputError(f"classification covers dimensions 4 and 5, got {alg.dim}")
    verdict = snc_test_auto(metric, tol)
    if not verdict.is_snc:
        raise PreconditionError(f"not an SNC-algebra: {verdict.reason}")
    derived = alg.derived_subalgebra(tol)
    w = derived.basis
    ntype, identified = identify_nilpotent(alg.restrict(derived, tol), tol)
    p = identified.p.m
    a = verdict.witness_A
    d = np.linalg.solve(p, w.T @ alg.ad(a) @ w @ p)
    form = _CANONICALIZERS[ntype.tag](d, tol)

    total = p
    for step in form.trail:
        total = total @ step.p.m
    basis = np.column_stack([w @ total, form.scale * a])
    found = alg.change_basis(basis, tol)
    expected = catalog_instantiate(make_form(form.family, *form.values)).alg
    deviation = max_abs(found.c - expected.c)
    if deviation > _verify_tolerance(tol) * max(1.0, max_abs(expected.c)):
        raise CanonicalizationError(f"classified as {form.label()} but the constants differ "
                                    f"by {deviation:.3g}")
    trail = [identified] + list(form.trail) + [ChangeOfBasis(LinearMap(basis), "algebra", "algebra")]
    logger.info("classified %d-dim algebra as %s", alg.dim, form.label())
    return make_form(form.family, *form.values, trail=trail, scale=form.scale)
