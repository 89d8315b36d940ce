"""Catalog of the four- and five-dimensional SNC-algebras.

Each family is an expanded algebra n(D) over one of the standard nilpotent
algebras, with D given in the basis where n has its standard relations and
A_D = e_n.  Families carry their published parameter ranges; a few are
isomorphic to others or have a parameter symmetry, and canonical_representative()
maps every instance to the unique form classify() returns.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from curvlie.algebra_core import DEFAULT_TOLERANCES, LieAlgebra, LieInputError, LinearMap, ToleranceConfig
from curvlie.extension import expand
from curvlie.geometry import MetricAlgebra
from curvlie.utilities import block_diag, jordan_block, numerical_rank, rotation_block

logger = logging.getLogger(__name__)

NIL_TYPES = ("A3", "H3", "A4", "B4", "C4")
FOLD_TOLERANCE = 1e-9


class CatalogError(LieInputError):
    """Raised for unknown families, out-of-range parameters and unrealizable families."""


def standard_nilpotent(tag):
    """The nilpotent algebra A3, H3, A4, B4 or C4 in its standard basis."""
    if tag == "A3":
        return LieAlgebra.abelian(3)
    if tag == "A4":
        return LieAlgebra.abelian(4)
    if tag == "H3":
        return LieAlgebra.from_brackets(3, {(0, 1): [0, 0, 1]})
    if tag == "B4":
        return LieAlgebra.from_brackets(4, {(0, 1): [0, 0, 1, 0], (0, 2): [0, 0, 0, 1]})
    if tag == "C4":
        return LieAlgebra.from_brackets(4, {(0, 1): [0, 0, 0, 1]})
    raise CatalogError(f"unknown nilpotent type {tag!r}")


@dataclass(frozen=True, eq=False)
class ChangeOfBasis:
    """One step of a canonicalization trail.

    `p` has the new basis vectors as columns, so a derivation D becomes p^-1 D p.
    """
    p: LinearMap
    stage: str
    direction: str = "nil"
    tol: ToleranceConfig = DEFAULT_TOLERANCES

    def __post_init__(self):
        if not isinstance(self.p, LinearMap):
            object.__setattr__(self, "p", LinearMap(self.p))
        if numerical_rank(self.p.m, self.tol.tol_struct) < self.p.dim:
            raise LieInputError(f"change of basis at stage {self.stage!r} is singular")


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    family: str
    params: Dict[str, float] = field(default_factory=dict)
    nil_type: Optional[str] = None
    trail: List[ChangeOfBasis] = field(default_factory=list)
    scale: float = 1.0

    @property
    def values(self):
        return tuple(self.params[name] for name in family_spec(self.family).params)

    def same_as(self, other, tol=1e-9):
        """Same family and parameters within `tol` (relative to the parameter size)."""
        if self.family != other.family or set(self.params) != set(other.params):
            return False
        return all(abs(self.params[k] - other.params[k]) <= tol * max(1.0, abs(other.params[k]))
                   for k in self.params)

    def label(self):
        if not self.params:
            return self.family
        inner = ", ".join(f"{k}={v:.6g}" for k, v in self.params.items())
        return f"{self.family}({inner})"

    def __repr__(self):
        return f"CanonicalForm({self.label()})"


@dataclass(frozen=True)
class FamilySpec:
    tag: str
    nil_type: str
    params: Tuple[str, ...]
    builder: Callable[..., np.ndarray]
    in_range: Callable[..., bool]
    grid: Callable[[int], List[Tuple[float, ...]]]
    canonical: Optional[Callable[..., Tuple[str, Tuple[float, ...]]]] = None
    realizable: bool = True
    symmetric: Callable[..., bool] = lambda *args: False
    note: str = ""

    @property
    def dim(self):
        return standard_nilpotent(self.nil_type).dim + 1


def _rot(a, b):
    return rotation_block(a, b)


def _pos(points):
    return [float(v) for v in np.geomspace(0.25, 4.0, points)]


def _unit(points):
    return [float(v) for v in np.linspace(0.2, 1.0, points)]


def _half(points):
    return [float(v) for v in np.linspace(0.1, 0.5, points)]


def _sorted_tuples(values, k):
    return [t for t in itertools.combinations_with_replacement(values, k)]


def _product(*lists):
    return [tuple(t) for t in itertools.product(*lists)]


def _single(points):
    return [()]


def _is_one(v):
    return abs(v - 1.0) <= FOLD_TOLERANCE


def _fold_5a5(y1):
    return "5A5", (1.0 / y1,) if y1 > 1.0 and not _is_one(y1) else (y1,)


def _fold_5a7(alpha, beta, beta_prime):
    if _is_one(alpha):
        return "5A7", (1.0, min(beta, beta_prime), max(beta, beta_prime))
    if alpha > 1.0:
        return "5A7", (1.0 / alpha, beta_prime / alpha, beta / alpha)
    return "5A7", (alpha, beta, beta_prime)


def _fold_5a9(beta, beta_prime):
    if abs(beta - beta_prime) <= FOLD_TOLERANCE * max(1.0, beta):
        return "5A9", (beta, beta)
    return _fold_5a7(1.0, beta, beta_prime)


def _fold_5c1(x1, x2):
    if x1 > 1.0 and not _is_one(x1):
        return "5C1", (1.0 / x1, x2 / x1)
    return "5C1", (x1, x2)


def _fold_5c6(x):
    if _is_one(x):
        return "5C4", (1.0,)
    return "5C6", (x,)


def _fold_5c11(x):
    if x > 1.0 and not _is_one(x):
        return "5C11", (1.0 / x,)
    return "5C11", (x,)


def _d_5a9(beta, beta_prime):
    d = block_diag(_rot(1.0, beta), _rot(1.0, beta_prime))
    d[:2, 2:] = np.eye(2)
    return d


def _d_5b2():
    # corrected Jordan form: De1 = e1 + e2
    return np.array([[1.0, 0, 0, 0], [1, 1, 0, 0], [0, 0, 2, 0], [0, 0, 0, 3]])


def _d_5b3(beta):
    return block_diag(_rot(1.0, beta), 2.0, 3.0)


def _c4(h, x33, x31=0.0, x32=0.0, x43=0.0):
    """Type-C derivation with h-block `h`, e3 eigenvalue x33, e3 coupling and x43."""
    d = np.zeros((4, 4))
    d[:2, :2] = h
    d[2, 0], d[2, 1] = x31, x32
    d[2, 2] = x33
    d[3, 2] = x43
    d[3, 3] = np.trace(h)
    return d


_JORDAN_HALF = np.array([[0.5, 1.0], [0.0, 0.5]])
_JORDAN_ONE = np.array([[1.0, 1.0], [0.0, 1.0]])

_FAMILIES = [
    # four-dimensional, abelian derived algebra
    FamilySpec("4A1", "A3", ("x", "y"), lambda x, y: np.diag([x, y, 1.0]),
               lambda x, y: 0 < x <= y <= 1, lambda p: _sorted_tuples(_unit(p), 2),
               symmetric=lambda x, y: _is_one(x) and _is_one(y)),
    FamilySpec("4A2", "A3", ("z",), lambda z: block_diag(z, jordan_block(1.0, 2)),
               lambda z: 0 < z, lambda p: _product(_pos(p))),
    FamilySpec("4A3", "A3", (), lambda: jordan_block(1.0, 3), lambda: True, _single),
    FamilySpec("4A4", "A3", ("alpha", "beta"), lambda alpha, beta: block_diag(_rot(alpha, beta), 1.0),
               lambda alpha, beta: 0 < alpha and 0 < beta, lambda p: _product(_pos(p), _pos(p)),
               symmetric=lambda alpha, beta: _is_one(alpha)),
    # four-dimensional, Heisenberg derived algebra
    FamilySpec("4B1", "H3", ("x",), lambda x: np.diag([1.0 - x, x, 1.0]),
               lambda x: 0 < x <= 0.5, lambda p: _product(_half(p)),
               symmetric=lambda x: abs(x - 0.5) <= FOLD_TOLERANCE,
               note="the boundary x = 1/2 is included"),
    FamilySpec("4B2", "H3", (), lambda: block_diag(_JORDAN_HALF, 1.0), lambda: True, _single),
    FamilySpec("4B3", "H3", ("alpha",), lambda alpha: block_diag(_rot(0.5, alpha), 1.0),
               lambda alpha: 0 < alpha, lambda p: _product(_pos(p)),
               symmetric=lambda alpha: True),
    # five-dimensional, abelian derived algebra
    FamilySpec("5A1", "A4", ("x1", "x2", "x3"), lambda x1, x2, x3: np.diag([x1, x2, x3, 1.0]),
               lambda x1, x2, x3: 0 < x1 <= x2 <= x3 <= 1, lambda p: _sorted_tuples(_unit(p), 3),
               symmetric=lambda x1, x2, x3: _is_one(x1) and _is_one(x2) and _is_one(x3)),
    FamilySpec("5A2", "A4", ("y1", "y2"), lambda y1, y2: block_diag(y1, y2, jordan_block(1.0, 2)),
               lambda y1, y2: 0 < y1 <= y2, lambda p: _sorted_tuples(_pos(p), 2)),
    FamilySpec("5A3", "A4", ("y1", "y2", "beta"),
               lambda y1, y2, beta: block_diag(y1, y2, _rot(1.0, beta)),
               lambda y1, y2, beta: 0 < y1 <= y2 and 0 < beta,
               lambda p: [t + (b,) for t in _sorted_tuples(_pos(p), 2) for b in _pos(p)],
               symmetric=lambda y1, y2, beta: _is_one(y1) and _is_one(y2)),
    FamilySpec("5A4", "A4", ("y1",), lambda y1: block_diag(y1, jordan_block(1.0, 3)),
               lambda y1: 0 < y1, lambda p: _product(_pos(p))),
    FamilySpec("5A5", "A4", ("y1",), lambda y1: block_diag(jordan_block(y1, 2), jordan_block(1.0, 2)),
               lambda y1: 0 < y1, lambda p: _product(_pos(p)), canonical=_fold_5a5,
               note="y1 and 1/y1 give isomorphic algebras"),
    FamilySpec("5A6", "A4", ("y1", "beta"),
               lambda y1, beta: block_diag(jordan_block(y1, 2), _rot(1.0, beta)),
               lambda y1, beta: 0 < y1 and 0 < beta, lambda p: _product(_pos(p), _pos(p))),
    FamilySpec("5A7", "A4", ("alpha", "beta", "beta_prime"),
               lambda alpha, beta, beta_prime: block_diag(_rot(alpha, beta), _rot(1.0, beta_prime)),
               lambda alpha, beta, beta_prime: 0 < alpha and 0 < beta and 0 < beta_prime,
               lambda p: _product(_pos(p), _pos(p), _pos(p)), canonical=_fold_5a7,
               symmetric=lambda alpha, beta, beta_prime: _is_one(alpha),
               note="(alpha, beta, beta') and (1/alpha, beta'/alpha, beta/alpha) are isomorphic"),
    FamilySpec("5A8", "A4", (), lambda: jordan_block(1.0, 4), lambda: True, _single),
    FamilySpec("5A9", "A4", ("beta", "beta_prime"), _d_5a9,
               lambda beta, beta_prime: 0 < beta and 0 < beta_prime,
               lambda p: [(b, b) for b in _pos(p)], canonical=_fold_5a9,
               note="beta != beta' is diagonalizable and belongs to 5A7"),
    # five-dimensional, filiform derived algebra
    FamilySpec("5B1", "B4", ("x",), lambda x: np.diag([1.0, x, 1.0 + x, 2.0 + x]),
               lambda x: 0 < x, lambda p: _product(_pos(p))),
    FamilySpec("5B2", "B4", (), _d_5b2, lambda: True, _single,
               note="De1 = e1 + e2; the printed De2 = e1 + e2 is not a derivation"),
    FamilySpec("5B3", "B4", ("beta",), _d_5b3, lambda beta: 0 < beta, lambda p: _product(_pos(p)),
               realizable=False,
               note="a rotation block on span{e1, e2} is never a derivation of B4"),
    # five-dimensional, Heisenberg-plus-line derived algebra
    FamilySpec("5C1", "C4", ("x1", "x2"), lambda x1, x2: _c4(np.diag([1.0, x1]), x2),
               lambda x1, x2: 0 < x1 and 0 < x2, lambda p: _product(_pos(p), _pos(p)),
               canonical=_fold_5c1, note="(x1, x2) and (1/x1, x2/x1) are isomorphic"),
    FamilySpec("5C2", "C4", ("x",), lambda x: _c4(_JORDAN_ONE, x),
               lambda x: 0 < x, lambda p: _product(_pos(p))),
    FamilySpec("5C3", "C4", ("alpha", "x"), lambda alpha, x: _c4(_rot(1.0, alpha), x),
               lambda alpha, x: 0 < alpha and 0 < x, lambda p: _product(_pos(p), _pos(p))),
    FamilySpec("5C4", "C4", ("x",), lambda x: _c4(np.diag([1.0, x]), 1.0, x31=1.0),
               lambda x: 1 <= x, lambda p: _product([float(v) for v in np.linspace(1.0, 4.0, p)])),
    FamilySpec("5C5", "C4", ("alpha",), lambda alpha: _c4(_rot(1.0, alpha), 1.0, x31=1.0),
               lambda alpha: 0 < alpha, lambda p: _product(_pos(p)),
               canonical=lambda alpha: ("5C3", (alpha, 1.0)), note="isomorphic to 5C3(alpha, x=1)"),
    FamilySpec("5C6", "C4", ("x",), lambda x: _c4(np.diag([x, 1.0]), 1.0, x32=1.0),
               lambda x: 0 < x <= 1, lambda p: _product(_unit(p)), canonical=_fold_5c6,
               note="x = 1 is 5C4(1)"),
    FamilySpec("5C7", "C4", ("alpha",), lambda alpha: _c4(_rot(1.0, alpha), 1.0, x32=1.0),
               lambda alpha: 0 < alpha, lambda p: _product(_pos(p)),
               canonical=lambda alpha: ("5C3", (alpha, 1.0)), note="isomorphic to 5C3(alpha, x=1)"),
    FamilySpec("5C8", "C4", (), lambda: _c4(_JORDAN_ONE, 1.0, x31=1.0), lambda: True, _single),
    FamilySpec("5C9", "C4", (), lambda: _c4(_JORDAN_ONE, 1.0, x32=1.0), lambda: True, _single,
               canonical=lambda: ("5C2", (1.0,)), note="isomorphic to 5C2(x=1)"),
    FamilySpec("5C10", "C4", (), lambda: _c4(_JORDAN_ONE, 1.0, x31=1.0, x32=1.0), lambda: True, _single,
               canonical=lambda: ("5C8", ()), note="isomorphic to 5C8"),
    FamilySpec("5C11", "C4", ("x",), lambda x: _c4(np.diag([x, 1.0]), x + 1.0, x43=1.0),
               lambda x: 0 < x, lambda p: _product(_pos(p)), canonical=_fold_5c11,
               note="x and 1/x give isomorphic algebras"),
    FamilySpec("5C12", "C4", (), lambda: _c4(_JORDAN_HALF, 1.0, x43=1.0), lambda: True, _single),
    FamilySpec("5C13", "C4", ("alpha",), lambda alpha: _c4(_rot(0.5, alpha), 1.0, x43=1.0),
               lambda alpha: 0 < alpha, lambda p: _product(_pos(p))),
]

FAMILIES = {spec.tag: spec for spec in _FAMILIES}


def family_spec(tag):
    try:
        return FAMILIES[tag]
    except KeyError:
        raise CatalogError(f"unknown family tag {tag!r}") from None


def families(dim=None):
    """Family tags in catalog order, optionally only those of one dimension."""
    return [spec.tag for spec in _FAMILIES if dim is None or spec.dim == dim]


def make_form(tag, *values, **kwargs):
    """CanonicalForm from positional parameter values in catalog order."""
    spec = family_spec(tag)
    if len(values) != len(spec.params):
        raise CatalogError(f"{tag} takes parameters {spec.params}, got {len(values)} values")
    return CanonicalForm(tag, dict(zip(spec.params, (float(v) for v in values))), spec.nil_type, **kwargs)


def _checked_values(f):
    spec = family_spec(f.family)
    if set(f.params) != set(spec.params):
        raise CatalogError(f"{f.family} takes parameters {spec.params}, got {sorted(f.params)}")
    values = f.values
    if not all(np.isfinite(values)) or not spec.in_range(*values):
        raise CatalogError(f"parameters {f.params} outside the range of {f.family}")
    return spec, values


def catalog_derivation(f):
    """(nilpotent algebra, derivation) of a catalog instance."""
    spec, values = _checked_values(f)
    if not spec.realizable:
        raise CatalogError(f"{f.family} is not realizable: {spec.note}")
    if f.family == "5A9" and abs(values[0] - values[1]) > FOLD_TOLERANCE * max(1.0, values[0]):
        logger.warning("5A9 with beta != beta' is diagonalizable; it is isomorphic to a 5A7 algebra")
    canonical = canonical_representative(f)
    if canonical.family != f.family or not canonical.same_as(f):
        logger.warning("%s lies outside the canonical range; it classifies as %s", f.label(),
                       canonical.label())
    return standard_nilpotent(spec.nil_type), LinearMap(spec.builder(*values))


def catalog_instantiate(f, tol=None):
    """The catalog algebra with the standard orthonormal inner product."""
    nil, d = catalog_derivation(f)
    expanded = expand(nil, d) if tol is None else expand(nil, d, tol)
    return MetricAlgebra(expanded.total)


def canonical_representative(f):
    """The form classify() returns for an instance of `f`: folds and aliases applied."""
    spec, values = _checked_values(f)
    if spec.canonical is None:
        return make_form(f.family, *values)
    tag, folded = spec.canonical(*values)
    return make_form(tag, *folded)


def is_symmetric_instance(f):
    spec, values = _checked_values(f)
    return bool(spec.symmetric(*values))


def catalog_grid(tag, points=5):
    """In-range instances of one family over a grid with `points` values per parameter."""
    spec = family_spec(tag)
    grid = [make_form(tag, *values) for values in spec.grid(points)]
    return [f for f in grid if spec.in_range(*f.values)]
