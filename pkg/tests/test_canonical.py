"""Tests for identification and classification of SNC-algebras."""
import numpy as np
import pytest

from curvlie.algebra_core import (IndeterminateError, LieAlgebra, LieInputError, LinearMap,
                                  PreconditionError, ToleranceConfig)
from curvlie.canonical import (CanonicalizationError, automorphism_family, canonicalize_abelian,
                               canonicalize_dim5_B, canonicalize_dim5_C, canonicalize_heisenberg3,
                               classify, identify_nilpotent, solve_conjugator)
from curvlie.catalog import (canonical_representative, catalog_derivation, catalog_instantiate,
                             make_form, standard_nilpotent)
from curvlie.extension import expand
from curvlie.utilities import rotation_block

LOOSE = ToleranceConfig(tol_struct=1e-6)


def _scrambler(n, seed):
    rng = np.random.default_rng(seed)
    while True:
        q = rng.standard_normal((n, n))
        if np.linalg.cond(q) < 20:
            return q


def _scrambled(form, seed=0, factor=2.5):
    nil, d = catalog_derivation(form)
    total = expand(nil, LinearMap(factor * d.m)).total
    return total.change_basis(_scrambler(total.dim, seed))


class TestIdentifyNilpotent:
    @pytest.mark.parametrize("tag", ["A3", "H3", "A4", "B4", "C4"])
    def test_scrambled(self, tag):
        std = standard_nilpotent(tag)
        nil = std.change_basis(_scrambler(std.dim, 1))
        ntype, step = identify_nilpotent(nil)
        assert ntype.tag == tag
        assert nil.change_basis(step.p).constants_close(std, LOOSE)
        assert step.stage == "identify_nilpotent"

    def test_not_nilpotent(self):
        alg = LieAlgebra.from_brackets(3, {(0, 1): [0, 1, 0]})
        with pytest.raises(LieInputError):
            identify_nilpotent(alg)

    def test_dimension(self):
        with pytest.raises(LieInputError):
            identify_nilpotent(LieAlgebra.abelian(5))


class TestAutomorphisms:
    @pytest.mark.parametrize("tag", ["H3", "B4", "C4"])
    def test_unipotent_family(self, tag):
        """I + sum y_k G_k is an automorphism for arbitrary y."""
        nil = standard_nilpotent(tag)
        gens = automorphism_family(tag)
        y = np.random.default_rng(2).standard_normal(len(gens))
        a = np.eye(nil.dim) + sum(yk * g for yk, g in zip(y, gens))
        assert nil.is_automorphism(a)

    def test_abelian_types(self):
        assert automorphism_family("A3") == []
        with pytest.raises(LieInputError):
            automorphism_family("X9")

    def test_solve_conjugator(self):
        d = np.diag([1.0, 1.0, 2.0])
        d[2, 0] = 1.0
        target = np.diag([1.0, 1.0, 2.0])
        a = solve_conjugator(d, target, automorphism_family("H3"))
        np.testing.assert_allclose(a.m @ d, target @ a.m, atol=1e-12)

    def test_unreachable_target(self):
        with pytest.raises(CanonicalizationError):
            solve_conjugator(np.diag([1.0, 1.0, 2.0]), np.diag([1.0, 2.0, 3.0]),
                             automorphism_family("H3"))


class TestNormalForms:
    def test_abelian_diagonal(self):
        form = canonicalize_abelian(np.diag([2.0, 1.0, 1.0]), 3)
        assert form.family == "4A1"
        assert form.same_as(make_form("4A1", 0.5, 0.5))
        assert form.scale == pytest.approx(0.5)

    def test_abelian_full_jordan(self):
        m = np.eye(4) * 3.0 + np.eye(4, k=1)
        assert canonicalize_abelian(m, 4).family == "5A8"

    def test_abelian_rotation_pair(self):
        m = np.zeros((4, 4))
        m[:2, :2] = rotation_block(4.0, 2.0)
        m[2:, 2:] = rotation_block(2.0, 6.0)
        form = canonicalize_abelian(m, 4)
        assert form.same_as(canonical_representative(make_form("5A7", 2.0, 1.0, 3.0)))

    def test_abelian_close_eigenvalues(self):
        form = canonicalize_abelian(np.diag([1.0, 1.0002, 1.0004]), 3)
        assert form.same_as(make_form("4A1", 1.0 / 1.0004, 1.0002 / 1.0004))

    def test_abelian_not_positive(self):
        with pytest.raises(PreconditionError):
            canonicalize_abelian(np.diag([1.0, -1.0, 2.0]), 3)

    def test_heisenberg_diagonal(self):
        form = canonicalize_heisenberg3(np.diag([2.0, 1.0, 3.0]))
        assert form.family == "4B1"
        assert form.params["x"] == pytest.approx(1.0 / 3.0)

    def test_heisenberg_rotation(self):
        d = np.zeros((3, 3))
        d[:2, :2] = rotation_block(1.0, 2.0)
        d[2, 2] = 2.0
        d[2, 0] = 0.7
        form = canonicalize_heisenberg3(d)
        assert form.family == "4B3"
        assert form.params["alpha"] == pytest.approx(1.0)

    def test_heisenberg_not_derivation(self):
        with pytest.raises(PreconditionError):
            canonicalize_heisenberg3(np.eye(3))

    def test_filiform(self):
        assert canonicalize_dim5_B(np.diag([1.0, 2.0, 3.0, 4.0])).same_as(make_form("5B1", 2.0))
        assert canonicalize_dim5_B(np.diag([2.0, 2.0, 4.0, 6.0])).same_as(make_form("5B1", 1.0))
        _, d = catalog_derivation(make_form("5B2"))
        assert canonicalize_dim5_B(3.0 * d.m).family == "5B2"

    def test_filiform_tie(self):
        eps = 1e-6
        d = np.diag([1.0, 1.0 + eps, 2.0 + eps, 3.0 + eps])
        with pytest.raises(IndeterminateError) as info:
            canonicalize_dim5_B(d)
        assert info.value.candidates == ["5B1", "5B2"]

    @pytest.mark.parametrize("form", [
        make_form("5C1", 0.5, 2.0), make_form("5C2", 2.0), make_form("5C3", 1.5, 0.5),
        make_form("5C4", 2.0), make_form("5C6", 0.5), make_form("5C8"),
        make_form("5C11", 0.5), make_form("5C12"), make_form("5C13", 2.0),
    ])
    def test_heisenberg_plus_line(self, form):
        _, d = catalog_derivation(form)
        found = canonicalize_dim5_C(d.m)
        assert found.family == form.family
        assert found.same_as(form)


class TestClassify:
    @pytest.mark.parametrize("form", [
        make_form("4A1", 0.5, 1.0), make_form("4A2", 2.0), make_form("4A3"),
        make_form("4A4", 0.5, 2.0), make_form("4B1", 0.25), make_form("4B2"),
        make_form("4B3", 2.0), make_form("5A1", 0.2, 0.6, 1.0), make_form("5A5", 2.0),
        make_form("5A7", 0.5, 1.0, 2.0), make_form("5B1", 0.5), make_form("5B2"),
        make_form("5C4", 3.0), make_form("5C9"), make_form("5C11", 4.0),
        make_form("4A1", 0.9995, 1.0), make_form("4B1", 0.4998), make_form("5C6", 0.9995),
    ])
    def test_round_trip(self, form):
        expected = canonical_representative(form)
        found = classify(catalog_instantiate(form).alg)
        assert found.family == expected.family
        assert found.same_as(expected)

    @pytest.mark.parametrize("form", [
        make_form("4A4", 1.0, 2.0), make_form("4B3", 0.5), make_form("5A3", 0.5, 2.0, 1.0),
        make_form("5B1", 2.0), make_form("5C3", 2.0, 0.5),
    ])
    def test_scrambled(self, form):
        found = classify(_scrambled(form, seed=4))
        assert found.same_as(canonical_representative(form), 1e-7)

    def test_final_basis_reproduces_catalog(self):
        form = make_form("5C6", 0.5)
        alg = _scrambled(form, seed=9)
        found = classify(alg)
        last = found.trail[-1]
        assert (last.stage, last.direction) == ("algebra", "algebra")
        rebuilt = alg.change_basis(last.p)
        assert rebuilt.constants_close(catalog_instantiate(form).alg, LOOSE)
        assert found.trail[0].stage == "identify_nilpotent"

    def test_not_snc(self):
        with pytest.raises(PreconditionError):
            classify(LieAlgebra.abelian(4))

    def test_wrong_dimension(self):
        with pytest.raises(LieInputError):
            classify(LieAlgebra.abelian(3))
