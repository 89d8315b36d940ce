"""Tests for Lie algebras given by structure constants."""
import numpy as np
import pytest

from curvlie.algebra_core import (IndeterminateError, LieAlgebra, LieInputError, LinearMap,
                                  PreconditionError, Subspace, ToleranceConfig, a_equivalence_check,
                                  eigenvalues, in_delta_plus, signed_real_parts)
from curvlie.catalog import standard_nilpotent
from curvlie.utilities import block_diag, coordinates, jordan_block, numerical_rank, rotation_block


@pytest.fixture(scope="class")
def heisenberg():
    return LieAlgebra.from_brackets(3, {(0, 1): [0, 0, 1]})


class TestTolerances:
    def test_defaults(self):
        tol = ToleranceConfig()
        assert (tol.tol_struct, tol.tol_eig, tol.tol_curv, tol.tol_cluster) == (1e-9, 1e-7, 1e-9, 1e-3)

    @pytest.mark.parametrize("name", ["tol_struct", "tol_eig", "tol_curv", "tol_cluster"])
    def test_non_positive_rejected(self, name):
        with pytest.raises(LieInputError):
            ToleranceConfig(**{name: 0.0})


class TestLinearMap:
    def test_non_square_rejected(self):
        with pytest.raises(LieInputError):
            LinearMap(np.zeros((2, 3)))

    def test_read_only(self):
        m = LinearMap(np.eye(2))
        with pytest.raises(ValueError):
            m.m[0, 0] = 5.0

    def test_conjugate(self):
        d = LinearMap(np.diag([1.0, 2.0]))
        p = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(d.conjugate(p).m, np.diag([2.0, 1.0]))
        np.testing.assert_allclose((d @ d.inverse()).m, np.eye(2))


class TestLieAlgebra:
    def test_bracket_and_antisymmetry(self, heisenberg):
        e = np.eye(3)
        np.testing.assert_array_equal(heisenberg.bracket(e[0], e[1]), e[2])
        np.testing.assert_array_equal(heisenberg.bracket(e[1], e[0]), -e[2])
        assert heisenberg.c[1, 0, 2] == -1.0
        assert heisenberg.nonzero_brackets() == 1

    def test_lower_triangle_ignored(self):
        """Only entries with i < j are read."""
        c = np.zeros((3, 3, 3))
        c[0, 1, 2] = 1.0
        c[1, 0, 2] = 7.0
        assert LieAlgebra(c).c[1, 0, 2] == -1.0

    def test_ad_columns(self, heisenberg):
        ad = heisenberg.ad(np.array([1.0, 0.0, 0.0]))
        np.testing.assert_array_equal(ad[:, 1], [0.0, 0.0, 1.0])

    def test_jacobi_violation(self):
        brackets = {(0, 1): [1, 0, 0], (0, 2): [0, 1, 0]}
        broken = LieAlgebra.from_brackets(3, brackets, validate=False)
        assert broken.jacobi_defect() == pytest.approx(1.0)
        with pytest.raises(LieInputError):
            LieAlgebra.from_brackets(3, brackets)

    def test_bad_input(self):
        with pytest.raises(LieInputError):
            LieAlgebra.from_brackets(3, {(0, 0): [0, 0, 1]})
        with pytest.raises(LieInputError):
            LieAlgebra.from_brackets(3, {(0, 3): [0, 0, 1]})
        with pytest.raises(LieInputError):
            LieAlgebra(np.zeros((9, 9, 9)))

    def test_series(self, heisenberg):
        assert [s.dim for s in heisenberg.lower_central_series()] == [3, 1, 0]
        assert [s.dim for s in heisenberg.derived_series()] == [3, 1, 0]
        assert heisenberg.is_nilpotent() and heisenberg.is_solvable()
        assert heisenberg.nilpotency_class() == 2
        assert heisenberg.center().dim == 1
        assert heisenberg.center().contains([0.0, 0.0, 1.0])

    def test_not_nilpotent(self):
        alg = LieAlgebra.from_brackets(2, {(0, 1): [0, 1]})
        assert alg.is_solvable() and not alg.is_nilpotent()
        with pytest.raises(PreconditionError):
            alg.nilpotency_class()

    def test_centralizer_and_restrict(self, heisenberg):
        s = Subspace(3, np.array([[1.0], [0.0], [0.0]]))
        assert heisenberg.centralizer(s).dim == 2
        plane = Subspace(3, np.eye(3)[:, [0, 1]])
        with pytest.raises(LieInputError):
            heisenberg.restrict(plane)
        sub = heisenberg.restrict(Subspace(3, np.eye(3)[:, [0, 2]]))
        assert sub.is_abelian()

    def test_change_basis(self, heisenberg):
        scaled = heisenberg.change_basis(np.diag([1.0, 1.0, 2.0]))
        assert scaled.c[0, 1, 2] == pytest.approx(0.5)
        with pytest.raises(LieInputError):
            heisenberg.change_basis(np.zeros((3, 3)))

    def test_automorphisms(self, heisenberg):
        assert heisenberg.is_automorphism(np.diag([2.0, 3.0, 6.0]))
        assert not heisenberg.is_automorphism(np.diag([1.0, 1.0, 2.0]))

    def test_derivations(self, heisenberg):
        assert heisenberg.is_derivation(np.diag([1.0, 2.0, 3.0]))
        assert not heisenberg.is_derivation(np.eye(3))
        assert heisenberg.derivation_defect(np.eye(3)) == pytest.approx(1.0)

    def test_jacobi_defect(self):
        b4 = standard_nilpotent("B4")
        assert b4.jacobi_defect() == 0.0
        eps = 1e-3
        brackets = {(0, 1): [0, 0, 1, 0], (0, 2): [0, 0, 0, 1], (1, 2): [0, eps, 0, 0]}
        perturbed = LieAlgebra.from_brackets(4, brackets, validate=False)
        assert perturbed.jacobi_defect() == pytest.approx(eps)


@pytest.mark.parametrize("tag, expected", [("A3", 9), ("H3", 6), ("B4", 7), ("C4", 10), ("A4", 16)])
def test_derivation_space_dimension(tag, expected):
    alg = standard_nilpotent(tag)
    space = alg.derivation_space()
    assert len(space) == expected
    assert all(alg.is_derivation(d) for d in space)


@pytest.mark.parametrize("tag", ["H3", "B4", "C4"])
def test_derivation_space_contains_inner(tag):
    alg = standard_nilpotent(tag)
    space = alg.derivation_space()
    basis = np.stack([d.m.ravel() for d in space], axis=1)
    assert numerical_rank(basis, 1e-9) == len(space)
    for x in np.eye(alg.dim):
        _, residual = coordinates(basis, alg.ad(x).ravel())
        assert residual < 1e-9


class TestSpectrum:
    def test_sorted(self):
        ev = eigenvalues(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(ev.real, [1.0, 2.0, 3.0])

    def test_trace_and_determinant(self):
        m = np.random.default_rng(5).normal(size=(5, 5))
        ev = eigenvalues(m)
        assert np.sum(ev) == pytest.approx(np.trace(m))
        assert np.prod(ev) == pytest.approx(np.linalg.det(m))

    def test_rotation_and_jordan_blocks(self):
        ev = eigenvalues(block_diag(rotation_block(1.0, 2.0), 3.0))
        np.testing.assert_allclose(ev, [1.0 - 2.0j, 1.0 + 2.0j, 3.0], atol=1e-12)
        np.testing.assert_allclose(eigenvalues(jordan_block(2.0, 3)), [2.0, 2.0, 2.0], atol=1e-4)

    def test_guard_band(self):
        with pytest.raises(IndeterminateError) as info:
            signed_real_parts(np.diag([1.0, 1e-9]))
        assert info.value.candidates == ["positive", "non-positive"]

    def test_delta_plus(self, heisenberg):
        assert in_delta_plus(heisenberg, np.diag([1.0, 1.0, 2.0]))
        assert not in_delta_plus(heisenberg, np.diag([1.0, -2.0, -1.0]))
        with pytest.raises(PreconditionError):
            in_delta_plus(heisenberg, np.eye(3))

    def test_delta_plus_under_automorphisms(self):
        b4 = standard_nilpotent("B4")
        unipotent = np.eye(4)
        unipotent[1, 0] = 0.4
        unipotent[2, 1] = unipotent[3, 2] = 0.7
        a = np.diag([2.0, 1.0, 2.0, 4.0]) @ unipotent
        assert b4.is_automorphism(a)
        for d in (np.diag([1.0, 1.0, 2.0, 3.0]), np.diag([1.0, -3.0, -2.0, -1.0])):
            moved = a @ d @ np.linalg.inv(a)
            assert b4.is_derivation(moved)
            assert in_delta_plus(b4, moved) == in_delta_plus(b4, d)


def test_a_equivalence():
    d2 = np.diag([1.0, 2.0, 3.0])
    g = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    d1 = 2.0 * np.linalg.solve(g, d2 @ g)
    assert a_equivalence_check(d1, d2, g, 2.0)
    assert not a_equivalence_check(d1, d2, g, 1.0)
    with pytest.raises(LieInputError):
        a_equivalence_check(d1, d2, g, 0.0)
