"""Tests for the dense linear-algebra helpers."""
import numpy as np
import pytest

from curvlie.utilities import (block_diag, column_space, coordinates, jordan_block, max_abs,
                               null_space, numerical_rank, orthogonal_complement, rotation_block,
                               skew, sym)


def test_max_abs():
    assert max_abs([[1.0, -3.0], [2.0, 0.5]]) == 3.0
    assert max_abs(np.zeros((0, 3))) == 0.0


class TestRank:
    def test_relative_threshold(self):
        """Singular values are judged against the largest one, not absolutely."""
        assert numerical_rank(np.diag([1.0, 1e-12, 0.0]), 1e-9) == 1
        assert numerical_rank(1e-12 * np.diag([1.0, 1.0, 0.0]), 1e-9) == 2

    def test_zero_matrix(self):
        assert numerical_rank(np.zeros((3, 3)), 1e-9) == 0

    def test_column_space_is_orthonormal(self):
        q = column_space([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]], 1e-9)
        assert q.shape == (3, 1)
        np.testing.assert_allclose(q.T @ q, np.eye(1), atol=1e-12)
        np.testing.assert_allclose(np.abs(q[:, 0]), [2 ** -0.5, 2 ** -0.5, 0.0], atol=1e-12)

    def test_column_space_agrees_with_rank(self):
        m = np.diag([1e-12, 1e-13, 1e-23])
        q = column_space(m, 1e-9)
        assert q.shape[1] == numerical_rank(m, 1e-9) == 2
        np.testing.assert_allclose(np.abs(q), np.eye(3)[:, :2], atol=1e-12)
        assert column_space(np.zeros((3, 2)), 1e-9).shape == (3, 0)


class TestNullSpace:
    def test_no_equations(self):
        np.testing.assert_array_equal(null_space(np.zeros((0, 3)), 1e-9, ncols=3), np.eye(3))

    def test_single_equation(self):
        k = null_space([[1.0, 0.0, 0.0]], 1e-9)
        assert k.shape == (3, 2)
        np.testing.assert_allclose(k[0], 0.0, atol=1e-12)

    def test_orthogonal_complement_with_gram(self):
        gram = np.array([[2.0, 1.0], [1.0, 2.0]])
        comp = orthogonal_complement([[1.0], [0.0]], 2, 1e-9, gram)
        assert comp.shape == (2, 1)
        assert abs(np.array([1.0, 0.0]) @ gram @ comp[:, 0]) < 1e-12


def test_coordinates_residual():
    coeffs, residual = coordinates(np.eye(3)[:, :2], np.array([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(coeffs, [1.0, 2.0])
    assert residual == pytest.approx(3.0)


def test_sym_and_skew_split():
    m = np.arange(9.0).reshape(3, 3)
    np.testing.assert_allclose(sym(m) + skew(m), m)
    np.testing.assert_allclose(sym(m), sym(m).T)
    np.testing.assert_allclose(skew(m), -skew(m).T)


def test_blocks():
    b = block_diag(2.0, rotation_block(1.0, 3.0))
    expected = np.array([[2.0, 0.0, 0.0], [0.0, 1.0, -3.0], [0.0, 3.0, 1.0]])
    np.testing.assert_array_equal(b, expected)
    ev = np.sort_complex(np.linalg.eigvals(rotation_block(1.0, 3.0)))
    np.testing.assert_allclose(ev, [1 - 3j, 1 + 3j])
    np.testing.assert_array_equal(jordan_block(2.0, 3),
                                  [[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]])
