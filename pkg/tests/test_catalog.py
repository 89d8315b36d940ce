"""Tests for the catalog of 4- and 5-dimensional SNC-algebras."""
import numpy as np
import pytest

from curvlie.algebra_core import LieInputError, ToleranceConfig, in_delta_plus
from curvlie.catalog import (FAMILIES, CanonicalForm, CatalogError, ChangeOfBasis,
                             canonical_representative, catalog_derivation, catalog_grid,
                             catalog_instantiate, families, family_spec, is_symmetric_instance,
                             make_form, standard_nilpotent)
from curvlie.extension import snc_test_auto

REALIZABLE = [tag for tag in families() if FAMILIES[tag].realizable]


class TestFamilies:
    def test_counts(self):
        assert families(4) == ["4A1", "4A2", "4A3", "4A4", "4B1", "4B2", "4B3"]
        assert len(families(5)) == 25
        assert len([t for t in families(5) if t.startswith("5A")]) == 9
        assert len([t for t in families(5) if t.startswith("5B")]) == 3
        assert len([t for t in families(5) if t.startswith("5C")]) == 13

    def test_unknown_tag(self):
        with pytest.raises(CatalogError):
            family_spec("4Z9")
        assert issubclass(CatalogError, LieInputError)

    def test_wrong_parameter_count(self):
        with pytest.raises(CatalogError):
            make_form("4A1", 0.5)

    @pytest.mark.parametrize("tag, dims", [("A3", (3, 0)), ("H3", (3, 1)), ("A4", (4, 0)),
                                           ("B4", (4, 2)), ("C4", (4, 1))])
    def test_standard_nilpotent(self, tag, dims):
        alg = standard_nilpotent(tag)
        assert (alg.dim, alg.derived_subalgebra().dim) == dims
        assert alg.is_nilpotent()

    def test_unknown_nilpotent(self):
        with pytest.raises(CatalogError):
            standard_nilpotent("D4")


@pytest.mark.parametrize("tag", REALIZABLE)
def test_every_family_is_snc(tag):
    """Each instance is a positive derivation and its expansion passes the SNC test."""
    for form in catalog_grid(tag, 2):
        nil, d = catalog_derivation(form)
        assert in_delta_plus(nil, d)
        g = catalog_instantiate(form)
        assert g.dim == family_spec(tag).dim
        assert snc_test_auto(g).is_snc


class TestInstances:
    def test_unrealizable(self):
        assert not family_spec("5B3").realizable
        with pytest.raises(CatalogError):
            catalog_derivation(make_form("5B3", 1.0))

    def test_out_of_range(self):
        with pytest.raises(CatalogError):
            catalog_derivation(make_form("4A1", 1.0, 0.5))
        with pytest.raises(CatalogError):
            catalog_derivation(make_form("4B1", 0.75))
        with pytest.raises(CatalogError):
            catalog_derivation(make_form("5C4", 0.5))

    def test_corrected_jordan_derivation(self):
        nil, d = catalog_derivation(make_form("5B2"))
        np.testing.assert_array_equal(d.m[:, 0], [1.0, 1.0, 0.0, 0.0])
        assert nil.is_derivation(d)

    def test_grid_size(self):
        assert len(catalog_grid("5B1", 5)) == 5
        assert len(catalog_grid("4A1", 5)) == 15
        assert [f.label() for f in catalog_grid("4A3")] == ["4A3"]

    def test_symmetric_instances(self):
        assert is_symmetric_instance(make_form("4A4", 1.0, 3.0))
        assert not is_symmetric_instance(make_form("4A4", 2.0, 3.0))
        assert is_symmetric_instance(make_form("5A7", 1.0, 0.5, 2.0))
        assert not is_symmetric_instance(make_form("5C1", 1.0, 1.0))


class TestCanonicalRepresentative:
    @pytest.mark.parametrize("form, expected", [
        (make_form("5A5", 2.0), make_form("5A5", 0.5)),
        (make_form("5A7", 2.0, 1.0, 3.0), make_form("5A7", 0.5, 1.5, 0.5)),
        (make_form("5A7", 1.0, 3.0, 1.0), make_form("5A7", 1.0, 1.0, 3.0)),
        (make_form("5A9", 2.0, 2.0), make_form("5A9", 2.0, 2.0)),
        (make_form("5A9", 1.0, 2.0), make_form("5A7", 1.0, 1.0, 2.0)),
        (make_form("5C1", 4.0, 2.0), make_form("5C1", 0.25, 0.5)),
        (make_form("5C5", 3.0), make_form("5C3", 3.0, 1.0)),
        (make_form("5C6", 1.0), make_form("5C4", 1.0)),
        (make_form("5C7", 0.5), make_form("5C3", 0.5, 1.0)),
        (make_form("5C9"), make_form("5C2", 1.0)),
        (make_form("5C10"), make_form("5C8")),
        (make_form("5C11", 2.0), make_form("5C11", 0.5)),
        (make_form("4A1", 0.5, 1.0), make_form("4A1", 0.5, 1.0)),
    ])
    def test_folds_and_aliases(self, form, expected):
        found = canonical_representative(form)
        assert found.family == expected.family
        assert found.same_as(expected)

    def test_folded_instances_warn(self, caplog):
        with caplog.at_level("WARNING", logger="curvlie.catalog"):
            catalog_derivation(make_form("5C11", 2.0))
        assert "outside the canonical range" in caplog.text


class TestForms:
    def test_label_and_compare(self):
        f = make_form("4A4", 1.0, 2.0)
        assert f.label() == "4A4(alpha=1, beta=2)"
        assert f.values == (1.0, 2.0)
        assert f.same_as(make_form("4A4", 1.0 + 1e-12, 2.0))
        assert not f.same_as(make_form("4A4", 1.0, 2.1))
        assert f.nil_type == "A3"
        assert isinstance(f, CanonicalForm)

    def test_singular_change_of_basis(self):
        with pytest.raises(LieInputError):
            ChangeOfBasis(np.zeros((3, 3)), "jordan")

    def test_change_of_basis_rank_is_relative(self):
        small = ChangeOfBasis(1e-7 * np.eye(3), "scale")
        assert small.p.dim == 3
        with pytest.raises(LieInputError):
            ChangeOfBasis(np.diag([1.0, 1.0, 1e-12]), "scale")
        with pytest.raises(LieInputError):
            ChangeOfBasis(np.diag([1.0, 1e-6]), "scale", tol=ToleranceConfig(tol_struct=1e-4))
