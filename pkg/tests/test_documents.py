"""Tests for algebra documents and run configuration."""
import json

import numpy as np
import pytest

from curvlie.algebra_core import LieInputError, ToleranceConfig
from curvlie.catalog import make_form
from curvlie.documents import SEED_VARIABLE, AlgebraDocument, DocumentError, RunConfig

HEISENBERG = {"schema": 1, "dim": 3, "brackets": [[1, 2, [0, 0, 1]]]}


class TestParse:
    def test_from_dict(self):
        doc = AlgebraDocument.from_dict(HEISENBERG)
        assert doc.total_dim == 3
        alg = doc.algebra()
        np.testing.assert_allclose(alg.bracket(np.eye(3)[0], np.eye(3)[1]), np.eye(3)[2])
        assert alg.is_nilpotent()

    def test_json_round_trip(self):
        doc = AlgebraDocument.from_form(make_form("4A2", 2.0))
        again = AlgebraDocument.from_json(doc.to_json())
        assert again == doc
        assert again.meta["family"] == "4A2"

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "heisenberg.json"
        AlgebraDocument.from_dict(HEISENBERG).save(path)
        assert json.loads(path.read_text())["schema"] == 1
        assert AlgebraDocument.load(path).brackets == ((1, 2, (0.0, 0.0, 1.0)),)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DocumentError):
            AlgebraDocument.load(tmp_path / "absent.json")

    def test_bad_json(self):
        with pytest.raises(DocumentError):
            AlgebraDocument.from_json("{dim: 3")

    @pytest.mark.parametrize("data", [
        {"dim": 3, "brackets": [[2, 1, [0, 0, 1]]]},
        {"dim": 3, "brackets": [[1, 2, [0, 0, 1]], [1, 2, [0, 0, 2]]]},
        {"dim": 3, "brackets": [[1, 4, [0, 0, 1]]]},
        {"dim": 3, "brackets": [[1, 2, [0, 1]]]},
        {"dim": 3, "brackets": [[1, 2, [0, 0, float("nan")]]]},
        {"dim": 0},
        {"dim": 3, "colour": "red"},
        {"schema": 2, "dim": 3},
        {"brackets": []},
        {"dim": 3, "metric": [[1, 0], [0, 1]]},
        {"dim": 3, "meta": [1, 2]},
        [1, 2, 3],
    ])
    def test_invalid(self, data):
        with pytest.raises(DocumentError):
            AlgebraDocument.from_dict(data)

    def test_document_error_is_input_error(self):
        assert issubclass(DocumentError, LieInputError)


class TestExpansion:
    def test_derivation_adds_a_dimension(self):
        data = dict(HEISENBERG, derivation=np.diag([1.0, 1.0, 2.0]).tolist(),
                    metric=np.eye(4).tolist())
        doc = AlgebraDocument.from_dict(data)
        assert doc.total_dim == 4
        g = doc.metric_algebra()
        assert g.dim == 4
        e = np.eye(4)
        np.testing.assert_allclose(g.alg.bracket(e[3], e[2]), 2.0 * e[2])

    def test_metric_must_match_expansion(self):
        data = dict(HEISENBERG, derivation=np.eye(3).tolist(), metric=np.eye(3).tolist())
        with pytest.raises(DocumentError):
            AlgebraDocument.from_dict(data)

    def test_from_form(self):
        doc = AlgebraDocument.from_form(make_form("5C8"))
        assert doc.dim == 4 and doc.total_dim == 5
        assert doc.meta["nil_type"] == "C4"
        assert doc.algebra().jacobi_defect() < 1e-12


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig.from_env({})
        assert config.seed == 0
        assert config.output_format == "human"
        assert config.tolerances == ToleranceConfig()

    def test_seed_from_environment(self):
        assert RunConfig.from_env({SEED_VARIABLE: "42"}).seed == 42
        assert RunConfig.from_env({SEED_VARIABLE: "42"}, seed=7).seed == 7
        assert RunConfig.from_env({SEED_VARIABLE: "42"}, seed=None).seed == 42

    def test_invalid(self):
        with pytest.raises(LieInputError):
            RunConfig.from_env({SEED_VARIABLE: "many"})
        with pytest.raises(LieInputError):
            RunConfig(seed=-1)
        with pytest.raises(LieInputError):
            RunConfig(output_format="xml")
        with pytest.raises(LieInputError):
            RunConfig(workers=0)
