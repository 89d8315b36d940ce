"""Algebra documents and run configuration.

A document is UTF-8 JSON::

    {"schema": 1, "dim": 3, "brackets": [[1, 2, [0, 0, 1]]],
     "metric": null, "derivation": [[...], ...], "meta": {"name": "..."}}

Indices are 1-based and only pairs i < j may appear.  When a derivation is
present the document describes the expansion of the bracket algebra by it,
so the metric (if any) has size dim + 1.
"""
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from curvlie.algebra_core import DEFAULT_TOLERANCES, LieAlgebra, LieInputError, ToleranceConfig
from curvlie.catalog import catalog_derivation, family_spec
from curvlie.extension import expand
from curvlie.geometry import MetricAlgebra

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SEED_VARIABLE = "CURVLIE_SEED"
OUTPUT_FORMATS = ("human", "json")


class DocumentError(LieInputError):
    """Raised when a document does not parse or does not describe a valid algebra."""


def _matrix(value, size, name):
    if value is None:
        return None
    try:
        m = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise DocumentError(f"{name} is not a numeric matrix: {e}") from None
    if m.shape != (size, size):
        raise DocumentError(f"{name} must be {size} x {size}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DocumentError(f"{name} has non-finite entries")
    return tuple(tuple(float(v) for v in row) for row in m)


@dataclass(frozen=True)
class AlgebraDocument:
    dim: int
    brackets: Tuple[Tuple[int, int, Tuple[float, ...]], ...] = ()
    metric: Optional[Tuple[Tuple[float, ...], ...]] = None
    derivation: Optional[Tuple[Tuple[float, ...], ...]] = None
    meta: Dict[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not isinstance(self.dim, int) or isinstance(self.dim, bool) or self.dim < 1:
            raise DocumentError(f"dim must be a positive integer, got {self.dim!r}")
        seen = set()
        entries = []
        for entry in self.brackets:
            try:
                i, j, vector = entry
            except (TypeError, ValueError):
                raise DocumentError(f"bracket entry {entry!r} is not (i, j, vector)") from None
            if not all(isinstance(k, int) and not isinstance(k, bool) for k in (i, j)):
                raise DocumentError(f"bracket indices must be integers, got ({i!r}, {j!r})")
            if not (1 <= i < j <= self.dim):
                raise DocumentError(f"bracket [e{i}, e{j}] needs 1 <= i < j <= {self.dim}")
            if (i, j) in seen:
                raise DocumentError(f"bracket [e{i}, e{j}] given twice")
            seen.add((i, j))
            vector = tuple(float(v) for v in vector)
            if len(vector) != self.dim or not all(np.isfinite(vector)):
                raise DocumentError(f"bracket [e{i}, e{j}] needs {self.dim} finite coefficients")
            entries.append((i, j, vector))
        object.__setattr__(self, "brackets", tuple(sorted(entries)))
        object.__setattr__(self, "derivation", _matrix(self.derivation, self.dim, "derivation"))
        object.__setattr__(self, "metric", _matrix(self.metric, self.total_dim, "metric"))

    @property
    def total_dim(self):
        return self.dim + 1 if self.derivation is not None else self.dim

    def bracket_algebra(self, tol=DEFAULT_TOLERANCES):
        """The algebra spanned by e_1..e_dim with the listed brackets."""
        brackets = {(i - 1, j - 1): list(v) for i, j, v in self.brackets}
        return LieAlgebra.from_brackets(self.dim, brackets, tol=tol)

    def algebra(self, tol=DEFAULT_TOLERANCES):
        """The described algebra: the bracket algebra, expanded by the derivation if present."""
        alg = self.bracket_algebra(tol)
        if self.derivation is None:
            return alg
        return expand(alg, np.array(self.derivation), tol).total

    def metric_algebra(self, tol=DEFAULT_TOLERANCES):
        gram = None if self.metric is None else np.array(self.metric)
        return MetricAlgebra(self.algebra(tol), gram, tol)

    @classmethod
    def from_algebra(cls, alg, gram=None, derivation=None, meta=None):
        """Document listing the non-zero brackets of `alg`."""
        c = alg.c
        brackets = [(i + 1, j + 1, tuple(float(v) for v in c[i, j]))
                    for i in range(alg.dim) for j in range(i + 1, alg.dim) if np.any(c[i, j])]
        return cls(alg.dim, tuple(brackets),
                   None if gram is None else np.asarray(gram).tolist(),
                   None if derivation is None else np.asarray(derivation).tolist(),
                   dict(meta or {}))

    @classmethod
    def from_form(cls, form):
        """Document of a catalog instance as nilpotent brackets plus derivation."""
        nil, d = catalog_derivation(form)
        meta = {"name": form.label(), "family": form.family, "params": dict(form.params),
                "nil_type": family_spec(form.family).nil_type}
        return cls.from_algebra(nil, derivation=d.m, meta=meta)

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "dim": self.dim,
            "brackets": [[i, j, list(v)] for i, j, v in self.brackets],
            "metric": None if self.metric is None else [list(r) for r in self.metric],
            "derivation": None if self.derivation is None else [list(r) for r in self.derivation],
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise DocumentError("document must be a JSON object")
        schema = data.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise DocumentError(f"unsupported schema {schema!r}")
        unknown = set(data) - {"schema", "dim", "brackets", "metric", "derivation", "meta"}
        if unknown:
            raise DocumentError(f"unknown fields {sorted(unknown)}")
        if "dim" not in data:
            raise DocumentError("document has no dim")
        meta = data.get("meta") or {}
        if not isinstance(meta, dict):
            raise DocumentError("meta must be an object")
        return cls(data["dim"], tuple(tuple(e) if isinstance(e, list) else e
                                      for e in data.get("brackets") or []),
                   data.get("metric"), data.get("derivation"), meta)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentError(f"not valid JSON: {e}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        logger.debug("reading algebra document %s", path)
        try:
            with open(path, encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise DocumentError(f"cannot read {path}: {e}") from None
        return cls.from_json(text)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json())
            f.write("\n")


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every command.

    Parameters
    ----------
    tolerances: ToleranceConfig : numerical thresholds.
    seed: int : unsigned 64-bit seed for random sampling.
    output_format: str : "human" or "json".
    workers: int : process count for verify-paper; None uses the CPU count.
    """
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES
    seed: int = 0
    output_format: str = "human"
    workers: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2 ** 64):
            raise LieInputError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise LieInputError(f"output format must be one of {OUTPUT_FORMATS}")
        if self.workers is not None and self.workers < 1:
            raise LieInputError("workers must be at least 1")

    @classmethod
    def from_env(cls, environ=None, **overrides):
        """RunConfig with the seed taken from CURVLIE_SEED unless given explicitly."""
        environ = os.environ if environ is None else environ
        if overrides.get("seed") is None:
            overrides.pop("seed", None)
            raw = environ.get(SEED_VARIABLE)
            if raw is not None:
                try:
                    overrides["seed"] = int(raw)
                except ValueError:
                    raise LieInputError(f"{SEED_VARIABLE}={raw!r} is not an integer") from None
        return cls(**{k: v for k, v in overrides.items() if v is not None})
