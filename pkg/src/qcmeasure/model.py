"""Core data types: polyhedral norms, matrix families and system specifications.

A family document is JSON of the form::

    {
      "dimension": 2,
      "norm": "l1",
      "matrices": [{"name": "R", "rows": [[0, -1], [1, 0]]}],
      "analysis": {"s": 2, "depth": 6, "mesh": 0.03125}
    }
"""
from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from .errors import DocumentSyntaxError, ValidationError

logger = logging.getLogger(__name__)


class Norm(enum.Enum):
    """Polyhedral vector norm in which balls, measures and operator norms live."""

    L1 = "l1"
    LINF = "linf"

    @property
    def dual(self) -> "Norm":
        return Norm.LINF if self is Norm.L1 else Norm.L1

    def __call__(self, v) -> float:
        return vector_norm(v, self)


#: Alias kept for readers who know the type under its contract name.
NormSpec = Norm


def vector_norm(v, n: Norm) -> float:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0
    if n is Norm.L1:
        return float(np.sum(np.abs(v)))
    return float(np.max(np.abs(v)))


def vector_norms(points: np.ndarray, n: Norm) -> np.ndarray:
    """Row-wise norms of a ``(..., N)`` array."""
    a = np.abs(np.asarray(points, dtype=float))
    return a.sum(axis=-1) if n is Norm.L1 else a.max(axis=-1)


def dual_norm(n: Norm) -> Norm:
    return n.dual


def induced_matrix_norm(M, n: Norm) -> float:
    """Operator norm: max column sum for L1, max row sum for Linf."""
    return float(induced_matrix_norms(np.asarray(M, dtype=float)[None], n)[0])


def induced_matrix_norms(stack: np.ndarray, n: Norm) -> np.ndarray:
    """Operator norms of a ``(K, N, N)`` stack of matrices."""
    a = np.abs(np.asarray(stack, dtype=float))
    if n is Norm.L1:
        return a.sum(axis=-2).max(axis=-1)
    return a.sum(axis=-1).max(axis=-1)


def parse_norm(value: Any) -> Norm:
    if isinstance(value, Norm):
        return value
    try:
        return Norm(str(value).lower())
    except ValueError:
        raise ValidationError(f"unknown norm {value!r}; expected 'l1' or 'linf'") from None


@dataclass(frozen=True, eq=False)
class MatrixFamily:
    """A finite, ordered set of real N x N matrices generating x(t+1) in {A_i x(t)}.

    Member order is canonical: every enumeration downstream (words, products,
    reach points) follows it.
    """

    members: tuple
    labels: tuple = ()

    def __init__(self, members: Sequence, labels: Optional[Sequence[str]] = None):
        mats = []
        for k, m in enumerate(members):
            a = np.array(m, dtype=float)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValidationError(f"member {k} has shape {a.shape}; expected square")
            mats.append(a)
        if not mats:
            raise ValidationError("a matrix family needs at least one member")
        dim = mats[0].shape[0]
        for k, a in enumerate(mats):
            if a.shape != (dim, dim):
                raise ValidationError(
                    f"member {k} has shape {a.shape}; family dimension is {dim}")
            if not np.all(np.isfinite(a)):
                raise ValidationError(f"member {k} has non-finite entries")
            a.setflags(write=False)
        if labels is None or len(labels) == 0:
            labels = [f"A{k + 1}" for k in range(len(mats))]
        elif len(labels) != len(mats):
            raise ValidationError("labels must match members one-to-one")
        object.__setattr__(self, "members", tuple(mats))
        object.__setattr__(self, "labels", tuple(str(s) for s in labels))

    @property
    def dimension(self) -> int:
        return self.members[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.members)

    def stack(self) -> np.ndarray:
        return np.stack(self.members)

    def scaled(self, factor: float) -> "MatrixFamily":
        return MatrixFamily([factor * a for a in self.members], self.labels)

    def perturbed(self, deltas: Sequence) -> "MatrixFamily":
        deltas = np.asarray(deltas, dtype=float)
        if deltas.shape != (self.size, self.dimension, self.dimension):
            raise ValidationError(
                f"perturbation shape {deltas.shape} does not match family "
                f"({self.size}, {self.dimension}, {self.dimension})")
        return MatrixFamily([a + d for a, d in zip(self.members, deltas)], self.labels)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.members[k]

    def __repr__(self) -> str:
        return f"MatrixFamily(N={self.dimension}, members={[m.tolist() for m in self.members]})"

    def to_document(self, norm: Norm = Norm.L1) -> dict:
        return {
            "dimension": self.dimension,
            "norm": norm.value,
            "matrices": [{"name": name, "rows": m.tolist()}
                         for name, m in zip(self.labels, self.members)],
        }


@dataclass(frozen=True)
class Tolerances:
    rank_tol: float = 1e-9
    dedup_tol: float = 1e-12
    lp_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_tol", "dedup_tol", "lp_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be a positive finite number, got {v!r}")


@dataclass(frozen=True)
class SystemSpec:
    """A validated family together with every analysis parameter."""

    family: MatrixFamily
    norm: Norm = Norm.L1
    horizon_s: Optional[int] = None
    product_depth: Optional[int] = None
    sphere_mesh: Fraction = Fraction(1, 32)
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        n = self.family.dimension
        if self.horizon_s is None:
            object.__setattr__(self, "horizon_s", n)
        if self.product_depth is None:
            object.__setattr__(self, "product_depth", 3 * n)
        object.__setattr__(self, "sphere_mesh", Fraction(self.sphere_mesh).limit_denominator(10**6))
        if not isinstance(self.horizon_s, int) or self.horizon_s < n - 1:
            raise ValidationError(f"s must be an integer >= N-1 = {n - 1}, got {self.horizon_s!r}")
        if not isinstance(self.product_depth, int) or self.product_depth < 1:
            raise ValidationError(f"depth must be a positive integer, got {self.product_depth!r}")
        if self.sphere_mesh <= 0:
            raise ValidationError(f"mesh must be positive, got {self.sphere_mesh}")

    @property
    def dimension(self) -> int:
        return self.family.dimension

    def with_params(self, **changes) -> "SystemSpec":
        return replace(self, **changes)

    def describe(self) -> dict:
        return {
            "dimension": self.dimension,
            "members": self.family.size,
            "norm": self.norm.value,
            "s": self.horizon_s,
            "depth": self.product_depth,
            "mesh": float(self.sphere_mesh),
            "rank_tol": self.tolerances.rank_tol,
            "dedup_tol": self.tolerances.dedup_tol,
            "lp_tol": self.tolerances.lp_tol,
        }


_TOP_KEYS = {"dimension", "norm", "matrices", "analysis"}
_ANALYSIS_KEYS = {"s", "depth", "mesh", "rank_tol", "dedup_tol", "lp_tol"}


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _as_int(x, name: str) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or float(x) != int(x):
        raise DocumentSyntaxError(f"{name} must be an integer, got {x!r}")
    return int(x)


def parse_and_validate(document: str | bytes, warnings: Optional[list] = None) -> SystemSpec:
    """Parse a family document and return a validated :class:`SystemSpec`.

    Unknown keys are reported through ``warnings`` (if given) and ignored.
    """
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentSyntaxError(f"document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentSyntaxError("top level must be a JSON object")

    if "matrices" not in doc and isinstance(doc.get("results"), dict) \
            and isinstance(doc["results"].get("family"), dict):
        doc = doc["results"]["family"]
        if not isinstance(doc, dict):
            raise DocumentSyntaxError("results.family must be an object")

    notes = warnings if warnings is not None else []
    for key in doc:
        if key not in _TOP_KEYS:
            notes.append(f"ignored unknown key {key!r}")

    if "dimension" not in doc:
        raise DocumentSyntaxError("missing required key 'dimension'")
    if "matrices" not in doc:
        raise DocumentSyntaxError("missing required key 'matrices'")
    dim = _as_int(doc["dimension"], "dimension")
    if dim < 1:
        raise ValidationError(f"dimension must be positive, got {dim}")
    norm = parse_norm(doc.get("norm", "l1"))

    mats = doc["matrices"]
    if not isinstance(mats, list):
        raise DocumentSyntaxError("'matrices' must be an array")
    if not mats:
        raise ValidationError("'matrices' must not be empty")
    members, labels = [], []
    for k, entry in enumerate(mats):
        if not isinstance(entry, dict) or "rows" not in entry:
            raise DocumentSyntaxError(f"matrices[{k}] must be an object with 'rows'")
        rows = entry["rows"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise DocumentSyntaxError(f"matrices[{k}].rows must be an array of arrays")
        for r in rows:
            for x in r:
                if not _is_number(x):
                    raise DocumentSyntaxError(f"matrices[{k}] has non-numeric entry {x!r}")
        if len(rows) != dim or any(len(r) != dim for r in rows):
            shape = (len(rows), max((len(r) for r in rows), default=0))
            raise ValidationError(f"matrices[{k}] is not {dim}x{dim} (got {shape[0]} rows)")
        a = np.array(rows, dtype=float)
        if not np.all(np.isfinite(a)):
            raise ValidationError(f"matrices[{k}] has non-finite entries")
        name = entry.get("name", f"A{k + 1}")
        if not isinstance(name, str):
            raise DocumentSyntaxError(f"matrices[{k}].name must be a string")
        members.append(a)
        labels.append(name)
        for key in entry:
            if key not in ("name", "rows"):
                notes.append(f"ignored unknown key {key!r} in matrices[{k}]")

    analysis = doc.get("analysis", {})
    if not isinstance(analysis, dict):
        raise DocumentSyntaxError("'analysis' must be an object")
    for key in analysis:
        if key not in _ANALYSIS_KEYS:
            notes.append(f"ignored unknown key {key!r} in analysis")
    s = _as_int(analysis["s"], "analysis.s") if "s" in analysis else None
    depth = _as_int(analysis["depth"], "analysis.depth") if "depth" in analysis else None
    mesh = Fraction(1, 32)
    if "mesh" in analysis:
        if not _is_number(analysis["mesh"]):
            raise DocumentSyntaxError("analysis.mesh must be a number")
        if not (math.isfinite(analysis["mesh"]) and analysis["mesh"] > 0):
            raise ValidationError(f"analysis.mesh must be positive, got {analysis['mesh']!r}")
        mesh = Fraction(analysis["mesh"])
    tol_kwargs = {}
    for key in ("rank_tol", "dedup_tol", "lp_tol"):
        if key in analysis:
            if not _is_number(analysis[key]):
                raise DocumentSyntaxError(f"analysis.{key} must be a number")
            tol_kwargs[key] = float(analysis[key])

    for note in notes:
        logger.warning(note)
    return SystemSpec(
        family=MatrixFamily(members, labels),
        norm=norm,
        horizon_s=s,
        product_depth=depth,
        sphere_mesh=mesh,
        tolerances=Tolerances(**tol_kwargs),
    )
