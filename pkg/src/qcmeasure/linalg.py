"""Dense linear algebra and linear programming kernels."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _simplex
from .errors import NumericalFailure
from .model import Norm, induced_matrix_norm


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """Maximize ``<objective, c>`` over free ``c`` with ``lower <= <row, c> <= upper``.

    ``constraints`` is a sequence of ``(row, lower, upper)``; use ``-inf`` /
    ``inf`` for a missing side.
    """

    objective: np.ndarray
    constraints: tuple = ()

    def __init__(self, objective, constraints: Sequence = ()):
        obj = np.asarray(objective, dtype=float).ravel()
        cons = []
        for row, lo, hi in constraints:
            row = np.asarray(row, dtype=float).ravel()
            if row.shape != obj.shape:
                raise ValueError(f"constraint row has length {row.size}, expected {obj.size}")
            lo, hi = float(lo), float(hi)
            if lo > hi:
                raise ValueError(f"constraint bounds are inverted: {lo} > {hi}")
            cons.append((row, lo, hi))
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraints", tuple(cons))

    @property
    def dimension(self) -> int:
        return self.objective.size

    @classmethod
    def from_arrays(cls, objective, rows, lower, upper) -> "LpProblem":
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        return cls(objective, zip(rows, np.broadcast_to(lower, len(rows)),
                                  np.broadcast_to(upper, len(rows))))


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    value: Optional[float] = None
    point: Optional[np.ndarray] = field(default=None, repr=False)
    iterations: int = 0


def solve_lp(p: LpProblem, lp_tol: float = 1e-10) -> LpOutcome:
    """Solve ``p`` with the dense Bland-rule simplex.

    Free variables are split as ``c = u - v``; each finite bound becomes one
    ``<=`` row. The returned point is checked against every constraint.
    """
    n = p.dimension
    rows, rhs = [], []
    for row, lo, hi in p.constraints:
        if math.isfinite(hi):
            rows.append(np.concatenate([row, -row]))
            rhs.append(hi)
        if math.isfinite(lo):
            rows.append(np.concatenate([-row, row]))
            rhs.append(-lo)
    A = np.array(rows, dtype=float).reshape(len(rows), 2 * n)
    b = np.array(rhs, dtype=float)
    c = np.concatenate([p.objective, -p.objective])
    cap = 50 * (len(p.constraints) + n)
    status, value, x, it = _simplex.simplex(A, b, c, lp_tol, cap)
    if status == _simplex.ITERATION_CAP:
        raise NumericalFailure(f"simplex hit its iteration cap ({cap}) without a verdict")
    if status == _simplex.INFEASIBLE:
        return LpOutcome(LpStatus.INFEASIBLE, iterations=it)
    if status == _simplex.UNBOUNDED:
        return LpOutcome(LpStatus.UNBOUNDED, iterations=it)
    point = x[:n] - x[n:]
    for row, lo, hi in p.constraints:
        v = float(row @ point)
        scale = max(1.0, abs(lo) if math.isfinite(lo) else 0.0, abs(hi) if math.isfinite(hi) else 0.0)
        if v > hi + lp_tol * scale or v < lo - lp_tol * scale:
            raise NumericalFailure(f"simplex returned a point violating {lo} <= {v} <= {hi}")
    return LpOutcome(LpStatus.OPTIMAL, float(p.objective @ point), point, it)


def is_singular(M, rank_tol: float = 1e-9) -> bool:
    M = np.asarray(M, dtype=float)
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if scale == 0.0:
        return True
    smin = float(np.linalg.svd(M, compute_uv=False)[-1])
    return smin <= rank_tol * scale


def min_gain(M, n: Norm, rank_tol: float = 1e-9) -> float:
    """``min ||Mx||`` over the unit sphere of ``n``; zero for singular ``M``."""
    M = np.asarray(M, dtype=float)
    if is_singular(M, rank_tol):
        return 0.0
    return 1.0 / induced_matrix_norm(np.linalg.inv(M), n)


def spectral_radius(M) -> float:
    try:
        ev = np.linalg.eigvals(np.asarray(M, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed: {exc}") from None
    return float(np.max(np.abs(ev))) if ev.size else 0.0


def spectral_radii(stack: np.ndarray) -> np.ndarray:
    """Spectral radii of a ``(K, N, N)`` stack."""
    stack = np.asarray(stack, dtype=float)
    if len(stack) == 0:
        return np.zeros(0)
    try:
        ev = np.linalg.eigvals(stack)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed: {exc}") from None
    return np.abs(ev).max(axis=-1)


def rank(points, rank_tol: float = 1e-9) -> int:
    """Numerical rank: singular values below ``rank_tol * sigma_max`` count as zero."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        return 0
    sv = np.linalg.svd(P, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rank_tol * sv[0]))


def orthonormal_basis(vectors, rank_tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the given column vectors."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.size == 0:
        return np.zeros((V.shape[0], 0))
    U, sv, _ = np.linalg.svd(V, full_matrices=False)
    if sv[0] == 0.0:
        return np.zeros((V.shape[0], 0))
    return U[:, sv > rank_tol * sv[0]]


def null_space(M, tol: float) -> np.ndarray:
    """Columns spanning vectors ``v`` with ``|Mv| <= tol * sigma_max(M)``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    _, sv, Vh = np.linalg.svd(M, full_matrices=True)
    top = sv[0] if sv.size and sv[0] > 0 else 1.0
    full = np.zeros(Vh.shape[0])
    full[: sv.size] = sv
    return Vh[full <= tol * top].T
