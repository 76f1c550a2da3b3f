"""Symmetric polytopes absco(W) = co(W u -W): span, inscribed ball, distances."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _simplex
from .errors import DimensionCap, NumericalFailure
from .linalg import LpProblem, LpStatus, rank, solve_lp
from .model import Norm

#: Largest dimension for which the Linf-ball case enumerates sign objectives.
MAX_SIGN_DIMENSION = 10


@dataclass(frozen=True, eq=False)
class SymPolytope:
    """The absolute convex hull of a finite generator set."""

    generators: np.ndarray

    def __init__(self, generators, dimension: int | None = None):
        g = np.asarray(generators, dtype=float)
        if g.ndim == 1:
            g = g.reshape(1, -1) if g.size else g.reshape(0, dimension or 0)
        if g.ndim != 2:
            raise ValueError("generators must be a list of vectors")
        if dimension is not None and g.shape[1] != dimension:
            raise ValueError(f"generators have dimension {g.shape[1]}, expected {dimension}")
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)

    @property
    def dimension(self) -> int:
        return self.generators.shape[1]

    def __len__(self) -> int:
        return self.generators.shape[0]

    def scaled(self, factor: float) -> "SymPolytope":
        return SymPolytope(factor * self.generators)

    def support(self, c) -> float:
        """Support function max <c, y> over the polytope."""
        if len(self) == 0:
            return 0.0
        return float(np.max(np.abs(self.generators @ np.asarray(c, dtype=float))))


def span_dim(points, rank_tol: float = 1e-9) -> int:
    return rank(points, rank_tol)


def _lp_cap(k: int, n: int) -> int:
    return 50 * (2 * k + n)


def inscribed_radius(p: SymPolytope, n: Norm, rank_tol: float = 1e-9) -> float:
    """Largest ``rho`` with the ``n``-ball of radius ``rho`` inside ``p``.

    Computed as ``1 / max ||c||_*`` over the polar ``{c : |<c, w>| <= 1}``.
    """
    N = p.dimension
    if n is Norm.LINF and N > MAX_SIGN_DIMENSION:
        raise DimensionCap(f"Linf inscribed radius is limited to N <= {MAX_SIGN_DIMENSION}, got {N}")
    if len(p) == 0 or span_dim(p.generators, rank_tol) < N:
        return 0.0
    G = np.ascontiguousarray(p.generators)
    value = _simplex.polar_dual_max(G, n is Norm.L1, _lp_cap(len(G), N))
    if value < 0.0:
        raise NumericalFailure("polar maximization hit the simplex iteration cap")
    if not np.isfinite(value) or value <= 0.0:
        return 0.0
    return 1.0 / value


def _distance_problem(x: np.ndarray, W: np.ndarray, n: Norm) -> LpProblem:
    # variables: lam (k), mag (k) with mag >= |lam|, sum(mag) <= 1, then the
    # epigraph variables (N for L1, one for Linf)
    k, N = W.shape
    n_eps = N if n is Norm.L1 else 1
    dim = 2 * k + n_eps
    obj = np.zeros(dim)
    obj[2 * k:] = -1.0
    cons = []
    for i in range(k):
        row = np.zeros(dim)
        row[k + i] = 1.0
        row[i] = -1.0
        cons.append((row, 0.0, np.inf))
        row = np.zeros(dim)
        row[k + i] = 1.0
        row[i] = 1.0
        cons.append((row, 0.0, np.inf))
    row = np.zeros(dim)
    row[k:2 * k] = 1.0
    cons.append((row, -np.inf, 1.0))
    for j in range(N):
        e = 2 * k + (j if n is Norm.L1 else 0)
        # eps_j >= x_j - (W^T lam)_j and eps_j >= (W^T lam)_j - x_j
        row = np.zeros(dim)
        row[:k] = W[:, j]
        row[e] = 1.0
        cons.append((row, x[j], np.inf))
        row = np.zeros(dim)
        row[:k] = -W[:, j]
        row[e] = 1.0
        cons.append((row, -x[j], np.inf))
    return LpProblem(obj, cons)


def point_distance(x, p: SymPolytope, n: Norm, lp_tol: float = 1e-10) -> float:
    """Distance in ``n`` from ``x`` to the polytope."""
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dimension,):
        raise ValueError(f"point has shape {x.shape}, polytope dimension is {p.dimension}")
    if len(p) == 0:
        return float(np.sum(np.abs(x)) if n is Norm.L1 else np.max(np.abs(x), initial=0.0))
    out = solve_lp(_distance_problem(x, p.generators, n), lp_tol)
    if out.status is not LpStatus.OPTIMAL:
        raise NumericalFailure(f"distance LP ended {out.status.value}")
    return max(0.0, -out.value)


def directed_hausdorff(p: SymPolytope, q: SymPolytope, n: Norm, lp_tol: float = 1e-10) -> float:
    """``max_{y in p} d(y, q)``, attained at a generator of ``p`` (or its negative)."""
    best = 0.0
    for w in p.generators:
        best = max(best, point_distance(w, q, n, lp_tol))
    return best


def hausdorff(p: SymPolytope, q: SymPolytope, n: Norm, lp_tol: float = 1e-10) -> float:
    if p.dimension != q.dimension:
        raise ValueError("polytopes live in different dimensions")
    return max(directed_hausdorff(p, q, n, lp_tol), directed_hausdorff(q, p, n, lp_tol))
