"""Quasi-controllability measure, overshooting measure and the transient bound.

``qcm_s`` is the worst case, over starting points on the unit sphere, of the
inscribed-ball radius of the absolute convex hull of everything reachable in
at most ``s`` steps. It is 1-Lipschitz in the Hausdorff distance of those
hulls, and the hull of ``x`` moves by at most ``M_s * ||x - y||`` when the
start point moves to ``y`` (``M_s`` = largest product norm up to length s).
A grid minimum minus ``M_s`` times the grid covering radius is therefore a
certified lower bound.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _simplex
from .errors import BudgetExceeded, DegenerateMeasure, DimensionCap, NotApplicable, NumericalFailure
from .geometry import MAX_SIGN_DIMENSION, SymPolytope, inscribed_radius
from .model import MatrixFamily, Norm, SystemSpec, induced_matrix_norms, vector_norm
from .reachability import dedup_indices, next_level, reach_points, words_up_to

DEFAULT_GRID_CAP = 400_000


def _grid_resolution(mesh) -> int:
    m = math.ceil(1 / Fraction(mesh).limit_denominator(10**6))
    return max(1, int(m))


def sphere_grid(dim: int, m: int, norm: Norm, half: bool = False) -> np.ndarray:
    """All points of the unit sphere of ``norm`` with coordinates in (1/m)Z.

    With ``half`` only one of each antipodal pair is returned (the one whose
    first nonzero coordinate is positive). Order is deterministic.
    """
    if norm is Norm.L1:
        pts = []
        for comp in _compositions(m, dim):
            nz = [j for j in range(dim) if comp[j]]
            for signs in itertools.product((1, -1), repeat=len(nz)):
                if half and signs and signs[0] < 0:
                    continue
                v = list(comp)
                for j, sg in zip(nz, signs):
                    v[j] = sg * v[j]
                pts.append(v)
        arr = np.array(pts, dtype=float) / m
    else:
        ax = np.arange(-m, m + 1)
        mesh = np.stack(np.meshgrid(*([ax] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
        mesh = mesh[np.abs(mesh).max(axis=1) == m]
        if half:
            first = np.array([row[np.flatnonzero(row)[0]] for row in mesh])
            mesh = mesh[first > 0]
        arr = mesh.astype(float) / m
    return arr


def _compositions(total: int, parts: int):
    """Nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def sphere_grid_size(dim: int, m: int, norm: Norm) -> int:
    if norm is Norm.LINF:
        return (2 * m + 1) ** dim - (2 * m - 1) ** dim
    # points with exactly j nonzero coordinates: C(dim, j) * C(m-1, j-1) * 2^j
    return sum(math.comb(dim, j) * math.comb(m - 1, j - 1) * 2**j for j in range(1, dim + 1))


def covering_radius(dim: int, m: int, norm: Norm) -> float:
    """Max distance from a unit-sphere point to the nearest grid point.

    Linf: keep a coordinate at +-1 and round the others, error <= 1/(2m).
    L1: inside one orthant face, floor every m*|x_j| and round up the k
    coordinates with the largest fractional parts (k = sum of the fractional
    parts). The error is sum(f_j over rounded-down) + sum(1 - f_j over
    rounded-up), at most 2k(dim-k)/dim, maximized at k = dim // 2.
    """
    if norm is Norm.LINF:
        return 1.0 / (2 * m)
    k = dim // 2
    return 2.0 * k * (dim - k) / (dim * m)


@dataclass(frozen=True, eq=False)
class QcmEstimate:
    s: int
    certified_lower: float
    empirical_inf: float
    argmin_point: np.ndarray
    mesh: float
    lipschitz_M: float
    covering_radius: float
    grid_size: int
    norm: Norm

    def as_dict(self) -> dict:
        return {
            "s": self.s,
            "certified_lower": self.certified_lower,
            "empirical_inf": self.empirical_inf,
            "argmin": self.argmin_point.tolist(),
            "mesh": self.mesh,
            "lipschitz_M": self.lipschitz_M,
            "covering_radius": self.covering_radius,
            "grid_size": self.grid_size,
            "norm": self.norm.value,
        }


def qcm_point(f: MatrixFamily, x, s: int, n: Norm = Norm.L1, dedup_tol: float = 1e-12,
              rank_tol: float = 1e-9) -> float:
    """Inscribed-ball radius of absco of the points reachable from unit ``x`` in <= s steps."""
    x = np.asarray(x, dtype=float)
    if abs(vector_norm(x, n) - 1.0) > 1e-12:
        raise ValueError(f"x must be a unit vector in {n.value}, has norm {vector_norm(x, n)!r}")
    if s < f.dimension - 1:
        raise ValueError(f"s must be >= N-1 = {f.dimension - 1}")
    return orbit_radius(f, x, s, n, dedup_tol, rank_tol)


def orbit_radius(f: MatrixFamily, y, s: int, n: Norm = Norm.L1, dedup_tol: float = 1e-12,
                 rank_tol: float = 1e-9) -> float:
    """Like :func:`qcm_point` but for any start point (no normalization)."""
    pts = reach_points(f, np.asarray(y, dtype=float), s, dedup_tol, n).all_points()
    return inscribed_radius(SymPolytope(pts), n, rank_tol)


def product_norm_bound(f: MatrixFamily, s: int, n: Norm, dedup_tol: float = 1e-12) -> float:
    """``M_s``: the largest induced norm over products of length 0..s."""
    P, _ = words_up_to(f, s, dedup_tol)
    return float(induced_matrix_norms(P, n).max())


def qcm(f: MatrixFamily, s: Optional[int] = None, n: Norm = Norm.L1, mesh=Fraction(1, 32), *,
        dedup_tol: float = 1e-12, grid_cap: int = DEFAULT_GRID_CAP) -> QcmEstimate:
    """Bracket qcm_s on a deterministic sphere grid.

    ``empirical_inf`` is the grid minimum (an upper estimate of qcm_s),
    ``certified_lower`` the grid minimum minus ``M_s`` times the covering
    radius, clamped at zero.
    """
    N = f.dimension
    s = N if s is None else s
    if s < N - 1:
        raise ValueError(f"s must be >= N-1 = {N - 1}")
    if n is Norm.LINF and N > MAX_SIGN_DIMENSION:
        raise DimensionCap(f"Linf measure is limited to N <= {MAX_SIGN_DIMENSION}")
    m = _grid_resolution(mesh)
    size = sphere_grid_size(N, m, n)
    if size > grid_cap:
        raise BudgetExceeded(f"sphere grid has {size} points, cap is {grid_cap}")
    X = sphere_grid(N, m, n, half=True)
    P, _ = words_up_to(f, s, dedup_tol)
    keep = dedup_indices(P.reshape(len(P), -1), dedup_tol, np.inf)
    P = np.ascontiguousarray(P[keep])
    M_s = float(induced_matrix_norms(P, n).max())
    cap = 50 * (2 * len(P) + N)
    radii = _simplex.grid_radii(P, np.ascontiguousarray(X), n is Norm.L1, 1e-14, cap)
    if np.any(radii < 0):
        raise NumericalFailure("simplex iteration cap hit while evaluating the sphere grid")
    g = int(np.argmin(radii))
    inf_ = float(radii[g])
    r_cover = covering_radius(N, m, n)
    return QcmEstimate(
        s=s,
        certified_lower=max(0.0, inf_ - M_s * r_cover),
        empirical_inf=inf_,
        argmin_point=X[g].copy(),
        mesh=1.0 / m,
        lipschitz_M=M_s,
        covering_radius=r_cover,
        grid_size=size,
        norm=n,
    )


@dataclass(frozen=True, eq=False)
class OvmEstimate:
    horizon: int
    lower_bound: float
    witness_word: tuple
    witness_time: int
    certified_upper: Optional[float] = None
    profile: tuple = field(default=(), repr=False)  # (t, max explored norm, word)
    explored: int = 0

    def as_dict(self) -> dict:
        d = {
            "horizon": self.horizon,
            "lower_bound": self.lower_bound,
            "witness_word": list(self.witness_word),
            "witness_time": self.witness_time,
            "explored_products": self.explored,
        }
        if self.certified_upper is not None:
            d["certified_upper"] = self.certified_upper
        return d


def _level_norm_bounds(f: MatrixFamily, horizon: int, n: Norm, dedup_tol: float,
                       exact_budget: int = 4096) -> np.ndarray:
    """Upper bounds U[r] on the norm of any product of length r, r = 0..horizon.

    Exact maxima for short lengths (while the level stays within budget),
    then U[a+b] <= U[a] U[b] by submultiplicativity.
    """
    A = f.stack()
    U = np.full(horizon + 1, np.inf)
    U[0] = 1.0
    mats = np.eye(f.dimension)[None]
    words: tuple = ((),)
    exact = 0
    for t in range(1, horizon + 1):
        if len(mats) * f.size > exact_budget:
            break
        mats, words = next_level(A, mats, words, dedup_tol)
        U[t] = float(induced_matrix_norms(mats, n).max())
        exact = t
    for r in range(exact + 1, horizon + 1):
        U[r] = min(U[a] * U[r - a] for a in range(1, r))
    return U


def ovm_empirical(f: MatrixFamily, horizon: int, n: Norm = Norm.L1, *, dedup_tol: float = 1e-12,
                  cap: int = 10**6) -> OvmEstimate:
    """Largest induced norm over all products of length 0..horizon.

    A product is not extended when its norm times the best possible growth
    over the remaining steps cannot beat the current maximum, so the result
    is the exact maximum over every word.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    A = f.stack()
    U = _level_norm_bounds(f, horizon, n, dedup_tol)
    tail = np.maximum.accumulate(U)  # tail[r] bounds any extension by 0..r steps
    best, best_word, best_t = 1.0, (), 0
    profile = [(0, 1.0, ())]
    mats = np.eye(f.dimension)[None]
    words: tuple = ((),)
    explored = 1
    for t in range(1, horizon + 1):
        if len(mats) == 0:
            break
        if explored + len(mats) * f.size > cap:
            raise BudgetExceeded(f"overshoot search would exceed {cap} products")
        mats, words = next_level(A, mats, words, dedup_tol)
        explored += len(mats)
        norms = induced_matrix_norms(mats, n)
        j = int(np.argmax(norms))
        profile.append((t, float(norms[j]), words[j]))
        if norms[j] > best:
            best, best_word, best_t = float(norms[j]), words[j], t
        live = norms * tail[horizon - t] > best
        if not np.all(live):
            mats = mats[live]
            words = tuple(w for w, ok in zip(words, live) if ok)
    return OvmEstimate(horizon, best, best_word, best_t, None, tuple(profile), explored)


@dataclass(frozen=True, eq=False)
class TransientBound:
    qcm: QcmEstimate
    bound: float
    verdict: object  # classify.Verdict
    ovm: OvmEstimate

    @property
    def holds(self) -> bool:
        return self.ovm.lower_bound <= self.bound * (1 + 1e-9)

    def as_dict(self) -> dict:
        return {
            "qcm_lower": self.qcm.certified_lower,
            "qcm": self.qcm.as_dict(),
            "bound": self.bound,
            "stability_certificate": self.verdict.as_dict(),
            "ovm": self.ovm.as_dict(),
            "bound_holds": self.holds,
        }


STABLE_STATUSES = ("exponentially_stable", "marginal_bounded")


def transient_bound(f: MatrixFamily, spec: Optional[SystemSpec] = None, *,
                    ovm_horizon: Optional[int] = None, verdict=None) -> TransientBound:
    """Certified a-priori bound ``ovm <= 1 / qcm_s`` for a certified-stable family."""
    from .classify import classify

    if spec is None:
        spec = SystemSpec(family=f)
    if verdict is None:
        verdict = classify(f, spec)
    if verdict.status.value not in STABLE_STATUSES:
        raise NotApplicable(f"stability is not certified (classification: {verdict.status.value})")
    est = qcm(f, spec.horizon_s, spec.norm, spec.sphere_mesh, dedup_tol=spec.tolerances.dedup_tol)
    if est.certified_lower <= 0.0:
        raise DegenerateMeasure(
            f"certified qcm_{est.s} lower bound is 0 (grid minimum {est.empirical_inf:.6g})")
    bound = 1.0 / est.certified_lower
    horizon = spec.product_depth if ovm_horizon is None else ovm_horizon
    ovm = ovm_empirical(f, horizon, spec.norm, dedup_tol=spec.tolerances.dedup_tol)
    ovm = replace(ovm, certified_upper=bound)
    return TransientBound(est, bound, verdict, ovm)
