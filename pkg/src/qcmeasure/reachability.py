"""Reachable sets of x(t+1) in {A_i x(t)}, product enumeration, and the
quasi-controllability decision.

Words are tuples of member indices in application order: the word
``(i1, ..., it)`` maps ``x`` to ``A_it ... A_i1 x``.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, ValidationError
from .linalg import null_space, orthonormal_basis, rank
from .model import MatrixFamily, Norm, SystemSpec, induced_matrix_norms

logger = logging.getLogger(__name__)

DEFAULT_POINT_CAP = 10**6
DEFAULT_PRODUCT_CAP = 10**6


def dedup_indices(points: np.ndarray, tol: float, p: float) -> np.ndarray:
    """Indices of the rows kept when dropping later near-duplicates.

    A row is dropped when an earlier kept row lies within ``tol`` in the
    Minkowski ``p``-metric, so the first occurrence in input order wins.
    """
    k = len(points)
    if k <= 1:
        return np.arange(k)
    tree = cKDTree(points.reshape(k, -1))
    pairs = tree.query_pairs(r=tol, p=p, output_type="ndarray")
    if len(pairs) == 0:
        return np.arange(k)
    keep = np.ones(k, dtype=bool)
    pairs = pairs[np.lexsort((pairs[:, 0], pairs[:, 1]))]
    for i, j in pairs:
        if keep[i]:
            keep[j] = False
    return np.flatnonzero(keep)


def _metric(n: Norm) -> float:
    return 1.0 if n is Norm.L1 else np.inf


@dataclass(frozen=True, eq=False)
class ReachStep:
    points: np.ndarray
    words: tuple

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(zip(self.points, self.words))


@dataclass(frozen=True, eq=False)
class ReachSet:
    """Deduplicated points of X(x, t, 0) for t = 0..s, one witness word each."""

    base_point: np.ndarray
    steps: tuple
    dedup_tol: float

    @property
    def horizon(self) -> int:
        return len(self.steps) - 1

    def all_points(self) -> np.ndarray:
        return np.concatenate([st.points for st in self.steps])

    def point_sets(self) -> list:
        return [st.points for st in self.steps]


def reach_points(f: MatrixFamily, x, s: int, dedup_tol: float = 1e-12,
                 norm: Norm = Norm.L1, cap: int = DEFAULT_POINT_CAP) -> ReachSet:
    x = np.asarray(x, dtype=float)
    if x.shape != (f.dimension,):
        raise ValidationError(f"start point has shape {x.shape}, family dimension is {f.dimension}")
    if s < 0:
        raise ValidationError("s must be nonnegative")
    A = f.stack()
    k = f.size
    pts = x[None, :].copy()
    words = [()]
    steps = [ReachStep(pts, tuple(words))]
    total = 1
    for _ in range(s):
        cand = np.einsum("kij,pj->pki", A, pts).reshape(-1, f.dimension)
        if total + len(cand) > cap:
            raise BudgetExceeded(f"reachable set would exceed {cap} points")
        keep = dedup_indices(cand, dedup_tol, _metric(norm))
        pts = cand[keep]
        words = [words[c // k] + (int(c % k),) for c in keep]
        total += len(pts)
        steps.append(ReachStep(pts, tuple(words)))
    return ReachSet(x.copy(), tuple(steps), dedup_tol)


def orbit_span_dim(f: MatrixFamily, x, s: int, rank_tol: float = 1e-9,
                   dedup_tol: float = 1e-12) -> int:
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValidationError("orbit span needs a nonzero start point")
    if s < f.dimension - 1:
        raise ValidationError(f"s must be >= N-1 = {f.dimension - 1}")
    return rank(reach_points(f, x, s, dedup_tol).all_points(), rank_tol)


@dataclass(frozen=True, eq=False)
class ProductLevel:
    length: int
    matrices: np.ndarray
    words: tuple
    norms: np.ndarray

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True, eq=False)
class ProductSet:
    """Products of every length 1..depth, deduplicated within each length."""

    depth: int
    levels: tuple
    norm: Norm

    @property
    def products(self) -> list:
        return [(m, w, float(v)) for lv in self.levels
                for m, w, v in zip(lv.matrices, lv.words, lv.norms)]

    def __len__(self) -> int:
        return sum(len(lv) for lv in self.levels)

    def stack(self, include_identity: bool = False) -> np.ndarray:
        mats = [lv.matrices for lv in self.levels]
        if include_identity and self.levels:
            n = self.levels[0].matrices.shape[-1]
            mats.insert(0, np.eye(n)[None])
        return np.concatenate(mats) if mats else np.zeros((0, 0, 0))


def next_level(A: np.ndarray, prev: np.ndarray, prev_words, dedup_tol: float):
    """Left-multiply every product by every member and dedup entrywise."""
    k = A.shape[0]
    n = A.shape[-1]
    cand = np.einsum("kij,pjl->pkil", A, prev).reshape(-1, n, n)
    keep = dedup_indices(cand.reshape(len(cand), -1), dedup_tol, np.inf)
    return cand[keep], tuple(prev_words[c // k] + (int(c % k),) for c in keep)


def enumerate_products(f: MatrixFamily, depth: int, prune_bound: Optional[float] = None,
                       norm: Norm = Norm.L1, dedup_tol: float = 1e-12,
                       cap: int = DEFAULT_PRODUCT_CAP, norm_monotone: bool = False) -> ProductSet:
    """All products of length <= depth in canonical word order.

    With ``prune_bound`` a product is not extended when even the largest
    possible extension, ``||P|| * max(1, max_i ||A_i||)**remaining``, stays
    at or below the bound. This drops products, so it is only allowed when
    the caller declares ``norm_monotone`` (searching for a norm maximum).
    """
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    if prune_bound is not None and not norm_monotone:
        raise ValueError("pruning is only valid for norm-monotone searches")
    A = f.stack()
    growth = max(1.0, float(induced_matrix_norms(A, norm).max()))
    mats = np.eye(f.dimension)[None]
    words: tuple = ((),)
    levels = []
    total = 0
    for t in range(1, depth + 1):
        if len(mats) * f.size + total > cap:
            raise BudgetExceeded(f"product enumeration would exceed {cap} products")
        mats, words = next_level(A, mats, words, dedup_tol)
        norms = induced_matrix_norms(mats, norm)
        total += len(mats)
        levels.append(ProductLevel(t, mats, words, norms))
        if prune_bound is not None and t < depth:
            live = norms * growth ** (depth - t) > prune_bound
            mats = mats[live]
            words = tuple(w for w, ok in zip(words, live) if ok)
            if len(mats) == 0:
                break
    return ProductSet(depth, tuple(levels), norm)


def words_up_to(f: MatrixFamily, s: int, dedup_tol: float = 1e-12,
                cap: int = DEFAULT_PRODUCT_CAP):
    """Identity plus all deduplicated products of length <= s, with words."""
    mats = [np.eye(f.dimension)[None]]
    words = [()]
    if s >= 1:
        ps = enumerate_products(f, s, dedup_tol=dedup_tol, cap=cap)
        for lv in ps.levels:
            mats.append(lv.matrices)
            words.extend(lv.words)
    return np.concatenate(mats), words


# --- quasi-controllability -------------------------------------------------

class QcStatus(enum.Enum):
    QUASI_CONTROLLABLE = "quasi_controllable"
    NOT_QUASI_CONTROLLABLE = "not_quasi_controllable"
    UNKNOWN = "unknown"


@dataclass(frozen=True, eq=False)
class QcVerdict:
    status: QcStatus
    witness: Optional[np.ndarray] = None  # columns: basis of a common invariant subspace
    certified_lower: Optional[float] = None
    evidence: dict = field(default_factory=dict)
    qcm: object = None  # measures.QcmEstimate when stage three ran

    @property
    def quasi_controllable(self) -> bool:
        return self.status is QcStatus.QUASI_CONTROLLABLE


def invariance_residual(f: MatrixFamily, basis: np.ndarray) -> float:
    """Largest relative distance of ``A_i b`` from ``span(basis)``."""
    Q = orthonormal_basis(basis)
    proj = np.eye(f.dimension) - Q @ Q.T
    worst = 0.0
    for A in f.members:
        scale = max(1.0, float(np.linalg.norm(A, 2)))
        worst = max(worst, float(np.linalg.norm(proj @ A @ Q, 2)) / scale)
    return worst


def is_invariant(f: MatrixFamily, basis: np.ndarray, rank_tol: float = 1e-9) -> bool:
    return invariance_residual(f, basis) <= rank_tol


def largest_invariant_within(members, Q: np.ndarray, tol: float) -> np.ndarray:
    """Largest subspace of span(Q) mapped into itself by every member."""
    while Q.shape[1] > 0:
        before = Q.shape[1]
        for A in members:
            if Q.shape[1] == 0:
                break
            proj = np.eye(Q.shape[0]) - Q @ Q.T
            R = proj @ A @ Q
            scale = max(1.0, float(np.linalg.norm(A, 2)))
            if float(np.linalg.norm(R, 2)) <= tol * scale:
                continue
            _, sv, Vh = np.linalg.svd(R)
            full = np.zeros(Q.shape[1])
            full[: sv.size] = sv
            K = Vh[full <= tol * scale].T
            Q = orthonormal_basis(Q @ K) if K.shape[1] else Q[:, :0]
        if Q.shape[1] == before:
            break
    return Q


def _eigenspaces(M: np.ndarray, tol: float) -> list:
    """Null spaces of ``M - lam I`` for each cluster of real eigenvalues."""
    ev = np.linalg.eigvals(M)
    scale = max(1.0, float(np.max(np.abs(ev))))
    real = np.sort(ev[np.abs(ev.imag) <= 1e-7 * scale].real)
    clusters: list = []
    for lam in real:
        if clusters and abs(lam - clusters[-1][-1]) <= 1e-6 * scale:
            clusters[-1].append(lam)
        else:
            clusters.append([lam])
    n = M.shape[0]
    out = []
    for cl in clusters:
        lam = float(np.mean(cl))
        V = null_space(M - lam * np.eye(n), tol)
        if V.shape[1] == 0:
            V = null_space(M - lam * np.eye(n), np.sqrt(tol))
        if V.shape[1]:
            out.append(V)
    return out


def _common_invariant_search(f: MatrixFamily, rank_tol: float, transpose: bool):
    members = [A.T for A in f.members] if transpose else list(f.members)
    n = f.dimension
    rng = np.random.default_rng(20240601)
    coeffs = rng.uniform(0.5, 1.5, size=len(members)) * rng.choice([-1.0, 1.0], len(members))
    combo = sum(c * A for c, A in zip(coeffs, members))
    for cand in [combo] + members:
        for V in _eigenspaces(cand, 1e-9):
            U = largest_invariant_within(members, V, 1e-7)
            if 0 < U.shape[1] < n:
                basis = U
                if transpose:
                    basis = null_space(U.T, 1e-12)
                    basis = orthonormal_basis(basis)
                if 0 < basis.shape[1] < n and is_invariant(f, basis, rank_tol):
                    return basis
    return None


def _probe_vectors(f: MatrixFamily, probes: int, seed: int) -> list:
    n = f.dimension
    out = [np.eye(n)[j] for j in range(n)]
    for A in f.members:
        ev, vec = np.linalg.eig(A)
        for lam, v in zip(ev, vec.T):
            if abs(lam.imag) <= 1e-9 * max(1.0, abs(lam)):
                v = v.real
                if np.any(v):
                    out.append(v / np.abs(v).sum())
    rng = np.random.default_rng(seed)
    for _ in range(probes):
        v = rng.standard_normal(n)
        out.append(v / np.abs(v).sum())
    return out


def qc_check(f: MatrixFamily, spec: Optional[SystemSpec] = None, *, probes: int = 20,
             seed: int = 0, compute_measure: bool = True) -> QcVerdict:
    """Decide quasi-controllability (no common nontrivial invariant subspace).

    Stage one searches invariant lines and hyperplanes through eigenspaces of
    the members (and of a fixed random combination), stage two checks orbit
    spans at probe vectors, stage three certifies a positive qcm_s lower
    bound. For N <= 3 stage one is exhaustive, so a zero certified bound
    still yields a quasi-controllable verdict.
    """
    if spec is None:
        spec = SystemSpec(family=f)
    tol = spec.tolerances
    n = f.dimension

    if n == 1:
        return QcVerdict(QcStatus.QUASI_CONTROLLABLE, evidence={"stage": "trivial", "reason": "N = 1"})

    for transpose in (False, True):
        W = _common_invariant_search(f, tol.rank_tol, transpose)
        if W is not None:
            kind = "common eigenvector" if W.shape[1] == 1 else "common invariant hyperplane"
            return QcVerdict(QcStatus.NOT_QUASI_CONTROLLABLE, witness=W,
                             evidence={"stage": "eigenspace", "kind": kind,
                                       "residual": invariance_residual(f, W)})

    s = max(spec.horizon_s, n - 1)
    for v in _probe_vectors(f, probes, seed):
        pts = reach_points(f, v, s, tol.dedup_tol, spec.norm).all_points()
        if rank(pts, tol.rank_tol) < n:
            W = orthonormal_basis(pts.T, tol.rank_tol)
            if 0 < W.shape[1] < n and is_invariant(f, W, tol.rank_tol):
                return QcVerdict(QcStatus.NOT_QUASI_CONTROLLABLE, witness=W,
                                 evidence={"stage": "orbit_span", "probe": v.tolist(),
                                           "span_dim": int(W.shape[1]),
                                           "residual": invariance_residual(f, W)})

    if not compute_measure:
        if n <= 3:
            return QcVerdict(QcStatus.QUASI_CONTROLLABLE,
                             evidence={"stage": "exhaustive_span",
                                       "reason": "no invariant line or hyperplane; N <= 3"})
        return QcVerdict(QcStatus.UNKNOWN, evidence={"stage": "probes_only"})

    from .measures import qcm
    est = qcm(f, s, spec.norm, spec.sphere_mesh, dedup_tol=tol.dedup_tol)
    if est.certified_lower > 0.0:
        return QcVerdict(QcStatus.QUASI_CONTROLLABLE, certified_lower=est.certified_lower,
                         evidence={"stage": "certified_measure", "s": s}, qcm=est)
    if n <= 3:
        return QcVerdict(QcStatus.QUASI_CONTROLLABLE, certified_lower=0.0,
                         evidence={"stage": "exhaustive_span",
                                   "reason": "no invariant line or hyperplane; N <= 3"},
                         qcm=est)
    return QcVerdict(QcStatus.UNKNOWN, certified_lower=0.0,
                     evidence={"stage": "inconclusive",
                               "reason": "no witness found and certified qcm_s lower bound is 0"},
                     qcm=est)
