"""Desynchronized and vertex families, their analytic qcm_N lower bounds, and
the stable-but-not-quasi-controllable limit sequence.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import NormUnsupported, ValidationError
from .linalg import min_gain
from .model import MatrixFamily, Norm

EIGEN_TOL = 1e-9
NEAR_DEGENERATE_TOL = 1e-6


def _square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix has non-finite entries")
    return A


def desync_family(A) -> MatrixFamily:
    """Members A_i: the identity with row i replaced by row i of A."""
    A = _square(A)
    n = A.shape[0]
    members = []
    for i in range(n):
        M = np.eye(n)
        M[i] = A[i]
        members.append(M)
    return MatrixFamily(members, [f"A{i + 1}" for i in range(n)])


def vertex_family(A) -> MatrixFamily:
    """Members D_i A, where D_i flips the sign of coordinate i."""
    A = _square(A)
    n = A.shape[0]
    members = []
    for i in range(n):
        M = A.copy()
        M[i] = -M[i]
        members.append(M)
    return MatrixFamily(members, [f"V{i + 1}" for i in range(n)])


def irreducible(A) -> bool:
    """Strong connectivity of the off-diagonal sparsity graph (i -> j when a_ij != 0)."""
    A = _square(A)
    n = A.shape[0]
    if n == 1:
        return True
    adj = (A != 0).astype(int)
    np.fill_diagonal(adj, 0)
    ncomp, _ = connected_components(adj, directed=True, connection="strong")
    return ncomp == 1


def counterexample_family(eps: float, delta: float) -> MatrixFamily:
    """Single member [[1 - eps, delta], [0, 1 - eps]]."""
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie in (0, 1), got {eps!r}")
    return MatrixFamily([[[1 - eps, delta], [0, 1 - eps]]], ["A"])


@dataclass(frozen=True)
class BoundReport:
    alpha: float
    beta: float
    bound: float
    applicable: bool
    reasons: tuple = field(default=())

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "bound": self.bound,
                "applicable": self.applicable, "reasons": list(self.reasons)}


def _min_offdiag(A: np.ndarray) -> float:
    off = np.abs(A[~np.eye(A.shape[0], dtype=bool)])
    off = off[off != 0]
    return float(off.min()) if off.size else 0.0


def _eigen_reasons(A: np.ndarray, target: float) -> list:
    dist = float(np.min(np.abs(np.linalg.eigvals(A) - target)))
    if dist <= EIGEN_TOL:
        return [f"{target:g} is an eigenvalue"]
    if dist <= NEAR_DEGENERATE_TOL:
        return [f"near-degenerate: an eigenvalue lies within {dist:.3g} of {target:g}"]
    return []


def _bound(A, shift: float, alpha_scale: float, beta_scale: float, n: Norm) -> BoundReport:
    if n is not Norm.L1:
        raise NormUnsupported("the analytic bound is stated for the L1 norm only")
    A = _square(A)
    N = A.shape[0]
    reasons = _eigen_reasons(A, shift)
    if not irreducible(A):
        reasons.append("A reducible")
    alpha = alpha_scale / N * min_gain(A - shift * np.eye(N), Norm.L1)
    beta = beta_scale * _min_offdiag(A)
    applicable = not reasons
    if applicable and N >= 2:
        # irreducible with N >= 2 forces a nonzero off-diagonal entry
        assert beta > 0
    bound = alpha * beta ** (N - 1) if applicable else 0.0
    return BoundReport(alpha, beta, bound, applicable, tuple(reasons))


def desync_qcm_bound(A, n: Norm = Norm.L1) -> BoundReport:
    """alpha = min ||(A - I)x|| / (2N), beta = half the least nonzero |a_ij| (i != j)."""
    return _bound(A, 1.0, 0.5, 0.5, n)


def vertex_qcm_bound(A, n: Norm = Norm.L1) -> BoundReport:
    """alpha = min ||Ax|| / N, beta = least nonzero |a_ij| (i != j)."""
    return _bound(A, 0.0, 1.0, 1.0, n)
