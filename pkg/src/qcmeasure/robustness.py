"""Distances between index-paired families and perturbation experiments."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, ValidationError
from .geometry import SymPolytope, hausdorff
from .measures import QcmEstimate, ovm_empirical, qcm, qcm_point
from .model import MatrixFamily, Norm, induced_matrix_norms, vector_norms
from .reachability import reach_points


def _check_paired(f: MatrixFamily, g: MatrixFamily) -> None:
    if f.dimension != g.dimension or f.size != g.size:
        raise ValidationError("families must have the same dimension and member count")


def family_distance_bound(f: MatrixFamily, g: MatrixFamily, s: int, n: Norm = Norm.L1,
                          cap: int = 10**6) -> float:
    """max over words w, |w| <= s, of ||P_w(f) - P_w(g)||.

    Reach points of the two families pair up word by word, so this bounds the
    Hausdorff distance of the reach sets (and of their hulls) over the unit ball.
    """
    _check_paired(f, g)
    A, B = f.stack(), g.stack()
    k, N = f.size, f.dimension
    P, Q = np.eye(N)[None], np.eye(N)[None]
    best = 0.0
    total = 0
    for _ in range(s):
        total += len(P) * k
        if total > cap:
            raise BudgetExceeded(f"word enumeration would exceed {cap} products")
        P = np.einsum("kij,pjl->pkil", A, P).reshape(-1, N, N)
        Q = np.einsum("kij,pjl->pkil", B, Q).reshape(-1, N, N)
        best = max(best, float(induced_matrix_norms(P - Q, n).max()))
    return best


def sphere_probes(dim: int, count: int, n: Norm = Norm.L1, seed: int = 0) -> np.ndarray:
    """Deterministic unit vectors: coordinate axes first, then seeded random ones."""
    rng = np.random.default_rng(seed)
    probes = list(np.eye(dim))[:count]
    while len(probes) < count:
        v = rng.standard_normal(dim)
        probes.append(v / float(vector_norms(v, n)))
    return np.array(probes)


@dataclass(frozen=True, eq=False)
class PerturbReport:
    base_qcm: Optional[QcmEstimate]
    perturbed_qcm: Optional[QcmEstimate]
    rho_s_bound: float
    lipschitz_ok: bool
    per_point_checks: tuple  # (x, rho_f(x), rho_g(x), |delta|)
    qc_preserved_certified: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def max_delta(self) -> float:
        return max((c[3] for c in self.per_point_checks), default=0.0)

    def as_dict(self) -> dict:
        return {
            "rho_s_bound": self.rho_s_bound,
            "lipschitz_ok": self.lipschitz_ok,
            "max_point_delta": self.max_delta,
            "qc_preserved_certified": self.qc_preserved_certified,
            "base_qcm": self.base_qcm.as_dict() if self.base_qcm else None,
            "perturbed_qcm": self.perturbed_qcm.as_dict() if self.perturbed_qcm else None,
            "per_point_checks": [
                {"x": x.tolist(), "rho_base": a, "rho_perturbed": b, "delta": d}
                for x, a, b, d in self.per_point_checks
            ],
            **({"diagnostics": self.diagnostics} if self.diagnostics else {}),
        }


def qcm_perturbation_check(f: MatrixFamily, perturbation, s: int, n: Norm = Norm.L1,
                           probe_count: int = 50, *, mesh=Fraction(1, 32), grids: bool = True,
                           seed: int = 0, hausdorff_probes: int = 0) -> PerturbReport:
    """Compare per-point inscribed radii of ``f`` and ``f + perturbation``.

    Every probe must satisfy ``|rho_f(x) - rho_g(x)| <= family_distance_bound``.
    When ``grids`` is set both qcm_s brackets are computed too; if the base
    certified lower bound exceeds the distance bound, quasi-controllability of
    the perturbed family is certified.
    """
    g = f.perturbed(perturbation)
    bound = family_distance_bound(f, g, s, n)
    checks = []
    ok = True
    for x in sphere_probes(f.dimension, probe_count, n, seed):
        a = qcm_point(f, x, s, n)
        b = qcm_point(g, x, s, n)
        d = abs(a - b)
        ok = ok and d <= bound + 1e-9
        checks.append((x, a, b, d))
    base = pert = None
    preserved = False
    if grids:
        base = qcm(f, s, n, mesh)
        pert = qcm(g, s, n, mesh)
        preserved = base.certified_lower > bound
    diag = {}
    if hausdorff_probes:
        worst = 0.0
        for x in sphere_probes(f.dimension, hausdorff_probes, n, seed + 1):
            p = SymPolytope(reach_points(f, x, s, norm=n).all_points())
            q = SymPolytope(reach_points(g, x, s, norm=n).all_points())
            worst = max(worst, hausdorff(p, q, n))
        diag["hull_hausdorff_max"] = worst
    return PerturbReport(base, pert, bound, ok, tuple(checks), preserved, diag)


@dataclass(frozen=True)
class ConvergenceStep:
    scale: float
    distance_bound: float
    ovm_lower: float
    stable: bool


def convergence_experiment(f: MatrixFamily, perturbation, s: int, n: Norm = Norm.L1, *,
                           steps: int = 8, horizon: int = 30) -> list:
    """Shrink the perturbation by halves and track overshoot of each nearby family."""
    from .classify import classify
    from .model import SystemSpec

    out = []
    delta = np.asarray(perturbation, dtype=float)
    for k in range(steps):
        scale = 0.5**k
        g = f.perturbed(scale * delta)
        v = classify(g, SystemSpec(family=g, norm=n))
        o = ovm_empirical(g, horizon, n)
        out.append(ConvergenceStep(scale, family_distance_bound(f, g, s, n), o.lower_bound, v.stable))
    return out
