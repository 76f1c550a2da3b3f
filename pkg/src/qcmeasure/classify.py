"""Stability classification: exponentially stable, absolutely exponentially
unstable, or Lyapunov stable with non-decaying trajectories.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, ValidationError
from .linalg import spectral_radii
from .model import MatrixFamily, Norm, SystemSpec, induced_matrix_norms, vector_norms
from .reachability import dedup_indices, next_level, qc_check, reach_points

#: A product with spectral radius above 1 + this is treated as expanding.
SPECTRAL_TOL = 1e-9


class Status(enum.Enum):
    EXPONENTIALLY_STABLE = "exponentially_stable"
    ABSOLUTELY_EXPONENTIALLY_UNSTABLE = "absolutely_exponentially_unstable"
    MARGINAL_BOUNDED = "marginal_bounded"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class JsrBounds:
    lower: float
    upper: float
    lower_word: tuple = ()
    upper_length: int = 0

    def as_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper,
                "lower_word": list(self.lower_word), "upper_length": self.upper_length}


def _norm_root(x: float, t: int) -> float:
    return x ** (1.0 / t) if x > 0 else 0.0


def jsr_bounds(f: MatrixFamily, depth: int, n: Norm = Norm.L1, *, dedup_tol: float = 1e-12,
               cap: int = 10**6) -> JsrBounds:
    """Joint spectral radius bracket from products of length <= depth.

    lower = max rho(P)^(1/t), upper = min over t of (max ||P|| at length t)^(1/t).
    """
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    A = f.stack()
    mats = np.eye(f.dimension)[None]
    words: tuple = ((),)
    lower, lower_word = 0.0, ()
    upper, upper_t = math.inf, 0
    total = 0
    for t in range(1, depth + 1):
        if total + len(mats) * f.size > cap:
            raise BudgetExceeded(f"product enumeration would exceed {cap} products")
        mats, words = next_level(A, mats, words, dedup_tol)
        total += len(mats)
        rho = spectral_radii(mats)
        j = int(np.argmax(rho))
        if _norm_root(rho[j], t) > lower:
            lower, lower_word = _norm_root(rho[j], t), words[j]
        u = _norm_root(float(induced_matrix_norms(mats, n).max()), t)
        if u < upper:
            upper, upper_t = u, t
    return JsrBounds(lower, upper, lower_word, upper_t)


@dataclass(frozen=True, eq=False)
class Verdict:
    status: Status
    certificate: dict = field(default_factory=dict)
    mu: Optional[float] = None
    epsilon: Optional[float] = None
    gamma: Optional[float] = None
    jsr: Optional[JsrBounds] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def stable(self) -> bool:
        return self.status in (Status.EXPONENTIALLY_STABLE, Status.MARGINAL_BOUNDED)

    def as_dict(self) -> dict:
        d = {"status": self.status.value, "certificate": self.certificate}
        for key in ("mu", "epsilon", "gamma"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        if self.jsr is not None:
            d["jsr"] = self.jsr.as_dict()
        if self.diagnostics:
            d["diagnostics"] = self.diagnostics
        return d


def _word_product(f: MatrixFamily, word) -> np.ndarray:
    P = np.eye(f.dimension)
    for i in word:
        P = f[i] @ P
    return P


def _in_set(M: np.ndarray, S: np.ndarray, tol: float) -> bool:
    if len(S) == 0:
        return False
    return bool(np.any(np.abs(S - M).reshape(len(S), -1).max(axis=1) <= tol))


def verify_certificate(f: MatrixFamily, v: Verdict, n: Norm = Norm.L1, dedup_tol: float = 1e-12) -> bool:
    """Re-check a verdict's certificate from its stored data alone."""
    c = v.certificate
    if v.status is Status.EXPONENTIALLY_STABLE:
        t = c["depth"]
        mats = np.eye(f.dimension)[None]
        words: tuple = ((),)
        for _ in range(t):
            mats, words = next_level(f.stack(), mats, words, dedup_tol)
        top = float(induced_matrix_norms(mats, n).max())
        return top < 1.0 and abs(top - c["max_norm"]) <= 1e-12 * max(1.0, top)
    if v.status is Status.ABSOLUTELY_EXPONENTIALLY_UNSTABLE:
        P = _word_product(f, c["word"])
        return float(spectral_radii(P[None])[0]) > 1.0 + SPECTRAL_TOL and bool(c["quasi_controllable"])
    if v.status is Status.MARGINAL_BOUNDED:
        S = np.array(c["semigroup"], dtype=float)
        for A in f.members:
            for M in S:
                if not _in_set(A @ M, S, dedup_tol):
                    return False
        mu = max(1.0, float(induced_matrix_norms(S, n).max()))
        return abs(mu - c["mu"]) <= 1e-12 * mu and mu >= 1.0
    return True


def classify(f: MatrixFamily, spec: Optional[SystemSpec] = None, *, max_depth: int = 10_000,
             extend_budget: int = 100_000, closure_budget: int = 20_000) -> Verdict:
    """Classify the family by enumerating products level by level.

    Levels are explored at least up to ``spec.product_depth``; beyond that the
    search continues (up to ``max_depth``) while the cumulative number of
    distinct products stays within ``extend_budget``. It stops at the first
    of: a length-t norm bound below 1 (exponentially stable), a product with
    spectral radius above 1 (unstable), or closure of the product semigroup
    (bounded).
    """
    if spec is None:
        spec = SystemSpec(family=f)
    n = spec.norm
    tol = spec.tolerances.dedup_tol
    A = f.stack()
    N = f.dimension
    mats = np.eye(N)[None]
    words: tuple = ((),)
    seen: list = []
    closure_ok = True
    level_max = [1.0]
    lower, lower_word = 0.0, ()
    upper, upper_t = math.inf, 0
    total = 0
    t = 0
    while True:
        t += 1
        if t > max(spec.product_depth, 1) and (t > max_depth or total > extend_budget):
            break
        if total + len(mats) * f.size > 10 * extend_budget:
            break
        mats, words = next_level(A, mats, words, tol)
        total += len(mats)
        norms = induced_matrix_norms(mats, n)
        level_max.append(float(norms.max()))
        rho = spectral_radii(mats)
        j = int(np.argmax(rho))
        r_t = _norm_root(float(rho[j]), t)
        if r_t > lower:
            lower, lower_word = r_t, words[j]
        u = _norm_root(level_max[-1], t)
        if u < upper:
            upper, upper_t = u, t
        jsr = JsrBounds(lower, upper, lower_word, upper_t)

        if level_max[-1] < 1.0:
            return Verdict(
                Status.EXPONENTIALLY_STABLE,
                certificate={"depth": t, "max_norm": level_max[-1], "rate": u},
                mu=max(level_max[:-1]),
                epsilon=-math.log(u) if u > 0 else math.inf,
                jsr=jsr,
            )
        if rho[j] > 1.0 + SPECTRAL_TOL:
            word = words[j]
            qc = qc_check(f, spec)
            cert = {"word": list(word), "length": len(word), "spectral_radius": float(rho[j]),
                    "quasi_controllable": qc.quasi_controllable, "qc_status": qc.status.value}
            eps = math.log(rho[j]) / len(word)
            if qc.quasi_controllable:
                return Verdict(Status.ABSOLUTELY_EXPONENTIALLY_UNSTABLE, certificate=cert,
                               epsilon=eps, jsr=jsr,
                               diagnostics={"nearby_families_unstable": True})
            return Verdict(Status.INCONCLUSIVE, certificate={}, epsilon=eps, jsr=jsr,
                           diagnostics={"unstable": True, "reason": "expanding product but "
                                        "quasi-controllability not established", **cert})

        if closure_ok:
            if seen:
                S = np.concatenate(seen)
                fresh = [M for M in mats if not _in_set(M, S, tol)]
            else:
                fresh = list(mats)
            if not fresh:
                mu = max(1.0, float(induced_matrix_norms(S, n).max()))
                return Verdict(Status.MARGINAL_BOUNDED,
                               certificate={"semigroup": S.tolist(), "size": len(S),
                                            "mu": mu, "closed_at": t},
                               mu=mu, epsilon=0.0, jsr=jsr)
            seen.append(np.stack(fresh))
            if sum(len(x) for x in seen) > closure_budget:
                closure_ok = False
    return Verdict(Status.INCONCLUSIVE, jsr=JsrBounds(lower, upper, lower_word, upper_t),
                   diagnostics={"depth_reached": t - 1, "products": total,
                                "reason": "no norm certificate below 1, no expanding product, "
                                          "semigroup did not close"})


@dataclass(frozen=True)
class InstabilityProfile:
    epsilon_estimate: float
    growth: tuple  # (t, min over samples of max reach norm)

    def as_dict(self) -> dict:
        return {"epsilon_estimate": self.epsilon_estimate,
                "growth": [[t, g] for t, g in self.growth]}


def instability_profile(f: MatrixFamily, horizon: int, sample_count: int = 10,
                        n: Norm = Norm.L1, *, seed: int = 0, dedup_tol: float = 1e-12,
                        cap: int = 10**6) -> InstabilityProfile:
    """Fit the exponent of worst-case-over-starts, best-over-switching growth.

    For each random unit start u, g_u(t) = max norm over the reach set at
    step t; the estimate is the least-squares slope of ln(min_u g_u(t))
    against t over the second half of the horizon.
    """
    if horizon < 10:
        raise ValidationError("horizon must be >= 10")
    rng = np.random.default_rng(seed)
    worst = np.full(horizon + 1, np.inf)
    for _ in range(sample_count):
        u = rng.standard_normal(f.dimension)
        u /= float(vector_norms(u, n))
        rs = reach_points(f, u, horizon, dedup_tol, n, cap)
        g = np.array([float(vector_norms(st.points, n).max()) for st in rs.steps])
        worst = np.minimum(worst, g)
    ts = np.arange(horizon // 2, horizon + 1)
    with np.errstate(divide="ignore"):
        y = np.log(worst[ts])
    if not np.all(np.isfinite(y)):
        return InstabilityProfile(-math.inf, tuple(zip(range(horizon + 1), worst.tolist())))
    slope = float(np.polyfit(ts, y, 1)[0])
    return InstabilityProfile(slope, tuple(zip(range(horizon + 1), worst.tolist())))
