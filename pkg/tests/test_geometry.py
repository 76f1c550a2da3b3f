import numpy as np
import pytest

from oracles import hull_distance_planar, hull_distance_sampling, inscribed_radius_bruteforce, segment_distance_l1
from qcmeasure import Norm, SymPolytope, hausdorff, inscribed_radius, point_distance, span_dim
from qcmeasure.errors import DimensionCap


@pytest.mark.parametrize("pts, expected", [
    ([[1, 0]], 1),
    ([[1, 0], [0, 1]], 2),
    ([[1, 1], [2, 2]], 1),
])
def test_span_dim(pts, expected):
    assert span_dim(pts) == expected


def test_inscribed_radius_examples():
    assert inscribed_radius(SymPolytope([[1, 0], [0, 1]]), Norm.L1) == pytest.approx(1.0, abs=1e-14)
    assert inscribed_radius(SymPolytope([[1, 0]], 2), Norm.L1) == 0.0
    # polar contains c = (2, 0): max sup-norm 2, so radius 1/2
    half = SymPolytope([[0.5, 0.5], [-0.5, 0.5]])
    assert inscribed_radius_bruteforce(half.generators) == pytest.approx(0.5)
    assert inscribed_radius(half, Norm.L1) == pytest.approx(0.5, abs=1e-14)


def test_linf_ball_in_cross_polytope():
    # unit Linf ball of radius r fits in the unit L1 ball iff N r <= 1
    for N in (2, 3, 4):
        assert inscribed_radius(SymPolytope(np.eye(N)), Norm.LINF) == pytest.approx(1 / N, rel=1e-12)


def test_linf_dimension_cap():
    with pytest.raises(DimensionCap):
        inscribed_radius(SymPolytope(np.eye(11)), Norm.LINF)
    assert inscribed_radius(SymPolytope(np.eye(11)), Norm.L1) == pytest.approx(1.0)


def _random_generators(rng, N):
    k = int(rng.integers(N, 13))
    return rng.standard_normal((k, N))


@pytest.mark.parametrize("norm", [Norm.L1, Norm.LINF])
def test_oracle_equivalence(norm):
    rng = np.random.default_rng(11)
    for _ in range(40):
        N = int(rng.choice([2, 3]))
        W = _random_generators(rng, N)
        got = inscribed_radius(SymPolytope(W), norm)
        ref = inscribed_radius_bruteforce(W, norm.value)
        assert got == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("norm", [Norm.L1, Norm.LINF])
def test_ball_inclusion(norm):
    rng = np.random.default_rng(5)
    W = rng.standard_normal((7, 3))
    p = SymPolytope(W)
    rho = inscribed_radius(p, norm)
    C = rng.standard_normal((200, 3))
    dual = np.abs(C).max(1) if norm is Norm.L1 else np.abs(C).sum(1)
    support = np.abs(C @ W.T).max(1)
    assert np.all(support >= rho * dual - 1e-10)


def test_scaling_and_monotonicity():
    rng = np.random.default_rng(8)
    for _ in range(10):
        W = rng.standard_normal((5, 3))
        rho = inscribed_radius(SymPolytope(W), Norm.L1)
        lam = rng.uniform(-3, 3)
        assert inscribed_radius(SymPolytope(lam * W), Norm.L1) == pytest.approx(abs(lam) * rho, rel=1e-10)
        more = np.vstack([W, rng.standard_normal(3)])
        assert inscribed_radius(SymPolytope(more), Norm.L1) >= rho - 1e-12


def test_point_distance_examples():
    p = SymPolytope([[1, 0], [0, 1]])
    assert point_distance([0, 0], p, Norm.L1) == pytest.approx(0.0, abs=1e-12)
    assert point_distance([0, 1], p, Norm.L1) == pytest.approx(0.0, abs=1e-12)
    assert hull_distance_sampling([2, 0], [[1, 0], [0, 1]]) == pytest.approx(1.0, abs=1e-6)
    assert point_distance([2, 0], p, Norm.L1) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("norm", [Norm.L1, Norm.LINF])
def test_point_distance_against_sampling(norm):
    rng = np.random.default_rng(2)
    for _ in range(5):
        W = rng.standard_normal((3, 2))
        x = rng.standard_normal(2) * 3
        got = point_distance(x, SymPolytope(W), norm)
        ref = hull_distance_planar(x, W, norm.value)
        assert got <= ref + 1e-9
        assert got == pytest.approx(ref, abs=1e-3)


def test_hausdorff_examples():
    unit = SymPolytope([[1, 0], [0, 1]])
    assert hausdorff(unit, unit, Norm.L1) == pytest.approx(0.0, abs=1e-12)
    assert hausdorff(unit, unit.scaled(2), Norm.L1) == pytest.approx(1.0, abs=1e-12)
    assert segment_distance_l1([0, 1], [1, 0]) == pytest.approx(1.0)
    assert hausdorff(unit, SymPolytope([[1, 0]]), Norm.L1) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("norm", [Norm.L1, Norm.LINF])
def test_hausdorff_metric_axioms(norm):
    rng = np.random.default_rng(4)
    for _ in range(6):
        p, q, r = (SymPolytope(rng.standard_normal((3, 2))) for _ in range(3))
        pq, qp = hausdorff(p, q, norm), hausdorff(q, p, norm)
        assert pq == pytest.approx(qp, abs=1e-9)
        assert pq <= hausdorff(p, r, norm) + hausdorff(r, q, norm) + 1e-9
