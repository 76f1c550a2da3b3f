import numpy as np
import pytest

from qcmeasure import LpProblem, LpStatus, Norm, induced_matrix_norm, min_gain, solve_lp, spectral_radius
from qcmeasure.errors import NumericalFailure

INF = np.inf


def test_box_maximum():
    out = solve_lp(LpProblem([1, 0], [([1, 0], -1, 1), ([0, 1], -1, 1)]))
    assert out.status is LpStatus.OPTIMAL
    assert out.value == pytest.approx(1.0, abs=1e-12)
    assert out.point[0] == pytest.approx(1.0)


def test_contradictory_bounds_infeasible():
    out = solve_lp(LpProblem([1], [([1], -INF, -1), ([1], 1, INF)]))
    assert out.status is LpStatus.INFEASIBLE


def test_free_direction_unbounded():
    out = solve_lp(LpProblem([1, 0], [([0, 1], -INF, 0)]))
    assert out.status is LpStatus.UNBOUNDED


def test_two_sided_rows_need_phase_one():
    # max x + y, 2 <= x + 2y <= 4, -1 <= 3x - y <= 1: vertex (6/7, 11/7)
    out = solve_lp(LpProblem([1, 1], [([1, 2], 2, 4), ([3, -1], -1, 1)]))
    assert out.status is LpStatus.OPTIMAL
    assert out.value == pytest.approx(17 / 7, rel=1e-12)
    np.testing.assert_allclose(out.point, [6 / 7, 11 / 7], rtol=1e-12)


def test_degenerate_problem_terminates():
    # Beale's classic cycling example (as a maximization), solved with Bland's rule
    c = np.array([0.75, -150, 0.02, -6])
    rows = [([0.25, -60, -0.04, 9], -INF, 0), ([0.5, -90, -0.02, 3], -INF, 0),
            ([0, 0, 1, 0], -INF, 1)] + [(np.eye(4)[j], 0, INF) for j in range(4)]
    out = solve_lp(LpProblem(c, rows))
    assert out.status is LpStatus.OPTIMAL
    assert out.value == pytest.approx(0.05, abs=1e-12)


def test_deterministic():
    rng = np.random.default_rng(0)
    rows = [(r, -1, 1) for r in rng.standard_normal((12, 3))]
    a = solve_lp(LpProblem([1, 2, 3], rows))
    b = solve_lp(LpProblem([1, 2, 3], rows))
    assert a.value == b.value
    np.testing.assert_array_equal(a.point, b.point)


@pytest.mark.parametrize("seed", range(10))
def test_no_random_feasible_point_beats_the_optimum(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    rows = rng.standard_normal((15, n))
    obj = rng.standard_normal(n)
    out = solve_lp(LpProblem(obj, [(r, -1, 1) for r in rows]), lp_tol=1e-10)
    assert out.status is LpStatus.OPTIMAL
    assert np.all(np.abs(rows @ out.point) <= 1 + 1e-10)
    samples = rng.uniform(-3, 3, size=(20000, n))
    feasible = samples[np.all(np.abs(samples @ rows.T) <= 1, axis=1)]
    assert len(feasible) > 0
    assert np.max(feasible @ obj) <= out.value + 1e-10


def test_lp_matches_scipy_on_random_problems():
    from scipy.optimize import linprog
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        rows = rng.standard_normal((10, n))
        lo = -rng.uniform(0.5, 2, 10)
        hi = rng.uniform(0.5, 2, 10)
        obj = rng.standard_normal(n)
        out = solve_lp(LpProblem.from_arrays(obj, rows, lo, hi))
        ref = linprog(-obj, A_ub=np.vstack([rows, -rows]), b_ub=np.concatenate([hi, -lo]),
                      bounds=[(None, None)] * n)
        if ref.status == 3:
            assert out.status is LpStatus.UNBOUNDED
        else:
            assert out.value == pytest.approx(-ref.fun, rel=1e-8, abs=1e-9)


def test_iteration_cap_reports_numerical_failure(monkeypatch):
    from qcmeasure import _simplex, linalg
    real = _simplex.simplex
    monkeypatch.setattr(linalg._simplex, "simplex",
                        lambda A, b, c, tol, cap: real(A, b, c, tol, 0))
    with pytest.raises(NumericalFailure):
        solve_lp(LpProblem([1, 1], [([1, 0], -1, 1), ([0, 1], -1, 1)]))


def test_min_gain_examples():
    assert min_gain(np.eye(2), Norm.L1) == 1.0
    assert min_gain([[1, 0], [0, 0]], Norm.L1) == 0.0
    # inverse of [[-1, .5], [.5, -1]] is -(4/3)[[1, .5], [.5, 1]]: column sums 2
    inv = np.linalg.inv(np.array([[-1, 0.5], [0.5, -1]]))
    np.testing.assert_allclose(inv, -4 / 3 * np.array([[1, 0.5], [0.5, 1]]))
    assert min_gain([[-1, 0.5], [0.5, -1]], Norm.L1) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("n", [Norm.L1, Norm.LINF])
def test_min_gain_inverse_identity_and_scaling(seed, n):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    g = min_gain(M, n)
    assert g * induced_matrix_norm(np.linalg.inv(M), n) == pytest.approx(1.0, abs=1e-12)
    lam = rng.uniform(-4, 4)
    assert min_gain(lam * M, n) == pytest.approx(abs(lam) * g, rel=1e-12)
    # min over the sphere: sampled points never go below
    X = rng.standard_normal((5000, 3))
    X /= (np.abs(X).sum(1) if n is Norm.L1 else np.abs(X).max(1))[:, None]
    Y = X @ M.T
    vals = np.abs(Y).sum(1) if n is Norm.L1 else np.abs(Y).max(1)
    assert vals.min() >= g - 1e-12


@pytest.mark.parametrize("M, expected", [
    (np.eye(2), 1.0),
    ([[0, 1], [0, 0]], 0.0),
    ([[0, 2], [2, 0]], 2.0),
])
def test_spectral_radius_examples(M, expected):
    assert spectral_radius(M) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_spectral_radius_of_powers(seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((3, 3))
    r = spectral_radius(M)
    for k in range(1, 5):
        assert spectral_radius(np.linalg.matrix_power(M, k)) == pytest.approx(r**k, rel=1e-9)
