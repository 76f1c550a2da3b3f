import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import R, SHEAR, UNITS
from oracles import orbit_points
from qcmeasure import (MatrixFamily, Norm, QcStatus, desync_family, enumerate_products,
                       orbit_span_dim, qc_check, reach_points)
from qcmeasure.errors import BudgetExceeded, ValidationError
from qcmeasure.reachability import invariance_residual, is_invariant


def _as_set(points):
    return {tuple(np.round(p, 12)) for p in points}


def test_rotation_orbit(rotation):
    rs = reach_points(rotation, [1, 0], 4)
    assert [tuple(s.points[0]) for s in rs.steps] == [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 0)]
    assert rs.horizon == 4


def test_desync_pair_steps():
    f = desync_family([[0, 0.5], [0.5, 0]])
    rs = reach_points(f, [1, 0], 2)
    assert _as_set(rs.steps[1].points) == {(0.0, 0.0), (1.0, 0.5)}
    assert rs.steps[1].words == ((0,), (1,))


def test_dedup_keeps_first_word(identity2):
    f = MatrixFamily([np.eye(2), np.eye(2)])
    rs = reach_points(f, [1, 2], 3)
    assert all(len(s) == 1 for s in rs.steps)
    assert rs.steps[3].words == ((0, 0, 0),)


def test_words_apply_left_to_right():
    f = MatrixFamily([SHEAR, R])
    rs = reach_points(f, [1, 2], 2)
    for pts, word in rs.steps[2]:
        expected = np.array([1.0, 2.0])
        for i in word:
            expected = f[i] @ expected
        assert np.allclose(pts, expected)


def test_reach_matches_brute_force(rng):
    f = MatrixFamily(rng.standard_normal((3, 3, 3)))
    x = rng.standard_normal(3)
    got = reach_points(f, x, 3).all_points()
    ref = orbit_points(list(f), x, 3)
    assert len(got) == len(ref)
    assert _as_set(got) == _as_set(ref)


def test_reach_validation(rotation):
    with pytest.raises(ValidationError):
        reach_points(rotation, [1, 0, 0], 2)
    with pytest.raises(ValidationError):
        reach_points(rotation, [1, 0], -1)
    with pytest.raises(BudgetExceeded):
        reach_points(MatrixFamily([R, SHEAR, 2 * SHEAR]), [1, 0.3], 12, cap=1000)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3), st.integers(0, 2**31 - 1))
def test_linearity(c, seed):
    g = np.random.default_rng(seed)
    f = MatrixFamily(g.standard_normal((2, 2, 2)))
    x = g.standard_normal(2)
    a = reach_points(f, x, 3)
    b = reach_points(f, c * x, 3)
    for sa, sb in zip(a.steps, b.steps):
        assert sa.words == sb.words
        assert np.allclose(c * sa.points, sb.points)


def test_composition(rng):
    f = MatrixFamily(rng.standard_normal((2, 2, 2)))
    x = rng.standard_normal(2)
    whole = _as_set(reach_points(f, x, 4).steps[4].points)
    mid = reach_points(f, x, 2).steps[2].points
    joined = set()
    for y in mid:
        joined |= _as_set(reach_points(f, y, 2).steps[2].points)
    assert whole == joined


def test_orbit_span_dim_examples(rotation, shear, identity2):
    assert orbit_span_dim(rotation, [1, 0], 1) == 2
    assert orbit_span_dim(shear, [1, 0], 1) == 1
    assert orbit_span_dim(shear, [0, 1], 1) == 2
    assert orbit_span_dim(identity2, [1, 1], 3) == 1
    with pytest.raises(ValidationError):
        orbit_span_dim(rotation, [0, 0], 1)
    with pytest.raises(ValidationError):
        orbit_span_dim(MatrixFamily([np.eye(3)]), [1, 0, 0], 1)


def test_enumerate_products_examples(matrix_units):
    ps = enumerate_products(matrix_units, 2)
    assert [len(lv) for lv in ps.levels] == [2, 3]
    mats = ps.stack()
    assert len(mats) == 5
    assert any(np.allclose(m, 0) for m in mats)
    assert all(len(w) == lv.length for lv in ps.levels for w in lv.words)


def test_enumerate_products_rotation(rotation):
    ps = enumerate_products(rotation, 8)
    assert len(ps) == 8
    assert np.allclose(ps.levels[3].matrices[0], np.eye(2))
    assert ps.stack(include_identity=True).shape == (9, 2, 2)


def test_enumerate_products_guards(rotation):
    with pytest.raises(ValidationError):
        enumerate_products(rotation, 0)
    with pytest.raises(ValueError):
        enumerate_products(rotation, 3, prune_bound=1.0)


def test_qc_examples(rotation, shear, identity2, matrix_units):
    v = qc_check(rotation)
    assert v.status is QcStatus.QUASI_CONTROLLABLE and v.quasi_controllable
    assert qc_check(matrix_units).quasi_controllable
    for f in (shear, identity2):
        v = qc_check(f)
        assert v.status is QcStatus.NOT_QUASI_CONTROLLABLE
        assert v.witness is not None
        assert is_invariant(f, v.witness)
        assert 0 < v.witness.shape[1] < 2


def test_qc_hyperplane_witness():
    # common invariant plane e1, e2 but no common eigenvector
    A = np.zeros((3, 3))
    A[:2, :2] = R
    A[:, 2] = [1, 2, 2]
    B = np.zeros((3, 3))
    B[:2, :2] = SHEAR.T
    B[:, 2] = [0, 1, 3]
    f = MatrixFamily([A, B])
    v = qc_check(f)
    assert v.status is QcStatus.NOT_QUASI_CONTROLLABLE
    assert v.witness.shape[1] == 2
    assert invariance_residual(f, v.witness) < 1e-9


def test_qc_random_families_are_qc(rng):
    for _ in range(5):
        f = MatrixFamily(rng.standard_normal((2, 3, 3)))
        assert qc_check(f).quasi_controllable


def test_qc_block_diagonal_not_qc(rng):
    for _ in range(5):
        mats = []
        for _ in range(2):
            M = np.zeros((4, 4))
            M[:2, :2] = rng.standard_normal((2, 2))
            M[2:, 2:] = rng.standard_normal((2, 2))
            mats.append(M)
        f = MatrixFamily(mats)
        v = qc_check(f)
        assert v.status is QcStatus.NOT_QUASI_CONTROLLABLE
        assert is_invariant(f, v.witness)


def test_qc_trivial_dimension():
    assert qc_check(MatrixFamily([[[0.5]]])).quasi_controllable
