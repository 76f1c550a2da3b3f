import numpy as np
import pytest

from conftest import R, SHEAR
from qcmeasure import MatrixFamily, Norm, family_distance_bound, qcm_perturbation_check
from qcmeasure.errors import ValidationError
from qcmeasure.robustness import convergence_experiment, sphere_probes


def test_distance_examples(rotation):
    assert family_distance_bound(rotation, rotation, 3) == 0.0
    f, g = MatrixFamily([0.7 * np.eye(2)]), MatrixFamily([0.4 * np.eye(2)])
    assert family_distance_bound(f, g, 1) == pytest.approx(0.3)
    E = np.array([[1e-3, -2e-3], [0.0, 5e-4]])
    A, B = 0.9 * R, 0.9 * R + E
    expected = max(np.abs(E).sum(0).max(), np.abs(B @ B - A @ A).sum(0).max())
    got = family_distance_bound(MatrixFamily([A]), MatrixFamily([B]), 2)
    assert got == pytest.approx(expected, rel=1e-12)


def test_distance_linf():
    f, g = MatrixFamily([np.eye(2)]), MatrixFamily([np.eye(2) + [[0, 0.1], [0, 0]]])
    assert family_distance_bound(f, g, 1, Norm.LINF) == pytest.approx(0.1)


def test_distance_requires_pairing(rotation):
    with pytest.raises(ValidationError):
        family_distance_bound(rotation, MatrixFamily([R, R]), 1)


def test_distance_pseudometric(rng):
    for _ in range(10):
        f, g, h = (MatrixFamily(rng.standard_normal((2, 2, 2)) * 0.7) for _ in range(3))
        fg = family_distance_bound(f, g, 3)
        assert fg == pytest.approx(family_distance_bound(g, f, 3))
        assert fg <= family_distance_bound(f, h, 3) + family_distance_bound(h, g, 3) + 1e-12


def test_probes_are_unit_and_deterministic():
    P = sphere_probes(3, 10, Norm.L1, seed=4)
    assert np.allclose(np.abs(P).sum(1), 1.0)
    assert np.array_equal(P[:3], np.eye(3))
    assert np.array_equal(P, sphere_probes(3, 10, Norm.L1, seed=4))


def test_zero_perturbation(rotation):
    rep = qcm_perturbation_check(rotation, np.zeros((1, 2, 2)), 1, probe_count=20, grids=False)
    assert rep.lipschitz_ok and rep.max_delta == 0.0 and rep.rho_s_bound == 0.0


def test_small_perturbation_preserves_qc(rotation, rng):
    deltas = rng.uniform(-1e-3, 1e-3, (1, 2, 2))
    rep = qcm_perturbation_check(rotation, deltas, 1, probe_count=50)
    assert rep.lipschitz_ok
    assert rep.rho_s_bound <= 2e-3
    assert rep.qc_preserved_certified
    assert rep.base_qcm.certified_lower > 0.4


def test_perturbation_toward_shear(rotation):
    rep = qcm_perturbation_check(rotation, [SHEAR - R], 1, probe_count=30, grids=False,
                                 hausdorff_probes=3)
    assert rep.lipschitz_ok
    assert rep.max_delta > 0.3
    assert rep.diagnostics["hull_hausdorff_max"] <= rep.rho_s_bound + 1e-9


def test_random_pairs_lipschitz(rng):
    for _ in range(10):
        f = MatrixFamily(rng.standard_normal((2, 2, 2)))
        rep = qcm_perturbation_check(f, rng.uniform(-1e-2, 1e-2, (2, 2, 2)), 2, 20, grids=False)
        assert rep.lipschitz_ok


def test_convergence_experiment():
    f = MatrixFamily([0.8 * R])
    steps = convergence_experiment(f, [[[0.1, 0.05], [0.0, 0.1]]], 2, steps=6, horizon=30)
    assert [s.scale for s in steps] == [0.5**k for k in range(6)]
    dist = [s.distance_bound for s in steps]
    assert all(b < a for a, b in zip(dist, dist[1:]))
    assert all(s.stable for s in steps[2:])
    from qcmeasure import qcm
    limit = 1 / qcm(f, 2).certified_lower
    assert steps[-1].ovm_lower <= limit + 1e-6
