import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from conftest import random_displacement
from rigidmotion import RigidDisplacementEstimator
from rigidmotion.core import axis_angle_from_rotation
from rigidmotion.decomposition import rotation_difference
from rigidmotion.exceptions import NotRigid, TooFewPoints


def _body(rng, n=6):
    return rng.uniform(-2, 2, (n, 3))


def test_params_and_clone():
    est = RigidDisplacementEstimator(translating_point=[1, 2, 3], tol=1e-8)
    assert est.get_params() == {"translating_point": [1, 2, 3], "tol": 1e-8}
    twin = clone(est)
    assert twin.get_params()["tol"] == 1e-8 and not hasattr(twin, "displacement_")


def test_fit_transform_round_trip(rng):
    for _ in range(50):
        d = random_displacement(rng)
        x = _body(rng)
        y = d.apply(x)
        est = RigidDisplacementEstimator().fit(x, y)
        assert np.max(np.abs(est.transform(x) - y)) <= 1e-9 * max(1.0, np.max(np.abs(y)))
        probes = rng.uniform(-5, 5, (20, 3))
        assert np.allclose(est.transform(probes), d.apply(probes), atol=1e-9)
        assert np.allclose(est.inverse_transform(est.transform(probes)), probes, atol=1e-9)
        assert est.score(x, y) >= -1e-9
        oracle = axis_angle_from_rotation(d.rotation.matrix)
        assert max(rotation_difference(est.rotation_, oracle)) <= 1e-9


def test_mirror_rejected(rng):
    x = _body(rng)
    with pytest.raises(NotRigid, match="handedness"):
        RigidDisplacementEstimator().fit(x, x * np.array([1, 1, -1]))


def test_stretch_rejected(rng):
    x = _body(rng)
    with pytest.raises(NotRigid, match="distances"):
        RigidDisplacementEstimator().fit(x, 1.01 * x)


def test_shape_errors():
    with pytest.raises(ValueError):
        RigidDisplacementEstimator().fit(np.zeros((4, 2)), np.zeros((4, 2)))
    with pytest.raises(TooFewPoints):
        RigidDisplacementEstimator().fit(np.eye(3)[:2], np.eye(3)[:2])


def test_not_fitted():
    with pytest.raises(NotFittedError):
        RigidDisplacementEstimator().transform(np.zeros((1, 3)))


def test_translating_point_sets_translation(rng):
    d = random_displacement(rng)
    x = _body(rng)
    q = np.array([0.5, -1.0, 2.0])
    est = RigidDisplacementEstimator(translating_point=q).fit(x, d.apply(x))
    assert np.allclose(est.displacement_.translation, d.apply(q) - q, atol=1e-9)


def test_in_pipeline(rng):
    d = random_displacement(rng)
    x = _body(rng)
    shift = FunctionTransformer(lambda a: a + 1.0)
    est = RigidDisplacementEstimator().fit(x, d.apply(x))
    pipe = make_pipeline(shift, est)
    assert np.allclose(pipe.transform(x), d.apply(x + 1.0), atol=1e-9)
