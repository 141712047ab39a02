import math

import numpy as np
import pytest

from rigidmotion.core import RigidDisplacement, Rotation


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_rotation(rng):
    return Rotation(random_unit(rng), rng.uniform(-math.pi, math.pi))


def random_displacement(rng, spread=5.0):
    return RigidDisplacement(random_rotation(rng), rng.uniform(-spread, spread, 3),
                             rng.uniform(-spread, spread, 3))


def random_triple(rng, min_area=0.05):
    """Three points in a unit-ish box with a well-shaped triangle."""
    while True:
        pts = rng.uniform(-1, 1, (3, 3)) + rng.uniform(-3, 3, 3)
        e1, e2 = pts[1] - pts[0], pts[2] - pts[0]
        side = max(np.linalg.norm(e1), np.linalg.norm(e2), np.linalg.norm(pts[2] - pts[1]))
        if 0.5 * np.linalg.norm(np.cross(e1, e2)) > min_area * side**2:
            return pts


@pytest.fixture
def rng():
    return np.random.default_rng(20201016)
