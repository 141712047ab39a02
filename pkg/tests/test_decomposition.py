import math

import numpy as np
import pytest

from conftest import random_displacement, random_rotation, random_triple, random_unit
from rigidmotion.core import (
    RigidDisplacement,
    Rotation,
    axis_angle_from_rotation,
    axis_angle_matrix,
    max_relative_error,
)
from rigidmotion.decomposition import (
    IDENTITY,
    PURE_TRANSLATION,
    ROTATION,
    SCREW,
    TRANSLATION,
    TwoRotationDecomposition,
    chasles_decompose,
    chasles_independence_check,
    decompose_three_step,
    euler_axis,
    planar_decompose,
    rotation_difference,
    screw_decompose,
)
from rigidmotion.exceptions import DegenerateTriple, NotRigid, ReflectionNotAllowed

TRIPLE = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
TETRA = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def _rot_z(angle):
    return axis_angle_matrix([0, 0, 1], angle)


class TestThreeStep:
    def test_identity(self):
        d = decompose_three_step(TRIPLE, TRIPLE)
        assert np.array_equal(d.translation, np.zeros(3))
        assert d.phi == 0.0 and d.theta == 0.0

    def test_pure_translation(self):
        d = decompose_three_step(TRIPLE, TRIPLE + [1, 0, 0])
        assert np.allclose(d.translation, [1, 0, 0])
        assert d.phi == 0.0 and d.theta == 0.0

    def test_quarter_turn_about_z(self):
        final = np.array([[0, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
        d = decompose_three_step(TRIPLE, final)
        assert np.allclose(d.translation, 0)
        assert np.allclose(d.ab_axis, [0, 0, 1], atol=1e-15)
        assert d.phi == pytest.approx(math.pi / 2, abs=1e-15)
        assert d.theta == pytest.approx(0.0, abs=1e-15)
        assert np.allclose(d.replay(TRIPLE), final, atol=1e-15)

    def test_step_three_right_hand_rule(self):
        # P2 already in place; P3 turned a quarter turn about +x
        final = np.array([[0, 0, 0], [1, 0, 0], [0, -1, 0]], dtype=float)
        d = decompose_three_step(TRIPLE, final)
        assert d.phi == 0.0
        assert np.allclose(d.second_axis, [1, 0, 0])
        assert d.theta == pytest.approx(math.pi / 2, abs=1e-15)

    def test_skip_case_axis_fallback(self):
        final = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
        d = decompose_three_step(TRIPLE, final)
        assert d.phi == 0.0
        # second_axis x (+x) cross z
        assert np.allclose(d.ab_axis, [0, -1, 0])
        assert abs(np.dot(d.ab_axis, d.second_axis)) <= 1e-12
        assert np.allclose(d.replay(TRIPLE), final, atol=1e-15)

    def test_skip_case_axis_along_z(self):
        p = np.array([[0, 0, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
        q = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float)
        d = decompose_three_step(p, q)
        assert d.phi == 0.0
        assert np.allclose(d.ab_axis, [0, 1, 0])  # z x x

    def test_antipodal_case(self):
        final = np.array([[0, 0, 0], [-1, 0, 0], [0, 0, 1]], dtype=float)
        d = decompose_three_step(TRIPLE, final)
        assert d.phi == pytest.approx(math.pi)
        assert abs(np.dot(d.ab_axis, d.second_axis)) <= 1e-12
        assert np.allclose(d.replay(TRIPLE), final, atol=1e-14)

    def test_axes_are_perpendicular(self, rng):
        for _ in range(200):
            p = random_triple(rng)
            d = decompose_three_step(p, random_displacement(rng).apply(p))
            assert abs(np.dot(d.ab_axis, d.second_axis)) <= 1e-12
            assert 0.0 <= d.phi <= math.pi

    def test_replay_random(self, rng):
        for _ in range(500):
            p = random_triple(rng)
            q = random_displacement(rng).apply(p)
            assert max_relative_error(decompose_three_step(p, q).replay(p), q) <= 1e-9

    def test_errors(self):
        with pytest.raises(NotRigid):
            decompose_three_step(TRIPLE, TRIPLE * 2)
        with pytest.raises(NotRigid):
            decompose_three_step(TETRA, TETRA * [-1, 1, 1])
        line = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0]], dtype=float)
        with pytest.raises(DegenerateTriple):
            decompose_three_step(line, line)

    def test_phi_stored_in_full_turn_range(self):
        d = TwoRotationDecomposition(np.zeros(3), [0, 0, 1], -math.pi / 2, [1, 0, 0], 4.0, np.zeros(3))
        assert d.phi == pytest.approx(3 * math.pi / 2)
        assert d.theta == pytest.approx(4.0 - 2 * math.pi)


class TestEulerAxis:
    def test_identity(self):
        d = TwoRotationDecomposition(np.zeros(3), [0, 0, 1], 0.0, [1, 0, 0], 0.0, np.zeros(3))
        assert euler_axis(d).is_identity

    def test_single_rotation(self):
        d = TwoRotationDecomposition(np.zeros(3), [0, 0, 1], 0.0, [1, 0, 0], 0.7, np.zeros(3))
        r = euler_axis(d)
        assert np.allclose(r.axis, [1, 0, 0]) and r.angle == pytest.approx(0.7)

    def test_quarter_turns(self):
        # step 2 about z, then step 3 about x: Rx(90) Rz(90) fixes (1, -1, 1)
        d = TwoRotationDecomposition(np.zeros(3), [0, 0, 1], math.pi / 2, [1, 0, 0], math.pi / 2, np.zeros(3))
        r = euler_axis(d)
        oracle = axis_angle_from_rotation(axis_angle_matrix([1, 0, 0], math.pi / 2) @ _rot_z(math.pi / 2))
        assert np.allclose(r.axis, np.array([1, -1, 1]) / math.sqrt(3), atol=1e-15)
        assert r.angle == pytest.approx(2 * math.pi / 3, abs=1e-15)
        assert max(rotation_difference(r, oracle)) <= 1e-15

    def test_cyclic_configuration(self):
        final = np.array([[0, 0, 0], [0, 1, 0], [1, 0, 0]], dtype=float)
        r = euler_axis(decompose_three_step(TRIPLE, final))
        assert np.allclose(r.axis, np.ones(3) / math.sqrt(3), atol=1e-15)
        assert r.angle == pytest.approx(2 * math.pi / 3, abs=1e-15)

    def test_fixes_its_axis_and_matches_oracle(self, rng):
        for _ in range(300):
            phi = rng.uniform(0, 2 * math.pi)
            theta = rng.uniform(-math.pi, math.pi)
            ab = random_unit(rng)
            second = np.cross(ab, random_unit(rng))
            d = TwoRotationDecomposition(np.zeros(3), ab, phi, second, theta, np.zeros(3))
            r = euler_axis(d)
            assert np.linalg.norm(r.matrix @ r.axis - r.axis) <= 1e-10
            oracle = axis_angle_from_rotation(d.second_rotation.matrix @ d.first_rotation.matrix)
            axis_dev, angle_dev = rotation_difference(r, oracle)
            assert axis_dev <= 1e-9 and angle_dev <= 1e-9


class TestChasles:
    def test_identity(self, rng):
        disp = chasles_decompose(TRIPLE, TRIPLE, rng.uniform(-5, 5, 3))
        assert disp.rotation.is_identity
        assert np.array_equal(disp.translation, np.zeros(3))

    def test_pure_translation(self, rng):
        t = np.array([0.5, -2.0, 3.0])
        disp = chasles_decompose(TRIPLE, TRIPLE + t, rng.uniform(-5, 5, 3))
        assert disp.rotation.is_identity
        assert np.allclose(disp.translation, t)

    def test_two_points_same_rotation_different_translation(self):
        final = TRIPLE @ _rot_z(math.pi / 2).T
        a = chasles_decompose(TRIPLE, final, [0, 0, 0])
        b = chasles_decompose(TRIPLE, final, [3, 1, 0])
        assert max(rotation_difference(a.rotation, b.rotation)) <= 1e-15
        assert np.allclose(a.translation, 0)
        assert np.allclose(b.translation, [-4, 2, 0])

    def test_reproduces_motion(self, rng):
        for _ in range(100):
            p = random_triple(rng)
            motion = random_displacement(rng)
            disp = chasles_decompose(p, motion.apply(p), rng.uniform(-10, 10, 3))
            probes = rng.uniform(-5, 5, (20, 3))
            assert max_relative_error(disp.apply(probes), motion.apply(probes)) <= 1e-9

    def test_default_translating_point_is_p1(self):
        final = TRIPLE + [1, 2, 3]
        disp = chasles_decompose(TRIPLE, final)
        assert np.array_equal(disp.base_point, TRIPLE[0])

    def test_independence_check(self, rng):
        rep = chasles_independence_check(TRIPLE, TRIPLE, rng.uniform(-1, 1, (2, 3)))
        assert rep.max_axis_deviation == 0.0 and rep.max_angle_difference == 0.0 and rep.passed
        p = random_triple(rng)
        q = random_displacement(rng).apply(p)
        rep = chasles_independence_check(p, q, rng.uniform(-10, 10, (100, 3)))
        assert rep.passed, rep

    def test_independence_check_mirror(self, rng):
        with pytest.raises(NotRigid, match="handedness"):
            chasles_independence_check(TETRA, TETRA * [1, 1, -1], rng.uniform(-1, 1, (3, 3)))
        with pytest.raises(ValueError):
            chasles_independence_check(TRIPLE, TRIPLE, [[0, 0, 0]])


class TestRotationDifference:
    def test_sign_flip_equivalence(self):
        a = Rotation([0, 0, 1], 0.5)
        b = Rotation([0, 0, -1], -0.5)
        assert rotation_difference(a, b) == (0.0, 0.0)

    def test_near_half_turn(self):
        a = Rotation([0, 0, 1], math.pi - 1e-11)
        b = Rotation([0, 0, -1], math.pi - 1e-11)
        axis_dev, angle_dev = rotation_difference(a, b)
        assert axis_dev == 0.0 and angle_dev <= 3e-11


class TestScrew:
    def test_pure_rotation(self):
        base = np.array([1.0, 2.0, 3.0])
        s = screw_decompose(RigidDisplacement(Rotation([0, 1, 0], 0.4), base, np.zeros(3)))
        assert s.kind == SCREW and s.slide == 0.0
        assert np.allclose(s.axis_point, base)

    def test_translation_along_axis(self):
        base = np.array([1.0, 0.0, 0.0])
        s = screw_decompose(RigidDisplacement(Rotation([0, 0, 1], 0.4), base, [0, 0, 2.5]))
        assert s.kind == SCREW and s.slide == pytest.approx(2.5)
        assert np.allclose(s.axis_point, base)

    def test_half_turn_example(self):
        s = screw_decompose(RigidDisplacement(Rotation([0, 0, 1], math.pi), np.zeros(3), [1, 0, 0]))
        assert s.kind == SCREW
        assert np.allclose(s.axis_point, [0.5, 0, 0], atol=1e-15)
        assert np.allclose(s.axis_dir, [0, 0, 1])
        assert s.slide == 0.0 and s.angle == math.pi
        probes = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0], [0.5, 0.0, 7.0]])
        expected = probes @ _rot_z(math.pi).T + [1, 0, 0]
        assert np.allclose(s.apply(probes), expected, atol=1e-14)

    def test_pure_translation(self):
        s = screw_decompose(RigidDisplacement(Rotation.identity(), np.zeros(3), [0, 3, 4]))
        assert s.kind == PURE_TRANSLATION and s.angle == 0.0
        assert s.slide == pytest.approx(5.0)
        assert np.allclose(s.axis_dir, [0, 0.6, 0.8])

    def test_identity(self):
        s = screw_decompose(RigidDisplacement(Rotation.identity(), [1, 1, 1], np.zeros(3)))
        assert s.kind == IDENTITY
        assert s.slide == 0.0 and s.angle == 0.0

    def test_axis_point_in_base_plane(self, rng):
        for _ in range(100):
            d = random_displacement(rng)
            s = screw_decompose(d)
            assert abs(np.dot(s.axis_point - d.base_point, s.axis_dir)) <= 1e-9 * (1 + np.linalg.norm(s.axis_point))

    def test_reconstruction_random(self, rng):
        probes = rng.uniform(-5, 5, (100, 3))
        for _ in range(300):
            d = random_displacement(rng)
            s = screw_decompose(d)
            assert max_relative_error(s.apply(probes), d.apply(probes)) <= 1e-9
            moved = d.apply(s.axis_point) - s.axis_point
            assert np.linalg.norm(np.cross(moved, s.axis_dir)) <= 1e-10

    def test_to_displacement(self, rng):
        d = random_displacement(rng)
        back = screw_decompose(d).to_displacement()
        probes = rng.uniform(-5, 5, (10, 3))
        assert np.allclose(back.apply(probes), d.apply(probes), atol=1e-10)


class TestPlanar:
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

    def test_identity(self):
        assert planar_decompose(self.tri, self.tri).kind == IDENTITY

    def test_translation(self):
        out = planar_decompose(self.tri, self.tri + [3, 4])
        assert out.kind == TRANSLATION
        assert np.allclose(out.translation, [3, 4], atol=1e-15)

    def test_rotation_about_half_half(self):
        m = np.array([[0.0, -1.0], [1.0, 0.0]])
        out = planar_decompose(self.tri, self.tri @ m.T + [1, 0])
        assert out.kind == ROTATION
        assert np.allclose(out.center, [0.5, 0.5], atol=1e-15)
        assert out.angle == pytest.approx(math.pi / 2, abs=1e-15)

    def test_clockwise_rotation_negative_angle(self):
        c, s = math.cos(-0.3), math.sin(-0.3)
        m = np.array([[c, -s], [s, c]])
        center = np.array([2.0, -1.0])
        out = planar_decompose(self.tri, center + (self.tri - center) @ m.T)
        assert out.kind == ROTATION
        assert out.angle == pytest.approx(-0.3, abs=1e-14)
        assert np.allclose(out.center, center, atol=1e-12)

    def test_half_turn(self):
        out = planar_decompose(self.tri, -self.tri + [2, 0])
        assert out.kind == ROTATION
        assert np.allclose(out.center, [1, 0], atol=1e-15)
        assert abs(out.angle) == pytest.approx(math.pi)

    def test_reflection_rejected(self):
        with pytest.raises(ReflectionNotAllowed):
            planar_decompose(self.tri, self.tri * [-1, 1])

    def test_not_rigid(self):
        with pytest.raises(NotRigid):
            planar_decompose(self.tri, self.tri * 2)

    def test_random(self, rng):
        for _ in range(200):
            tri = rng.uniform(-3, 3, (3, 2))
            a = rng.uniform(-math.pi, math.pi)
            m = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
            final = tri @ m.T + rng.uniform(-3, 3, 2)
            try:
                out = planar_decompose(tri, final)
            except DegenerateTriple:
                continue
            assert out.kind == ROTATION
            assert np.linalg.norm(out.apply(out.center) - out.center) <= 1e-10
            assert max_relative_error(out.apply(tri), final) <= 1e-9


def test_random_rotation_helper_is_proper(rng):
    assert np.linalg.det(random_rotation(rng).matrix) == pytest.approx(1.0)
