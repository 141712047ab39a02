"""Three-step displacement scheme, Euler axis, Chasles and screw decompositions,
and the planar either-rotation-or-translation split."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    EPS_ANGLE,
    EPS_RIGID,
    EPS_UNIT,
    Z_AXIS,
    RigidDisplacement,
    Rotation,
    TripleConfiguration,
    _frozen,
    angle_between,
    as_point,
    as_points,
    perpendicular_to,
    rotation_apply,
    rotation_compose,
    unit,
    validate_rigidity,
    wrap_angle,
)
from .exceptions import NotRigid, ReflectionNotAllowed

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class TwoRotationDecomposition:
    """Translation, then rotation ``phi`` about ``ab_axis``, then ``theta`` about
    ``second_axis``; both rotation axes pass through ``fixed_point``."""

    translation: np.ndarray
    ab_axis: np.ndarray
    phi: float
    second_axis: np.ndarray
    theta: float
    fixed_point: np.ndarray

    def __post_init__(self):
        for name in ("translation", "ab_axis", "second_axis", "fixed_point"):
            object.__setattr__(self, name, _frozen(as_point(getattr(self, name))))
        phi = math.fmod(float(self.phi), TWO_PI)
        if phi < 0:
            phi += TWO_PI
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def first_rotation(self):
        return Rotation(self.ab_axis, self.phi)

    @property
    def second_rotation(self):
        return Rotation(self.second_axis, self.theta)

    def replay(self, points):
        """Apply the three steps, in order, to ``points``."""
        p = np.asarray(points, dtype=float) + self.translation
        p = rotation_apply(self.first_rotation, self.fixed_point, p)
        return rotation_apply(self.second_rotation, self.fixed_point, p)


def _configurations(initial, final):
    """Triples for the construction, after checking the full point sets.

    Either argument may be a TripleConfiguration or an ``(n, 3)`` array with
    ``n >= 3``; extra rows only take part in the rigidity check, which is
    where a reflection of a non-planar body is caught.
    """
    a = initial.as_array() if isinstance(initial, TripleConfiguration) else as_points(initial, 3)
    b = final.as_array() if isinstance(final, TripleConfiguration) else as_points(final, 3)
    if a.shape != b.shape:
        raise ValueError("initial and final must have the same shape")
    report = validate_rigidity(a, b)
    if not report.accepted:
        raise NotRigid(report.reason(), report)
    if not isinstance(initial, TripleConfiguration):
        initial = TripleConfiguration.from_array(a[:3])
    if not isinstance(final, TripleConfiguration):
        final = TripleConfiguration.from_array(b[:3])
    return initial, final


def decompose_three_step(initial, final):
    """Split the motion of P1, P2, P3 into a translation and two rotations.

    Step 1 carries P1 onto P1'.  Step 2 turns P2'' (P2 after step 1) onto P2'
    about the normal of the plane P1' P2'' P2'.  Step 3 turns about the line
    P1' P2' until P3 lands on P3'; its angle follows the right-hand rule about
    ``unit(P2' - P1')``.
    """
    initial, final = _configurations(initial, final)

    p1, p2, p3 = initial.p1, initial.p2, initial.p3
    q1, q2, q3 = final.p1, final.p2, final.p3
    translation = q1 - p1
    u = p2 - p1  # P1' -> P2''
    v = q2 - q1  # P1' -> P2'
    second_axis = unit(v)
    size = np.linalg.norm(u)

    if np.linalg.norm(v - u) <= EPS_RIGID * size:
        # P2'' already sits on P2': step 2 is skipped
        ab_axis = perpendicular_to(second_axis)
        phi = 0.0
    elif np.linalg.norm(v + u) <= EPS_RIGID * size:
        w3 = p3 - p1
        normal = np.cross(u, w3)
        if np.linalg.norm(normal) > EPS_UNIT * size * np.linalg.norm(w3):
            ab_axis = unit(normal)
        else:
            ab_axis = perpendicular_to(second_axis)
        phi = math.pi
    else:
        ab_axis = unit(np.cross(u, v))
        ab_axis = unit(ab_axis - np.dot(ab_axis, second_axis) * second_axis)
        phi = angle_between(u, v)

    r1 = Rotation(ab_axis, phi)
    w3 = (p3 - p1) @ r1.matrix.T  # P1' -> P3''
    target = q3 - q1  # P1' -> P3'
    a = w3 - np.dot(w3, second_axis) * second_axis
    b = target - np.dot(target, second_axis) * second_axis
    theta = math.atan2(float(np.dot(second_axis, np.cross(a, b))), float(np.dot(a, b)))

    return TwoRotationDecomposition(translation, ab_axis, phi, second_axis, theta, q1)


def euler_axis(decomp):
    """The single rotation about ``decomp.fixed_point`` equal to steps 2 and 3."""
    return rotation_compose(decomp.second_rotation, decomp.first_rotation)


def chasles_decompose(initial, final, translating_point=None):
    """Translation of ``translating_point`` plus a rotation about an axis through it.

    The rotation is obtained afresh from the triple ``Q1, Q2, Q3`` with
    ``Q1`` the translating point and ``Qk - Q1 = Pk - P1``, carried along by
    the same motion.  ``translating_point`` defaults to P1 and need not be a
    point of the body.
    """
    initial, final = _configurations(initial, final)
    decomp = decompose_three_step(initial, final)
    if translating_point is None:
        q = initial.p1
    else:
        q = as_point(translating_point)
    rot = euler_axis(decomp)
    motion = RigidDisplacement(rot, initial.p1, decomp.translation)

    offsets = np.vstack([np.zeros(3), initial.p2 - initial.p1, initial.p3 - initial.p1])
    q_initial = q + offsets
    q_final = motion.apply(q_initial)
    rebased = decompose_three_step(q_initial, q_final)
    return RigidDisplacement(euler_axis(rebased), q, rebased.translation)


def rotation_difference(ra, rb):
    """Axis deviation and angle difference between two rotations.

    ``(n, t)`` and ``(-n, -t)`` are the same rotation, so the sign pairing
    with the smaller combined deviation is used.  Axes are not compared when
    either rotation is the identity.
    """
    if ra.is_identity or rb.is_identity:
        return 0.0, abs(wrap_angle(ra.angle - rb.angle))
    pairs = []
    for sign in (1.0, -1.0):
        d_axis = angle_between(ra.axis, sign * rb.axis)
        d_angle = abs(wrap_angle(ra.angle - sign * rb.angle))
        pairs.append((d_axis + d_angle, d_axis, d_angle))
    _, d_axis, d_angle = min(pairs)
    return d_axis, d_angle


@dataclass(frozen=True)
class IndependenceReport:
    max_axis_deviation: float
    max_angle_difference: float
    n_points: int
    tolerance: float = 1e-9

    @property
    def passed(self):
        return self.max_axis_deviation <= self.tolerance and self.max_angle_difference <= self.tolerance


def chasles_independence_check(initial, final, sample_points, tol=1e-9):
    """Decompose about every sample point and compare the rotation parts."""
    pts = as_points(sample_points, 3)
    if len(pts) < 2:
        raise ValueError("need at least two translating points")
    rotations = [chasles_decompose(initial, final, q).rotation for q in pts]
    ref = rotations[0]
    axis_dev = angle_dev = 0.0
    for r in rotations[1:]:
        da, dt = rotation_difference(ref, r)
        axis_dev = max(axis_dev, da)
        angle_dev = max(angle_dev, dt)
    return IndependenceReport(axis_dev, angle_dev, len(pts), tol)


SCREW = "screw"
PURE_TRANSLATION = "pure-translation"
IDENTITY = "identity"


@dataclass(frozen=True, eq=False)
class ScrewDecomposition:
    """Rotation ``angle`` about the line through ``axis_point`` along
    ``axis_dir``, followed by a slide of ``slide`` along that line."""

    axis_point: np.ndarray
    axis_dir: np.ndarray
    angle: float
    slide: float
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "axis_point", _frozen(as_point(self.axis_point)))
        object.__setattr__(self, "axis_dir", _frozen(as_point(self.axis_dir)))

    @property
    def rotation(self):
        if self.kind != SCREW:
            return Rotation.identity()
        return Rotation(self.axis_dir, self.angle)

    def apply(self, points):
        moved = rotation_apply(self.rotation, self.axis_point, points)
        return moved + self.slide * self.axis_dir

    def to_displacement(self):
        return RigidDisplacement(self.rotation, self.axis_point, self.slide * self.axis_dir)


def _plane_basis(n):
    e1 = perpendicular_to(n)
    return e1, np.cross(n, e1)


def screw_decompose(d, eps_translation=EPS_UNIT):
    """Screw (Mozzi) axis of a rigid displacement.

    The translation ``F`` is split into ``g n`` along the rotation axis and
    ``s`` across it.  The axis point ``q`` is the point, in the plane through
    ``d.base_point`` normal to ``n``, whose rotation displacement is ``-s``:
    ``(M - I)(q - base) = -s``.
    """
    F = np.asarray(d.translation, dtype=float)
    base = np.asarray(d.base_point, dtype=float)
    rot = d.rotation
    if rot.is_identity or abs(rot.angle) < EPS_ANGLE:
        size = float(np.linalg.norm(F))
        if size <= eps_translation:
            return ScrewDecomposition(base, Z_AXIS, 0.0, 0.0, IDENTITY)
        return ScrewDecomposition(base, F / size, 0.0, size, PURE_TRANSLATION)

    n = rot.axis
    g = float(np.dot(F, n))
    s = F - g * n
    e1, e2 = _plane_basis(n)
    E = np.column_stack([e1, e2])
    A = E.T @ (rot.matrix - np.eye(3)) @ E
    x = np.linalg.solve(A, -(E.T @ s))
    return ScrewDecomposition(base + E @ x, n, rot.angle, g, SCREW)


ROTATION = "rotation"
TRANSLATION = "translation"


@dataclass(frozen=True, eq=False)
class PlanarDecomposition:
    kind: str
    center: np.ndarray | None = None
    angle: float = 0.0
    translation: np.ndarray | None = None

    def apply(self, points):
        p = np.asarray(points, dtype=float)
        if self.kind == ROTATION:
            c, s = math.cos(self.angle), math.sin(self.angle)
            m = np.array([[c, -s], [s, c]])
            return self.center + (p - self.center) @ m.T
        if self.kind == TRANSLATION:
            return p + self.translation
        return p.copy()


def planar_decompose(initial, final):
    """Classify a planar rigid motion of three points as rotation, translation or identity.

    The motion is lifted to 3-D with z = 0 and handed to the screw
    decomposition; the screw axis is then either normal to the plane (a
    rotation about its trace) or absent (a translation).
    """
    a = as_points(initial, 2)
    b = as_points(final, 2)
    if a.shape != (3, 2) or b.shape != (3, 2):
        raise ValueError("planar decomposition takes exactly three 2-D points")
    report = validate_rigidity(a, b)
    if not report.distances_preserved:
        raise NotRigid(report.reason(), report)
    if not report.handedness_preserved:
        raise ReflectionNotAllowed("handedness violated: signed area changed sign", report)

    lift = np.zeros((3, 3))
    lift[:, :2] = a
    lifted_final = np.zeros((3, 3))
    lifted_final[:, :2] = b
    disp = chasles_decompose(lift, lifted_final)
    screw = screw_decompose(disp)

    if screw.kind == IDENTITY:
        return PlanarDecomposition(IDENTITY, angle=0.0)
    if screw.kind == PURE_TRANSLATION:
        t = screw.slide * screw.axis_dir[:2]
        return PlanarDecomposition(TRANSLATION, translation=_frozen(t))
    angle = screw.angle if screw.axis_dir[2] > 0 else -screw.angle
    return PlanarDecomposition(ROTATION, center=_frozen(screw.axis_point[:2]), angle=wrap_angle(angle))
