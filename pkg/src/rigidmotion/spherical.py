"""The sphere around the fixed point and the invariant-point constructions.

The sphere is centred on P1' and passes through P2'' and P2'.  Its poles A
and B lie on the first rotation axis, so P2'' and P2' sit on the equator.
Points on the sphere are handled as unit directions from the centre.

Arc parameter ``t`` runs along the bisecting meridian A-D-B, from the pole A
(``t = 0``) to the equatorial midpoint D (``t = 1``) as a fraction of the
quarter-circle colatitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EPS_ANGLE, EPS_RIGID, EPS_UNIT, _frozen, angle_between, as_point, axis_angle_matrix, unit
from .exceptions import DegenerateScene, NoRotation, RadiusMismatch, RigidMotionError

TWO_PI = 2.0 * math.pi
MAX_ARC_STEP = math.radians(2.0)


@dataclass(frozen=True, eq=False)
class SphereScene:
    center: np.ndarray
    radius: float
    a_pole: np.ndarray
    b_pole: np.ndarray
    p2_initial: np.ndarray
    p2_final: np.ndarray
    phi: float
    theta: float

    @classmethod
    def from_angles(cls, phi, theta, pole=(0.0, 0.0, 1.0), p2_initial=(1.0, 0.0, 0.0),
                    center=(0.0, 0.0, 0.0), radius=1.0):
        """Scene in which P2' is P2'' turned by ``phi`` about ``pole``."""
        a = unit(as_point(pole))
        u = as_point(p2_initial)
        u = unit(u - np.dot(u, a) * a)
        v = axis_angle_matrix(a, phi) @ u
        return cls(_frozen(as_point(center)), float(radius), _frozen(a), _frozen(-a),
                   _frozen(u), _frozen(v), float(phi) % TWO_PI, float(theta))

    @property
    def phi_degenerate(self):
        return self.phi < EPS_ANGLE or TWO_PI - self.phi < EPS_ANGLE

    @property
    def bisector_direction(self):
        """D: P2'' turned by half of ``phi`` about the pole."""
        return _turn(self.a_pole, 0.5 * self.phi, self.p2_initial)

    @property
    def first_matrix(self):
        return axis_angle_matrix(self.a_pole, self.phi)

    @property
    def second_matrix(self):
        return axis_angle_matrix(self.p2_final, self.theta)

    @property
    def composed_matrix(self):
        return self.second_matrix @ self.first_matrix

    def to_world(self, direction):
        return self.center + self.radius * np.asarray(direction, dtype=float)


@dataclass(frozen=True, eq=False)
class SphericalPoint:
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "direction", _frozen(unit(as_point(self.direction))))


@dataclass(frozen=True, eq=False)
class ArcSample:
    label: str
    points: np.ndarray


def _turn(axis, angle, v):
    c, s = math.cos(angle), math.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1.0 - c)


def spherical_angle(vertex, p, q):
    """Angle at ``vertex`` between the great-circle arcs towards ``p`` and ``q``."""
    tp = p - np.dot(p, vertex) * vertex
    tq = q - np.dot(q, vertex) * vertex
    return math.atan2(np.linalg.norm(np.cross(tp, tq)), float(np.dot(tp, tq)))


def build_scene(decomp, p2_initial_world, p2_final_world):
    """Sphere about ``decomp.fixed_point`` through P2'' and P2', poles on ``ab_axis``."""
    center = np.asarray(decomp.fixed_point, dtype=float)
    u = as_point(p2_initial_world) - center
    v = as_point(p2_final_world) - center
    ru, rv = np.linalg.norm(u), np.linalg.norm(v)
    if abs(ru - rv) > EPS_RIGID * max(ru, rv):
        raise RadiusMismatch(f"P2'' and P2' are at distances {ru:.12g} and {rv:.12g} from the centre")
    a = unit(decomp.ab_axis)
    equator = []
    for w in (u / ru, v / rv):
        if abs(np.dot(w, a)) > 1.0 - EPS_UNIT:
            raise DegenerateScene("P2 direction is parallel to the pole axis")
        equator.append(unit(w - np.dot(w, a) * a))
    return SphereScene(_frozen(center), float(ru), _frozen(a), _frozen(-a),
                       _frozen(equator[0]), _frozen(equator[1]), float(decomp.phi), float(decomp.theta))


def _arc_point(scene, t, pole):
    c = 0.5 * math.pi * t
    return math.cos(c) * pole + math.sin(c) * scene.bisector_direction


def bisecting_arc_point(scene, t):
    """Point at fraction ``t`` of the way from A down the bisecting meridian to D."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    return SphericalPoint(_arc_point(scene, t, scene.a_pole))


def _cross(p, q):
    return (p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0])


def _dot(p, q):
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def _angle_at(v, p, q):
    # scalar twin of spherical_angle for the bisection loops
    dp, dq = _dot(p, v), _dot(q, v)
    tp = (p[0] - dp * v[0], p[1] - dp * v[1], p[2] - dp * v[2])
    tq = (q[0] - dq * v[0], q[1] - dq * v[1], q[2] - dq * v[2])
    c = _cross(tp, tq)
    return math.atan2(math.sqrt(_dot(c, c)), _dot(tp, tq))


class _Meridian:
    """Scalar view of one scene, built once per root search."""

    def __init__(self, scene, pole):
        self.pole = tuple(float(c) for c in pole)
        self.d = tuple(float(c) for c in scene.bisector_direction)
        self.v = tuple(float(c) for c in scene.p2_final)
        self.rot = [tuple(float(c) for c in row) for row in scene.first_matrix]

    def point(self, t):
        c = 0.5 * math.pi * t
        cc, sc = math.cos(c), math.sin(c)
        return tuple(cc * p + sc * d for p, d in zip(self.pole, self.d))

    def return_angle(self, t):
        m = self.point(t)
        moved = tuple(_dot(row, m) for row in self.rot)
        return _angle_at(self.v, m, moved)

    def half_angle(self, t):
        return _angle_at(self.v, self.point(t), self.pole)


def latitude_return_angle(scene, t):
    """Angle at P2' between the arcs to M and to M', the image of M under the
    first rotation; it is the turn about P1'P2' that brings M' back onto M."""
    if scene.phi_degenerate:
        raise DegenerateScene("phi is zero: the lune between the meridians is empty")
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    m = _arc_point(scene, t, scene.a_pole)
    m_moved = _turn(scene.a_pole, scene.phi, m)
    v = scene.p2_final
    if abs(angle_between(v, m) - angle_between(v, m_moved)) > EPS_RIGID:
        raise RigidMotionError("M and M' are not on one latitude circle about P2'")
    return spherical_angle(v, m, m_moved)


def _bisect(f, target, max_iter=200):
    """Root of the increasing function ``f(t) - target`` on ``[0, 1]``,
    bisected until the bracket can no longer shrink."""
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _invariant_point(scene, measure, target_of):
    theta = scene.theta
    if abs(theta) < EPS_ANGLE:
        raise NoRotation("theta is zero: only the first rotation acts")
    if scene.phi_degenerate:
        # only the turn about P1'P2' is left, whose axis is the fixed direction
        d = scene.p2_final if theta > 0 else -scene.p2_final
        return SphericalPoint(d)
    target = target_of(abs(theta))
    t = _bisect(getattr(_Meridian(scene, scene.a_pole), measure), target)
    pole = scene.a_pole if theta > 0 else scene.b_pole
    return SphericalPoint(_arc_point(scene, t, pole))


def invariant_point_by_root(scene):
    """The point of the bisecting arc sent back onto itself by both rotations.

    Bisection on the latitude return angle, which grows monotonically from 0
    at A to pi at D; the root is where it equals ``|theta|``.  For negative
    ``theta`` the mirror point below the equator is returned.
    """
    return _invariant_point(scene, "return_angle", lambda a: a)


def invariant_point_by_half_angle(scene):
    """X on the arc A-D-B where the angle at P2' between arcs P2'X and P2'A is
    ``theta / 2``.  Negative ``theta`` measures from B in the mirrored scene."""
    return _invariant_point(scene, "half_angle", lambda a: 0.5 * a)


def _slerp_polyline(p, q, resolution, through=None):
    """Great-circle polyline from ``p`` to ``q`` (via ``through`` for arcs of pi)."""
    if through is not None:
        first = _slerp_polyline(p, through, resolution)
        second = _slerp_polyline(through, q, resolution)
        return np.vstack([first, second[1:]])
    omega = angle_between(p, q)
    n = max(resolution, int(math.ceil(omega / MAX_ARC_STEP)) + 1)
    if omega == 0.0:
        return np.repeat(p[None, :], n, axis=0)
    axis = unit(np.cross(p, q))
    pts = np.array([_turn(axis, omega * k / (n - 1), p) for k in range(n)])
    pts[0], pts[-1] = p, q
    return pts


def _circle_about(pole, through, resolution, sweep=TWO_PI, start=None):
    start = through if start is None else start
    n = max(resolution, int(math.ceil(abs(sweep) / MAX_ARC_STEP)) + 1)
    return np.array([_turn(pole, sweep * k / (n - 1), start) for k in range(n)])


def sample_arcs(scene, resolution=32):
    """Polylines (world coordinates) for the arcs and points of the construction.

    Meridians A-P2''-B, A-D-B, A-P2'-B, A-D'-B and A-P2'''-B; the equatorial
    arcs P2''-D-P2' and P2'-D'-P2'''; latitude arcs L-M-N and H-Q-S; the
    latitude circle about P2' through X; and single-point samples A, B, D,
    D' and X.  X and its circle are left out when no invariant point exists.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    a, b = scene.a_pole, scene.b_pole
    u, v = scene.p2_initial, scene.p2_final
    d = scene.bisector_direction
    rot1 = scene.first_matrix
    d_moved = rot1 @ d
    u3 = rot1 @ v  # P2'''

    arcs = []

    def add(label, dirs):
        arcs.append(ArcSample(label, scene.to_world(np.asarray(dirs))))

    for label, e in (("A-P2''-B", u), ("A-D-B", d), ("A-P2'-B", v), ("A-D'-B", d_moved), ("A-P2'''-B", u3)):
        add(label, _slerp_polyline(a, b, resolution, through=e))
    add("P2''-D-P2'", _circle_about(a, u, resolution, sweep=scene.phi))
    add("P2'-D'-P2'''", _circle_about(a, v, resolution, sweep=scene.phi))
    for label, t in (("L-M-N", 2.0 / 3.0), ("H-Q-S", 1.0 / 3.0)):
        c = 0.5 * math.pi * t
        start = math.cos(c) * a + math.sin(c) * u
        add(label, _circle_about(a, start, resolution, sweep=scene.phi))

    singles = [("A", a), ("B", b), ("D", d), ("D'", d_moved)]
    if not scene.phi_degenerate and abs(scene.theta) >= EPS_ANGLE:
        x = invariant_point_by_root(scene).direction
        add("latitude-X", _circle_about(v, x, resolution))
        singles.append(("X", x))
    for label, p in singles:
        add(label, [p])
    return arcs
