"""Geometric primitives: rotations, rigid displacements, rigidity checks and
fourth-point trilateration.

Points and vectors are plain ``numpy`` arrays of shape ``(3,)``.  Rotations
are stored as axis-angle pairs with the angle in ``(-pi, pi]``; the matrix is
always derived from that pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DegenerateConfiguration,
    DegenerateTriple,
    InconsistentConstraints,
    NotARotation,
    TooFewPoints,
)

EPS_UNIT = 1e-12
EPS_ORTH = 1e-10
EPS_RIGID = 1e-9
EPS_AREA = 1e-9
EPS_ANGLE = 1e-12
EPS_TANGENT = 1e-9

Z_AXIS = np.array([0.0, 0.0, 1.0])
X_AXIS = np.array([1.0, 0.0, 0.0])


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_point(p, dim=3):
    """Return ``p`` as a finite float vector of length ``dim``."""
    a = np.asarray(p, dtype=float)
    if a.shape != (dim,):
        raise ValueError(f"expected a point with {dim} coordinates, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point coordinates must be finite")
    return a


def as_points(points, dim=None):
    a = np.asarray(points, dtype=float)
    if a.ndim != 2 or (dim is not None and a.shape[1] != dim):
        want = dim if dim is not None else "d"
        raise ValueError(f"expected an (n, {want}) array of points, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point coordinates must be finite")
    return a


def unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("cannot normalise a zero or non-finite vector")
    return v / n


def wrap_angle(angle):
    """Map ``angle`` into ``(-pi, pi]``."""
    a = math.remainder(float(angle), 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    return a


def canonical_axis_sign(axis, threshold=EPS_UNIT):
    """Flip ``axis`` so that its first component above ``threshold`` is positive."""
    for c in axis:
        if abs(c) > threshold:
            return axis if c > 0 else -axis
    return axis


def perpendicular_to(v):
    """A unit vector normal to ``v``: ``v x z``, or ``v x x`` when ``v`` is along z."""
    c = np.cross(v, Z_AXIS)
    if np.linalg.norm(c) <= EPS_UNIT:
        c = np.cross(v, X_AXIS)
    return unit(c)


def angle_between(u, v):
    """Unsigned angle between two vectors, accurate near 0 and pi."""
    return math.atan2(np.linalg.norm(np.cross(u, v)), float(np.dot(u, v)))


def axis_angle_matrix(axis, angle):
    """Rodrigues' formula for a unit ``axis``."""
    x, y, z = axis
    c = math.cos(angle)
    s = math.sin(angle)
    C = 1.0 - c
    return np.array([
        [x * x * C + c, x * y * C - z * s, x * z * C + y * s],
        [y * x * C + z * s, y * y * C + c, y * z * C - x * s],
        [z * x * C - y * s, z * y * C + x * s, z * z * C + c],
    ])


@dataclass(frozen=True, eq=False)
class Rotation:
    """Proper rotation of 3-space given by a unit axis and an angle.

    The constructor canonicalises its input: the axis is normalised, the
    angle wrapped into ``(-pi, pi]``.  Angles below ``EPS_ANGLE`` collapse to
    the identity, reported with the +z axis and ``axis_defined=False``.  At
    ``angle == pi`` the two opposite axes describe the same rotation, and the
    one whose first non-negligible component is positive is kept.
    """

    axis: np.ndarray
    angle: float
    axis_defined: bool = field(default=True)

    def __post_init__(self):
        angle = wrap_angle(self.angle)
        if not self.axis_defined or abs(angle) < EPS_ANGLE:
            object.__setattr__(self, "axis", _frozen(Z_AXIS))
            object.__setattr__(self, "angle", 0.0)
            object.__setattr__(self, "axis_defined", False)
            return
        axis = unit(as_point(self.axis))
        if math.pi - abs(angle) < EPS_ANGLE:
            angle = math.pi
            axis = canonical_axis_sign(axis)
        object.__setattr__(self, "axis", _frozen(axis))
        object.__setattr__(self, "angle", angle)

    @classmethod
    def identity(cls):
        return cls(Z_AXIS, 0.0, axis_defined=False)

    @property
    def matrix(self):
        return axis_angle_matrix(self.axis, self.angle)

    @property
    def is_identity(self):
        return not self.axis_defined

    @property
    def rotvec(self):
        return self.axis * self.angle

    def inverse(self):
        if self.is_identity:
            return self
        return Rotation(self.axis, -self.angle)

    def quaternion(self):
        h = 0.5 * self.angle
        return np.concatenate([[math.cos(h)], math.sin(h) * self.axis])

    def __repr__(self):
        if self.is_identity:
            return "Rotation.identity()"
        return f"Rotation(axis={self.axis.tolist()!r}, angle={self.angle!r})"


def rotation_apply(r, base, p):
    """Rotate point(s) ``p`` by ``r`` about the axis through ``base``."""
    base = np.asarray(base, dtype=float)
    p = np.asarray(p, dtype=float)
    return base + (p - base) @ r.matrix.T


def _quat_mul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def rotation_compose(r2, r1):
    """Rotation equivalent to applying ``r1`` first, then ``r2``.

    Both rotations are taken about axes through the same fixed point.  The
    product is formed with unit quaternions so that the matrix-based
    :func:`axis_angle_from_rotation` remains an independent check.
    """
    q = _quat_mul(r2.quaternion(), r1.quaternion())
    if q[0] < 0:
        q = -q
    v = q[1:]
    s = np.linalg.norm(v)
    angle = 2.0 * math.atan2(s, q[0])
    if angle < EPS_ANGLE or s == 0.0:
        return Rotation.identity()
    return Rotation(v / s, angle)


def is_rotation_matrix(m, tol=EPS_ORTH):
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        return False
    orth = np.max(np.abs(m.T @ m - np.eye(3)))
    return orth <= tol and abs(np.linalg.det(m) - 1.0) <= tol


def axis_angle_from_rotation(m):
    """Recover axis and angle from a rotation matrix.

    The axis is the eigenvector belonging to the eigenvalue closest to 1.
    The angle comes from ``atan2`` of the skew part projected on that axis
    against ``(trace - 1) / 2``, which keeps it accurate near 0 and pi.
    The returned angle lies in ``[0, pi]``.

    Below pi/2 the eigenvalue gap shrinks with the angle and the eigenvector
    loses digits, so the axis is then read off the skew part instead (that
    vector is parallel to the eigenvector, and well conditioned there).
    """
    m = np.asarray(m, dtype=float)
    if not is_rotation_matrix(m):
        raise NotARotation("matrix is not orthogonal with determinant +1")
    w, vecs = np.linalg.eig(m)
    k = int(np.argmin(np.abs(w - 1.0)))
    axis = np.real(vecs[:, k])
    axis = axis / np.linalg.norm(axis)
    skew = 0.5 * np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    s = float(np.dot(axis, skew))
    c = 0.5 * (np.trace(m) - 1.0)
    if s < 0:
        axis, s = -axis, -s
    angle = math.atan2(s, c)
    if angle < EPS_ANGLE:
        return Rotation.identity()
    if angle <= 0.5 * math.pi:
        axis = skew / np.linalg.norm(skew)
    return Rotation(axis, angle)


@dataclass(frozen=True, eq=False)
class RigidDisplacement:
    """Rotation about the axis through ``base_point`` followed by ``translation``.

    ``x -> base_point + R (x - base_point) + translation``.  Translating
    first and rotating about ``base_point + translation`` gives the same map.
    """

    rotation: Rotation
    base_point: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base_point", _frozen(as_point(self.base_point)))
        object.__setattr__(self, "translation", _frozen(as_point(self.translation)))

    def apply(self, points):
        return rotation_apply(self.rotation, self.base_point, points) + self.translation

    def inverse(self):
        inv = self.rotation.inverse()
        moved = self.base_point + self.translation
        return RigidDisplacement(inv, moved, -self.translation)


def _largest_side(p1, p2, p3):
    return max(np.linalg.norm(p2 - p1), np.linalg.norm(p3 - p2), np.linalg.norm(p1 - p3))


def _triangle_area(p1, p2, p3):
    c = np.cross(p2 - p1, p3 - p1)
    return 0.5 * float(np.linalg.norm(c))


@dataclass(frozen=True, eq=False)
class TripleConfiguration:
    """Three labelled non-collinear points."""

    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    labels: tuple = ("P1", "P2", "P3")

    def __post_init__(self):
        pts = [_frozen(as_point(p)) for p in (self.p1, self.p2, self.p3)]
        side = _largest_side(*pts)
        if side == 0.0 or _triangle_area(*pts) <= EPS_AREA * side**2:
            raise DegenerateTriple("the three points are collinear or coincident")
        object.__setattr__(self, "p1", pts[0])
        object.__setattr__(self, "p2", pts[1])
        object.__setattr__(self, "p3", pts[2])
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_array(cls, points, labels=("P1", "P2", "P3")):
        a = as_points(points, 3)
        if len(a) != 3:
            raise ValueError("a triple needs exactly three points")
        return cls(a[0], a[1], a[2], labels)

    def as_array(self):
        return np.vstack([self.p1, self.p2, self.p3])


@dataclass(frozen=True)
class RigidityReport:
    max_discrepancy: float
    handedness_preserved: bool
    orientation_checked: bool
    initial_orientation: float
    final_orientation: float
    tolerance: float = EPS_RIGID

    @property
    def distances_preserved(self):
        return self.max_discrepancy <= self.tolerance

    @property
    def accepted(self):
        return self.distances_preserved and self.handedness_preserved

    def reason(self):
        if not self.distances_preserved:
            return "pairwise distances not preserved"
        if not self.handedness_preserved:
            return "handedness violated"
        return "accepted"


def _pairwise_distances(a):
    diff = a[:, None, :] - a[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _orientation_simplex(a, scale):
    """Indices of the first triangle (and tetrahedron, in 3-D) that is not degenerate."""
    n, dim = a.shape
    j = next((j for j in range(1, n) if np.linalg.norm(a[j] - a[0]) > EPS_AREA * scale), None)
    if j is None:
        return None
    e1 = a[j] - a[0]
    k = None
    for idx in range(1, n):
        e2 = a[idx] - a[0]
        if dim == 2:
            area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
        else:
            area = 0.5 * np.linalg.norm(np.cross(e1, e2))
        if area > EPS_AREA * scale**2:
            k = idx
            break
    if k is None:
        return None
    if dim == 2:
        return (0, j, k)
    normal = np.cross(e1, a[k] - a[0])
    for idx in range(1, n):
        vol = abs(np.dot(normal, a[idx] - a[0])) / 6.0
        if vol > EPS_AREA * scale**3:
            return (0, j, k, idx)
    return (0, j, k)


def _signed_measure(a, simplex):
    e = [a[i] - a[simplex[0]] for i in simplex[1:]]
    if a.shape[1] == 2:
        return 0.5 * (e[0][0] * e[1][1] - e[0][1] * e[1][0])
    if len(e) == 3:
        return float(np.dot(np.cross(e[0], e[1]), e[2])) / 6.0
    return 0.0


def validate_rigidity(initial, final, tol=EPS_RIGID):
    """Compare two labelled point sets for a proper rigid correspondence.

    Distance discrepancies are measured relative to the diameter of the
    initial set.  Orientation is the sign of the signed volume of the first
    non-degenerate tetrahedron (signed area of the first triangle for 2-D
    input).  Coplanar 3-D sets carry no orientation: any mirror image of
    them is also a rotated copy.
    """
    a = as_points(initial)
    b = as_points(final)
    if a.shape != b.shape:
        raise ValueError("initial and final must have the same shape")
    if a.shape[1] not in (2, 3):
        raise ValueError("points must be 2-D or 3-D")
    if len(a) < 3:
        raise TooFewPoints("at least three points are required")
    da = _pairwise_distances(a)
    db = _pairwise_distances(b)
    scale = float(da.max())
    if scale == 0.0:
        raise DegenerateConfiguration("all points coincide")
    discrepancy = float(np.max(np.abs(db - da))) / scale
    simplex = _orientation_simplex(a, scale)
    if simplex is None:
        raise DegenerateConfiguration("all points are collinear")
    checked = a.shape[1] == 2 or len(simplex) == 4
    if checked:
        sa = _signed_measure(a, simplex)
        sb = _signed_measure(b, simplex)
        preserved = bool(np.sign(sa) == np.sign(sb))
    else:
        sa = sb = 0.0
        preserved = True
    return RigidityReport(discrepancy, preserved, checked, sa, sb, tol)


@dataclass(frozen=True, eq=False)
class FourthPointProblem:
    """Known points A, B, C and the distances of an unknown D from each."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d1: float
    d2: float
    d3: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _frozen(as_point(getattr(self, name))))
        for name in ("d1", "d2", "d3"):
            d = float(getattr(self, name))
            if not math.isfinite(d) or d < 0:
                raise ValueError(f"{name} must be finite and nonnegative")
            object.__setattr__(self, name, d)
        TripleConfiguration(self.a, self.b, self.c, ("A", "B", "C"))


def fourth_point_positions(prob):
    """Every point at distances ``d1, d2, d3`` from ``A, B, C``.

    Works in an orthonormal frame with A at the origin, B on the first axis
    and C in the first quadrant of the plane; two of the sphere equations
    become linear and the third leaves the height above the plane.  Returns
    two mirror-image points, or one when the solution lies in the plane.
    """
    A, B, C = prob.a, prob.b, prob.c
    ab = B - A
    ac = C - A
    d = np.linalg.norm(ab)
    ex = ab / d
    i = float(np.dot(ex, ac))
    ey = unit(ac - i * ex)
    ez = np.cross(ex, ey)
    j = float(np.dot(ey, ac))
    r1, r2, r3 = prob.d1, prob.d2, prob.d3

    x = (r1**2 - r2**2 + d**2) / (2.0 * d)
    y = (r1**2 - r3**2 + i**2 + j**2) / (2.0 * j) - (i / j) * x
    z2 = r1**2 - x**2 - y**2

    scale = max(d, np.linalg.norm(ac), np.linalg.norm(C - B), r1, r2, r3)
    foot = A + x * ex + y * ey
    if abs(z2) < EPS_TANGENT * scale**2:
        candidates = [foot]
    elif z2 < 0:
        raise InconsistentConstraints("the spheres about A, B and C do not intersect")
    else:
        z = math.sqrt(z2)
        candidates = [foot + z * ez, foot - z * ez]

    for p in candidates:
        res = fourth_point_residuals(prob, p)
        if np.max(res) > EPS_RIGID * scale:
            raise InconsistentConstraints(
                f"distance constraints cannot all be met (residual {np.max(res):.3g})"
            )
    return tuple(candidates)


def fourth_point_residuals(prob, p):
    p = np.asarray(p, dtype=float)
    return np.abs(np.array([
        np.linalg.norm(p - prob.a) - prob.d1,
        np.linalg.norm(p - prob.b) - prob.d2,
        np.linalg.norm(p - prob.c) - prob.d3,
    ]))


def max_relative_error(actual, expected):
    """Largest point error, relative to the size of ``expected`` (floored at 1)."""
    actual = np.atleast_2d(np.asarray(actual, dtype=float))
    expected = np.atleast_2d(np.asarray(expected, dtype=float))
    err = np.max(np.linalg.norm(actual - expected, axis=-1))
    return float(err / max(1.0, float(np.max(np.linalg.norm(expected, axis=-1)))))
