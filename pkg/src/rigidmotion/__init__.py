"""Rigid-body displacement toolkit: three-step decomposition, Euler axis,
Chasles and screw decompositions, planar motions and fourth-point
trilateration."""

from .core import (
    FourthPointProblem,
    RigidDisplacement,
    RigidityReport,
    Rotation,
    TripleConfiguration,
    axis_angle_from_rotation,
    fourth_point_positions,
    rotation_apply,
    rotation_compose,
    validate_rigidity,
)
from .decomposition import (
    PlanarDecomposition,
    ScrewDecomposition,
    TwoRotationDecomposition,
    chasles_decompose,
    chasles_independence_check,
    decompose_three_step,
    euler_axis,
    planar_decompose,
    screw_decompose,
)
from .estimator import RigidDisplacementEstimator
from .exceptions import (
    DegenerateConfiguration,
    DegenerateScene,
    DegenerateTriple,
    InconsistentConstraints,
    NoRotation,
    NotARotation,
    NotRigid,
    RadiusMismatch,
    ReflectionNotAllowed,
    RigidMotionError,
    TooFewPoints,
)
from .spherical import (
    ArcSample,
    SphereScene,
    SphericalPoint,
    bisecting_arc_point,
    build_scene,
    invariant_point_by_half_angle,
    invariant_point_by_root,
    latitude_return_angle,
    sample_arcs,
)

__version__ = "0.1.0"

__all__ = [
    "FourthPointProblem",
    "RigidDisplacement",
    "RigidityReport",
    "Rotation",
    "TripleConfiguration",
    "axis_angle_from_rotation",
    "fourth_point_positions",
    "rotation_apply",
    "rotation_compose",
    "validate_rigidity",
    "PlanarDecomposition",
    "ScrewDecomposition",
    "TwoRotationDecomposition",
    "chasles_decompose",
    "chasles_independence_check",
    "decompose_three_step",
    "euler_axis",
    "planar_decompose",
    "screw_decompose",
    "DegenerateConfiguration",
    "DegenerateScene",
    "DegenerateTriple",
    "InconsistentConstraints",
    "NoRotation",
    "NotARotation",
    "NotRigid",
    "RadiusMismatch",
    "ReflectionNotAllowed",
    "RigidMotionError",
    "TooFewPoints",
    "ArcSample",
    "SphereScene",
    "SphericalPoint",
    "bisecting_arc_point",
    "build_scene",
    "invariant_point_by_half_angle",
    "invariant_point_by_root",
    "latitude_return_angle",
    "sample_arcs",
    "RigidDisplacementEstimator",
]
