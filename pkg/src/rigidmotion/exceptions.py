"""Exception hierarchy for rigidmotion."""


class RigidMotionError(Exception):
    """Base class for all errors raised by this package."""


class NotARotation(RigidMotionError, ValueError):
    pass


class TooFewPoints(RigidMotionError, ValueError):
    pass


class DegenerateConfiguration(RigidMotionError, ValueError):
    pass


class DegenerateTriple(DegenerateConfiguration):
    pass


class InconsistentConstraints(RigidMotionError, ValueError):
    """The three distance spheres have no common point."""


class NotRigid(RigidMotionError, ValueError):
    """Initial and final configurations are not related by a proper rigid motion."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ReflectionNotAllowed(NotRigid):
    pass


class RadiusMismatch(RigidMotionError, ValueError):
    pass


class DegenerateScene(RigidMotionError, ValueError):
    pass


class NoRotation(RigidMotionError, ValueError):
    pass
