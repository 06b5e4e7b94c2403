"""Exception hierarchy shared by every module."""


class LieGeometryError(Exception):
    """Base class for all errors raised by liegeom."""


class DomainError(LieGeometryError, ValueError):
    pass


class RangeError(LieGeometryError, ArithmeticError):
    """Numeric blowup: overflow, or a denominator too close to zero."""


class TagError(LieGeometryError, TypeError):
    pass


class ConstraintError(LieGeometryError, ValueError):
    pass


class NotACuspError(ConstraintError):
    """Generators are not conjugate to a lattice of horizontal translations."""


class NotInvertibleOverZError(ConstraintError):
    pass


class OrientationError(ConstraintError):
    pass


class InvalidInvolutionError(ConstraintError):
    def __init__(self, check, detail=""):
        self.check = check
        msg = f"invalid involution: {check} failed"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class AssemblyError(LieGeometryError):
    pass


class PathError(LieGeometryError, ValueError):
    pass


class ReductionIndexError(LieGeometryError, IndexError):
    pass


class SceneError(LieGeometryError, ValueError):
    """Malformed scene file."""
