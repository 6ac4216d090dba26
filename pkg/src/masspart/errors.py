"""Exception types shared across the package."""


class MasspartError(Exception):
    """Base class for all errors raised by masspart."""


class ZeroVector(MasspartError):
    pass


class NearEquator(MasspartError):
    pass


class AtInfinity(MasspartError):
    pass


class DegenerateMap(MasspartError):
    pass


class DimensionMismatch(MasspartError):
    pass


class ParseError(MasspartError):
    pass


class AtomOnBoundary(MasspartError):
    pass


class DegenerateProjection(MasspartError):
    pass


class NoBisection(MasspartError):
    pass


class BlockMismatch(MasspartError):
    pass


class InfeasibleDimension(MasspartError):
    pass


class GeneralPositionViolation(MasspartError):
    pass


class UnsupportedDimension(MasspartError):
    pass


class AliasingError(MasspartError):
    pass


class NearZero(MasspartError):
    pass


class ExceedsDeskScale(MasspartError):
    """Search dimension beyond what the desk-scale solvers support."""
