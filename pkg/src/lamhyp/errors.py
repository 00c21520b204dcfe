"""Exception hierarchy shared by all modules."""


class LamhypError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(LamhypError, ValueError):
    pass


class NotApplicableError(LamhypError, ValueError):
    pass


class OffSurfaceError(LamhypError, ValueError):
    pass


class DomainError(LamhypError, ValueError):
    """Argument outside the range where a bound is claimed (e.g. lambda < 0)."""


class DegenerateCurveError(LamhypError, ValueError):
    pass


class TooFewVerticesError(LamhypError, ValueError):
    pass


class NonIntegerTurningError(LamhypError, ValueError):
    pass


class NotALambdaCurveError(LamhypError, ValueError):
    """The curve fails the lambda-curve residual precondition of an identity check."""


class CurvatureCollapseError(LamhypError, ArithmeticError):
    pass


class BelowMinimumEnergyError(LamhypError, ValueError):
    pass


class NotHalfPeriodError(LamhypError, ValueError):
    pass


class StabilityError(LamhypError, ValueError):
    """Explicit time step exceeds the parabolic stability bound."""


class PreconditionError(LamhypError, ValueError):
    pass


class DegenerateImmersionError(LamhypError, ValueError):
    pass


class PoleHandlingError(LamhypError, ArithmeticError):
    pass


class ConfigError(LamhypError, ValueError):
    pass
