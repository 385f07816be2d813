"""Exception hierarchy shared by all spinorsurf modules."""


class SpinorSurfError(Exception):
    """Base class for every error raised by the package."""


class JacobiViolation(SpinorSurfError, ValueError):
    pass


class DegeneratePlane(SpinorSurfError, ValueError):
    pass


class NonUnitNormal(SpinorSurfError, ValueError):
    pass


class SingularElement(SpinorSurfError, ArithmeticError):
    pass


class ShapeMismatch(SpinorSurfError, ValueError):
    pass


class InsufficientLevels(SpinorSurfError, ValueError):
    pass


class DegenerateImmersion(SpinorSurfError, ValueError):
    pass


class NonConformal(SpinorSurfError, ValueError):
    pass


class BranchInconsistency(SpinorSurfError, ValueError):
    """Square-root branches of the spinor cannot be chosen continuously.

    ``cycle`` holds the grid nodes ``(j, i)`` where the contradiction was
    detected.
    """

    def __init__(self, message, cycle=()):
        super().__init__(message)
        self.cycle = tuple(cycle)


class GroupUnsupported(SpinorSurfError, ValueError):
    pass


class ChartBlowup(SpinorSurfError, OverflowError):
    pass


class UnknownSurface(SpinorSurfError, KeyError):
    pass


class DomainViolation(SpinorSurfError, ValueError):
    pass
